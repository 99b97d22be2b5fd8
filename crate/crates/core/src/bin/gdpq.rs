fn main() {
    std::process::exit(gdpq::cli::run(std::env::args_os()));
}
