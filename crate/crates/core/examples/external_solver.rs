//! Exports a model as LP and runs a solver command on it. Set
//! GDPQ_SOLVER_CMD (with `{file}`, `{time_limit}`, `{gap}` placeholders) to
//! use a real solver; otherwise a stand-in script prints a canned log.
//!
//! GDPQ_SOLVER_CMD='my-solver {file} --time {time_limit}' cargo run --example external_solver

use gdpq::gen::{gen_random, RandomGdpParams};
use gdpq::io::{export_lp, parse_solver_log, run_external_solver, SolverPatterns, SolverRun};
use gdpq::reform::{reformulate, Method, ReformConfig};

fn main() {
    let gdp = gen_random(&RandomGdpParams::new(2, 2, 2, 2, 5).convex()).unwrap();
    let (minlp, _) = reformulate(&gdp, &ReformConfig::new(Method::HullExact)).unwrap();
    let dir = std::env::temp_dir();
    let file = dir.join("external_solver_example.lp");
    std::fs::write(&file, export_lp(&minlp).unwrap()).unwrap();

    let command = std::env::var("GDPQ_SOLVER_CMD")
        .unwrap_or_else(|_| "wc -l {file} >/dev/null && printf 'Status: optimal\\nObjective: 1.25\\nBound: 1.25\\n'".into());
    let run = SolverRun::new(command, 60.0);
    match run_external_solver(&file, &run) {
        Ok(r) => println!("{}", serde_json::to_string_pretty(&r).unwrap()),
        Err(e) => println!("solver failed: {e}"),
    }

    // The same parser applied to a saved log.
    let log = "Status: time-limit\nBound: -3.5\n";
    println!("{:?}", parse_solver_log(log, &SolverPatterns::default(), true).unwrap());
}
