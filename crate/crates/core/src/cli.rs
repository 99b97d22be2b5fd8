//! Command-line front end. Exit codes: 0 clean, 1 check failure, 2 usage,
//! 3 I/O, 4 external tool.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::bench::{performance_profile, run_suite, summarize, write_csv, Check, SuiteManifest};
use crate::gen::{ClayInstance, CstrParams, GeneratorParams, KmeansParams, RandomGdpParams};
use crate::io::{
    export_lp, read_model_file, run_external_solver, write_model, DocumentMetadata, ModelDocument, Payload, SolverError, SolverRun,
};
use crate::model::{for_each_assignment, GdpModel, MinlpModel, RowBody};
use crate::oracle::{
    check_containment, check_poly_hull, check_s1_s2, fixed_binary_check, random_polynomial, random_quadratic, MembershipReport,
    PerspectiveSampler, MAX_ASSIGNMENTS,
};
use crate::reform::{eps_hull_parts, exact_hull_row, is_psd, reformulate, BigmStrategy, Method, ReformConfig, ReformError, DEFAULT_EPS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_EXTERNAL: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<ReformError> for CliError {
    fn from(e: ReformError) -> Self {
        CliError::usage(e.to_string())
    }
}

type CliResult = Result<i32, CliError>;

#[derive(Debug, Parser)]
#[command(name = "gdpq", version, about = "Reformulate disjunctive programs into MINLPs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a model document from a benchmark family.
    Generate(GenerateArgs),
    /// Transform a GDP document into a MINLP (JSON or LP).
    Reformulate(ReformulateArgs),
    /// Run a sampling check; exits 0 only when it is clean.
    Verify(VerifyArgs),
    /// Run a suite manifest and write CSV records.
    Bench(BenchArgs),
    /// Export a model as LP and hand it to an external solver command.
    SolveExternal(SolveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Random,
    Kmeans,
    Cstr,
    Clay,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub family: Family,
    /// Family parameters as JSON; defaults are used when omitted (required
    /// for clay).
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Overrides the seed of random and kmeans parameters.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stage count for the default cstr parameters.
    #[arg(long, default_value_t = 2)]
    pub nt: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Lp,
}

#[derive(Debug, Args)]
pub struct MethodArgs {
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    /// Replace PSD hull-exact rows by their linearized form.
    #[arg(long)]
    pub s3: bool,
    /// JSON map from `indicator/constraint index` to M.
    #[arg(long)]
    pub bigm_user: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

impl MethodArgs {
    fn config(&self) -> Result<ReformConfig, CliError> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(CliError::usage(format!("eps must be > 0 (got {})", self.eps)));
        }
        if self.s3 && self.method != Method::HullExact {
            return Err(CliError::usage("--s3 applies to hull-exact only"));
        }
        let mut cfg = ReformConfig::new(self.method).with_eps(self.eps);
        cfg.emit_s3 = self.s3;
        if let Some(p) = &self.bigm_user {
            let text = read_text(p)?;
            let map = serde_json::from_str(&text).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            cfg.bigm_strategy = BigmStrategy::User(map);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ReformulateArgs {
    pub model: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    /// Closure row against the exact quadratic hull row.
    Prop1,
    /// Closure row against the polynomial hull row.
    Prop2,
    /// Every transform agrees with the GDP at every fixed assignment.
    BinaryFix,
    /// Exact hull rows lie inside their ε-approximation (PSD rows).
    Containment,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub kind: VerifyKind,
    /// Check the rows of this GDP instead of random ones.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Transform for binary-fix; all five when omitted.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Random bodies to draw when no model is given.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, env = "GDPQ_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub manifest: PathBuf,
    /// CSV destination; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// JSON summary destination; stderr when omitted.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Also write a performance profile (JSON) with this time limit.
    #[arg(long, requires = "profile")]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// GDP (reformulated first) or MINLP document.
    pub model: PathBuf,
    #[arg(long, value_parser = parse_method, default_value = "hull-exact")]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long)]
    pub s3: bool,
    /// Shell command with `{file}`, `{time_limit}` and `{gap}` placeholders.
    #[arg(long = "cmd", env = "GDPQ_SOLVER_CMD")]
    pub command: Option<String>,
    #[arg(long, default_value_t = 600.0)]
    pub time_limit: f64,
    /// Read the log from this file (same placeholders) instead of stdout.
    #[arg(long)]
    pub log_file: Option<String>,
    /// Keep the LP file here; a temporary file otherwise.
    #[arg(long)]
    pub lp_out: Option<PathBuf>,
}

fn read_text(p: &Path) -> Result<String, CliError> {
    fs::read_to_string(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io(e.to_string())),
    }
}

fn load(p: &Path) -> Result<ModelDocument, CliError> {
    read_model_file(p).map_err(|e| CliError::io(e.to_string()))
}

fn load_gdp(p: &Path) -> Result<GdpModel, CliError> {
    match load(p)?.payload {
        Payload::Gdp(m) => Ok(m),
        Payload::Minlp(_) => Err(CliError::usage(format!("{}: expected a GDP document", p.display()))),
    }
}

fn params_from<T: serde::de::DeserializeOwned>(p: &Path) -> Result<T, CliError> {
    let text = read_text(p)?;
    serde_json::from_str(&text).map_err(|e| CliError::io(format!("{}: {e}", p.display())))
}

fn generate(a: &GenerateArgs) -> CliResult {
    let seed = a.seed.unwrap_or(0);
    let params = match (a.family, &a.params) {
        (Family::Random, Some(p)) => GeneratorParams::Random(params_from(p)?),
        (Family::Random, None) => GeneratorParams::Random(RandomGdpParams::new(3, 3, 3, 2, seed)),
        (Family::Kmeans, Some(p)) => GeneratorParams::Kmeans(params_from(p)?),
        (Family::Kmeans, None) => GeneratorParams::Kmeans(KmeansParams::sampled(10, 2, 3, seed)),
        (Family::Cstr, Some(p)) => GeneratorParams::Cstr(params_from::<CstrParams>(p)?),
        (Family::Cstr, None) => GeneratorParams::Cstr(CstrParams::preset(a.nt)),
        (Family::Clay, Some(p)) => GeneratorParams::Clay(params_from::<ClayInstance>(p)?),
        (Family::Clay, None) => return Err(CliError::usage("clay needs --params")),
    };
    let params = match a.seed {
        Some(s) => params.with_seed(s),
        None => params,
    };
    let model = params.generate().map_err(|e| CliError::usage(e.to_string()))?;
    let seed = match &params {
        GeneratorParams::Random(p) => Some(p.seed),
        GeneratorParams::Kmeans(p) => Some(p.seed),
        _ => None,
    };
    let doc = ModelDocument::gdp(model).with_metadata(DocumentMetadata {
        generator: Some(params.family().into()),
        seed,
        params: Some(serde_json::to_value(&params).expect("params serialize")),
        decisions: Vec::new(),
    });
    emit(a.output.as_deref(), &write_model(&doc))?;
    Ok(EXIT_OK)
}

fn reformulate_cmd(a: &ReformulateArgs) -> CliResult {
    let cfg = a.method.config()?;
    let gdp = load_gdp(&a.model)?;
    let (minlp, report) = reformulate(&gdp, &cfg)?;
    let text = match a.format {
        Format::Json => {
            let meta = DocumentMetadata {
                generator: Some(format!("reformulate {}", cfg.label())),
                params: Some(serde_json::to_value(&cfg).expect("config serializes")),
                ..DocumentMetadata::default()
            };
            write_model(&ModelDocument::minlp(minlp).with_metadata(meta))
        }
        Format::Lp => export_lp(&minlp).map_err(|e| CliError::usage(e.to_string()))?,
    };
    emit(a.output.as_deref(), &text)?;
    eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(EXIT_OK)
}

fn quadratic_rows(gdp: &GdpModel) -> Vec<(String, crate::model::QuadraticExpr)> {
    gdp.disjunctions
        .iter()
        .flat_map(|d| &d.disjuncts)
        .flat_map(|j| j.constraints.iter().map(move |c| (j, c)))
        .filter_map(|(j, c)| c.body.to_quadratic().map(|q| (format!("{}/{}", j.indicator, c.name), q)))
        .collect()
}

fn report_line(label: &str, r: &MembershipReport) -> serde_json::Value {
    json!({
        "body": label,
        "samples": r.samples_total,
        "agree": r.agree,
        "banded": r.banded,
        "disagree": r.disagree.len(),
        "max_abs_gap": r.max_abs_gap,
    })
}

fn verify(a: &VerifyArgs) -> CliResult {
    if !(a.eps > 0.0 && a.eps.is_finite()) {
        return Err(CliError::usage(format!("eps must be > 0 (got {})", a.eps)));
    }
    let gdp = a.model.as_deref().map(load_gdp).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let unit = |n: usize| vec![(-1.0, 1.0); n];
    let mut lines = Vec::new();
    match a.kind {
        VerifyKind::Prop1 => match &gdp {
            Some(m) => {
                for (name, q) in quadratic_rows(m) {
                    lines.push(report_line(&name, &check_s1_s2(&q, &m.bounds(), a.samples, a.seed)));
                }
            }
            None => {
                let count = a.count.unwrap_or(100);
                for i in 0..count {
                    let q = random_quadratic(3, i % 2 == 0, &mut rng);
                    lines.push(report_line(&format!("random{i}"), &check_s1_s2(&q, &unit(3), a.samples, a.seed + i as u64)));
                }
            }
        },
        VerifyKind::Prop2 => match &gdp {
            Some(m) => {
                for d in m.disjunctions.iter().flat_map(|d| &d.disjuncts) {
                    for c in &d.constraints {
                        let label = format!("{}/{}", d.indicator, c.name);
                        let r = check_poly_hull(&c.body.to_polynomial(), &m.bounds(), a.samples, a.seed);
                        lines.push(report_line(&label, &r));
                    }
                }
            }
            None => {
                let count = a.count.unwrap_or(20);
                for (i, degree) in (0..count).flat_map(|i| [(i, 3), (i, 4)]) {
                    let p = random_polynomial(3, degree, &mut rng);
                    let seed = a.seed + (2 * i) as u64 + u64::from(degree);
                    lines.push(report_line(&format!("deg{degree}_{i}"), &check_poly_hull(&p, &unit(3), a.samples, seed)));
                }
            }
        },
        VerifyKind::BinaryFix => {
            let m = gdp.ok_or_else(|| CliError::usage("binary-fix needs --model"))?;
            let methods: Vec<Method> = a.method.map_or(Method::ALL.to_vec(), |x| vec![x]);
            let sizes: Vec<usize> = m.disjunctions.iter().map(|d| d.disjuncts.len()).collect();
            if m.assignment_count() > MAX_ASSIGNMENTS {
                return Err(CliError::usage(format!("more than {MAX_ASSIGNMENTS} assignments")));
            }
            for method in methods {
                let (minlp, _) = match reformulate(&m, &ReformConfig::new(method).with_eps(a.eps)) {
                    Ok(x) => x,
                    Err(ReformError::NonQuadratic { .. }) if a.method.is_none() => continue,
                    Err(e) => return Err(e.into()),
                };
                let mut total = MembershipReport::default();
                let mut err = None;
                for_each_assignment(&sizes, |choice| {
                    if !m.assignment_is_consistent(choice) || err.is_some() {
                        return;
                    }
                    match fixed_binary_check(&m, &minlp, choice, a.samples, a.seed) {
                        Ok(r) => {
                            total.samples_total += r.samples_total;
                            total.agree += r.agree;
                            total.banded += r.banded;
                            total.disagree.extend(r.disagree);
                            total.max_abs_gap = total.max_abs_gap.max(r.max_abs_gap);
                        }
                        Err(e) => err = Some(e),
                    }
                });
                if let Some(e) = err {
                    return Err(CliError::usage(e.to_string()));
                }
                lines.push(report_line(method.as_str(), &total));
            }
        }
        VerifyKind::Containment => {
            let (bodies, bounds): (Vec<(String, _)>, Vec<(f64, f64)>) = match &gdp {
                Some(m) => (quadratic_rows(m), m.bounds()),
                None => {
                    let count = a.count.unwrap_or(25);
                    ((0..count).map(|i| (format!("random{i}"), random_quadratic(3, true, &mut rng))).collect(), unit(3))
                }
            };
            for (name, q) in bodies {
                let vars: Vec<usize> = q.vars().into_iter().collect();
                if !is_psd(&q.dense_block(&vars)) {
                    continue;
                }
                let n = bounds.len();
                let id: std::collections::BTreeMap<usize, usize> = (0..n).map(|i| (i, i)).collect();
                let inner = [RowBody::Quadratic(exact_hull_row(&q, &id, n))];
                let (quad, affine) = eps_hull_parts(&q, &id, n);
                let outer = [RowBody::EpsQuadratic { quad, affine, y: n, eps: a.eps }];
                let sampler = PerspectiveSampler::new(bounds.clone());
                let r = check_containment(
                    &inner,
                    &outer,
                    |rng| {
                        let p = sampler.sample(rng);
                        let mut w = p.v;
                        w.push(p.y);
                        w
                    },
                    a.samples,
                    a.seed,
                );
                lines.push(report_line(&name, &r));
            }
        }
    }
    let dirty = lines.iter().filter(|l| l["disagree"].as_u64() != Some(0)).count();
    let out = json!({ "check": a.kind.to_possible_value().expect("kind").get_name(), "seed": a.seed, "bodies": lines.len(), "failing": dirty, "results": lines });
    emit(None, &format!("{}\n", serde_json::to_string_pretty(&out).expect("json")))?;
    Ok(if dirty == 0 { EXIT_OK } else { EXIT_CHECK })
}

fn bench(a: &BenchArgs) -> CliResult {
    let (manifest, base) = SuiteManifest::from_file(&a.manifest).map_err(|e| match e {
        crate::bench::BenchError::Io { .. } => CliError::io(e.to_string()),
        other => CliError::usage(other.to_string()),
    })?;
    let records = run_suite(&manifest, &base).map_err(|e| CliError::usage(e.to_string()))?;
    let mut csv = Vec::new();
    write_csv(&records, &mut csv).map_err(|e| CliError::io(e.to_string()))?;
    emit(a.output.as_deref(), &String::from_utf8(csv).expect("csv is utf-8"))?;
    let summary = serde_json::to_string_pretty(&summarize(&records)).expect("json");
    match &a.summary {
        Some(p) => fs::write(p, summary + "\n").map_err(|e| CliError::io(format!("{}: {e}", p.display())))?,
        None => eprintln!("{summary}"),
    }
    if let (Some(limit), Some(p)) = (a.time_limit, &a.profile) {
        let prof = serde_json::to_string_pretty(&performance_profile(&records, limit)).expect("json");
        fs::write(p, prof + "\n").map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
    }
    let failed = manifest.checks.iter().any(|c| {
        records.iter().any(|r| match c {
            Check::BinaryFix => r.binary_fix.as_deref() == Some("fail"),
            Check::Counts => r.counts_check.as_deref() == Some("fail"),
        })
    });
    Ok(if failed { EXIT_CHECK } else { EXIT_OK })
}

fn solve_external(a: &SolveArgs) -> CliResult {
    let command = a
        .command
        .clone()
        .ok_or_else(|| CliError::usage("no solver command: pass --cmd or set GDPQ_SOLVER_CMD"))?;
    let minlp: MinlpModel = match load(&a.model)?.payload {
        Payload::Minlp(m) => m,
        Payload::Gdp(g) => {
            let args = MethodArgs {
                method: a.method,
                eps: a.eps,
                s3: a.s3,
                bigm_user: None,
            };
            reformulate(&g, &args.config()?)?.0
        }
    };
    let lp = export_lp(&minlp).map_err(|e| CliError::usage(e.to_string()))?;
    let tmp;
    let file = match &a.lp_out {
        Some(p) => p.clone(),
        None => {
            tmp = tempfile_path(&minlp.name);
            tmp
        }
    };
    fs::write(&file, lp).map_err(|e| CliError::io(format!("{}: {e}", file.display())))?;
    let mut run = SolverRun::new(command, a.time_limit);
    run.log_file = a.log_file.clone();
    let result = run_external_solver(&file, &run);
    if a.lp_out.is_none() {
        let _ = fs::remove_file(&file);
    }
    match result {
        Ok(r) => {
            emit(None, &format!("{}\n", serde_json::to_string_pretty(&r).expect("json")))?;
            Ok(EXIT_OK)
        }
        Err(e @ (SolverError::Spawn { .. } | SolverError::ParseFailure { .. })) => Err(CliError {
            code: EXIT_EXTERNAL,
            message: e.to_string(),
        }),
        Err(e) => Err(CliError::usage(e.to_string())),
    }
}

fn tempfile_path(name: &str) -> PathBuf {
    let stem: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    std::env::temp_dir().join(format!("gdpq-{}-{stem}.lp", std::process::id()))
}

pub fn execute(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Reformulate(a) => reformulate_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::SolveExternal(a) => solve_external(a),
    }
}

/// Parses `args` and runs the command, printing errors to stderr. Returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_subcommand() {
        for args in [
            vec!["gdpq", "generate", "random", "--seed", "3"],
            vec!["gdpq", "reformulate", "m.json", "--method", "hull-eps", "--eps", "1e-3", "--format", "lp"],
            vec!["gdpq", "verify", "prop1", "--samples", "10"],
            vec!["gdpq", "verify", "binary-fix", "--model", "m.json", "--method", "bigm"],
            vec!["gdpq", "bench", "suite.json", "-o", "out.csv"],
            vec!["gdpq", "solve-external", "m.json", "--cmd", "true"],
        ] {
            Cli::try_parse_from(&args).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        }
        assert!(Cli::try_parse_from(["gdpq", "reformulate", "m.json", "--method", "hull"]).is_err());
    }

    #[test]
    fn bad_eps_is_a_usage_error() {
        let a = MethodArgs {
            method: Method::HullEps,
            eps: 0.0,
            s3: false,
            bigm_user: None,
        };
        let e = a.config().unwrap_err();
        assert_eq!(e.code, EXIT_USAGE);
        assert!(e.message.contains("eps must be > 0"));
    }

    #[test]
    fn missing_file_is_io() {
        assert_eq!(run(["gdpq", "reformulate", "/nonexistent/m.json", "--method", "bigm"]), EXIT_IO);
        assert_eq!(run(["gdpq", "frobnicate"]), EXIT_USAGE);
    }

    #[test]
    fn quadratic_rows_skip_cubics() {
        let mut m = GdpModel::new("m");
        let x = m.add_var("x", -1.0, 1.0);
        let cubic = crate::model::PolynomialExpr::new().with_term(&[(x, 3)], 1.0);
        let quad = crate::model::QuadraticExpr::new().with_term(x, x, 1.0);
        m.disjunctions.push(crate::model::Disjunction::new(
            "d",
            vec![
                crate::model::Disjunct::new("A").with(crate::model::Constraint::le("c", crate::model::Body::Polynomial(cubic))),
                crate::model::Disjunct::new("B").with(crate::model::Constraint::le("q", quad)),
            ],
        ));
        let rows = quadratic_rows(&m);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].0, "B/q");
    }
}
