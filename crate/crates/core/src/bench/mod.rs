//! Batch runs over instances × reformulations: model sizes, reformulation
//! time, tightness estimates, binary-fixing checks and, when a solver
//! command is configured, solver outcomes.
//!
//! Records are written as CSV with the fixed header [`CSV_COLUMNS`]. The
//! `time_seconds` column is reformulation time unless a solver ran, in which
//! case it is solver wall time; `time_source` says which.

mod profile;
mod tightness;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gen::GeneratorParams;
use crate::io::{export_lp, read_model_file, run_external_solver, SolverRun};
use crate::model::{for_each_assignment, GdpModel, MinlpModel};
use crate::oracle::fixed_binary_check;
use crate::reform::{reformulate, Method, ReformConfig, TransformCounts};

pub use profile::{performance_profile, profile_entries, solved_at, wrong_entries, Profile, ProfileEntry, WRONG_REL_TOL};
pub use tightness::{tightness_proxy, Anchors, TightnessConfig, TightnessEstimate};

/// Assignments enumerated per record by the binary-fixing check.
pub const MAX_CHECK_ASSIGNMENTS: usize = 4096;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("instance `{id}`: {message}")]
    Instance { id: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Binary-fixing equivalence over every consistent assignment.
    BinaryFix,
    /// Disaggregation and row counts against their closed forms.
    Counts,
}

/// One instance, or one per seed when `seeds` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorParams>,
    /// Model document, relative to the manifest's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteManifest {
    pub instances: Vec<InstanceSpec>,
    pub methods: Vec<ReformConfig>,
    #[serde(default)]
    pub checks: BTreeSet<Check>,
    #[serde(default = "default_check_samples")]
    pub check_samples: usize,
    #[serde(default)]
    pub check_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tightness: Option<TightnessConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverRun>,
    /// Where LP files for the solver go; a temporary directory otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work_dir: Option<PathBuf>,
}

fn default_check_samples() -> usize {
    1000
}

impl SuiteManifest {
    pub fn new(instances: Vec<InstanceSpec>, methods: Vec<ReformConfig>) -> Self {
        SuiteManifest {
            instances,
            methods,
            checks: BTreeSet::new(),
            check_samples: default_check_samples(),
            check_seed: 0,
            tightness: None,
            solver: None,
            work_dir: None,
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<(Self, PathBuf), BenchError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let manifest: SuiteManifest = serde_json::from_str(&text).map_err(|e| BenchError::Manifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((manifest, base))
    }
}

impl InstanceSpec {
    pub fn generated(id: impl Into<String>, generator: GeneratorParams) -> Self {
        InstanceSpec {
            id: id.into(),
            generator: Some(generator),
            path: None,
            seeds: Vec::new(),
        }
    }

    pub fn file(id: impl Into<String>, path: impl Into<PathBuf>) -> Self {
        InstanceSpec {
            id: id.into(),
            generator: None,
            path: Some(path.into()),
            seeds: Vec::new(),
        }
    }

    pub fn with_seeds(mut self, seeds: impl IntoIterator<Item = u64>) -> Self {
        self.seeds = seeds.into_iter().collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedInstance {
    pub id: String,
    pub model: GdpModel,
}

/// Loads or generates every instance and validates every method config.
pub fn resolve(manifest: &SuiteManifest, base: &Path) -> Result<Vec<ResolvedInstance>, BenchError> {
    if manifest.methods.is_empty() {
        return Err(BenchError::Manifest("no methods".into()));
    }
    for cfg in &manifest.methods {
        if cfg.method == Method::HullEps && !(cfg.eps > 0.0 && cfg.eps.is_finite()) {
            return Err(BenchError::Manifest(format!("eps must be > 0 (got {})", cfg.eps)));
        }
    }
    let labels: BTreeSet<String> = manifest.methods.iter().map(label).collect();
    if labels.len() != manifest.methods.len() {
        return Err(BenchError::Manifest("duplicate method labels".into()));
    }
    let mut out = Vec::new();
    for spec in &manifest.instances {
        let fail = |message: String| BenchError::Instance {
            id: spec.id.clone(),
            message,
        };
        match (&spec.generator, &spec.path) {
            (Some(g), None) => {
                if spec.seeds.is_empty() {
                    let model = g.generate().map_err(|e| fail(e.to_string()))?;
                    out.push(ResolvedInstance { id: spec.id.clone(), model });
                }
                for &seed in &spec.seeds {
                    let model = g.clone().with_seed(seed).generate().map_err(|e| fail(e.to_string()))?;
                    out.push(ResolvedInstance {
                        id: format!("{}_s{seed}", spec.id),
                        model,
                    });
                }
            }
            (None, Some(p)) => {
                if !spec.seeds.is_empty() {
                    return Err(fail("seeds apply only to generated instances".into()));
                }
                let doc = read_model_file(base.join(p)).map_err(|e| fail(e.to_string()))?;
                let model = doc.as_gdp().cloned().ok_or_else(|| fail("document holds a MINLP, not a GDP".into()))?;
                out.push(ResolvedInstance { id: spec.id.clone(), model });
            }
            _ => return Err(fail("exactly one of `generator` and `path` is required".into())),
        }
    }
    let mut seen = BTreeSet::new();
    for r in &out {
        if !seen.insert(r.id.as_str()) {
            return Err(BenchError::Manifest(format!("duplicate instance id `{}`", r.id)));
        }
    }
    Ok(out)
}

/// Column order of the CSV output.
pub const CSV_COLUMNS: [&str; 24] = [
    "instance",
    "method",
    "eps",
    "continuous_vars",
    "binary_vars",
    "disaggregated_vars",
    "glover_vars",
    "linear_rows",
    "nonlinear_rows",
    "quadratic_nonzeros",
    "reform_seconds",
    "tightness",
    "tightness_sigma",
    "tightness_samples",
    "binary_fix",
    "binary_fix_disagreements",
    "counts_check",
    "solver_status",
    "objective",
    "bound",
    "solver_seconds",
    "time_seconds",
    "time_source",
    "error",
];

/// One row per (instance, method). Wall-clock fields are the only
/// nondeterministic ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub method: String,
    pub eps: Option<f64>,
    pub continuous_vars: usize,
    pub binary_vars: usize,
    pub disaggregated_vars: usize,
    pub glover_vars: usize,
    pub linear_rows: usize,
    pub nonlinear_rows: usize,
    pub quadratic_nonzeros: usize,
    pub reform_seconds: f64,
    pub tightness: Option<f64>,
    pub tightness_sigma: Option<f64>,
    pub tightness_samples: Option<usize>,
    /// `pass`, `fail` or `skipped`.
    pub binary_fix: Option<String>,
    pub binary_fix_disagreements: Option<usize>,
    pub counts_check: Option<String>,
    pub solver_status: Option<String>,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub solver_seconds: Option<f64>,
    pub time_seconds: f64,
    /// `reformulation` or `solver`.
    pub time_source: String,
    pub error: Option<String>,
}

impl BenchRecord {
    fn empty(instance: &str, cfg: &ReformConfig) -> Self {
        BenchRecord {
            instance: instance.to_string(),
            method: label(cfg),
            eps: (cfg.method == Method::HullEps).then_some(cfg.eps),
            continuous_vars: 0,
            binary_vars: 0,
            disaggregated_vars: 0,
            glover_vars: 0,
            linear_rows: 0,
            nonlinear_rows: 0,
            quadratic_nonzeros: 0,
            reform_seconds: 0.0,
            tightness: None,
            tightness_sigma: None,
            tightness_samples: None,
            binary_fix: None,
            binary_fix_disagreements: None,
            counts_check: None,
            solver_status: None,
            objective: None,
            bound: None,
            solver_seconds: None,
            time_seconds: 0.0,
            time_source: "reformulation".into(),
            error: None,
        }
    }

    pub fn counts(&self) -> TransformCounts {
        TransformCounts {
            continuous_vars: self.continuous_vars,
            binary_vars: self.binary_vars,
            disaggregated_vars: self.disaggregated_vars,
            glover_vars: self.glover_vars,
            linear_rows: self.linear_rows,
            nonlinear_rows: self.nonlinear_rows,
            quadratic_nonzeros: self.quadratic_nonzeros,
        }
    }

    /// Solver reported optimal, or, with no solver, the reformulation
    /// succeeded.
    pub fn is_solved(&self) -> bool {
        self.error.is_none()
            && match &self.solver_status {
                Some(s) => s == "optimal",
                None => true,
            }
    }
}

fn label(cfg: &ReformConfig) -> String {
    let base = cfg.label();
    if cfg.method == Method::HullEps && cfg.eps != crate::reform::DEFAULT_EPS {
        format!("{base}@{:e}", cfg.eps)
    } else {
        base
    }
}

/// Closed-form disaggregation and scaffold row counts for a hull transform.
fn counts_match(gdp: &GdpModel, minlp: &MinlpModel, cfg: &ReformConfig) -> bool {
    let per: Vec<(usize, usize)> = gdp.disjunctions.iter().map(|d| (d.disjuncts.len(), d.vars().len())).collect();
    let disagg: usize = if cfg.method.is_hull() {
        per.iter().map(|&(d, n)| d * n).sum()
    } else {
        0
    };
    let links: usize = if cfg.method.is_hull() { per.iter().map(|&(_, n)| n).sum() } else { 0 };
    let binaries: usize = per.iter().map(|&(d, _)| d).sum();
    let c = TransformCounts::of(minlp);
    let count_rows = |p: &dyn Fn(&str) -> bool| minlp.linear.iter().filter(|r| p(&r.name)).count();
    c.disaggregated_vars == disagg
        && c.binary_vars == binaries
        && count_rows(&|n| n.starts_with("link_")) == links
        && count_rows(&|n| n.starts_with("v_") && (n.ends_with("_ub") || n.ends_with("_lb"))) == 2 * disagg
        && c.continuous_vars == gdp.variables.len() + disagg + c.glover_vars
}

fn binary_fix(gdp: &GdpModel, minlp: &MinlpModel, samples: usize, seed: u64) -> Result<(bool, usize), String> {
    let sizes: Vec<usize> = gdp.disjunctions.iter().map(|d| d.disjuncts.len()).collect();
    let total = sizes.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    if total.is_none_or(|t| t > MAX_CHECK_ASSIGNMENTS) {
        return Err("skipped".into());
    }
    let mut bad = 0;
    let mut err = None;
    for_each_assignment(&sizes, |choice| {
        if err.is_some() || !gdp.assignment_is_consistent(choice) {
            return;
        }
        match fixed_binary_check(gdp, minlp, choice, samples, seed) {
            Ok(r) => bad += r.disagree.len(),
            Err(e) => err = Some(e.to_string()),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok((bad == 0, bad)),
    }
}

fn run_one(
    inst: &ResolvedInstance,
    cfg: &ReformConfig,
    anchors: Option<&Anchors>,
    manifest: &SuiteManifest,
    work_dir: &Path,
) -> BenchRecord {
    let mut rec = BenchRecord::empty(&inst.id, cfg);
    let t0 = Instant::now();
    let minlp = match reformulate(&inst.model, cfg) {
        Ok((m, _)) => m,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.reform_seconds = t0.elapsed().as_secs_f64();
    rec.time_seconds = rec.reform_seconds;
    let c = TransformCounts::of(&minlp);
    rec.continuous_vars = c.continuous_vars;
    rec.binary_vars = c.binary_vars;
    rec.disaggregated_vars = c.disaggregated_vars;
    rec.glover_vars = c.glover_vars;
    rec.linear_rows = c.linear_rows;
    rec.nonlinear_rows = c.nonlinear_rows;
    rec.quadratic_nonzeros = c.quadratic_nonzeros;

    if let (Some(tc), Some(a)) = (&manifest.tightness, anchors) {
        let est = tightness_proxy(&inst.model, &minlp, a, tc);
        rec.tightness = Some(est.fraction());
        rec.tightness_sigma = Some(est.sigma());
        rec.tightness_samples = Some(est.samples);
    }
    if manifest.checks.contains(&Check::Counts) {
        let ok = counts_match(&inst.model, &minlp, cfg);
        rec.counts_check = Some(if ok { "pass" } else { "fail" }.into());
    }
    if manifest.checks.contains(&Check::BinaryFix) {
        match binary_fix(&inst.model, &minlp, manifest.check_samples, manifest.check_seed) {
            Ok((ok, n)) => {
                rec.binary_fix = Some(if ok { "pass" } else { "fail" }.into());
                rec.binary_fix_disagreements = Some(n);
            }
            Err(e) if e == "skipped" => rec.binary_fix = Some(e),
            Err(e) => rec.error = Some(format!("binary-fix: {e}")),
        }
    }
    if let Some(run) = &manifest.solver {
        let file = work_dir.join(format!("{}__{}.lp", sanitize(&inst.id), sanitize(&rec.method)));
        let outcome = export_lp(&minlp)
            .map_err(|e| e.to_string())
            .and_then(|text| std::fs::write(&file, text).map_err(|e| format!("{}: {e}", file.display())))
            .and_then(|()| run_external_solver(&file, run).map_err(|e| e.to_string()));
        match outcome {
            Ok(r) => {
                rec.solver_status = Some(r.status.as_str().into());
                rec.objective = r.objective;
                rec.bound = r.bound;
                rec.solver_seconds = Some(r.wall_seconds);
                rec.time_seconds = r.wall_seconds;
                rec.time_source = "solver".into();
            }
            Err(e) => {
                rec.solver_status = Some("error".into());
                rec.error = Some(e);
            }
        }
    }
    rec
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub records: usize,
    pub errors: usize,
    pub mean_continuous_vars: f64,
    pub mean_linear_rows: f64,
    pub mean_nonlinear_rows: f64,
    pub mean_reform_seconds: f64,
    pub mean_tightness: Option<f64>,
    pub solved: usize,
    pub check_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub instances: usize,
    pub records: usize,
    pub errors: usize,
    pub time_source: String,
    pub methods: BTreeMap<String, MethodSummary>,
}

pub fn summarize(records: &[BenchRecord]) -> SuiteSummary {
    let mut groups: BTreeMap<String, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.method.clone()).or_default().push(r);
    }
    let mean = |xs: &[f64]| if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
    let methods = groups
        .into_iter()
        .map(|(m, rs)| {
            let ok: Vec<&&BenchRecord> = rs.iter().filter(|r| r.error.is_none()).collect();
            let col = |f: fn(&BenchRecord) -> f64| mean(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
            let t: Vec<f64> = ok.iter().filter_map(|r| r.tightness).collect();
            let fails = |r: &&&BenchRecord| {
                r.binary_fix.as_deref() == Some("fail") || r.counts_check.as_deref() == Some("fail")
            };
            let s = MethodSummary {
                records: rs.len(),
                errors: rs.len() - ok.len(),
                mean_continuous_vars: col(|r| r.continuous_vars as f64),
                mean_linear_rows: col(|r| r.linear_rows as f64),
                mean_nonlinear_rows: col(|r| r.nonlinear_rows as f64),
                mean_reform_seconds: col(|r| r.reform_seconds),
                mean_tightness: (!t.is_empty()).then(|| mean(&t)),
                solved: rs.iter().filter(|r| r.is_solved()).count(),
                check_failures: rs.iter().filter(fails).count(),
            };
            (m, s)
        })
        .collect();
    let instances: BTreeSet<&str> = records.iter().map(|r| r.instance.as_str()).collect();
    let solver = records.iter().any(|r| r.time_source == "solver");
    SuiteSummary {
        instances: instances.len(),
        records: records.len(),
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        time_source: if solver { "solver" } else { "reformulation" }.into(),
        methods,
    }
}

/// Runs every (instance, method) pair. Records come back sorted by
/// instance id, then method label; failures land in `error`.
pub fn run_suite(manifest: &SuiteManifest, base: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    let instances = resolve(manifest, base)?;
    let tmp;
    let work_dir = match &manifest.work_dir {
        Some(d) => {
            let d = base.join(d);
            std::fs::create_dir_all(&d).map_err(|source| BenchError::Io { path: d.clone(), source })?;
            d
        }
        None => {
            tmp = std::env::temp_dir().join(format!("gdpq-bench-{}", std::process::id()));
            if manifest.solver.is_some() {
                std::fs::create_dir_all(&tmp).map_err(|source| BenchError::Io { path: tmp.clone(), source })?;
            }
            tmp
        }
    };
    let anchors: Vec<Option<Anchors>> = instances
        .par_iter()
        .map(|i| manifest.tightness.map(|_| Anchors::compute(&i.model)))
        .collect();
    let jobs: Vec<(usize, &ReformConfig)> = (0..instances.len()).flat_map(|i| manifest.methods.iter().map(move |c| (i, c))).collect();
    let mut records: Vec<BenchRecord> = jobs
        .par_iter()
        .map(|&(i, cfg)| run_one(&instances[i], cfg, anchors[i].as_ref(), manifest, &work_dir))
        .collect();
    records.sort_by(|a, b| (&a.instance, &a.method).cmp(&(&b.instance, &b.method)));
    Ok(records)
}

pub fn write_csv<W: std::io::Write>(records: &[BenchRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BenchRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::RandomGdpParams;

    fn convex_suite() -> SuiteManifest {
        let gen = GeneratorParams::Random(RandomGdpParams::new(2, 2, 2, 2, 0).convex());
        let methods = vec![
            ReformConfig::new(Method::Bigm),
            ReformConfig::new(Method::HullEps),
            ReformConfig::new(Method::HullExact),
            ReformConfig::new(Method::HullExact).with_s3(),
        ];
        let mut m = SuiteManifest::new(vec![InstanceSpec::generated("rc", gen).with_seeds(1..=4)], methods);
        m.checks = [Check::Counts].into();
        m
    }

    #[test]
    fn sixteen_records_with_larger_hull_models() {
        let recs = run_suite(&convex_suite(), Path::new(".")).unwrap();
        assert_eq!(recs.len(), 16);
        for chunk in recs.chunks(4) {
            let by: BTreeMap<&str, &BenchRecord> = chunk.iter().map(|r| (r.method.as_str(), r)).collect();
            let bigm = by["bigm"].continuous_vars;
            for m in ["hull-eps", "hull-exact", "hull-exact+s3"] {
                assert!(by[m].continuous_vars > bigm, "{m}");
            }
            assert!(chunk.iter().all(|r| r.error.is_none() && r.counts_check.as_deref() == Some("pass")));
        }
        let ids: Vec<&str> = recs.iter().map(|r| r.instance.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn csv_header_and_round_trip() {
        let recs = run_suite(&convex_suite(), Path::new(".")).unwrap();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(read_csv(text.as_bytes()).unwrap(), recs);
        let mut empty = Vec::new();
        write_csv(&[], &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim_end(), CSV_COLUMNS.join(","));
    }

    #[test]
    fn deterministic_modulo_wall_clock() {
        let mut m = convex_suite();
        m.checks.insert(Check::BinaryFix);
        m.check_samples = 50;
        m.tightness = Some(TightnessConfig { samples: 300, y_samples: 8, seed: 1 });
        let strip = |mut rs: Vec<BenchRecord>| {
            for r in &mut rs {
                r.reform_seconds = 0.0;
                r.time_seconds = 0.0;
            }
            rs
        };
        let a = strip(run_suite(&m, Path::new(".")).unwrap());
        let b = strip(run_suite(&m, Path::new(".")).unwrap());
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.binary_fix.as_deref() == Some("pass")));
        let s = summarize(&a);
        assert_eq!((s.instances, s.records, s.errors), (4, 16, 0));
        assert_eq!(s.methods["bigm"].check_failures, 0);
    }

    #[test]
    fn failures_stay_in_their_record() {
        let mut m = convex_suite();
        let kmeans = crate::gen::KmeansParams::sampled(4, 2, 2, 0);
        m.instances.push(InstanceSpec::generated("km", GeneratorParams::Kmeans(kmeans)));
        m.methods.push(ReformConfig::new(Method::HullPoly));
        // A cubic disjunct row is refused by hull-exact only.
        let mut cubic = GdpModel::new("cubic");
        let x = cubic.add_var("x", -1.0, 1.0);
        cubic.disjunctions.push(crate::model::Disjunction::new(
            "d",
            vec![
                crate::model::Disjunct::new("A").with(crate::model::Constraint::le(
                    "c",
                    crate::model::PolynomialExpr::new().with_term(&[(x, 3)], 1.0),
                )),
                crate::model::Disjunct::new("B"),
            ],
        ));
        let dir = tempfile::tempdir().unwrap();
        crate::io::write_model_file(dir.path().join("cubic.json"), &crate::io::ModelDocument::gdp(cubic)).unwrap();
        m.instances.push(InstanceSpec::file("cubic", "cubic.json"));
        let recs = run_suite(&m, dir.path()).unwrap();
        assert_eq!(recs.len(), 6 * 5);
        let failed: Vec<&str> = recs.iter().filter(|r| r.error.is_some()).map(|r| r.method.as_str()).collect();
        assert_eq!(failed, vec!["hull-exact", "hull-exact+s3"]);
    }

    #[test]
    fn resolution_fails_fast() {
        let mut m = convex_suite();
        m.instances.push(InstanceSpec::file("gone", "missing.json"));
        assert!(matches!(run_suite(&m, Path::new(".")), Err(BenchError::Instance { .. })));
        let mut m = convex_suite();
        m.methods.push(ReformConfig::new(Method::HullEps).with_eps(0.0));
        assert!(matches!(resolve(&m, Path::new(".")), Err(BenchError::Manifest(_))));
        let mut m = convex_suite();
        m.instances.push(m.instances[0].clone());
        assert!(matches!(resolve(&m, Path::new(".")), Err(BenchError::Manifest(_))));
        let mut m = convex_suite();
        m.methods.clear();
        assert!(resolve(&m, Path::new(".")).is_err());
    }

    #[test]
    fn manifest_json() {
        let mut m = convex_suite();
        m.tightness = Some(TightnessConfig::default());
        let text = serde_json::to_string_pretty(&m).unwrap();
        let back: SuiteManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<SuiteManifest>(r#"{"instances": [], "methods": [], "bogus": 1}"#).is_err());
    }

    #[test]
    fn solver_columns() {
        let mut m = convex_suite();
        m.methods.truncate(1);
        m.instances[0].seeds.truncate(1);
        m.solver = Some(SolverRun::new("test -s {file} && printf 'status: optimal\\nobjective: 3.5\\n'", 10.0));
        let dir = tempfile::tempdir().unwrap();
        m.work_dir = Some(dir.path().to_path_buf());
        let recs = run_suite(&m, Path::new(".")).unwrap();
        assert_eq!(recs[0].solver_status.as_deref(), Some("optimal"));
        assert_eq!(recs[0].objective, Some(3.5));
        assert_eq!(recs[0].time_source, "solver");
        let p = performance_profile(&recs, 10.0);
        assert_eq!(p["bigm"].len(), 1);
    }
}
