//! Disjunction-to-MINLP transforms.
//!
//! Every transform starts from the same scaffold: the original columns, one
//! binary per disjunct, one XOR row per disjunction and one row per logic
//! clause. Hull transforms add disaggregated copies of the variables that
//! appear in each disjunction, with bound and linking rows. What differs is
//! how each disjunct constraint `h ≤ 0` is rewritten.

mod rows;
mod s3;
mod scaffold;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    interval_bound, interval_bound_poly, Body, Diagnostic, GdpModel, LinearRow, MinlpModel, ModelError,
    NonlinearRow, PolynomialExpr, QuadraticExpr, RowBody, Sense, VarKind, VarRole,
};

pub use rows::{binary_mult_row, eps_hull_parts, exact_hull_row, linear_hull_row, poly_hull_row};
pub use s3::{glover_rows, is_psd, min_eigenvalue, PSD_TOL};
pub use scaffold::{scaffold, Scaffold};

pub const DEFAULT_EPS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Bigm,
    HullEps,
    HullExact,
    HullPoly,
    BinaryMult,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Bigm,
        Method::HullEps,
        Method::HullExact,
        Method::HullPoly,
        Method::BinaryMult,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Bigm => "bigm",
            Method::HullEps => "hull-eps",
            Method::HullExact => "hull-exact",
            Method::HullPoly => "hull-poly",
            Method::BinaryMult => "binary-mult",
        }
    }

    pub fn is_hull(self) -> bool {
        matches!(self, Method::HullEps | Method::HullExact | Method::HullPoly)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// How Big-M constants are chosen.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BigmStrategy {
    #[default]
    Interval,
    /// Keys are `"{indicator}/{constraint index}"`; missing keys fall back to
    /// the interval bound.
    User(BTreeMap<String, f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReformConfig {
    pub method: Method,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub bigm_strategy: BigmStrategy,
    #[serde(default)]
    pub emit_s3: bool,
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

impl ReformConfig {
    pub fn new(method: Method) -> Self {
        ReformConfig {
            method,
            eps: DEFAULT_EPS,
            bigm_strategy: BigmStrategy::Interval,
            emit_s3: false,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_s3(mut self) -> Self {
        self.emit_s3 = true;
        self
    }

    /// Short label for tables, e.g. `hull-exact+s3`.
    pub fn label(&self) -> String {
        if self.emit_s3 && self.method == Method::HullExact {
            format!("{}+s3", self.method)
        } else {
            self.method.to_string()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformCounts {
    pub continuous_vars: usize,
    pub binary_vars: usize,
    pub disaggregated_vars: usize,
    pub glover_vars: usize,
    pub linear_rows: usize,
    pub nonlinear_rows: usize,
    /// Monomials of degree ≥ 2 across nonlinear rows.
    pub quadratic_nonzeros: usize,
}

impl TransformCounts {
    pub fn of(m: &MinlpModel) -> Self {
        let role = |f: fn(&VarRole) -> bool| m.count_role(f);
        TransformCounts {
            continuous_vars: m.vars.iter().filter(|v| v.kind == VarKind::Continuous).count(),
            binary_vars: m.vars.iter().filter(|v| v.kind == VarKind::Binary).count(),
            disaggregated_vars: role(|r| matches!(r, VarRole::Disaggregated { .. })),
            glover_vars: role(|r| matches!(r, VarRole::Glover { .. })),
            linear_rows: m.linear.len(),
            nonlinear_rows: m.nonlinear.len(),
            quadratic_nonzeros: m.nonlinear.iter().map(|r| nonlinear_terms(&r.body)).sum(),
        }
    }
}

fn nonlinear_terms(body: &RowBody) -> usize {
    let quad = |q: &QuadraticExpr| q.quad_entries().count();
    match body {
        RowBody::Quadratic(q) => quad(q),
        RowBody::Polynomial(p) => p.terms().filter(|(m, _)| m.degree() >= 2).count(),
        RowBody::EpsQuadratic { quad: q, .. } => quad(q),
        RowBody::EpsPerspective { body, .. } => body.terms().filter(|(m, _)| m.degree() >= 2).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub method: Method,
    pub eps: Option<f64>,
    pub counts: TransformCounts,
    /// Column count per role.
    pub provenance: BTreeMap<String, usize>,
    /// Which variables get per-disjunct copies under hull transforms.
    pub disaggregation_scope: Option<String>,
    pub s3_rows: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReformError {
    #[error("model failed validation: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("eps must be > 0 (got {0})")]
    NonPositiveEps(f64),
    #[error("{location}: constraint has degree {degree}, {method} needs degree ≤ 2")]
    NonQuadratic {
        location: String,
        degree: u32,
        method: Method,
    },
    #[error("{location}: constant constraint is degenerate for {method}")]
    Degenerate { location: String, method: Method },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Runs the transform selected by `config.method`.
pub fn reformulate(model: &GdpModel, config: &ReformConfig) -> Result<(MinlpModel, TransformReport), ReformError> {
    if config.method == Method::HullEps && !(config.eps > 0.0 && config.eps.is_finite()) {
        return Err(ReformError::NonPositiveEps(config.eps));
    }
    let mut sc = scaffold(model, config.method.is_hull())?;
    let mut warnings = Vec::new();
    let mut s3_rows = 0;

    for (k, disj) in model.disjunctions.iter().enumerate() {
        for (i, dj) in disj.disjuncts.iter().enumerate() {
            let y = sc.indicators[k][i];
            for (j, con) in dj.constraints.iter().enumerate() {
                let location = format!("/disjunctions/{k}/disjuncts/{i}/constraints/{j}");
                let name = if con.name.is_empty() {
                    format!("{}_c{j}", dj.indicator)
                } else {
                    format!("{}_{}", dj.indicator, con.name)
                };
                let ctx = RowCtx {
                    model,
                    k,
                    i,
                    y,
                    name,
                    location,
                };
                match config.method {
                    Method::Bigm => {
                        let key = format!("{}/{j}", dj.indicator);
                        bigm_row(&mut sc.minlp, &ctx, &con.body, &config.bigm_strategy, &key, &mut warnings)?
                    }
                    Method::HullEps => eps_row(&mut sc.minlp, &ctx, &con.body, &sc.var_maps[k][i], config.eps),
                    Method::HullExact => {
                        if exact_row(&mut sc, &ctx, &con.body, config.emit_s3, &mut warnings)? {
                            s3_rows += 1;
                        }
                    }
                    Method::HullPoly => poly_row(&mut sc.minlp, &ctx, &con.body, &sc.var_maps[k][i])?,
                    Method::BinaryMult => {
                        let row = binary_mult_row(&con.body.to_polynomial(), y);
                        push_poly(&mut sc.minlp, ctx.name, row);
                    }
                }
            }
        }
    }

    if config.emit_s3 && config.method != Method::HullExact {
        warnings.push(format!("--s3 ignored: only meaningful for hull-exact, not {}", config.method));
    }
    let minlp = sc.minlp;
    let mut provenance = BTreeMap::new();
    for v in &minlp.vars {
        let key = match v.role {
            VarRole::Original { .. } => "original",
            VarRole::Indicator { .. } => "indicator",
            VarRole::Disaggregated { .. } => "disaggregated",
            VarRole::Glover { .. } => "glover",
        };
        *provenance.entry(key.to_string()).or_insert(0) += 1;
    }
    let report = TransformReport {
        method: config.method,
        eps: (config.method == Method::HullEps).then_some(config.eps),
        counts: TransformCounts::of(&minlp),
        provenance,
        disaggregation_scope: config
            .method
            .is_hull()
            .then(|| "participating variables only: each disjunction copies just the variables its constraints reference".to_string()),
        s3_rows,
        warnings,
    };
    Ok((minlp, report))
}

struct RowCtx<'a> {
    model: &'a GdpModel,
    k: usize,
    i: usize,
    y: usize,
    name: String,
    location: String,
}

fn affine_to_linear(name: String, e: &QuadraticExpr) -> LinearRow {
    let mut row = LinearRow::new(name, Sense::Le, -e.constant_term());
    for (j, c) in e.linear_entries() {
        row.add(j, c);
    }
    row
}

fn push_quadratic(minlp: &mut MinlpModel, name: String, e: QuadraticExpr) {
    if e.is_linear() {
        minlp.linear.push(affine_to_linear(name, &e));
    } else {
        minlp.nonlinear.push(NonlinearRow {
            name,
            body: RowBody::Quadratic(e),
        });
    }
}

fn push_poly(minlp: &mut MinlpModel, name: String, p: PolynomialExpr) {
    match p.to_quadratic() {
        Some(q) => push_quadratic(minlp, name, q),
        None => minlp.nonlinear.push(NonlinearRow {
            name,
            body: RowBody::Polynomial(p),
        }),
    }
}

/// `M = max(0, sup h)` over the box, or the user's value.
fn bigm_row(
    minlp: &mut MinlpModel,
    ctx: &RowCtx<'_>,
    body: &Body,
    strategy: &BigmStrategy,
    key: &str,
    warnings: &mut Vec<String>,
) -> Result<(), ReformError> {
    if let Some(v) = body.vars().into_iter().map(|j| &ctx.model.variables[j]).find(|v| !v.is_bounded()) {
        return Err(ModelError::UnboundedVariable { name: v.name.clone() }.into());
    }
    let bounds = ctx.model.bounds();
    let interval = match body {
        Body::Quadratic(q) => interval_bound(q, &bounds),
        Body::Polynomial(p) => interval_bound_poly(p, &bounds),
    }?;
    let derived = interval.hi.max(0.0);
    let m = match strategy {
        BigmStrategy::User(map) => match map.get(key) {
            Some(&m) => {
                if m < derived {
                    warnings.push(format!(
                        "{}: user M = {m} is below the interval bound {derived}",
                        ctx.location
                    ));
                }
                m
            }
            None => derived,
        },
        BigmStrategy::Interval => derived,
    };
    let mut p = body.to_polynomial();
    if m != 0.0 {
        p.add_term(crate::model::Monomial::var(ctx.y), m);
        p.add_term(crate::model::Monomial::one(), -m);
    }
    push_poly(minlp, ctx.name.clone(), p);
    Ok(())
}

fn eps_row(minlp: &mut MinlpModel, ctx: &RowCtx<'_>, body: &Body, var_map: &BTreeMap<usize, usize>, eps: f64) {
    let name = ctx.name.clone();
    match body.to_quadratic() {
        Some(h) if h.is_linear() => push_quadratic(minlp, name, linear_hull_row(&h, var_map, ctx.y)),
        Some(h) => {
            let (quad, affine) = eps_hull_parts(&h, var_map, ctx.y);
            minlp.nonlinear.push(NonlinearRow {
                name,
                body: RowBody::EpsQuadratic {
                    quad,
                    affine,
                    y: ctx.y,
                    eps,
                },
            });
        }
        None => {
            let p = body.to_polynomial();
            let var_map = p.vars().into_iter().map(|i| (i, var_map[&i])).collect();
            minlp.nonlinear.push(NonlinearRow {
                name,
                body: RowBody::EpsPerspective {
                    body: p,
                    var_map,
                    y: ctx.y,
                    eps,
                },
            });
        }
    }
}

/// Returns whether the row was replaced by its S3 convexification.
fn exact_row(
    sc: &mut Scaffold,
    ctx: &RowCtx<'_>,
    body: &Body,
    emit_s3: bool,
    warnings: &mut Vec<String>,
) -> Result<bool, ReformError> {
    let h = body.to_quadratic().ok_or_else(|| ReformError::NonQuadratic {
        location: ctx.location.clone(),
        degree: body.degree(),
        method: Method::HullExact,
    })?;
    let var_map = &sc.var_maps[ctx.k][ctx.i];
    if h.is_linear() {
        push_quadratic(&mut sc.minlp, ctx.name.clone(), linear_hull_row(&h, var_map, ctx.y));
        return Ok(false);
    }
    if emit_s3 {
        let vars: Vec<usize> = h.quadratic_part().vars().into_iter().collect();
        if is_psd(&h.dense_block(&vars)) {
            s3::emit(sc, ctx.k, ctx.i, ctx.y, &ctx.name, &h);
            return Ok(true);
        }
        warnings.push(format!("{}: Q is not PSD, S3 skipped", ctx.location));
    }
    let row = exact_hull_row(&h, var_map, ctx.y);
    push_quadratic(&mut sc.minlp, ctx.name.clone(), row);
    Ok(false)
}

fn poly_row(
    minlp: &mut MinlpModel,
    ctx: &RowCtx<'_>,
    body: &Body,
    var_map: &BTreeMap<usize, usize>,
) -> Result<(), ReformError> {
    let p = body.to_polynomial();
    if p.degree() == 0 {
        return Err(ReformError::Degenerate {
            location: ctx.location.clone(),
            method: Method::HullPoly,
        });
    }
    push_poly(minlp, ctx.name.clone(), poly_hull_row(&p, var_map, ctx.y));
    Ok(())
}
