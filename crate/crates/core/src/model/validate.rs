use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Body, GdpModel, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    InvalidBounds,
    UnknownVariable,
    NonContinuousReference,
    NonFiniteCoefficient,
    UnboundedDisjunctVar,
    EmptyDisjunction,
    DuplicateIndicator,
    UnknownIndicator,
    ClauseLiteralConflict,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::InvalidBounds => "INVALID_BOUNDS",
            DiagnosticCode::UnknownVariable => "UNKNOWN_VARIABLE",
            DiagnosticCode::NonContinuousReference => "NON_CONTINUOUS_REFERENCE",
            DiagnosticCode::NonFiniteCoefficient => "NON_FINITE_COEFFICIENT",
            DiagnosticCode::UnboundedDisjunctVar => "UNBOUNDED_DISJUNCT_VAR",
            DiagnosticCode::EmptyDisjunction => "EMPTY_DISJUNCTION",
            DiagnosticCode::DuplicateIndicator => "DUPLICATE_INDICATOR",
            DiagnosticCode::UnknownIndicator => "UNKNOWN_INDICATOR",
            DiagnosticCode::ClauseLiteralConflict => "CLAUSE_LITERAL_CONFLICT",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    /// JSON-pointer style location inside the model.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.location, self.message)
    }
}

struct Collector {
    out: Vec<Diagnostic>,
}

impl Collector {
    fn push(&mut self, code: DiagnosticCode, location: impl Into<String>, message: impl Into<String>) {
        self.out.push(Diagnostic {
            code,
            location: location.into(),
            message: message.into(),
        });
    }

    fn check_body(&mut self, model: &GdpModel, body: &Body, loc: &str, continuous_only: bool) {
        let n = model.variables.len();
        if !body.coefficients_finite() {
            self.push(DiagnosticCode::NonFiniteCoefficient, loc, "coefficient is NaN or infinite");
        }
        for v in body.vars() {
            if v >= n {
                self.push(
                    DiagnosticCode::UnknownVariable,
                    loc,
                    format!("variable index {v} is not declared ({n} variables)"),
                );
            } else if continuous_only && model.variables[v].kind != VarKind::Continuous {
                self.push(
                    DiagnosticCode::NonContinuousReference,
                    loc,
                    format!("`{}` is not continuous", model.variables[v].name),
                );
            }
        }
    }
}

/// Checks every structural invariant of `model`; an empty result means the
/// model is well formed.
pub fn validate(model: &GdpModel) -> Vec<Diagnostic> {
    let mut c = Collector { out: Vec::new() };
    let n = model.variables.len();

    for (i, v) in model.variables.iter().enumerate() {
        if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
            c.push(
                DiagnosticCode::InvalidBounds,
                format!("/variables/{i}"),
                format!("`{}` has bounds [{}, {}]", v.name, v.lower, v.upper),
            );
        }
    }

    let obj = Body::Quadratic(model.objective.clone());
    c.check_body(model, &obj, "/objective", true);
    for (i, g) in model.global_constraints.iter().enumerate() {
        c.check_body(model, &g.body, &format!("/global_constraints/{i}"), true);
    }

    let mut unbounded: BTreeMap<usize, String> = BTreeMap::new();
    let mut seen_indicators: BTreeSet<&str> = BTreeSet::new();
    for (k, disj) in model.disjunctions.iter().enumerate() {
        if disj.disjuncts.is_empty() {
            c.push(
                DiagnosticCode::EmptyDisjunction,
                format!("/disjunctions/{k}"),
                format!("disjunction `{}` has no disjuncts", disj.id),
            );
        }
        for (i, dj) in disj.disjuncts.iter().enumerate() {
            let loc = format!("/disjunctions/{k}/disjuncts/{i}");
            if !seen_indicators.insert(dj.indicator.as_str()) {
                c.push(
                    DiagnosticCode::DuplicateIndicator,
                    &loc,
                    format!("indicator `{}` is declared twice", dj.indicator),
                );
            }
            for (j, con) in dj.constraints.iter().enumerate() {
                c.check_body(model, &con.body, &format!("{loc}/constraints/{j}"), false);
            }
            for v in dj.vars() {
                if v < n && !model.variables[v].is_bounded() {
                    unbounded.entry(v).or_insert_with(|| loc.clone());
                }
            }
        }
    }
    for (v, loc) in unbounded {
        c.push(
            DiagnosticCode::UnboundedDisjunctVar,
            loc,
            format!("`{}` appears in a disjunct but has an infinite bound", model.variables[v].name),
        );
    }

    for (i, clause) in model.logic.iter().enumerate() {
        let loc = format!("/logic/{i}");
        for lit in clause.positive.iter().chain(&clause.negative) {
            if !seen_indicators.contains(lit.as_str()) {
                c.push(DiagnosticCode::UnknownIndicator, &loc, format!("literal `{lit}` is not an indicator"));
            }
        }
        for both in clause.positive.intersection(&clause.negative) {
            c.push(
                DiagnosticCode::ClauseLiteralConflict,
                &loc,
                format!("`{both}` appears both positive and negative"),
            );
        }
    }

    c.out
}
