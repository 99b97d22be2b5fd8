//! Typed models for generalized disjunctive programs and their flat MINLP
//! reformulations, plus the evaluation helpers every other module builds on.

mod expr;
mod interval;
mod logic;
mod minlp;
mod poly;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use expr::{QuadraticExpr, VarId};
pub use interval::{interval_bound, interval_bound_poly, Interval};
pub use logic::{logic_to_linear, LogicRow};
pub use minlp::{
    LinearRow, MinlpModel, MinlpVar, NonlinearRow, RowBody, Sense, VarRole,
};
pub use poly::{Monomial, PolynomialExpr};
pub use validate::{validate, Diagnostic, DiagnosticCode};

/// Absolute slack under which `h(x) ≤ 0` counts as satisfied.
pub const FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("point has {got} coordinates but the expression needs {needed}")]
    DimensionMismatch { needed: usize, got: usize },
    #[error("variable {name} has an infinite bound")]
    UnboundedVariable { name: String },
    #[error("unknown indicator `{0}`")]
    UnknownIndicator(String),
    #[error("model failed validation: {}", .0.iter().map(|d| d.code.as_str()).collect::<Vec<_>>().join(", "))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variable {
    pub name: String,
    #[serde(with = "crate::io::bound_serde")]
    pub lower: f64,
    #[serde(with = "crate::io::bound_serde")]
    pub upper: f64,
    pub kind: VarKind,
}

impl Variable {
    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Variable {
            name: name.into(),
            lower,
            upper,
            kind: VarKind::Continuous,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }
}

/// Left-hand side of a `body ≤ 0` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Body {
    Quadratic(QuadraticExpr),
    Polynomial(PolynomialExpr),
}

impl Body {
    pub fn eval(&self, x: &[f64]) -> Result<f64, ModelError> {
        match self {
            Body::Quadratic(q) => q.eval(x),
            Body::Polynomial(p) => p.eval(x),
        }
    }

    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Body::Quadratic(q) => q.eval_unchecked(x),
            Body::Polynomial(p) => p.eval_unchecked(x),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Body::Quadratic(q) => q.degree(),
            Body::Polynomial(p) => p.degree(),
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        match self {
            Body::Quadratic(q) => q.vars(),
            Body::Polynomial(p) => p.vars(),
        }
    }

    pub fn to_polynomial(&self) -> PolynomialExpr {
        match self {
            Body::Quadratic(q) => PolynomialExpr::from(q),
            Body::Polynomial(p) => p.clone(),
        }
    }

    /// Quadratic view when the body has degree at most two.
    pub fn to_quadratic(&self) -> Option<QuadraticExpr> {
        match self {
            Body::Quadratic(q) => Some(q.clone()),
            Body::Polynomial(p) => p.to_quadratic(),
        }
    }

    pub fn negated(&self) -> Body {
        match self {
            Body::Quadratic(q) => Body::Quadratic(q.scaled(-1.0)),
            Body::Polynomial(p) => Body::Polynomial(p.scaled(-1.0)),
        }
    }

    fn coefficients_finite(&self) -> bool {
        match self {
            Body::Quadratic(q) => q.coefficients_finite(),
            Body::Polynomial(p) => p.coefficients_finite(),
        }
    }
}

impl From<QuadraticExpr> for Body {
    fn from(q: QuadraticExpr) -> Self {
        Body::Quadratic(q)
    }
}

impl From<PolynomialExpr> for Body {
    fn from(p: PolynomialExpr) -> Self {
        Body::Polynomial(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    User,
    /// `-h ≤ 0` half of an equality `h = 0`.
    EqualitySplitLo,
    /// `h ≤ 0` half of an equality `h = 0`.
    EqualitySplitHi,
}

/// `body ≤ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub body: Body,
    pub origin: Origin,
}

impl Constraint {
    pub fn le(name: impl Into<String>, body: impl Into<Body>) -> Self {
        Constraint {
            name: name.into(),
            body: body.into(),
            origin: Origin::User,
        }
    }

    /// Splits `h = 0` into `h ≤ 0` and `-h ≤ 0`.
    pub fn equality(name: impl Into<String>, body: impl Into<Body>) -> [Constraint; 2] {
        let name = name.into();
        let body = body.into();
        let neg = body.negated();
        [
            Constraint {
                name: format!("{name}_hi"),
                body,
                origin: Origin::EqualitySplitHi,
            },
            Constraint {
                name: format!("{name}_lo"),
                body: neg,
                origin: Origin::EqualitySplitLo,
            },
        ]
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.body.eval_unchecked(x) <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disjunct {
    pub indicator: String,
    pub constraints: Vec<Constraint>,
}

impl Disjunct {
    pub fn new(indicator: impl Into<String>) -> Self {
        Disjunct {
            indicator: indicator.into(),
            constraints: Vec::new(),
        }
    }

    pub fn with(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn with_all(mut self, cs: impl IntoIterator<Item = Constraint>) -> Self {
        self.constraints.extend(cs);
        self
    }

    /// Continuous variables referenced by any constraint of this disjunct.
    pub fn vars(&self) -> BTreeSet<usize> {
        self.constraints.iter().flat_map(|c| c.body.vars()).collect()
    }
}

/// Exactly one disjunct holds; the XOR over indicators is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disjunction {
    pub id: String,
    pub disjuncts: Vec<Disjunct>,
}

impl Disjunction {
    pub fn new(id: impl Into<String>, disjuncts: Vec<Disjunct>) -> Self {
        Disjunction {
            id: id.into(),
            disjuncts,
        }
    }

    /// Variables appearing in any disjunct, in ascending order.
    pub fn vars(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.disjuncts.iter().flat_map(Disjunct::vars).collect();
        set.into_iter().collect()
    }
}

/// CNF clause `⋁ positive ∨ ⋁ ¬negative`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicClause {
    #[serde(default)]
    pub positive: BTreeSet<String>,
    #[serde(default)]
    pub negative: BTreeSet<String>,
}

impl LogicClause {
    pub fn new<P, N>(positive: P, negative: N) -> Self
    where
        P: IntoIterator,
        P::Item: Into<String>,
        N: IntoIterator,
        N::Item: Into<String>,
    {
        LogicClause {
            positive: positive.into_iter().map(Into::into).collect(),
            negative: negative.into_iter().map(Into::into).collect(),
        }
    }

    /// `a ⇒ b`.
    pub fn implies(a: impl Into<String>, b: impl Into<String>) -> Self {
        LogicClause::new([b.into()], [a.into()])
    }

    pub fn holds(&self, truth: impl Fn(&str) -> bool) -> bool {
        self.positive.iter().any(|p| truth(p)) || self.negative.iter().any(|n| !truth(n))
    }
}

/// `min f(x)` subject to global rows, disjunctions and logic.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdpModel {
    #[serde(default)]
    pub name: String,
    pub variables: Vec<Variable>,
    pub objective: QuadraticExpr,
    #[serde(default)]
    pub global_constraints: Vec<Constraint>,
    #[serde(default)]
    pub disjunctions: Vec<Disjunction>,
    #[serde(default)]
    pub logic: Vec<LogicClause>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl GdpModel {
    pub fn new(name: impl Into<String>) -> Self {
        GdpModel {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.variables.push(Variable::continuous(name, lower, upper));
        self.variables.len() - 1
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.variables.iter().map(|v| (v.lower, v.upper)).collect()
    }

    /// Indicator names in declaration order (disjunction, then disjunct).
    pub fn indicators(&self) -> Vec<String> {
        self.disjunctions
            .iter()
            .flat_map(|d| d.disjuncts.iter().map(|j| j.indicator.clone()))
            .collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Number of joint disjunct selections, saturating at `usize::MAX`.
    pub fn assignment_count(&self) -> usize {
        self.disjunctions
            .iter()
            .fold(1usize, |acc, d| acc.saturating_mul(d.disjuncts.len()))
    }

    /// Does the selection `choice[k]` (one disjunct per disjunction) satisfy
    /// every logic clause?
    pub fn assignment_is_consistent(&self, choice: &[usize]) -> bool {
        let active: BTreeSet<&str> = self
            .disjunctions
            .iter()
            .zip(choice)
            .filter_map(|(d, &i)| d.disjuncts.get(i).map(|j| j.indicator.as_str()))
            .collect();
        self.logic.iter().all(|c| c.holds(|name| active.contains(name)))
    }

    /// Feasibility of `x` for the globals and the selected disjuncts.
    pub fn is_feasible_under(&self, choice: &[usize], x: &[f64], tol: f64) -> bool {
        let in_box = self
            .variables
            .iter()
            .zip(x)
            .all(|(v, &xi)| xi >= v.lower - tol && xi <= v.upper + tol);
        in_box
            && self.global_constraints.iter().all(|c| c.is_satisfied(x, tol))
            && self.disjunctions.iter().zip(choice).all(|(d, &i)| {
                d.disjuncts[i].constraints.iter().all(|c| c.is_satisfied(x, tol))
            })
    }
}

/// Iterates over every joint selection of one disjunct per disjunction, in
/// lexicographic order with the last disjunction varying fastest.
pub fn for_each_assignment(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut choice = vec![0usize; sizes.len()];
    loop {
        f(&choice);
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < sizes[k] {
                break;
            }
            choice[k] = 0;
        }
    }
}
