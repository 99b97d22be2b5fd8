use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{PolynomialExpr, QuadraticExpr, VarKind};

/// Where a MINLP column came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VarRole {
    Original { var: usize },
    Indicator { disjunction: usize, disjunct: usize },
    Disaggregated { var: usize, disjunction: usize, disjunct: usize },
    Glover { var: usize, disjunction: usize, disjunct: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinlpVar {
    pub name: String,
    #[serde(with = "crate::io::bound_serde")]
    pub lower: f64,
    #[serde(with = "crate::io::bound_serde")]
    pub upper: f64,
    pub kind: VarKind,
    pub role: VarRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `Σ terms[j] · w_j  (sense)  rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearRow {
    pub name: String,
    pub terms: BTreeMap<usize, f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearRow {
    pub fn new(name: impl Into<String>, sense: Sense, rhs: f64) -> Self {
        LinearRow {
            name: name.into(),
            terms: BTreeMap::new(),
            sense,
            rhs,
        }
    }

    pub fn with(mut self, j: usize, coef: f64) -> Self {
        self.add(j, coef);
        self
    }

    pub fn add(&mut self, j: usize, coef: f64) {
        let slot = self.terms.entry(j).or_insert(0.0);
        *slot += coef;
        if *slot == 0.0 {
            self.terms.remove(&j);
        }
    }

    pub fn lhs(&self, w: &[f64]) -> f64 {
        self.terms.iter().map(|(&j, &c)| c * w[j]).sum()
    }

    /// Amount by which the row is violated (0 when satisfied).
    pub fn violation(&self, w: &[f64]) -> f64 {
        let r = self.lhs(w) - self.rhs;
        match self.sense {
            Sense::Le => r.max(0.0),
            Sense::Ge => (-r).max(0.0),
            Sense::Eq => r.abs(),
        }
    }
}

/// Left-hand side of a nonlinear `body ≤ 0` row over the MINLP columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowBody {
    Quadratic(QuadraticExpr),
    Polynomial(PolynomialExpr),
    /// `quad(v) / ((1−ε)y + ε) + affine(v, y)`.
    EpsQuadratic {
        quad: QuadraticExpr,
        affine: QuadraticExpr,
        y: usize,
        eps: f64,
    },
    /// `D · h(v / D) − ε h(0) (1 − y)` with `D = (1−ε)y + ε`; `h` is written
    /// over original variable indices and `var_map` sends each one to its
    /// disaggregated column.
    EpsPerspective {
        body: PolynomialExpr,
        var_map: BTreeMap<usize, usize>,
        y: usize,
        eps: f64,
    },
}

fn denom(y: f64, eps: f64) -> f64 {
    (1.0 - eps) * y + eps
}

impl RowBody {
    pub fn eval(&self, w: &[f64]) -> f64 {
        match self {
            RowBody::Quadratic(q) => q.eval_unchecked(w),
            RowBody::Polynomial(p) => p.eval_unchecked(w),
            RowBody::EpsQuadratic { quad, affine, y, eps } => {
                quad.eval_unchecked(w) / denom(w[*y], *eps) + affine.eval_unchecked(w)
            }
            RowBody::EpsPerspective { body, var_map, y, eps } => {
                let d = denom(w[*y], *eps);
                let u = scaled_point(body, var_map, w, d);
                d * body.eval_unchecked(&u) - eps * body.constant_term() * (1.0 - w[*y])
            }
        }
    }

    /// Adds `scale · ∇body(w)` into `grad`.
    pub fn add_gradient(&self, w: &[f64], scale: f64, grad: &mut [f64]) {
        match self {
            RowBody::Quadratic(q) => q.add_gradient(w, scale, grad),
            RowBody::Polynomial(p) => p.add_gradient(w, scale, grad),
            RowBody::EpsQuadratic { quad, affine, y, eps } => {
                let d = denom(w[*y], *eps);
                quad.add_gradient(w, scale / d, grad);
                grad[*y] -= scale * (1.0 - eps) * quad.eval_unchecked(w) / (d * d);
                affine.add_gradient(w, scale, grad);
            }
            RowBody::EpsPerspective { body, var_map, y, eps } => {
                let d = denom(w[*y], *eps);
                let u = scaled_point(body, var_map, w, d);
                let mut gu = vec![0.0; u.len()];
                body.add_gradient(&u, 1.0, &mut gu);
                let mut dot = 0.0;
                for (&i, &j) in var_map {
                    grad[j] += scale * gu[i];
                    dot += gu[i] * u[i];
                }
                let h = body.eval_unchecked(&u);
                grad[*y] += scale * ((1.0 - eps) * (h - dot) + eps * body.constant_term());
            }
        }
    }

    /// Columns the row depends on.
    pub fn vars(&self) -> BTreeSet<usize> {
        match self {
            RowBody::Quadratic(q) => q.vars(),
            RowBody::Polynomial(p) => p.vars(),
            RowBody::EpsQuadratic { quad, affine, y, .. } => {
                let mut s = quad.vars();
                s.extend(affine.vars());
                s.insert(*y);
                s
            }
            RowBody::EpsPerspective { var_map, y, .. } => {
                let mut s: BTreeSet<usize> = var_map.values().copied().collect();
                s.insert(*y);
                s
            }
        }
    }

    /// Polynomial degree; rational rows report `None`.
    pub fn degree(&self) -> Option<u32> {
        match self {
            RowBody::Quadratic(q) => Some(q.degree()),
            RowBody::Polynomial(p) => Some(p.degree()),
            _ => None,
        }
    }
}

fn scaled_point(body: &PolynomialExpr, var_map: &BTreeMap<usize, usize>, w: &[f64], d: f64) -> Vec<f64> {
    let n = body.max_var().map_or(0, |m| m + 1);
    let mut u = vec![0.0; n];
    for (&i, &j) in var_map {
        if i < n {
            u[i] = w[j] / d;
        }
    }
    u
}

/// `body ≤ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearRow {
    pub name: String,
    pub body: RowBody,
}

/// Flat model: `min objective(w)` over bounded columns with linear and
/// nonlinear rows.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinlpModel {
    #[serde(default)]
    pub name: String,
    pub vars: Vec<MinlpVar>,
    pub objective: QuadraticExpr,
    #[serde(default)]
    pub linear: Vec<LinearRow>,
    #[serde(default)]
    pub nonlinear: Vec<NonlinearRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MinlpModel {
    pub fn add_var(&mut self, var: MinlpVar) -> usize {
        self.vars.push(var);
        self.vars.len() - 1
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.vars.iter().map(|v| (v.lower, v.upper)).collect()
    }

    pub fn binaries(&self) -> Vec<usize> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(j, _)| j)
            .collect()
    }

    /// Column of the indicator for `(disjunction, disjunct)`.
    pub fn indicator(&self, k: usize, i: usize) -> Option<usize> {
        self.vars.iter().position(|v| {
            v.role
                == VarRole::Indicator {
                    disjunction: k,
                    disjunct: i,
                }
        })
    }

    /// Column of original variable `var`.
    pub fn original(&self, var: usize) -> Option<usize> {
        self.vars
            .iter()
            .position(|v| v.role == VarRole::Original { var })
    }

    pub fn count_role(&self, pred: impl Fn(&VarRole) -> bool) -> usize {
        self.vars.iter().filter(|v| pred(&v.role)).count()
    }

    /// Largest violation over bounds, linear rows and nonlinear rows.
    pub fn max_violation(&self, w: &[f64]) -> f64 {
        let bound = self
            .vars
            .iter()
            .zip(w)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
            .fold(0.0, f64::max);
        let lin = self.linear.iter().map(|r| r.violation(w)).fold(0.0, f64::max);
        let nl = self
            .nonlinear
            .iter()
            .map(|r| r.body.eval(w).max(0.0))
            .fold(0.0, f64::max);
        bound.max(lin).max(nl)
    }

    /// Every row and bound holds within `tol`; NaN counts as infeasible.
    pub fn is_feasible(&self, w: &[f64], tol: f64) -> bool {
        let v = self.max_violation(w);
        v.is_finite() && v <= tol
    }

    /// Rows that have been lowered, rewritten or flagged during transformation.
    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_diff(body: &RowBody, w: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..w.len())
            .map(|j| {
                let mut a = w.to_vec();
                let mut b = w.to_vec();
                a[j] += h;
                b[j] -= h;
                (body.eval(&a) - body.eval(&b)) / (2.0 * h)
            })
            .collect()
    }

    fn check_gradient(body: &RowBody, w: &[f64]) {
        let mut g = vec![0.0; w.len()];
        body.add_gradient(w, 1.0, &mut g);
        for (a, b) in g.iter().zip(finite_diff(body, w)) {
            assert!((a - b).abs() < 1e-5 * (1.0 + b.abs()), "{g:?}");
        }
    }

    #[test]
    fn eps_quadratic_matches_formula() {
        // v² / (0.9999 y + 0.0001) − y
        let body = RowBody::EpsQuadratic {
            quad: QuadraticExpr::new().with_term(0, 0, 1.0),
            affine: QuadraticExpr::new().with_linear(1, -1.0),
            y: 1,
            eps: 1e-4,
        };
        let w = [0.3, 0.5];
        let expect = 0.09 / (0.9999 * 0.5 + 0.0001) - 0.5;
        assert!((body.eval(&w) - expect).abs() < 1e-15);
        check_gradient(&body, &w);
    }

    #[test]
    fn eps_perspective_on_quadratic_equals_simplified_row() {
        // For quadratics the −ε h(0)(1−y) term cancels against D·d.
        let h = QuadraticExpr::from_dense(&[vec![2.0, 0.5], vec![0.5, 1.0]], &[0.3, -0.7], -1.5);
        let eps = 1e-3;
        let general = RowBody::EpsPerspective {
            body: PolynomialExpr::from(&h),
            var_map: BTreeMap::from([(0, 2), (1, 3)]),
            y: 4,
            eps,
        };
        let simplified = RowBody::EpsQuadratic {
            quad: h.quadratic_part().map_vars(|i| i + 2),
            affine: QuadraticExpr::new()
                .with_linear(2, 0.3)
                .with_linear(3, -0.7)
                .with_linear(4, -1.5),
            y: 4,
            eps,
        };
        for w in [[9.0, 9.0, 0.2, -0.1, 0.3], [0.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.0, -0.9, 0.4, 1.0]] {
            assert!((general.eval(&w) - simplified.eval(&w)).abs() < 1e-12);
            check_gradient(&general, &w);
        }
    }

    #[test]
    fn linear_row_violation() {
        let r = LinearRow::new("xor", Sense::Eq, 1.0).with(0, 1.0).with(1, 1.0);
        assert_eq!(r.violation(&[0.5, 0.5]), 0.0);
        assert!((r.violation(&[0.2, 0.5]) - 0.3).abs() < 1e-15);
        let g = LinearRow::new("g", Sense::Ge, 0.0).with(0, 1.0).with(1, -1.0);
        assert_eq!(g.violation(&[1.0, 0.0]), 0.0);
        assert_eq!(g.violation(&[0.0, 1.0]), 1.0);
    }

    #[test]
    fn role_is_tagged() {
        let v = MinlpVar {
            name: "v_x_0_1".into(),
            lower: -1.0,
            upper: 1.0,
            kind: VarKind::Continuous,
            role: VarRole::Disaggregated {
                var: 0,
                disjunction: 0,
                disjunct: 1,
            },
        };
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"role\":{\"kind\":\"disaggregated\""), "{s}");
        let back: MinlpVar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
