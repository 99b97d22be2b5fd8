use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Index of a variable inside the model that owns an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// `xᵀQx + cᵀx + d` with `Q` kept symmetric.
///
/// Only the upper triangle of `Q` is stored. An off-diagonal entry `(i, j)`
/// holds the symmetric matrix value `Q_ij = Q_ji`, so the expression contains
/// `2 Q_ij x_i x_j` for it. Exact zeros are never stored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "QuadraticRepr", try_from = "QuadraticRepr")]
pub struct QuadraticExpr {
    quad: BTreeMap<(usize, usize), f64>,
    lin: BTreeMap<usize, f64>,
    constant: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadraticRepr {
    #[serde(default)]
    quad: Vec<(usize, usize, f64)>,
    #[serde(default)]
    lin: Vec<(usize, f64)>,
    #[serde(default)]
    constant: f64,
}

impl From<QuadraticExpr> for QuadraticRepr {
    fn from(e: QuadraticExpr) -> Self {
        QuadraticRepr {
            quad: e.quad.into_iter().map(|((i, j), v)| (i, j, v)).collect(),
            lin: e.lin.into_iter().collect(),
            constant: e.constant,
        }
    }
}

impl TryFrom<QuadraticRepr> for QuadraticExpr {
    type Error = String;

    fn try_from(r: QuadraticRepr) -> Result<Self, String> {
        let mut e = QuadraticExpr::constant(r.constant);
        for (i, j, v) in r.quad {
            if i > j {
                return Err(format!("quadratic entry ({i}, {j}) is below the diagonal"));
            }
            e.add_matrix_entry(i, j, v);
        }
        for (i, v) in r.lin {
            e.add_linear(i, v);
        }
        Ok(e)
    }
}

fn bump<K: Ord>(map: &mut BTreeMap<K, f64>, key: K, value: f64) {
    if value == 0.0 {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(slot) => {
            slot.insert(value);
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += value;
            if *slot.get() == 0.0 {
                slot.remove();
            }
        }
    }
}

impl QuadraticExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(d: f64) -> Self {
        QuadraticExpr {
            constant: d,
            ..Self::default()
        }
    }

    /// Builds the expression from a dense (not necessarily symmetric) matrix.
    /// The stored matrix is `(Q + Qᵀ)/2`, which leaves every value unchanged.
    pub fn from_dense(q: &[Vec<f64>], c: &[f64], d: f64) -> Self {
        let mut e = Self::constant(d);
        for (i, row) in q.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                e.add_term(i, j, v);
            }
        }
        for (i, &v) in c.iter().enumerate() {
            e.add_linear(i, v);
        }
        e
    }

    /// Adds `coef · x_i · x_j`.
    pub fn add_term(&mut self, i: usize, j: usize, coef: f64) {
        if i == j {
            bump(&mut self.quad, (i, i), coef);
        } else {
            bump(&mut self.quad, (i.min(j), i.max(j)), coef / 2.0);
        }
    }

    /// Adds `value` to the symmetric matrix entries `Q_ij` and `Q_ji`.
    pub fn add_matrix_entry(&mut self, i: usize, j: usize, value: f64) {
        bump(&mut self.quad, (i.min(j), i.max(j)), value);
    }

    pub fn add_linear(&mut self, i: usize, coef: f64) {
        bump(&mut self.lin, i, coef);
    }

    pub fn add_constant(&mut self, d: f64) {
        self.constant += d;
    }

    pub fn with_term(mut self, i: usize, j: usize, coef: f64) -> Self {
        self.add_term(i, j, coef);
        self
    }

    pub fn with_linear(mut self, i: usize, coef: f64) -> Self {
        self.add_linear(i, coef);
        self
    }

    /// Symmetric matrix value `Q_ij`.
    pub fn matrix_entry(&self, i: usize, j: usize) -> f64 {
        self.quad.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    pub fn linear_coef(&self, i: usize) -> f64 {
        self.lin.get(&i).copied().unwrap_or(0.0)
    }

    /// Upper-triangle entries `(i, j, Q_ij)` in canonical order.
    pub fn quad_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.quad.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn linear_entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.lin.iter().map(|(&i, &v)| (i, v))
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn is_linear(&self) -> bool {
        self.quad.is_empty()
    }

    pub fn degree(&self) -> u32 {
        if !self.quad.is_empty() {
            2
        } else if !self.lin.is_empty() {
            1
        } else {
            0
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = self.lin.keys().copied().collect();
        for &(i, j) in self.quad.keys() {
            out.insert(i);
            out.insert(j);
        }
        out
    }

    pub fn max_var(&self) -> Option<usize> {
        self.vars().into_iter().next_back()
    }

    pub fn coefficients_finite(&self) -> bool {
        self.constant.is_finite()
            && self.quad.values().all(|v| v.is_finite())
            && self.lin.values().all(|v| v.is_finite())
    }

    fn check_dim(&self, len: usize) -> Result<(), ModelError> {
        match self.max_var() {
            Some(m) if m >= len => Err(ModelError::DimensionMismatch {
                needed: m + 1,
                got: len,
            }),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, ModelError> {
        self.check_dim(x.len())?;
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the dimension check; panics on out-of-range indices.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut acc = self.constant;
        for (&(i, j), &q) in &self.quad {
            if i == j {
                acc += q * x[i] * x[i];
            } else {
                acc += 2.0 * q * x[i] * x[j];
            }
        }
        for (&i, &c) in &self.lin {
            acc += c * x[i];
        }
        acc
    }

    /// Adds `scale · ∇e(x)` into `grad`.
    pub fn add_gradient(&self, x: &[f64], scale: f64, grad: &mut [f64]) {
        for (&(i, j), &q) in &self.quad {
            if i == j {
                grad[i] += scale * 2.0 * q * x[i];
            } else {
                grad[i] += scale * 2.0 * q * x[j];
                grad[j] += scale * 2.0 * q * x[i];
            }
        }
        for (&i, &c) in &self.lin {
            grad[i] += scale * c;
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut out = Self::constant(self.constant * k);
        for (&(i, j), &q) in &self.quad {
            out.add_matrix_entry(i, j, q * k);
        }
        for (&i, &c) in &self.lin {
            out.add_linear(i, c * k);
        }
        out
    }

    pub fn add_expr(&mut self, other: &QuadraticExpr) {
        for (&(i, j), &q) in &other.quad {
            self.add_matrix_entry(i, j, q);
        }
        for (&i, &c) in &other.lin {
            self.add_linear(i, c);
        }
        self.constant += other.constant;
    }

    /// Re-indexes every variable through `f`.
    pub fn map_vars(&self, mut f: impl FnMut(usize) -> usize) -> Self {
        let mut out = Self::constant(self.constant);
        for (&(i, j), &q) in &self.quad {
            out.add_matrix_entry(f(i), f(j), q);
        }
        for (&i, &c) in &self.lin {
            out.add_linear(f(i), c);
        }
        out
    }

    /// Quadratic part only (`xᵀQx`).
    pub fn quadratic_part(&self) -> Self {
        QuadraticExpr {
            quad: self.quad.clone(),
            ..Self::default()
        }
    }

    /// Dense symmetric `Q` restricted to `vars`, in the given order.
    pub fn dense_block(&self, vars: &[usize]) -> Vec<Vec<f64>> {
        vars.iter()
            .map(|&i| vars.iter().map(|&j| self.matrix_entry(i, j)).collect())
            .collect()
    }
}

impl fmt::Display for QuadraticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (&(i, j), &q) in &self.quad {
            if i == j {
                parts.push(format!("{q} x{i}^2"));
            } else {
                parts.push(format!("{} x{i}*x{j}", 2.0 * q));
            }
        }
        for (&i, &c) in &self.lin {
            parts.push(format!("{c} x{i}"));
        }
        if self.constant != 0.0 || parts.is_empty() {
            parts.push(format!("{}", self.constant));
        }
        write!(f, "{}", parts.join(" + "))
    }
}
