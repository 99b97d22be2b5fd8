use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ModelError, QuadraticExpr};

/// Product of variable powers, kept sorted by variable index with positive
/// exponents. The derived ordering is the canonical monomial order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![(i, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for (i, e) in powers {
            if e > 0 {
                *acc.entry(i).or_insert(0) += e;
            }
        }
        Monomial(acc.into_iter().collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn powers(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_powers(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|&(i, e)| x[i].powi(e as i32)).product()
    }

    fn is_valid(&self) -> bool {
        self.0.windows(2).all(|w| w[0].0 < w[1].0) && self.0.iter().all(|&(_, e)| e > 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(i, e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Polynomial as a sparse map from monomial to coefficient.
///
/// The homogeneous components `p_k` are derived by grouping monomials by total
/// degree, so each component only ever holds monomials of its own degree.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "PolyRepr", try_from = "PolyRepr")]
pub struct PolynomialExpr {
    terms: BTreeMap<Monomial, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    terms: Vec<(Monomial, f64)>,
}

impl From<PolynomialExpr> for PolyRepr {
    fn from(p: PolynomialExpr) -> Self {
        PolyRepr {
            terms: p.terms.into_iter().collect(),
        }
    }
}

impl TryFrom<PolyRepr> for PolynomialExpr {
    type Error = String;

    fn try_from(r: PolyRepr) -> Result<Self, String> {
        let mut p = PolynomialExpr::new();
        for (m, c) in r.terms {
            if !m.is_valid() {
                return Err(format!("monomial {m:?} is not in canonical form"));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }
}

impl PolynomialExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(d: f64) -> Self {
        let mut p = Self::new();
        p.add_term(Monomial::one(), d);
        p
    }

    pub fn add_term(&mut self, m: Monomial, coef: f64) {
        if coef == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(coef);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coef;
                if *slot.get() == 0.0 {
                    slot.remove();
                }
            }
        }
    }

    pub fn with_term(mut self, powers: &[(usize, u32)], coef: f64) -> Self {
        self.add_term(Monomial::from_powers(powers.iter().copied()), coef);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> f64 {
        self.terms.get(&Monomial::one()).copied().unwrap_or(0.0)
    }

    /// Homogeneous components keyed by degree.
    pub fn components(&self) -> BTreeMap<u32, PolynomialExpr> {
        let mut out: BTreeMap<u32, PolynomialExpr> = BTreeMap::new();
        for (m, &c) in &self.terms {
            out.entry(m.degree()).or_default().add_term(m.clone(), c);
        }
        out
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(i, _)| i))
            .collect()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.vars().into_iter().next_back()
    }

    pub fn coefficients_finite(&self) -> bool {
        self.terms.values().all(|c| c.is_finite())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, ModelError> {
        if let Some(m) = self.max_var() {
            if m >= x.len() {
                return Err(ModelError::DimensionMismatch {
                    needed: m + 1,
                    got: x.len(),
                });
            }
        }
        Ok(self.eval_unchecked(x))
    }

    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, &c)| c * m.eval(x)).sum()
    }

    /// Adds `scale · ∇p(x)` into `grad`.
    pub fn add_gradient(&self, x: &[f64], scale: f64, grad: &mut [f64]) {
        for (m, &c) in &self.terms {
            for (k, &(i, e)) in m.0.iter().enumerate() {
                let mut d = c * f64::from(e) * x[i].powi(e as i32 - 1);
                for (l, &(j, f)) in m.0.iter().enumerate() {
                    if l != k {
                        d *= x[j].powi(f as i32);
                    }
                }
                grad[i] += scale * d;
            }
        }
    }

    pub fn mul(&self, other: &PolynomialExpr) -> PolynomialExpr {
        let mut out = PolynomialExpr::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }

    pub fn add_poly(&mut self, other: &PolynomialExpr) {
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn scaled(&self, k: f64) -> PolynomialExpr {
        let mut out = PolynomialExpr::new();
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn map_vars(&self, mut f: impl FnMut(usize) -> usize) -> PolynomialExpr {
        let mut out = PolynomialExpr::new();
        for (m, &c) in &self.terms {
            out.add_term(Monomial::from_powers(m.0.iter().map(|&(i, e)| (f(i), e))), c);
        }
        out
    }

    /// Lossless conversion when every monomial has degree at most two.
    pub fn to_quadratic(&self) -> Option<QuadraticExpr> {
        let mut q = QuadraticExpr::new();
        for (m, &c) in &self.terms {
            match m.0.as_slice() {
                [] => q.add_constant(c),
                [(i, 1)] => q.add_linear(*i, c),
                [(i, 2)] => q.add_term(*i, *i, c),
                [(i, 1), (j, 1)] => q.add_term(*i, *j, c),
                _ => return None,
            }
        }
        Some(q)
    }
}

impl From<&QuadraticExpr> for PolynomialExpr {
    fn from(q: &QuadraticExpr) -> Self {
        let mut p = PolynomialExpr::constant(q.constant_term());
        for (i, j, v) in q.quad_entries() {
            if i == j {
                p.add_term(Monomial::from_powers([(i, 2)]), v);
            } else {
                p.add_term(Monomial::from_powers([(i, 1), (j, 1)]), 2.0 * v);
            }
        }
        for (i, c) in q.linear_entries() {
            p.add_term(Monomial::var(i), c);
        }
        p
    }
}

impl fmt::Display for PolynomialExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c} {m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
