//! Row builders shared by the transforms and the oracles.
//!
//! Each builder takes a disjunct constraint written over original variable
//! indices, a map from those indices to disaggregated columns, and the
//! indicator column `y`.

use std::collections::BTreeMap;

use crate::model::{Monomial, PolynomialExpr, QuadraticExpr};

/// `vᵀQv + (cᵀv)·y + d·y²`.
pub fn exact_hull_row(h: &QuadraticExpr, var_map: &BTreeMap<usize, usize>, y: usize) -> QuadraticExpr {
    let mut row = h.quadratic_part().map_vars(|i| var_map[&i]);
    for (i, c) in h.linear_entries() {
        row.add_term(var_map[&i], y, c);
    }
    row.add_term(y, y, h.constant_term());
    row
}

/// `cᵀv + d·y`, the hull row of an affine body.
pub fn linear_hull_row(h: &QuadraticExpr, var_map: &BTreeMap<usize, usize>, y: usize) -> QuadraticExpr {
    let mut row = QuadraticExpr::new();
    for (i, c) in h.linear_entries() {
        row.add_linear(var_map[&i], c);
    }
    row.add_linear(y, h.constant_term());
    row
}

/// `Σ_k p_k(v) · y^{d−k}` for a polynomial of degree `d`; every monomial of
/// the result has total degree exactly `d`.
pub fn poly_hull_row(p: &PolynomialExpr, var_map: &BTreeMap<usize, usize>, y: usize) -> PolynomialExpr {
    let d = p.degree();
    let mut row = PolynomialExpr::new();
    for (m, c) in p.terms() {
        let lift = d - m.degree();
        let powers = m
            .powers()
            .iter()
            .map(|&(i, e)| (var_map[&i], e))
            .chain(std::iter::once((y, lift)));
        row.add_term(Monomial::from_powers(powers), c);
    }
    row
}

/// `y · h(x)`.
pub fn binary_mult_row(p: &PolynomialExpr, y: usize) -> PolynomialExpr {
    p.mul(&PolynomialExpr::new().with_term(&[(y, 1)], 1.0))
}

/// Quadratic part and affine remainder of the simplified ε-approximation row
/// `vᵀQv / ((1−ε)y + ε) + cᵀv + d·y`.
pub fn eps_hull_parts(
    h: &QuadraticExpr,
    var_map: &BTreeMap<usize, usize>,
    y: usize,
) -> (QuadraticExpr, QuadraticExpr) {
    (
        h.quadratic_part().map_vars(|i| var_map[&i]),
        linear_hull_row(h, var_map, y),
    )
}
