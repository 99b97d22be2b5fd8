use rand::Rng;

use crate::model::{Monomial, PolynomialExpr, QuadraticExpr};
use crate::reform::min_eigenvalue;

/// Random `xᵀQx + cᵀx + d` with entries in `[-1, 1]`. With `psd`, `Q = AᵀA/n`
/// for a random `A`; otherwise `Q` is redrawn until its smallest eigenvalue
/// is below `-1e-3`.
pub fn random_quadratic<R: Rng>(n: usize, psd: bool, rng: &mut R) -> QuadraticExpr {
    let draw = |rng: &mut R| -> Vec<Vec<f64>> { (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect() };
    let q = if psd {
        let a = draw(rng);
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum::<f64>() / n as f64).collect())
            .collect()
    } else {
        loop {
            let a = draw(rng);
            let s: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| 0.5 * (a[i][j] + a[j][i])).collect()).collect();
            if min_eigenvalue(&s) < -1e-3 {
                break s;
            }
        }
    };
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    QuadraticExpr::from_dense(&q, &c, rng.gen_range(-1.0..=1.0))
}

/// Random polynomial of exact degree `degree` in `n` variables: a constant,
/// then `n` monomials of each degree `1..=degree`, coefficients in `[-1, 1]`.
pub fn random_polynomial<R: Rng>(n: usize, degree: u32, rng: &mut R) -> PolynomialExpr {
    let mut p = PolynomialExpr::constant(rng.gen_range(-1.0..=1.0));
    for d in 1..=degree {
        for _ in 0..n {
            let powers = (0..d).map(|_| (rng.gen_range(0..n), 1));
            let m = Monomial::from_powers(powers);
            let c: f64 = rng.gen_range(-1.0..=1.0);
            p.add_term(m, c);
        }
    }
    if p.degree() < degree {
        p.add_term(Monomial::from_powers([(0, degree)]), 1.0);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::batch_rng;
    use crate::reform::is_psd;

    #[test]
    fn quadratic_kinds() {
        let mut rng = batch_rng(5, 0);
        for _ in 0..20 {
            let p = random_quadratic(3, true, &mut rng);
            assert!(is_psd(&p.dense_block(&[0, 1, 2])));
            let q = random_quadratic(3, false, &mut rng);
            assert!(min_eigenvalue(&q.dense_block(&[0, 1, 2])) < -1e-3);
        }
    }

    #[test]
    fn polynomial_degree_is_exact() {
        let mut rng = batch_rng(6, 0);
        for d in 1..=4 {
            for _ in 0..20 {
                assert_eq!(random_polynomial(3, d, &mut rng).degree(), d);
            }
        }
    }
}
