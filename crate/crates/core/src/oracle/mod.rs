//! Independent evaluators and sampling checks used to verify transforms
//! without an external solver.

mod brute;
mod closure;
mod fixed;
mod instances;
mod sampling;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Body, PolynomialExpr, QuadraticExpr, RowBody};
use crate::reform::{exact_hull_row, poly_hull_row};

pub use brute::{brute_force_solve, BruteForceBudget, BruteForceResult, BruteForceStatus, MAX_ASSIGNMENTS};
pub use closure::eval_perspective_closure;
pub use fixed::{canonical_point, fixed_binary_check};
pub use instances::{random_polynomial, random_quadratic};
pub use sampling::{PerspectivePoint, PerspectiveSampler, SMALL_Y};

/// Half-width of the band around zero excluded from sign comparisons.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Samples per deterministic batch; each batch owns an RNG stream.
const BATCH: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("closure undefined at y = 0 with v ≠ 0")]
    ClosureDomain,
    #[error("y = {0} is outside [0, 1]")]
    YOutOfRange(f64),
    #[error("INCONSISTENT_ASSIGNMENT: selection {0:?} violates XOR or logic")]
    InconsistentAssignment(Vec<usize>),
    #[error("{0} binaries exceed the enumeration bound of {1}")]
    EnumerationBound(usize, usize),
    #[error("variable `{0}` needs finite bounds for sampling")]
    Unbounded(String),
    #[error("point has {got} coordinates, expected {needed}")]
    DimensionMismatch { needed: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub point: Vec<f64>,
    pub lhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MembershipReport {
    pub samples_total: usize,
    pub agree: usize,
    pub disagree: Vec<Disagreement>,
    /// Samples inside the boundary band; counted as agreeing.
    pub banded: usize,
    /// Largest `|a − b|` between the compared row values.
    pub max_abs_gap: f64,
}

impl MembershipReport {
    pub fn is_clean(&self) -> bool {
        self.disagree.is_empty()
    }

    fn merge(mut self, other: MembershipReport) -> MembershipReport {
        self.samples_total += other.samples_total;
        self.agree += other.agree;
        self.banded += other.banded;
        self.disagree.extend(other.disagree);
        self.max_abs_gap = self.max_abs_gap.max(other.max_abs_gap);
        self
    }
}

/// Outcome of comparing one sample.
pub(crate) enum Verdict {
    Agree { gap: f64 },
    Banded { gap: f64 },
    Disagree { point: Vec<f64>, lhs: Vec<f64> },
}

pub(crate) fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Runs `sample` `n` times over fixed batches (in parallel) and aggregates
/// in batch order, so the report depends only on `seed`.
pub(crate) fn run_batches<F>(n: usize, seed: u64, sample: F) -> MembershipReport
where
    F: Fn(&mut ChaCha8Rng) -> Verdict + Sync,
{
    let batches = n.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let count = BATCH.min(n - b * BATCH);
            let mut rep = MembershipReport::default();
            for _ in 0..count {
                rep.samples_total += 1;
                match sample(&mut rng) {
                    Verdict::Agree { gap } => {
                        rep.agree += 1;
                        rep.max_abs_gap = rep.max_abs_gap.max(gap);
                    }
                    Verdict::Banded { gap } => {
                        rep.agree += 1;
                        rep.banded += 1;
                        rep.max_abs_gap = rep.max_abs_gap.max(gap);
                    }
                    Verdict::Disagree { point, lhs } => rep.disagree.push(Disagreement { point, lhs }),
                }
            }
            rep
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(MembershipReport::default(), MembershipReport::merge)
}

fn sign_verdict(point: &PerspectivePoint, a: f64, b: f64) -> Verdict {
    let gap = (a - b).abs();
    if a.abs() <= BOUNDARY_BAND || b.abs() <= BOUNDARY_BAND {
        Verdict::Banded { gap }
    } else if (a <= 0.0) == (b <= 0.0) {
        Verdict::Agree { gap }
    } else {
        let mut p = point.v.clone();
        p.push(point.y);
        Verdict::Disagree { point: p, lhs: vec![a, b] }
    }
}

fn identity_map(n: usize) -> BTreeMap<usize, usize> {
    (0..n).map(|i| (i, i)).collect()
}

/// Compares the closure row `y·h(v/y)` (S1) with the exact hull row
/// `vᵀQv + (cᵀv)y + dy²` (S2) on sampled `(v, y)`.
pub fn check_s1_s2(h: &QuadraticExpr, bounds: &[(f64, f64)], n_samples: usize, seed: u64) -> MembershipReport {
    let n = bounds.len();
    let s2 = exact_hull_row(h, &identity_map(n), n);
    let body = Body::Quadratic(h.clone());
    check_against_closure(&body, bounds, n_samples, seed, |w| s2.eval_unchecked(w))
}

/// Same comparison for the degree-d polynomial hull row
/// `Σ_k p_k(v) y^{d−k}`.
pub fn check_poly_hull(p: &PolynomialExpr, bounds: &[(f64, f64)], n_samples: usize, seed: u64) -> MembershipReport {
    let n = bounds.len();
    let row = poly_hull_row(p, &identity_map(n), n);
    let body = Body::Polynomial(p.clone());
    check_against_closure(&body, bounds, n_samples, seed, |w| row.eval_unchecked(w))
}

fn check_against_closure(
    body: &Body,
    bounds: &[(f64, f64)],
    n_samples: usize,
    seed: u64,
    row: impl Fn(&[f64]) -> f64 + Sync,
) -> MembershipReport {
    let sampler = PerspectiveSampler::new(bounds.to_vec());
    run_batches(n_samples, seed, |rng| {
        let p = sampler.sample(rng);
        let a = eval_perspective_closure(body, &p).expect("sampler stays in the domain");
        let mut w = p.v.clone();
        w.push(p.y);
        sign_verdict(&p, a, row(&w))
    })
}

/// Every sampled point feasible for all `inner` rows must be feasible for all
/// `outer` rows. Rows are `≤ 0` over the same column space.
pub fn check_containment<S>(inner: &[RowBody], outer: &[RowBody], sampler: S, n: usize, seed: u64) -> MembershipReport
where
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let max_of = |rows: &[RowBody], w: &[f64]| rows.iter().map(|r| r.eval(w)).fold(f64::NEG_INFINITY, f64::max);
    run_batches(n, seed, |rng| {
        let w = sampler(rng);
        let a = max_of(inner, &w);
        let b = max_of(outer, &w);
        let gap = (a - b).abs();
        if a > 0.0 || b <= 0.0 {
            Verdict::Agree { gap }
        } else if b <= BOUNDARY_BAND || a >= -BOUNDARY_BAND {
            Verdict::Banded { gap }
        } else {
            Verdict::Disagree {
                point: w,
                lhs: vec![a, b],
            }
        }
    })
}
