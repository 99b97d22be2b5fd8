//! Monte-Carlo size of a continuous relaxation, projected onto the original
//! variables.
//!
//! A box point `x` counts as feasible when a witness completing it to a full
//! relaxed column vector is found. Witnesses are built per disjunction: each
//! sampled `y` on the simplex (vertices first, then Dirichlet(1) draws) is
//! paired with one feasible anchor `a_i` per disjunct, copies are set to
//! `v_i = y_i a_i`, and one residual disjunct `r` absorbs the remainder
//! `v_r = x − Σ_{i≠r} y_i a_i`. Glover columns are placed at whichever end of
//! their interval helps the rows they appear in. Rows spanning several
//! disjunctions (logic) are not checked.
//!
//! The search only finds witnesses, so every fraction is a lower estimate.
//! Every method is probed at the same `x` and `y`, which keeps the estimates
//! comparable.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{GdpModel, MinlpModel, RowBody, Sense, VarRole};
use crate::oracle::{batch_rng, brute_force_solve, BruteForceBudget, BruteForceStatus};
use crate::reform::{reformulate, Method, ReformConfig};

const ROW_TOL: f64 = 1e-7;
const BATCH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TightnessConfig {
    pub samples: usize,
    pub y_samples: usize,
    pub seed: u64,
}

impl Default for TightnessConfig {
    fn default() -> Self {
        TightnessConfig {
            samples: 10_000,
            y_samples: 32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TightnessEstimate {
    pub feasible: usize,
    pub samples: usize,
}

impl TightnessEstimate {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.feasible as f64 / self.samples as f64
        }
    }

    /// Binomial standard error of [`fraction`](Self::fraction).
    pub fn sigma(&self) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        let p = self.fraction();
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }

    /// `self ≤ other` up to `k` combined standard errors.
    pub fn le_within(&self, other: &TightnessEstimate, k: f64) -> bool {
        self.fraction() <= other.fraction() + k * self.sigma().hypot(other.sigma())
    }
}

/// One feasible point per disjunct, found on the disjunct's own rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchors {
    pub points: Vec<Vec<Option<Vec<f64>>>>,
}

impl Anchors {
    pub fn compute(gdp: &GdpModel) -> Self {
        let points = gdp
            .disjunctions
            .iter()
            .map(|d| d.disjuncts.iter().map(|j| anchor_for(gdp, &j.constraints)).collect())
            .collect();
        Anchors { points }
    }
}

fn anchor_for(gdp: &GdpModel, rows: &[crate::model::Constraint]) -> Option<Vec<f64>> {
    let mut sub = GdpModel::new("anchor");
    sub.variables = gdp.variables.clone();
    sub.global_constraints = rows.to_vec();
    let (minlp, _) = reformulate(&sub, &ReformConfig::new(Method::Bigm)).ok()?;
    let res = brute_force_solve(&minlp, &BruteForceBudget::default()).ok()?;
    if res.status != BruteForceStatus::HeuristicFeasible {
        return None;
    }
    let w = res.best_point?;
    Some((0..gdp.variables.len()).map(|i| w[minlp.original(i).expect("original column")]).collect())
}

#[derive(Debug, Clone, Copy)]
enum RowRef {
    Linear(usize),
    Nonlinear(usize),
}

struct Block {
    rows: Vec<RowRef>,
    /// Indicator column per disjunct.
    y: Vec<usize>,
    /// `(original var, column)` copies per disjunct.
    copies: Vec<Vec<(usize, usize)>>,
    /// `(z, v, y, lo, up, prefer_low)` per Glover column.
    glover: Vec<(usize, usize, usize, f64, f64, bool)>,
}

struct Layout {
    originals: Vec<(usize, usize)>,
    globals: Vec<RowRef>,
    blocks: Vec<Block>,
}

fn row_vars(m: &MinlpModel, r: RowRef) -> Vec<usize> {
    match r {
        RowRef::Linear(i) => m.linear[i].terms.keys().copied().collect(),
        RowRef::Nonlinear(i) => m.nonlinear[i].body.vars().into_iter().collect(),
    }
}

fn layout(m: &MinlpModel, n_disjunctions: usize, sizes: &[usize]) -> Layout {
    let owner = |j: usize| match m.vars[j].role {
        VarRole::Original { .. } => None,
        VarRole::Indicator { disjunction, .. }
        | VarRole::Disaggregated { disjunction, .. }
        | VarRole::Glover { disjunction, .. } => Some(disjunction),
    };
    let mut blocks: Vec<Block> = (0..n_disjunctions)
        .map(|k| Block {
            rows: Vec::new(),
            y: vec![usize::MAX; sizes[k]],
            copies: vec![Vec::new(); sizes[k]],
            glover: Vec::new(),
        })
        .collect();
    let mut originals = Vec::new();
    let mut copy_col: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for (j, v) in m.vars.iter().enumerate() {
        match v.role {
            VarRole::Original { var } => originals.push((var, j)),
            VarRole::Indicator { disjunction, disjunct } => blocks[disjunction].y[disjunct] = j,
            VarRole::Disaggregated { var, disjunction, disjunct } => {
                blocks[disjunction].copies[disjunct].push((var, j));
                copy_col.insert((disjunction, disjunct, var), j);
            }
            VarRole::Glover { .. } => {}
        }
    }

    let refs = (0..m.linear.len()).map(RowRef::Linear).chain((0..m.nonlinear.len()).map(RowRef::Nonlinear));
    let mut globals = Vec::new();
    for r in refs {
        let mut ks: Vec<usize> = row_vars(m, r).into_iter().filter_map(owner).collect();
        ks.sort_unstable();
        ks.dedup();
        match ks.as_slice() {
            [] => globals.push(r),
            [k] => blocks[*k].rows.push(r),
            _ => {}
        }
    }

    for (z, v) in m.vars.iter().enumerate() {
        if let VarRole::Glover { var, disjunction, disjunct } = v.role {
            let vcol = copy_col[&(disjunction, disjunct, var)];
            let coef_sum: f64 = m
                .nonlinear
                .iter()
                .filter_map(|r| match &r.body {
                    RowBody::Quadratic(q) => Some(q.linear_coef(z)),
                    _ => None,
                })
                .sum();
            let b = &mut blocks[disjunction];
            let y = b.y[disjunct];
            b.glover.push((z, vcol, y, m.vars[vcol].lower, m.vars[vcol].upper, coef_sum >= 0.0));
        }
    }
    Layout { originals, globals, blocks }
}

fn row_ok(m: &MinlpModel, r: RowRef, w: &[f64]) -> bool {
    match r {
        RowRef::Linear(i) => {
            let row = &m.linear[i];
            let lhs = row.lhs(w);
            match row.sense {
                Sense::Le => lhs <= row.rhs + ROW_TOL,
                Sense::Ge => lhs >= row.rhs - ROW_TOL,
                Sense::Eq => (lhs - row.rhs).abs() <= ROW_TOL,
            }
        }
        RowRef::Nonlinear(i) => m.nonlinear[i].body.eval(w) <= ROW_TOL,
    }
}

/// Simplex samples for one disjunction: the vertices, then Dirichlet(1).
fn simplex_samples(k: usize, n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..k.min(n))
        .map(|i| (0..k).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    while out.len() < n {
        let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        out.push(e.into_iter().map(|v| v / s).collect());
    }
    out
}

fn block_witness(
    m: &MinlpModel,
    b: &Block,
    anchors: &[Option<Vec<f64>>],
    ys: &[Vec<f64>],
    x: &[f64],
    w: &mut [f64],
) -> bool {
    let d = b.y.len();
    for y in ys {
        for r in 0..d {
            // Disjuncts without an anchor can only take y = 0.
            let mut yy = y.clone();
            for (i, a) in anchors.iter().enumerate() {
                if i != r && a.is_none() {
                    yy[i] = 0.0;
                }
            }
            let s: f64 = yy.iter().sum();
            if s <= 0.0 {
                continue;
            }
            yy.iter_mut().for_each(|v| *v /= s);
            if yy[r] == 0.0 && yy.iter().any(|&v| v != 0.0 && v != 1.0) {
                continue;
            }
            for i in 0..d {
                w[b.y[i]] = yy[i];
            }
            for i in (0..d).filter(|&i| i != r) {
                let a = anchors[i].as_deref();
                for &(var, col) in &b.copies[i] {
                    w[col] = yy[i] * a.map_or(0.0, |a| a[var]);
                }
            }
            for &(var, col) in &b.copies[r] {
                let others: f64 = (0..d)
                    .filter(|&i| i != r)
                    .map(|i| yy[i] * anchors[i].as_deref().map_or(0.0, |a| a[var]))
                    .sum();
                w[col] = x[var] - others;
            }
            for &(z, v, yc, lo, up, low) in &b.glover {
                let (yv, vv) = (w[yc], w[v]);
                let lower = (lo * yv).max(vv - up * (1.0 - yv));
                let upper = (up * yv).min(vv - lo * (1.0 - yv));
                w[z] = if low { lower } else { upper };
            }
            if b.rows.iter().all(|&row| row_ok(m, row, w)) {
                return true;
            }
        }
    }
    false
}

/// Fraction of uniform box samples whose completion is found feasible for
/// the relaxation of `minlp`. `gdp` supplies the box and the disjunction
/// shapes; `anchors` must come from the same `gdp`.
pub fn tightness_proxy(gdp: &GdpModel, minlp: &MinlpModel, anchors: &Anchors, cfg: &TightnessConfig) -> TightnessEstimate {
    let sizes: Vec<usize> = gdp.disjunctions.iter().map(|d| d.disjuncts.len()).collect();
    let lay = layout(minlp, sizes.len(), &sizes);
    let bounds = gdp.bounds();
    let n_batches = cfg.samples.div_ceil(BATCH);
    let feasible: usize = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = batch_rng(cfg.seed, batch);
            let count = BATCH.min(cfg.samples - batch * BATCH);
            let mut w = vec![0.0; minlp.vars.len()];
            let mut hits = 0;
            for _ in 0..count {
                let x: Vec<f64> = bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect();
                // Draw every disjunction's y samples up front so that all
                // methods see the same stream.
                let ys: Vec<Vec<Vec<f64>>> = sizes.iter().map(|&k| simplex_samples(k, cfg.y_samples, &mut rng)).collect();
                w.iter_mut().for_each(|v| *v = 0.0);
                for &(var, col) in &lay.originals {
                    w[col] = x[var];
                }
                let ok = lay.globals.iter().all(|&r| row_ok(minlp, r, &w))
                    && lay
                        .blocks
                        .iter()
                        .enumerate()
                        .all(|(k, b)| block_witness(minlp, b, &anchors.points[k], &ys[k], &x, &mut w));
                hits += usize::from(ok);
            }
            hits
        })
        .sum();
    TightnessEstimate {
        feasible,
        samples: cfg.samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, Disjunct, Disjunction, QuadraticExpr};

    /// `x ∈ [-4, 4]`, disjuncts `(x+2)² ≤ 1` and `(x−2)² ≤ 1`. The hull is
    /// `[-3, 3]`. Interval `M` is 35 for both rows. At `x = 4` the `L` row
    /// forces `y_L = 0` and the `R` row then needs `3 ≤ 35 y_L`, so Big-M
    /// misses a band at each end of the box.
    fn two_intervals() -> GdpModel {
        let mut m = GdpModel::new("two");
        let x = m.add_var("x", -4.0, 4.0);
        let ball = |c: f64| {
            let mut h = QuadraticExpr::new().with_term(x, x, 1.0).with_linear(x, -2.0 * c);
            h.add_constant(c * c - 1.0);
            h
        };
        m.disjunctions.push(Disjunction::new(
            "d",
            vec![
                Disjunct::new("L").with(Constraint::le("l", ball(-2.0))),
                Disjunct::new("R").with(Constraint::le("r", ball(2.0))),
            ],
        ));
        m
    }

    fn estimate(m: &GdpModel, cfg: ReformConfig, anchors: &Anchors) -> TightnessEstimate {
        let (minlp, _) = reformulate(m, &cfg).unwrap();
        tightness_proxy(m, &minlp, anchors, &TightnessConfig { samples: 4000, y_samples: 32, seed: 3 })
    }

    #[test]
    fn hull_fraction_matches_the_convex_hull() {
        let m = two_intervals();
        let anchors = Anchors::compute(&m);
        let exact = estimate(&m, ReformConfig::new(Method::HullExact), &anchors);
        // True hull fraction is 6/8; anchors sit inside each ball, so most of
        // it is found.
        assert!(exact.fraction() <= 0.75 + 3.0 * exact.sigma());
        assert!(exact.fraction() > 0.5, "{exact:?}");
        let bigm = estimate(&m, ReformConfig::new(Method::Bigm), &anchors);
        assert!(bigm.fraction() > 0.85, "{bigm:?}");
        assert!(exact.le_within(&bigm, 3.0));
        let eps = estimate(&m, ReformConfig::new(Method::HullEps), &anchors);
        assert!(exact.feasible <= eps.feasible);
        assert!(eps.le_within(&bigm, 3.0));
        let s3 = estimate(&m, ReformConfig::new(Method::HullExact).with_s3(), &anchors);
        assert!(s3.feasible >= exact.feasible);
    }

    #[test]
    fn simplex_samples_start_at_vertices() {
        let mut rng = batch_rng(0, 0);
        let s = simplex_samples(3, 8, &mut rng);
        assert_eq!(s.len(), 8);
        assert_eq!(s[1], vec![0.0, 1.0, 0.0]);
        for y in &s {
            assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(y.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn estimate_statistics() {
        let e = TightnessEstimate { feasible: 25, samples: 100 };
        assert_eq!(e.fraction(), 0.25);
        assert!((e.sigma() - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(e.le_within(&TightnessEstimate { feasible: 20, samples: 100 }, 3.0));
        assert!(!e.le_within(&TightnessEstimate { feasible: 0, samples: 100 }, 1.0));
    }
}
