//! Desk-scale incumbent finder: enumerate binary assignments, presolve the
//! continuous part, then run a multistart augmented-Lagrangian projected
//! gradient method. Returned points are re-verified in the full column space,
//! so a reported incumbent is always feasible; optimality is not certified.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{LinearRow, MinlpModel, Sense, FEAS_TOL};

use super::{batch_rng, OracleError};

/// Largest number of binary assignments that will be enumerated.
pub const MAX_ASSIGNMENTS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceBudget {
    /// Starts per assignment; the first is the box midpoint.
    pub restarts: usize,
    /// Projected-gradient iterations per outer round.
    pub iters: usize,
    /// Initial step length.
    pub step: f64,
    /// Augmented-Lagrangian outer rounds.
    pub rounds: usize,
    pub seed: u64,
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        BruteForceBudget {
            restarts: 4,
            iters: 500,
            step: 1.0,
            rounds: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BruteForceStatus {
    HeuristicFeasible,
    ExhaustedInfeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub status: BruteForceStatus,
    pub best_objective: Option<f64>,
    pub best_point: Option<Vec<f64>>,
    /// Values of the binary columns, in column order.
    pub assignment: Option<Vec<u8>>,
    pub assignments_tried: usize,
    pub restarts_used: usize,
}

pub fn brute_force_solve(minlp: &MinlpModel, budget: &BruteForceBudget) -> Result<BruteForceResult, OracleError> {
    let binaries = minlp.binaries();
    let assignments = enumerate(minlp, &binaries)?;
    let outcomes: Vec<(Incumbent, usize)> = assignments
        .par_iter()
        .enumerate()
        .map(|(idx, bits)| {
            let mut fixed = vec![None; minlp.vars.len()];
            for (&j, &b) in binaries.iter().zip(bits) {
                fixed[j] = Some(f64::from(b));
            }
            match Reduced::presolve(minlp, &fixed) {
                Some(red) => red.solve(minlp, budget, idx),
                None => (None, 0),
            }
        })
        .collect();

    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut restarts_used = 0;
    for (idx, (res, r)) in outcomes.into_iter().enumerate() {
        restarts_used += r;
        if let Some((obj, w)) = res {
            if best.as_ref().is_none_or(|b| obj < b.0) {
                best = Some((obj, w, idx));
            }
        }
    }
    Ok(match best {
        Some((obj, w, idx)) => BruteForceResult {
            status: BruteForceStatus::HeuristicFeasible,
            best_objective: Some(obj),
            best_point: Some(w),
            assignment: Some(assignments[idx].clone()),
            assignments_tried: assignments.len(),
            restarts_used,
        },
        None => BruteForceResult {
            status: BruteForceStatus::ExhaustedInfeasible,
            best_objective: None,
            best_point: None,
            assignment: None,
            assignments_tried: assignments.len(),
            restarts_used,
        },
    })
}

/// Depth-first enumeration, pruned by rows that involve only binaries.
fn enumerate(minlp: &MinlpModel, binaries: &[usize]) -> Result<Vec<Vec<u8>>, OracleError> {
    let pos: std::collections::HashMap<usize, usize> = binaries.iter().enumerate().map(|(p, &j)| (j, p)).collect();
    let rows: Vec<Vec<(usize, f64)>> = minlp
        .linear
        .iter()
        .filter(|r| r.terms.keys().all(|j| pos.contains_key(j)))
        .map(|r| r.terms.iter().map(|(j, &c)| (pos[j], c)).collect())
        .collect();
    let senses: Vec<&LinearRow> = minlp
        .linear
        .iter()
        .filter(|r| r.terms.keys().all(|j| pos.contains_key(j)))
        .collect();

    let possible = |bits: &[Option<u8>]| {
        rows.iter().zip(&senses).all(|(terms, row)| {
            let (mut lo, mut hi) = (0.0, 0.0);
            for &(p, c) in terms {
                match bits[p] {
                    Some(b) => {
                        lo += c * f64::from(b);
                        hi += c * f64::from(b);
                    }
                    None => {
                        lo += c.min(0.0);
                        hi += c.max(0.0);
                    }
                }
            }
            let tol = 1e-9;
            match row.sense {
                Sense::Le => lo <= row.rhs + tol,
                Sense::Ge => hi >= row.rhs - tol,
                Sense::Eq => lo <= row.rhs + tol && hi >= row.rhs - tol,
            }
        })
    };

    let n = binaries.len();
    let mut out = Vec::new();
    let mut bits: Vec<Option<u8>> = vec![None; n];
    fn dfs(
        d: usize,
        bits: &mut Vec<Option<u8>>,
        out: &mut Vec<Vec<u8>>,
        possible: &dyn Fn(&[Option<u8>]) -> bool,
        n: usize,
    ) -> bool {
        if !possible(bits) {
            return true;
        }
        if d == n {
            if out.len() >= MAX_ASSIGNMENTS {
                return false;
            }
            out.push(bits.iter().map(|b| b.unwrap_or(0)).collect());
            return true;
        }
        for b in [0u8, 1] {
            bits[d] = Some(b);
            if !dfs(d + 1, bits, out, possible, n) {
                return false;
            }
        }
        bits[d] = None;
        true
    }
    if !dfs(0, &mut bits, &mut out, &possible, n) {
        return Err(OracleError::EnumerationBound(n, MAX_ASSIGNMENTS));
    }
    Ok(out)
}

/// Column `j = alpha · column(root) + beta`, or a constant when `root` is
/// `None`.
#[derive(Debug, Clone, Copy)]
struct Affine {
    root: Option<usize>,
    alpha: f64,
    beta: f64,
}

/// Best `(objective, point)` for one assignment.
type Incumbent = Option<(f64, Vec<f64>)>;

/// Linear row over free indices: `(terms, constant, sense, rhs)`.
type ReducedRow = (Vec<(usize, f64)>, f64, Sense, f64);

struct Reduced {
    /// Fully resolved representation of every column over the free roots.
    map: Vec<Affine>,
    /// Free root columns.
    free: Vec<usize>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    linear: Vec<ReducedRow>,
}

const PRESOLVE_TOL: f64 = 1e-9;

impl Reduced {
    /// Substitutes fixed binaries and propagates equalities with at most two
    /// free columns. Returns `None` when the assignment is infeasible.
    fn presolve(minlp: &MinlpModel, fixed: &[Option<f64>]) -> Option<Reduced> {
        let n = minlp.vars.len();
        let mut rep: Vec<Affine> = (0..n)
            .map(|j| match fixed[j] {
                Some(v) => Affine {
                    root: None,
                    alpha: 0.0,
                    beta: v,
                },
                None => Affine {
                    root: Some(j),
                    alpha: 1.0,
                    beta: 0.0,
                },
            })
            .collect();
        let mut lo: Vec<f64> = minlp.vars.iter().map(|v| v.lower).collect();
        let mut hi: Vec<f64> = minlp.vars.iter().map(|v| v.upper).collect();

        fn resolve(rep: &mut [Affine], j: usize) -> Affine {
            let a = rep[j];
            match a.root {
                Some(r) if r != j => {
                    let b = resolve(rep, r);
                    let out = Affine {
                        root: b.root,
                        alpha: a.alpha * b.alpha,
                        beta: a.alpha * b.beta + a.beta,
                    };
                    rep[j] = out;
                    out
                }
                _ => a,
            }
        }

        fn substitute(rep: &mut [Affine], row: &LinearRow) -> (Vec<(usize, f64)>, f64) {
            let mut acc: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
            let mut constant = 0.0;
            for (&j, &c) in &row.terms {
                let a = resolve(rep, j);
                constant += c * a.beta;
                if let Some(r) = a.root {
                    *acc.entry(r).or_insert(0.0) += c * a.alpha;
                }
            }
            let terms = acc.into_iter().filter(|&(_, c)| c.abs() > 1e-14).collect();
            (terms, constant)
        }

        let mut changed = true;
        let mut passes = 0;
        while changed && passes < 50 {
            changed = false;
            passes += 1;
            for row in &minlp.linear {
                let (terms, constant) = substitute(&mut rep, row);
                let rhs = row.rhs - constant;
                match (terms.as_slice(), row.sense) {
                    ([], sense) => {
                        let ok = match sense {
                            Sense::Le => rhs >= -PRESOLVE_TOL,
                            Sense::Ge => rhs <= PRESOLVE_TOL,
                            Sense::Eq => rhs.abs() <= PRESOLVE_TOL,
                        };
                        if !ok {
                            return None;
                        }
                    }
                    (&[(r, a)], Sense::Eq) => {
                        let v = rhs / a;
                        if v < lo[r] - PRESOLVE_TOL || v > hi[r] + PRESOLVE_TOL {
                            return None;
                        }
                        rep[r] = Affine {
                            root: None,
                            alpha: 0.0,
                            beta: v.clamp(lo[r], hi[r]),
                        };
                        changed = true;
                    }
                    (&[(r, a)], sense) => {
                        let bound = rhs / a;
                        let upper = matches!((sense, a > 0.0), (Sense::Le, true) | (Sense::Ge, false));
                        if upper && bound < hi[r] - PRESOLVE_TOL {
                            hi[r] = bound;
                            changed = true;
                        } else if !upper && bound > lo[r] + PRESOLVE_TOL {
                            lo[r] = bound;
                            changed = true;
                        }
                        if lo[r] > hi[r] + PRESOLVE_TOL {
                            return None;
                        }
                        // A zero-width range is a constant.
                        if hi[r] - lo[r] <= PRESOLVE_TOL {
                            rep[r] = Affine {
                                root: None,
                                alpha: 0.0,
                                beta: 0.5 * (lo[r] + hi[r]),
                            };
                            changed = true;
                        }
                    }
                    (&[(r1, a1), (r2, a2)], Sense::Eq) => {
                        // Eliminate the later column so original variables stay free.
                        let (keep, ak, elim, ae) = if r1 < r2 { (r1, a1, r2, a2) } else { (r2, a2, r1, a1) };
                        let alpha = -ak / ae;
                        let beta = rhs / ae;
                        rep[elim] = Affine {
                            root: Some(keep),
                            alpha,
                            beta,
                        };
                        let (mut l, mut h) = ((lo[elim] - beta) / alpha, (hi[elim] - beta) / alpha);
                        if alpha < 0.0 {
                            std::mem::swap(&mut l, &mut h);
                        }
                        lo[keep] = lo[keep].max(l);
                        hi[keep] = hi[keep].min(h);
                        if lo[keep] > hi[keep] + PRESOLVE_TOL {
                            return None;
                        }
                        changed = true;
                    }
                    _ => {}
                }
            }
        }

        let map: Vec<Affine> = (0..n).map(|j| resolve(&mut rep, j)).collect();
        let mut free: Vec<usize> = map.iter().filter_map(|a| a.root).collect();
        free.sort_unstable();
        free.dedup();
        let index: std::collections::HashMap<usize, usize> = free.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let map: Vec<Affine> = map
            .into_iter()
            .map(|a| Affine {
                root: a.root.map(|r| index[&r]),
                ..a
            })
            .collect();
        let lo_f: Vec<f64> = free.iter().map(|&r| lo[r].min(hi[r])).collect();
        let hi_f: Vec<f64> = free.iter().map(|&r| hi[r].max(lo[r])).collect();

        let mut linear = Vec::new();
        for row in &minlp.linear {
            let mut terms: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
            let mut constant = 0.0;
            for (&j, &c) in &row.terms {
                constant += c * map[j].beta;
                if let Some(r) = map[j].root {
                    *terms.entry(r).or_insert(0.0) += c * map[j].alpha;
                }
            }
            let terms: Vec<(usize, f64)> = terms.into_iter().filter(|&(_, c)| c.abs() > 1e-14).collect();
            if !terms.is_empty() {
                linear.push((terms, constant, row.sense, row.rhs));
            }
        }
        Some(Reduced {
            map,
            free,
            lo: lo_f,
            hi: hi_f,
            linear,
        })
    }

    fn expand(&self, u: &[f64]) -> Vec<f64> {
        self.map
            .iter()
            .map(|a| a.beta + a.root.map_or(0.0, |r| a.alpha * u[r]))
            .collect()
    }

    fn project(&self, u: &mut [f64]) {
        for (i, x) in u.iter_mut().enumerate() {
            *x = x.clamp(self.lo[i], self.hi[i]);
        }
    }

    /// Pulls a full-space gradient back onto the free roots.
    fn pull_back(&self, gw: &[f64], gu: &mut [f64]) {
        for (j, a) in self.map.iter().enumerate() {
            if let Some(r) = a.root {
                gu[r] += a.alpha * gw[j];
            }
        }
    }

    fn solve(&self, minlp: &MinlpModel, budget: &BruteForceBudget, idx: usize) -> (Option<(f64, Vec<f64>)>, usize) {
        let mut rng = batch_rng(budget.seed, idx);
        let mut best: Option<(f64, Vec<f64>)> = None;
        let dim = self.free.len();
        for start in 0..budget.restarts.max(1) {
            let mut u: Vec<f64> = (0..dim)
                .map(|i| {
                    let (l, h) = (self.lo[i].max(-1e3), self.hi[i].min(1e3));
                    if start == 0 {
                        0.5 * (l + h)
                    } else {
                        l + (h - l) * rng.gen::<f64>()
                    }
                })
                .collect();
            self.project(&mut u);
            let u = self.augmented_lagrangian(minlp, budget, u);
            let w = self.expand(&u);
            if minlp.is_feasible(&w, FEAS_TOL) {
                let obj = minlp.objective.eval_unchecked(&w);
                if best.as_ref().is_none_or(|b| obj < b.0) {
                    best = Some((obj, w));
                }
            }
        }
        (best, budget.restarts.max(1))
    }

    fn augmented_lagrangian(&self, minlp: &MinlpModel, budget: &BruteForceBudget, mut u: Vec<f64>) -> Vec<f64> {
        // Aim slightly inside every inequality so the verified point clears
        // the feasibility tolerance.
        const SHIFT: f64 = 1e-9;
        let n_lin = self.linear.len();
        let n_rows = n_lin + minlp.nonlinear.len();
        let mut lambda = vec![0.0; n_rows];
        let mut rho = 10.0;
        let mut prev_viol = f64::INFINITY;

        // Each row as `g(u)`; equality rows use `g = 0`, the rest `g ≤ 0`.
        let row_values = |u: &[f64], w: &[f64]| -> Vec<f64> {
            let mut g = Vec::with_capacity(n_rows);
            for (terms, constant, sense, rhs) in &self.linear {
                let lhs: f64 = constant + terms.iter().map(|&(r, c)| c * u[r]).sum::<f64>();
                g.push(match sense {
                    Sense::Le | Sense::Eq => lhs - rhs,
                    Sense::Ge => rhs - lhs,
                });
            }
            for row in &minlp.nonlinear {
                g.push(row.body.eval(w));
            }
            g
        };
        let is_eq = |i: usize| i < n_lin && self.linear[i].2 == Sense::Eq;

        for _ in 0..budget.rounds.max(1) {
            let value = |u: &[f64]| -> f64 {
                let w = self.expand(u);
                let g = row_values(u, &w);
                let mut v = minlp.objective.eval_unchecked(&w);
                for (i, &gi) in g.iter().enumerate() {
                    if is_eq(i) {
                        v += lambda[i] * gi + 0.5 * rho * gi * gi;
                    } else {
                        let t = (gi + SHIFT + lambda[i] / rho).max(0.0);
                        v += 0.5 * rho * t * t;
                    }
                }
                v
            };
            let gradient = |u: &[f64]| -> Vec<f64> {
                let w = self.expand(u);
                let g = row_values(u, &w);
                let mut gw = vec![0.0; w.len()];
                minlp.objective.add_gradient(&w, 1.0, &mut gw);
                let mut gu = vec![0.0; u.len()];
                for (i, &gi) in g.iter().enumerate() {
                    let weight = if is_eq(i) {
                        lambda[i] + rho * gi
                    } else {
                        rho * (gi + SHIFT + lambda[i] / rho).max(0.0)
                    };
                    if weight == 0.0 {
                        continue;
                    }
                    if i < n_lin {
                        let (terms, _, sense, _) = &self.linear[i];
                        let s = if *sense == Sense::Ge { -1.0 } else { 1.0 };
                        for &(r, c) in terms {
                            gu[r] += weight * s * c;
                        }
                    } else {
                        minlp.nonlinear[i - n_lin].body.add_gradient(&w, weight, &mut gw);
                    }
                }
                self.pull_back(&gw, &mut gu);
                gu
            };
            u = self.projected_gradient(u, budget, &value, &gradient);

            let w = self.expand(&u);
            let g = row_values(&u, &w);
            let mut viol: f64 = 0.0;
            for (i, &gi) in g.iter().enumerate() {
                if is_eq(i) {
                    lambda[i] += rho * gi;
                    viol = viol.max(gi.abs());
                } else {
                    lambda[i] = (lambda[i] + rho * (gi + SHIFT)).max(0.0);
                    viol = viol.max(gi.max(0.0));
                }
            }
            if viol <= 1e-11 && prev_viol <= 1e-11 {
                break;
            }
            if viol > 0.25 * prev_viol {
                rho = (rho * 10.0).min(1e4);
            }
            prev_viol = viol;
        }
        u
    }

    /// Projected gradient with Barzilai–Borwein steps and Armijo backtracking.
    fn projected_gradient(
        &self,
        mut u: Vec<f64>,
        budget: &BruteForceBudget,
        value: &dyn Fn(&[f64]) -> f64,
        gradient: &dyn Fn(&[f64]) -> Vec<f64>,
    ) -> Vec<f64> {
        let mut f = value(&u);
        let mut g = gradient(&u);
        let mut step = budget.step;
        for _ in 0..budget.iters {
            let mut t = step;
            let mut accepted = None;
            for _ in 0..60 {
                let mut cand: Vec<f64> = u.iter().zip(&g).map(|(x, d)| x - t * d).collect();
                self.project(&mut cand);
                let decrease: f64 = cand.iter().zip(&u).zip(&g).map(|((c, x), d)| d * (x - c)).sum();
                let fc = value(&cand);
                if fc <= f - 1e-4 * decrease {
                    accepted = Some((cand, fc));
                    break;
                }
                t *= 0.5;
            }
            let Some((cand, fc)) = accepted else { break };
            let gc = gradient(&cand);
            let s: Vec<f64> = cand.iter().zip(&u).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = gc.iter().zip(&g).map(|(a, b)| a - b).collect();
            let ss: f64 = s.iter().map(|x| x * x).sum();
            let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
            let moved = s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            u = cand;
            let improvement = f - fc;
            f = fc;
            g = gc;
            if moved < 1e-13 || improvement.abs() < 1e-16 * (1.0 + f.abs()) {
                break;
            }
            step = if sy > 0.0 { (ss / sy).clamp(1e-12, 1e12) } else { (t * 2.0).min(1e12) };
        }
        u
    }
}
