use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Body, Constraint, Disjunct, Disjunction, GdpModel, QuadraticExpr};
use crate::reform::min_eigenvalue;

use super::{invalid, GenError};

/// Box applied to every variable of a random instance.
pub const RANDOM_BOX: (f64, f64) = (-10.0, 10.0);

const SHIFT_DELTA: f64 = 1e-9;
const INJECT_SLACK: f64 = 1e-3;

fn default_points() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomGdpParams {
    pub n_dims: usize,
    pub n_disjunctions: usize,
    pub disjuncts_per: usize,
    pub constraints_per: usize,
    #[serde(default = "default_points")]
    pub n_feasible_points: usize,
    #[serde(default)]
    pub convex: bool,
    #[serde(default)]
    pub seed: u64,
}

impl RandomGdpParams {
    pub fn new(n_dims: usize, n_disjunctions: usize, disjuncts_per: usize, constraints_per: usize, seed: u64) -> Self {
        RandomGdpParams {
            n_dims,
            n_disjunctions,
            disjuncts_per,
            constraints_per,
            n_feasible_points: default_points(),
            convex: false,
            seed,
        }
    }

    pub fn convex(mut self) -> Self {
        self.convex = true;
        self
    }

    /// Sizes outside the ranges used by the published experiments. These
    /// are advisory only.
    pub fn range_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |name: &str, v: usize, lo: usize, hi: usize| {
            if v < lo || v > hi {
                out.push(format!("{name}={v} outside the usual range [{lo}, {hi}]"));
            }
        };
        check("n_dims", self.n_dims, 3, 9);
        check("n_disjunctions", self.n_disjunctions, 3, 10);
        check("disjuncts_per", self.disjuncts_per, 10, 15);
        check("constraints_per", self.constraints_per, 10, 10);
        out
    }

    fn validate(&self) -> Result<(), GenError> {
        let counts = [
            ("n_dims", self.n_dims),
            ("n_disjunctions", self.n_disjunctions),
            ("disjuncts_per", self.disjuncts_per),
            ("constraints_per", self.constraints_per),
        ];
        match counts.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => invalid(format!("{name} must be at least 1")),
            None => Ok(()),
        }
    }
}

/// A point made feasible during generation, with the disjunct chosen for it
/// in every disjunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectedPoint {
    pub x: Vec<f64>,
    pub designated: Vec<usize>,
}

fn uniform_quadratic(rng: &mut ChaCha8Rng, n: usize, with_constant: bool) -> QuadraticExpr {
    let q: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let d = if with_constant { rng.gen_range(-1.0..=1.0) } else { 0.0 };
    QuadraticExpr::from_dense(&q, &c, d)
}

fn shift_to_psd(h: &mut QuadraticExpr, n: usize) -> f64 {
    let idx: Vec<usize> = (0..n).collect();
    let lmin = min_eigenvalue(&h.dense_block(&idx));
    if lmin >= 0.0 {
        return 0.0;
    }
    let s = lmin.abs() + SHIFT_DELTA;
    for i in 0..n {
        h.add_term(i, i, s);
    }
    s
}

pub fn gen_random(p: &RandomGdpParams) -> Result<GdpModel, GenError> {
    p.validate()?;
    let n = p.n_dims;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut m = GdpModel::new(format!(
        "random_n{}_k{}_d{}_j{}_s{}",
        n, p.n_disjunctions, p.disjuncts_per, p.constraints_per, p.seed
    ));
    for i in 0..n {
        m.add_var(format!("x{i}"), RANDOM_BOX.0, RANDOM_BOX.1);
    }

    let mut max_shift = 0.0f64;
    for k in 0..p.n_disjunctions {
        let disjuncts = (0..p.disjuncts_per)
            .map(|i| {
                let rows = (0..p.constraints_per).map(|j| {
                    let mut h = uniform_quadratic(&mut rng, n, true);
                    if p.convex {
                        max_shift = max_shift.max(shift_to_psd(&mut h, n));
                    }
                    Constraint::le(format!("h{j}"), h)
                });
                Disjunct::new(format!("Y_{k}_{i}")).with_all(rows.collect::<Vec<_>>())
            })
            .collect();
        m.disjunctions.push(Disjunction::new(format!("D{k}"), disjuncts));
    }

    m.objective = uniform_quadratic(&mut rng, n, false);
    if p.convex {
        shift_to_psd(&mut m.objective, n);
    }

    let mut injected = Vec::with_capacity(p.n_feasible_points);
    for _ in 0..p.n_feasible_points {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(RANDOM_BOX.0..=RANDOM_BOX.1)).collect();
        let mut designated = Vec::with_capacity(p.n_disjunctions);
        for d in &mut m.disjunctions {
            let i = rng.gen_range(0..d.disjuncts.len());
            for c in &mut d.disjuncts[i].constraints {
                let h = c.body.eval_unchecked(&x);
                if h > -INJECT_SLACK {
                    if let Body::Quadratic(q) = &mut c.body {
                        q.add_constant(-(h + INJECT_SLACK));
                    }
                }
            }
            designated.push(i);
        }
        injected.push(InjectedPoint { x, designated });
    }

    let meta: BTreeMap<String, String> = [
        ("generator", "random".to_string()),
        ("seed", p.seed.to_string()),
        ("box", format!("[{}, {}]", RANDOM_BOX.0, RANDOM_BOX.1)),
        ("convex", p.convex.to_string()),
        ("objective_shifted", p.convex.to_string()),
        ("max_eigen_shift", format!("{max_shift:?}")),
        ("injection_slack", format!("{INJECT_SLACK:?}")),
        ("injected_points", serde_json::to_string(&injected).expect("finite points")),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .chain(
        p.range_warnings()
            .into_iter()
            .enumerate()
            .map(|(i, w)| (format!("range_warning_{i}"), w)),
    )
    .collect();
    m.metadata = meta;
    Ok(m)
}

/// Points recorded by [`gen_random`], if the model carries them.
pub fn injected_points(m: &GdpModel) -> Option<Vec<InjectedPoint>> {
    serde_json::from_str(m.metadata.get("injected_points")?).ok()
}
