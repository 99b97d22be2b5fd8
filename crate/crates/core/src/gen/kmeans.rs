use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Constraint, Disjunct, Disjunction, GdpModel, QuadraticExpr};

use super::{invalid, GenError};

/// Either explicit `points` or `n_points × n_dims` samples from `U[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KmeansParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub n_points: usize,
    #[serde(default)]
    pub n_dims: usize,
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
}

impl KmeansParams {
    pub fn from_points(points: Vec<Vec<f64>>, k: usize) -> Self {
        KmeansParams {
            n_points: points.len(),
            n_dims: points.first().map_or(0, Vec::len),
            points: Some(points),
            k,
            seed: 0,
        }
    }

    pub fn sampled(n_points: usize, n_dims: usize, k: usize, seed: u64) -> Self {
        KmeansParams {
            points: None,
            n_points,
            n_dims,
            k,
            seed,
        }
    }

    pub fn resolve_points(&self) -> Vec<Vec<f64>> {
        match &self.points {
            Some(p) => p.clone(),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..self.n_points)
                    .map(|_| (0..self.n_dims).map(|_| rng.gen_range(-1.0..=1.0)).collect())
                    .collect()
            }
        }
    }
}

pub fn gen_kmeans(p: &KmeansParams) -> Result<GdpModel, GenError> {
    let pts = p.resolve_points();
    let n = pts.len();
    let dims = pts.first().map_or(0, Vec::len);
    if p.k < 2 {
        return invalid("k must be at least 2");
    }
    if p.k > n {
        return invalid(format!("k = {} exceeds the number of points {n}", p.k));
    }
    if dims == 0 || pts.iter().any(|r| r.len() != dims) {
        return invalid("points must form a non-empty rectangular matrix");
    }
    if pts.iter().flatten().any(|v| !v.is_finite()) {
        return invalid("points must be finite");
    }

    let mut m = GdpModel::new(format!("kmeans_n{n}_d{dims}_k{}", p.k));
    let mut boxes = Vec::with_capacity(dims);
    for j in 0..dims {
        let lo = pts.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
        let pad = if hi > lo { 0.1 * (hi - lo) } else { 0.1 };
        boxes.push((lo - pad, hi + pad));
    }
    let dmax: f64 = boxes.iter().map(|(lo, hi)| (hi - lo).powi(2)).sum();

    let c: Vec<Vec<usize>> = (0..p.k)
        .map(|k| (0..dims).map(|j| m.add_var(format!("c_{k}_{j}"), boxes[j].0, boxes[j].1)).collect())
        .collect();
    let d: Vec<usize> = (0..n).map(|i| m.add_var(format!("d_{i}"), 0.0, dmax)).collect();

    for (i, pi) in pts.iter().enumerate() {
        let disjuncts = (0..p.k)
            .map(|k| {
                // Σ_j (p_ij − c_kj)² − d_i
                let mut h = QuadraticExpr::new().with_linear(d[i], -1.0);
                for (j, &pij) in pi.iter().enumerate() {
                    h.add_term(c[k][j], c[k][j], 1.0);
                    h.add_linear(c[k][j], -2.0 * pij);
                    h.add_constant(pij * pij);
                }
                Disjunct::new(format!("Y_{i}_{k}")).with(Constraint::le("dist", h))
            })
            .collect();
        m.disjunctions.push(Disjunction::new(format!("P{i}"), disjuncts));
    }
    for k in 1..p.k {
        let h = QuadraticExpr::new().with_linear(c[k - 1][0], 1.0).with_linear(c[k][0], -1.0);
        m.global_constraints.push(Constraint::le(format!("sym_{k}"), h));
    }
    for &di in &d {
        m.objective.add_linear(di, 1.0);
    }
    m.metadata.insert("generator".into(), "kmeans".into());
    m.metadata.insert("seed".into(), p.seed.to_string());
    m.metadata.insert("points".into(), serde_json::to_string(&pts).expect("finite points"));
    Ok(m)
}
