use rand::Rng;
use serde::{Deserialize, Serialize};

/// Point `(v, y)` of the hull domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerspectivePoint {
    pub v: Vec<f64>,
    pub y: f64,
}

/// Values of `y` that stress the small-`y` regime.
pub const SMALL_Y: [f64; 3] = [1e-6, 1e-4, 1e-2];

/// Draws `(v, y)`: about 1% at the origin, 5% with `y` pinned to one of
/// [`SMALL_Y`], the rest with `y` uniform on `(0, 1]`; then
/// `v_j ~ U[x^ℓ_j y, x^u_j y]`.
#[derive(Debug, Clone)]
pub struct PerspectiveSampler {
    bounds: Vec<(f64, f64)>,
}

impl PerspectiveSampler {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        PerspectiveSampler { bounds }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> PerspectivePoint {
        let u: f64 = rng.gen();
        if u < 0.01 {
            return PerspectivePoint {
                v: vec![0.0; self.bounds.len()],
                y: 0.0,
            };
        }
        let y = if u < 0.06 {
            SMALL_Y[rng.gen_range(0..SMALL_Y.len())]
        } else {
            1.0 - rng.gen::<f64>()
        };
        let v = self
            .bounds
            .iter()
            .map(|&(lo, hi)| y * (lo + (hi - lo) * rng.gen::<f64>()))
            .collect();
        PerspectivePoint { v, y }
    }
}
