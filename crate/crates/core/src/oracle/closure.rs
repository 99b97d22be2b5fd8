use crate::model::Body;

use super::{OracleError, PerspectivePoint};

/// Closure of the perspective: `y·h(v/y)` for `y > 0`, and `0` at the origin.
pub fn eval_perspective_closure(h: &Body, p: &PerspectivePoint) -> Result<f64, OracleError> {
    if !(0.0..=1.0).contains(&p.y) {
        return Err(OracleError::YOutOfRange(p.y));
    }
    let needed = h.vars().into_iter().next_back().map_or(0, |m| m + 1);
    if p.v.len() < needed {
        return Err(OracleError::DimensionMismatch {
            needed,
            got: p.v.len(),
        });
    }
    if p.y == 0.0 {
        return if p.v.iter().all(|&v| v == 0.0) {
            Ok(0.0)
        } else {
            Err(OracleError::ClosureDomain)
        };
    }
    let x: Vec<f64> = p.v.iter().map(|v| v / p.y).collect();
    Ok(p.y * h.eval_unchecked(&x))
}
