use nalgebra::{DMatrix, SymmetricEigen};

use crate::model::{LinearRow, MinlpVar, QuadraticExpr, Sense, VarKind, VarRole};

use super::{push_quadratic, Scaffold};

/// Smallest eigenvalue still accepted as PSD.
pub const PSD_TOL: f64 = -1e-10;

pub fn min_eigenvalue(q: &[Vec<f64>]) -> f64 {
    let n = q.len();
    if n == 0 {
        return 0.0;
    }
    let m = DMatrix::from_fn(n, n, |i, j| q[i][j]);
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn is_psd(q: &[Vec<f64>]) -> bool {
    min_eigenvalue(q) >= PSD_TOL
}

/// The four rows tying `z` to `v·y` for `v ∈ [lo·y, up·y]` and binary `y`:
/// `z ≤ up·y`, `z ≥ lo·y`, `z ≥ v − up(1−y)`, `z ≤ v − lo(1−y)`.
pub fn glover_rows(prefix: &str, z: usize, v: usize, y: usize, lo: f64, up: f64) -> [LinearRow; 4] {
    [
        LinearRow::new(format!("{prefix}_g1"), Sense::Le, 0.0).with(z, 1.0).with(y, -up),
        LinearRow::new(format!("{prefix}_g2"), Sense::Ge, 0.0).with(z, 1.0).with(y, -lo),
        LinearRow::new(format!("{prefix}_g3"), Sense::Ge, -up)
            .with(z, 1.0)
            .with(v, -1.0)
            .with(y, -up),
        LinearRow::new(format!("{prefix}_g4"), Sense::Le, -lo)
            .with(z, 1.0)
            .with(v, -1.0)
            .with(y, -lo),
    ]
}

/// Replaces `vᵀQv + (cᵀv)y + dy² ≤ 0` by `vᵀQv + cᵀz + dy ≤ 0` plus Glover
/// rows, creating `z` once per `(variable, disjunct)`.
pub(super) fn emit(sc: &mut Scaffold, k: usize, i: usize, y: usize, name: &str, h: &QuadraticExpr) {
    let mut row = h.quadratic_part().map_vars(|j| sc.var_maps[k][i][&j]);
    for (j, c) in h.linear_entries() {
        let z = match sc.glover.get(&(k, i, j)) {
            Some(&z) => z,
            None => {
                let v = sc.var_maps[k][i][&j];
                // The copy's own bounds contain 0, so y = 0 stays feasible.
                let (lo, up) = (sc.minlp.vars[v].lower, sc.minlp.vars[v].upper);
                let zname = format!("z_{}", &sc.minlp.vars[v].name[2..]);
                let z = sc.minlp.add_var(MinlpVar {
                    name: zname.clone(),
                    lower: lo,
                    upper: up,
                    kind: VarKind::Continuous,
                    role: VarRole::Glover {
                        var: j,
                        disjunction: k,
                        disjunct: i,
                    },
                });
                sc.minlp.linear.extend(glover_rows(&zname, z, v, y, lo, up));
                sc.glover.insert((k, i, j), z);
                z
            }
        };
        row.add_linear(z, c);
    }
    row.add_linear(y, h.constant_term());
    push_quadratic(&mut sc.minlp, format!("{name}_s3"), row);
}
