use rand::Rng;

use crate::model::{GdpModel, MinlpModel, VarRole, FEAS_TOL};

use super::{run_batches, MembershipReport, OracleError, Verdict, BOUNDARY_BAND};

/// MINLP point for a binary selection and an original point `x`: indicators
/// from `choice`, active copies equal to `x`, inactive copies and their
/// Glover variables at zero.
pub fn canonical_point(minlp: &MinlpModel, choice: &[usize], x: &[f64]) -> Vec<f64> {
    minlp
        .vars
        .iter()
        .map(|v| match v.role {
            VarRole::Original { var } => x[var],
            VarRole::Indicator { disjunction, disjunct } => f64::from(u8::from(choice[disjunction] == disjunct)),
            VarRole::Disaggregated { var, disjunction, disjunct } | VarRole::Glover { var, disjunction, disjunct } => {
                if choice[disjunction] == disjunct {
                    x[var]
                } else {
                    0.0
                }
            }
        })
        .collect()
}

fn gdp_violation(gdp: &GdpModel, choice: &[usize], x: &[f64]) -> f64 {
    let globals = gdp.global_constraints.iter().map(|c| c.body.eval_unchecked(x));
    let active = gdp
        .disjunctions
        .iter()
        .zip(choice)
        .flat_map(|(d, &i)| d.disjuncts[i].constraints.iter().map(|c| c.body.eval_unchecked(x)));
    globals.chain(active).fold(0.0, f64::max)
}

/// Samples `x` in the box and compares GDP feasibility under `choice` with
/// MINLP feasibility at the canonical point, both at tolerance `1e-8`.
pub fn fixed_binary_check(
    gdp: &GdpModel,
    minlp: &MinlpModel,
    choice: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<MembershipReport, OracleError> {
    let shape_ok = choice.len() == gdp.disjunctions.len()
        && choice.iter().zip(&gdp.disjunctions).all(|(&i, d)| i < d.disjuncts.len());
    if !shape_ok || !gdp.assignment_is_consistent(choice) {
        return Err(OracleError::InconsistentAssignment(choice.to_vec()));
    }
    if let Some(v) = gdp.variables.iter().find(|v| !v.is_bounded()) {
        return Err(OracleError::Unbounded(v.name.clone()));
    }
    let bounds = gdp.bounds();
    Ok(run_batches(n_samples, seed, |rng| {
        let x: Vec<f64> = bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect();
        let g = gdp_violation(gdp, choice, &x);
        let m = minlp.max_violation(&canonical_point(minlp, choice, &x));
        let gap = (g - m).abs();
        if (g - FEAS_TOL).abs() <= BOUNDARY_BAND || (m - FEAS_TOL).abs() <= BOUNDARY_BAND {
            Verdict::Banded { gap }
        } else if (g <= FEAS_TOL) == (m <= FEAS_TOL) {
            Verdict::Agree { gap }
        } else {
            Verdict::Disagree { point: x, lhs: vec![g, m] }
        }
    }))
}
