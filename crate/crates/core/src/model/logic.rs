use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{LogicClause, ModelError};

/// `Σ coeffs[i] · y_i ≥ rhs`, with `i` indexing the indicator list passed to
/// [`logic_to_linear`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicRow {
    pub coeffs: BTreeMap<usize, f64>,
    pub rhs: f64,
}

impl LogicRow {
    pub fn holds(&self, y: &[f64]) -> bool {
        let lhs: f64 = self.coeffs.iter().map(|(&i, &c)| c * y[i]).sum();
        lhs >= self.rhs - 1e-9
    }
}

/// Each clause becomes `Σ_{pos} y + Σ_{neg} (1 − y) ≥ 1`, i.e.
/// `Σ_{pos} y − Σ_{neg} y ≥ 1 − |neg|`.
pub fn logic_to_linear(clauses: &[LogicClause], indicators: &[String]) -> Result<Vec<LogicRow>, ModelError> {
    let index: HashMap<&str, usize> = indicators
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let lookup = |name: &String| {
        index
            .get(name.as_str())
            .copied()
            .ok_or_else(|| ModelError::UnknownIndicator(name.clone()))
    };
    clauses
        .iter()
        .map(|clause| {
            let mut coeffs = BTreeMap::new();
            for p in &clause.positive {
                *coeffs.entry(lookup(p)?).or_insert(0.0) += 1.0;
            }
            for n in &clause.negative {
                *coeffs.entry(lookup(n)?).or_insert(0.0) -= 1.0;
            }
            coeffs.retain(|_, c| *c != 0.0);
            Ok(LogicRow {
                coeffs,
                rhs: 1.0 - clause.negative.len() as f64,
            })
        })
        .collect()
}
