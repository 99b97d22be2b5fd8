use std::collections::BTreeMap;

use crate::model::{
    logic_to_linear, validate, GdpModel, LinearRow, MinlpModel, MinlpVar, NonlinearRow, RowBody, Sense, VarKind,
    VarRole,
};

use super::{push_quadratic, ReformError};

/// Transform state before any disjunct constraint is rewritten.
pub struct Scaffold {
    pub minlp: MinlpModel,
    /// `indicators[k][i]` is the column of `y_ik`.
    pub indicators: Vec<Vec<usize>>,
    /// `var_maps[k][i]` sends an original variable to its copy `v_ik`; empty
    /// when the scaffold was built without disaggregation.
    pub var_maps: Vec<Vec<BTreeMap<usize, usize>>>,
    /// Glover columns created so far, keyed by `(k, i, var)`.
    pub glover: BTreeMap<(usize, usize, usize), usize>,
}

/// Original columns (same indices as the GDP), indicator binaries, XOR and
/// logic rows, the objective and the global constraints. With `disaggregate`
/// also the hull copies, their bound rows and the linking rows.
pub fn scaffold(model: &GdpModel, disaggregate: bool) -> Result<Scaffold, ReformError> {
    let diags = validate(model);
    if !diags.is_empty() {
        return Err(ReformError::Invalid(diags));
    }
    let mut minlp = MinlpModel {
        name: model.name.clone(),
        objective: model.objective.clone(),
        ..MinlpModel::default()
    };
    for (j, v) in model.variables.iter().enumerate() {
        minlp.add_var(MinlpVar {
            name: v.name.clone(),
            lower: v.lower,
            upper: v.upper,
            kind: v.kind,
            role: VarRole::Original { var: j },
        });
    }

    let mut indicators = Vec::with_capacity(model.disjunctions.len());
    for (k, disj) in model.disjunctions.iter().enumerate() {
        let cols: Vec<usize> = disj
            .disjuncts
            .iter()
            .enumerate()
            .map(|(i, dj)| {
                minlp.add_var(MinlpVar {
                    name: dj.indicator.clone(),
                    lower: 0.0,
                    upper: 1.0,
                    kind: VarKind::Binary,
                    role: VarRole::Indicator {
                        disjunction: k,
                        disjunct: i,
                    },
                })
            })
            .collect();
        let mut xor = LinearRow::new(format!("xor_{}", disj.id), Sense::Eq, 1.0);
        for &c in &cols {
            xor.add(c, 1.0);
        }
        minlp.linear.push(xor);
        indicators.push(cols);
    }

    let flat: Vec<usize> = indicators.iter().flatten().copied().collect();
    for (c, row) in logic_to_linear(&model.logic, &model.indicators())?.into_iter().enumerate() {
        let mut lin = LinearRow::new(format!("logic_{c}"), Sense::Ge, row.rhs);
        for (idx, coef) in row.coeffs {
            lin.add(flat[idx], coef);
        }
        minlp.linear.push(lin);
    }

    for (g, con) in model.global_constraints.iter().enumerate() {
        let name = if con.name.is_empty() {
            format!("g{g}")
        } else {
            con.name.clone()
        };
        match con.body.to_quadratic() {
            Some(q) => push_quadratic(&mut minlp, name, q),
            None => minlp.nonlinear.push(NonlinearRow {
                name,
                body: RowBody::Polynomial(con.body.to_polynomial()),
            }),
        }
    }

    let mut var_maps: Vec<Vec<BTreeMap<usize, usize>>> = model
        .disjunctions
        .iter()
        .map(|d| vec![BTreeMap::new(); d.disjuncts.len()])
        .collect();
    if disaggregate {
        for (k, disj) in model.disjunctions.iter().enumerate() {
            let vars = disj.vars();
            for (i, dj) in disj.disjuncts.iter().enumerate() {
                let y = indicators[k][i];
                for &j in &vars {
                    let x = &model.variables[j];
                    let name = format!("v_{}_{}", x.name, dj.indicator);
                    let v = minlp.add_var(MinlpVar {
                        name: name.clone(),
                        lower: x.lower.min(0.0),
                        upper: x.upper.max(0.0),
                        kind: VarKind::Continuous,
                        role: VarRole::Disaggregated {
                            var: j,
                            disjunction: k,
                            disjunct: i,
                        },
                    });
                    // x^ℓ y ≤ v ≤ x^u y
                    minlp
                        .linear
                        .push(LinearRow::new(format!("{name}_ub"), Sense::Le, 0.0).with(v, 1.0).with(y, -x.upper));
                    minlp
                        .linear
                        .push(LinearRow::new(format!("{name}_lb"), Sense::Ge, 0.0).with(v, 1.0).with(y, -x.lower));
                    var_maps[k][i].insert(j, v);
                }
            }
            for &j in &vars {
                let mut link = LinearRow::new(format!("link_{}_{}", model.variables[j].name, disj.id), Sense::Eq, 0.0)
                    .with(j, 1.0);
                for map in &var_maps[k] {
                    link.add(map[&j], -1.0);
                }
                minlp.linear.push(link);
            }
        }
    }

    Ok(Scaffold {
        minlp,
        indicators,
        var_maps,
        glover: BTreeMap::new(),
    })
}
