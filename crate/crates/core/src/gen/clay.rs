use serde::{Deserialize, Serialize};

use crate::model::{Constraint, Disjunct, Disjunction, GdpModel, QuadraticExpr};

use super::{invalid, GenError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub length: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
}

/// Box for rectangle centres, `[lo, hi]` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClayBounds {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClayInstance {
    #[serde(default)]
    pub name: String,
    pub rectangles: Vec<Rect>,
    pub circles: Vec<Circle>,
    /// `costs[i][j]` for `i < j`; the lower triangle must be zero or mirror
    /// the upper one.
    pub costs: Vec<Vec<f64>>,
    pub norm: Norm,
    /// Defaults to the bounding box of all circles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<ClayBounds>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub provenance: String,
}

impl ClayInstance {
    pub fn resolved_bounds(&self) -> ClayBounds {
        self.bounds.unwrap_or_else(|| {
            let fold = |f: fn(&Circle) -> f64| {
                let lo = self.circles.iter().map(f).fold(f64::INFINITY, f64::min);
                let hi = self.circles.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            };
            let (xl, _) = fold(|c| c.x - c.r);
            let (_, xu) = fold(|c| c.x + c.r);
            let (yl, _) = fold(|c| c.y - c.r);
            let (_, yu) = fold(|c| c.y + c.r);
            ClayBounds { x: [xl, xu], y: [yl, yu] }
        })
    }

    fn validate(&self) -> Result<(), GenError> {
        let n = self.rectangles.len();
        if n == 0 || self.circles.is_empty() {
            return invalid("need at least one rectangle and one circle");
        }
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !self.rectangles.iter().all(|r| pos(r.length) && pos(r.height)) {
            return invalid("rectangle sides must be positive");
        }
        if !self.circles.iter().all(|c| pos(c.r) && c.x.is_finite() && c.y.is_finite()) {
            return invalid("circle radii must be positive");
        }
        if self.costs.len() != n || self.costs.iter().any(|row| row.len() != n) {
            return invalid(format!("costs must be a {n}x{n} matrix"));
        }
        for i in 0..n {
            for j in 0..=i {
                let low = self.costs[i][j];
                if !low.is_finite() || (low != 0.0 && (i == j || low != self.costs[j][i])) {
                    return invalid(format!("costs[{i}][{j}] must be zero or mirror costs[{j}][{i}]"));
                }
            }
        }
        if self.costs.iter().flatten().any(|c| !c.is_finite() || *c < 0.0) {
            return invalid("costs must be finite and non-negative");
        }
        let b = self.resolved_bounds();
        if !(b.x[0] < b.x[1] && b.y[0] < b.y[1]) {
            return invalid("empty placement box");
        }
        Ok(())
    }
}

fn lin(terms: &[(usize, f64)], d: f64) -> QuadraticExpr {
    let mut h = QuadraticExpr::constant(d);
    for &(i, a) in terms {
        h.add_linear(i, a);
    }
    h
}

/// `(x + a − xc)² + (y + b − yc)² − r²`
fn corner(x: usize, y: usize, a: f64, b: f64, c: &Circle) -> QuadraticExpr {
    let (u, w) = (a - c.x, b - c.y);
    let mut h = QuadraticExpr::constant(u * u + w * w - c.r * c.r);
    h.add_term(x, x, 1.0);
    h.add_linear(x, 2.0 * u);
    h.add_term(y, y, 1.0);
    h.add_linear(y, 2.0 * w);
    h
}

pub fn gen_clay(inst: &ClayInstance) -> Result<GdpModel, GenError> {
    inst.validate()?;
    let n = inst.rectangles.len();
    let b = inst.resolved_bounds();
    let name = if inst.name.is_empty() { format!("clay_{n}") } else { inst.name.clone() };
    let mut m = GdpModel::new(name);

    let xs: Vec<usize> = (0..n).map(|i| m.add_var(format!("x_{i}"), b.x[0], b.x[1])).collect();
    let ys: Vec<usize> = (0..n).map(|i| m.add_var(format!("y_{i}"), b.y[0], b.y[1])).collect();
    let (wx, wy) = (b.x[1] - b.x[0], b.y[1] - b.y[0]);

    let rects = &inst.rectangles;
    for i in 0..n {
        for j in i + 1..n {
            let dx = m.add_var(format!("dx_{i}_{j}"), 0.0, wx);
            let dy = m.add_var(format!("dy_{i}_{j}"), 0.0, wy);
            for (tag, d, a, c) in [("dx", dx, xs[i], xs[j]), ("dy", dy, ys[i], ys[j])] {
                m.global_constraints.push(Constraint::le(format!("{tag}_{i}_{j}_a"), lin(&[(a, 1.0), (c, -1.0), (d, -1.0)], 0.0)));
                m.global_constraints.push(Constraint::le(format!("{tag}_{i}_{j}_b"), lin(&[(c, 1.0), (a, -1.0), (d, -1.0)], 0.0)));
            }
            let cost = inst.costs[i][j];
            match inst.norm {
                Norm::L1 => {
                    m.objective.add_linear(dx, cost);
                    m.objective.add_linear(dy, cost);
                }
                Norm::L2 => {
                    let t = m.add_var(format!("t_{i}_{j}"), 0.0, wx.hypot(wy));
                    let h = QuadraticExpr::new().with_term(dx, dx, 1.0).with_term(dy, dy, 1.0).with_term(t, t, -1.0);
                    m.global_constraints.push(Constraint::le(format!("norm_{i}_{j}"), h));
                    m.objective.add_linear(t, cost);
                }
            }

            let hl = (rects[i].length + rects[j].length) / 2.0;
            let hh = (rects[i].height + rects[j].height) / 2.0;
            let sides = [
                ("left", lin(&[(xs[i], 1.0), (xs[j], -1.0)], hl)),
                ("right", lin(&[(xs[j], 1.0), (xs[i], -1.0)], hl)),
                ("below", lin(&[(ys[i], 1.0), (ys[j], -1.0)], hh)),
                ("above", lin(&[(ys[j], 1.0), (ys[i], -1.0)], hh)),
            ];
            let disjuncts = sides
                .into_iter()
                .enumerate()
                .map(|(s, (tag, h))| Disjunct::new(format!("Y_{i}_{j}_{}", s + 1)).with(Constraint::le(tag, h)))
                .collect();
            m.disjunctions.push(Disjunction::new(format!("NO_{i}_{j}"), disjuncts));
        }
    }

    for (i, r) in rects.iter().enumerate() {
        let (a, h) = (r.length / 2.0, r.height / 2.0);
        let disjuncts = inst
            .circles
            .iter()
            .enumerate()
            .map(|(t, c)| {
                let rows = [(a, h), (a, -h), (-a, h), (-a, -h)]
                    .into_iter()
                    .enumerate()
                    .map(|(k, (sa, sb))| Constraint::le(format!("corner{k}"), corner(xs[i], ys[i], sa, sb, c)));
                Disjunct::new(format!("W_{i}_{t}")).with_all(rows.collect::<Vec<_>>())
            })
            .collect();
        m.disjunctions.push(Disjunction::new(format!("C_{i}"), disjuncts));
    }

    m.metadata.insert("generator".into(), "clay".into());
    m.metadata.insert("norm".into(), format!("{:?}", inst.norm).to_lowercase());
    if inst.norm == Norm::L2 {
        m.metadata.insert("objective_lift".into(), "t_ij with dx^2 + dy^2 - t_ij^2 <= 0".into());
    }
    if !inst.provenance.is_empty() {
        m.metadata.insert("provenance".into(), inst.provenance.clone());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_boxes(norm: Norm) -> ClayInstance {
        let mut costs = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            for j in i + 1..4 {
                costs[i][j] = (i + j) as f64;
            }
        }
        ClayInstance {
            name: String::new(),
            rectangles: vec![
                Rect { length: 2.0, height: 1.0 },
                Rect { length: 1.0, height: 1.0 },
                Rect { length: 1.5, height: 2.0 },
                Rect { length: 1.0, height: 3.0 },
            ],
            circles: vec![Circle { x: 0.0, y: 0.0, r: 5.0 }, Circle { x: 12.0, y: 0.0, r: 4.0 }],
            costs,
            norm,
            bounds: None,
            provenance: String::new(),
        }
    }

    #[test]
    fn structure_counts() {
        let m = gen_clay(&four_boxes(Norm::L1)).unwrap();
        let (noov, cont): (Vec<_>, Vec<_>) = m.disjunctions.iter().partition(|d| d.id.starts_with("NO_"));
        assert_eq!(noov.len(), 6);
        assert!(noov.iter().all(|d| d.disjuncts.len() == 4));
        assert_eq!(cont.len(), 4);
        for d in cont {
            assert_eq!(d.disjuncts.len(), 2);
            assert!(d.disjuncts.iter().all(|j| j.constraints.len() == 4
                && j.constraints.iter().all(|c| c.body.degree() == 2)));
        }
        assert_eq!(m.global_constraints.len(), 6 * 4);
        assert_eq!(m.variables.len(), 8 + 12);
    }

    #[test]
    fn l2_adds_lifted_norm_rows() {
        let m = gen_clay(&four_boxes(Norm::L2)).unwrap();
        assert_eq!(m.global_constraints.len(), 6 * 5);
        assert_eq!(m.variables.len(), 8 + 18);
        assert!(m.metadata.contains_key("objective_lift"));
    }

    #[test]
    fn hand_placed_layout_is_feasible() {
        let inst = four_boxes(Norm::L2);
        let m = gen_clay(&inst).unwrap();
        // Four rectangles side by side inside the first circle.
        let centres: [(f64, f64); 4] = [(-2.0, 0.0), (-0.25, 0.0), (1.25, 0.0), (2.75, 0.0)];
        let mut x = vec![0.0; m.variables.len()];
        for (i, &(cx, cy)) in centres.iter().enumerate() {
            x[m.var_index(&format!("x_{i}")).unwrap()] = cx;
            x[m.var_index(&format!("y_{i}")).unwrap()] = cy;
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let dx = (centres[i].0 - centres[j].0).abs();
                let dy = (centres[i].1 - centres[j].1).abs();
                x[m.var_index(&format!("dx_{i}_{j}")).unwrap()] = dx;
                x[m.var_index(&format!("dy_{i}_{j}")).unwrap()] = dy;
                x[m.var_index(&format!("t_{i}_{j}")).unwrap()] = dx.hypot(dy);
            }
        }
        // i is left of j for every pair; every rectangle sits in circle 0.
        let choice = [0, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        assert!(m.is_feasible_under(&choice, &x, 1e-9));
        let mut wrong = choice;
        wrong[6] = 1;
        assert!(!m.is_feasible_under(&wrong, &x, 1e-9));
    }

    #[test]
    fn rejects_bad_data() {
        let mut inst = four_boxes(Norm::L1);
        inst.costs[2][1] = 7.0;
        assert!(gen_clay(&inst).is_err());
        let mut inst = four_boxes(Norm::L1);
        inst.circles[0].r = 0.0;
        assert!(gen_clay(&inst).is_err());
        let mut inst = four_boxes(Norm::L1);
        inst.costs[2][1] = inst.costs[1][2];
        assert!(gen_clay(&inst).is_ok());
    }
}
