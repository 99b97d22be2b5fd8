use serde::{Deserialize, Serialize};

use crate::model::{Constraint, Disjunct, Disjunction, GdpModel, LogicClause, QuadraticExpr};

use super::{invalid, GenError};

const COMPONENTS: [&str; 2] = ["A", "B"];
const PURITY: f64 = 0.95;

/// Upper bounds per variable family. Lower bounds are zero except for
/// reaction rates, which range over `[-rate_max, rate_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CstrBounds {
    pub flow_max: f64,
    pub volumetric_max: f64,
    pub rate_max: f64,
    pub volume_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CstrParams {
    pub nt: usize,
    pub k_rate: f64,
    pub f0: [f64; 2],
    pub q_f0: f64,
    pub bounds: CstrBounds,
}

impl CstrParams {
    /// Default data for `nt` stages. These values are a working preset and
    /// are not taken from any published table.
    pub fn preset(nt: usize) -> Self {
        CstrParams {
            nt,
            k_rate: 2.0,
            f0: [0.99, 0.01],
            q_f0: 1.0,
            bounds: CstrBounds {
                flow_max: 10.0,
                volumetric_max: 10.0,
                rate_max: 10.0,
                volume_max: 20.0,
            },
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.nt == 0 {
            return invalid("nt must be at least 1");
        }
        let b = &self.bounds;
        let positive = [
            self.k_rate,
            self.f0[0],
            self.f0[1],
            self.q_f0,
            b.flow_max,
            b.volumetric_max,
            b.rate_max,
            b.volume_max,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return invalid("physical parameters and bounds must be finite and positive");
        }
        Ok(())
    }
}

struct Stage {
    f: [usize; 2],
    fr: [usize; 2],
    r: [usize; 2],
    q: usize,
    qfr: usize,
    v: usize,
    c: usize,
    t: usize,
}

fn lin(terms: &[(usize, f64)], d: f64) -> QuadraticExpr {
    let mut h = QuadraticExpr::constant(d);
    for &(i, a) in terms {
        h.add_linear(i, a);
    }
    h
}

fn yf(n: usize) -> String {
    format!("YF_{n}")
}

fn yp(n: usize) -> String {
    format!("YP_{n}")
}

fn yr(n: usize) -> String {
    format!("YR_{n}")
}

fn exactly_one(names: &[String], out: &mut Vec<LogicClause>) {
    out.push(LogicClause::new(names.iter().cloned(), Vec::<String>::new()));
    for (a, x) in names.iter().enumerate() {
        for y in &names[a + 1..] {
            out.push(LogicClause::new(Vec::<String>::new(), [x.clone(), y.clone()]));
        }
    }
}

/// Reactor network with `nt` stages in series. Stage `nt` takes the fresh
/// feed and stage 1 feeds the splitter; the recycle may re-enter at any
/// stage. Stage-local `t_n = Q_n²` keeps every row at degree two.
pub fn gen_cstr(p: &CstrParams) -> Result<GdpModel, GenError> {
    p.validate()?;
    let nt = p.nt;
    let b = &p.bounds;
    let mut m = GdpModel::new(format!("cstr_nt{nt}"));

    let mut stages: Vec<Stage> = Vec::with_capacity(nt);
    for n in 1..=nt {
        let mut per = |prefix: &str, lo: f64, hi: f64| -> [usize; 2] {
            COMPONENTS.map(|c| m.add_var(format!("{prefix}_{c}_{n}"), lo, hi))
        };
        let f = per("F", 0.0, b.flow_max);
        let fr = per("FR", 0.0, b.flow_max);
        let r = per("r", -b.rate_max, b.rate_max);
        stages.push(Stage {
            f,
            fr,
            r,
            q: m.add_var(format!("Q_{n}"), 0.0, b.volumetric_max),
            qfr: m.add_var(format!("QFR_{n}"), 0.0, b.volumetric_max),
            v: m.add_var(format!("V_{n}"), 0.0, b.volume_max),
            c: m.add_var(format!("c_{n}"), 0.0, b.volume_max),
            t: m.add_var(format!("t_{n}"), 0.0, b.volumetric_max * b.volumetric_max),
        });
    }
    let prod = COMPONENTS.map(|c| m.add_var(format!("P_{c}"), 0.0, b.flow_max));
    let rec = COMPONENTS.map(|c| m.add_var(format!("R_{c}"), 0.0, b.flow_max));
    let qp = m.add_var("Q_P", 0.0, b.volumetric_max);
    let qr = m.add_var("Q_R", 0.0, b.volumetric_max);

    let mut rows: Vec<(String, QuadraticExpr)> = Vec::new();
    for n in 1..=nt {
        let s = &stages[n - 1];
        for i in 0..2 {
            // F_out − F_in − FR − r·V
            let mut h = lin(&[(s.f[i], 1.0), (s.fr[i], -1.0)], 0.0);
            h.add_term(s.r[i], s.v, -1.0);
            if n == nt {
                h.add_constant(-p.f0[i]);
            } else {
                h.add_linear(stages[n].f[i], -1.0);
            }
            rows.push((format!("bal_{}_{n}", COMPONENTS[i]), h));
        }
        let upstream = if n == nt {
            lin(&[(s.q, 1.0), (s.qfr, -1.0)], -p.q_f0)
        } else {
            lin(&[(s.q, 1.0), (stages[n].q, -1.0), (s.qfr, -1.0)], 0.0)
        };
        rows.push((format!("balQ_{n}"), upstream));
    }
    let s1 = &stages[0];
    for i in 0..2 {
        let c = COMPONENTS[i];
        rows.push((format!("split_{c}"), lin(&[(s1.f[i], 1.0), (prod[i], -1.0), (rec[i], -1.0)], 0.0)));
    }
    rows.push(("splitQ".into(), lin(&[(s1.q, 1.0), (qp, -1.0), (qr, -1.0)], 0.0)));
    for i in 0..2 {
        let h = QuadraticExpr::new().with_term(prod[i], s1.q, 1.0).with_term(s1.f[i], qp, -1.0);
        rows.push((format!("comp_{}", COMPONENTS[i]), h));
    }
    rows.push(("purity".into(), lin(&[(qp, PURITY), (prod[1], -1.0)], 0.0)));
    for n in 2..=nt {
        rows.push((format!("vol_{n}"), lin(&[(stages[n - 1].v, 1.0), (stages[n - 2].v, -1.0)], 0.0)));
    }
    for (n, s) in (1..=nt).zip(&stages) {
        rows.push((format!("aux_{n}"), QuadraticExpr::new().with_term(s.q, s.q, 1.0).with_linear(s.t, -1.0)));
    }
    for (name, h) in rows {
        m.global_constraints.extend(Constraint::equality(name, h));
    }

    for (n, s) in (1..=nt).zip(&stages) {
        m.disjunctions.push(Disjunction::new(
            format!("feed_{n}"),
            vec![Disjunct::new(yf(n)), Disjunct::new(format!("{}_off", yf(n)))],
        ));

        let mut rate = QuadraticExpr::new().with_term(s.r[0], s.t, 1.0);
        rate.add_term(s.f[0], s.f[1], p.k_rate);
        let mut active = Vec::new();
        active.extend(Constraint::equality("rate", rate));
        active.extend(Constraint::equality("stoich", lin(&[(s.r[0], 1.0), (s.r[1], 1.0)], 0.0)));
        active.extend(Constraint::equality("cost", lin(&[(s.c, 1.0), (s.v, -1.0)], 0.0)));
        let mut bypass = Vec::new();
        for i in 0..2 {
            let c = COMPONENTS[i];
            bypass.extend(Constraint::equality(format!("fr_{c}"), lin(&[(s.fr[i], 1.0)], 0.0)));
            bypass.extend(Constraint::equality(format!("r_{c}"), lin(&[(s.r[i], 1.0)], 0.0)));
        }
        bypass.extend(Constraint::equality("qfr", lin(&[(s.qfr, 1.0)], 0.0)));
        bypass.extend(Constraint::equality("cost", lin(&[(s.c, 1.0)], 0.0)));
        m.disjunctions.push(Disjunction::new(
            format!("reactor_{n}"),
            vec![
                Disjunct::new(yp(n)).with_all(active),
                Disjunct::new(format!("{}_off", yp(n))).with_all(bypass),
            ],
        ));

        let mut enter = Vec::new();
        let mut closed = Vec::new();
        for i in 0..2 {
            let c = COMPONENTS[i];
            enter.extend(Constraint::equality(format!("fr_{c}"), lin(&[(s.fr[i], 1.0), (rec[i], -1.0)], 0.0)));
            closed.extend(Constraint::equality(format!("fr_{c}"), lin(&[(s.fr[i], 1.0)], 0.0)));
        }
        enter.extend(Constraint::equality("qfr", lin(&[(s.qfr, 1.0), (qr, -1.0)], 0.0)));
        closed.extend(Constraint::equality("qfr", lin(&[(s.qfr, 1.0)], 0.0)));
        m.disjunctions.push(Disjunction::new(
            format!("recycle_{n}"),
            vec![
                Disjunct::new(yr(n)).with_all(enter),
                Disjunct::new(format!("{}_off", yr(n))).with_all(closed),
            ],
        ));
    }

    let feeds: Vec<String> = (1..=nt).map(yf).collect();
    let recycles: Vec<String> = (1..=nt).map(yr).collect();
    exactly_one(&feeds, &mut m.logic);
    exactly_one(&recycles, &mut m.logic);
    for n in 1..=nt {
        // YP_n ⇒ YF_n ∨ ¬YF_j for every j < n
        for j in 1..n {
            m.logic.push(LogicClause::new([yf(n)], [yp(n), yf(j)]));
        }
        // (YF_1 ∨ … ∨ YF_n ∨ YP_n) ∧ (¬YF_n ∨ YP_n)
        m.logic.push(LogicClause::new((1..=n).map(yf).chain([yp(n)]), Vec::<String>::new()));
        m.logic.push(LogicClause::new([yp(n)], [yf(n)]));
        m.logic.push(LogicClause::implies(yr(n), yp(n)));
    }

    for s in &stages {
        m.objective.add_linear(s.c, 1.0);
    }
    let meta = [
        ("generator", "cstr".to_string()),
        ("nt", nt.to_string()),
        ("preset_note", "parameters are a working preset, not published data".to_string()),
        ("rate_row_t", "stage-local t_n".to_string()),
    ];
    m.metadata = meta.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    Ok(m)
}
