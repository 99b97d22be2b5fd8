use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{MinlpModel, PolynomialExpr, QuadraticExpr, RowBody, Sense, VarKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row {row} has degree {degree}; LP export supports degree 2 at most (use JSON)")]
    DegreeTooHigh { row: String, degree: u32 },
}

/// LP text plus the names of rows that were multiplied through by
/// `D = (1−ε)y + ε` on the way out.
#[derive(Debug, Clone, PartialEq)]
pub struct LpExport {
    pub text: String,
    pub lowered: Vec<String>,
}

/// `p(y) = (1−ε)y + ε`.
fn denom_poly(y: usize, eps: f64) -> PolynomialExpr {
    PolynomialExpr::constant(eps).with_term(&[(y, 1)], 1.0 - eps)
}

fn pow(p: &PolynomialExpr, k: u32) -> PolynomialExpr {
    (0..k).fold(PolynomialExpr::constant(1.0), |acc, _| acc.mul(p))
}

/// Polynomial form of a row, multiplying rational rows through by a power
/// of `D > 0` so the sign of the row is unchanged on `y ∈ [0, 1]`.
pub fn lower_row(body: &RowBody) -> PolynomialExpr {
    match body {
        RowBody::Quadratic(q) => q.into(),
        RowBody::Polynomial(p) => p.clone(),
        RowBody::EpsQuadratic { quad, affine, y, eps } => {
            let mut p: PolynomialExpr = quad.into();
            p.add_poly(&PolynomialExpr::from(affine).mul(&denom_poly(*y, *eps)));
            p
        }
        RowBody::EpsPerspective { body, var_map, y, eps } => {
            // D^m · (D·h(v/D) − ε h(0)(1−y)) with m = max(deg h, 1) − 1.
            let deg = body.degree();
            let m = deg.max(1) - 1;
            let d = denom_poly(*y, *eps);
            let mut out = PolynomialExpr::new();
            for (k, part) in body.components() {
                let mapped = part.map_vars(|i| var_map[&i]);
                out.add_poly(&mapped.mul(&pow(&d, m + 1 - k)));
            }
            let one_minus_y = PolynomialExpr::constant(1.0).with_term(&[(*y, 1)], -1.0);
            out.add_poly(&one_minus_y.mul(&pow(&d, m)).scaled(-eps * body.constant_term()));
            out
        }
    }
}

struct Names {
    seen: HashSet<String>,
}

impl Names {
    fn new() -> Self {
        Names { seen: HashSet::new() }
    }

    fn make(&mut self, raw: &str) -> String {
        let mut base: String = raw
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        if base.is_empty() || base.starts_with(|c: char| c.is_ascii_digit()) {
            base.insert(0, '_');
        }
        let mut name = base.clone();
        let mut k = 2;
        while !self.seen.insert(name.clone()) {
            name = format!("{base}_{k}");
            k += 1;
        }
        name
    }
}

fn num(v: f64) -> String {
    // Drops the sign of negative zero.
    format!("{:?}", if v == 0.0 { 0.0 } else { v })
}

fn push_term(out: &mut String, first: &mut bool, coef: f64, body: &str) {
    let sign = if coef < 0.0 { '-' } else { '+' };
    if *first && coef >= 0.0 {
        let _ = write!(out, "{} {body}", num(coef));
    } else {
        let _ = write!(out, "{sign} {} {body}", num(coef.abs()));
    }
    out.push(' ');
    *first = false;
}

/// Linear terms, then the bracketed quadratic block. Quadratic coefficients
/// are the monomial coefficients (`2Q_ij` off the diagonal) times `scale`.
fn expr_text(q: &QuadraticExpr, cols: &[String], scale: f64) -> String {
    let mut out = String::new();
    let mut first = true;
    for (j, c) in q.linear_entries() {
        push_term(&mut out, &mut first, c, &cols[j]);
    }
    let quad: Vec<(usize, usize, f64)> = q.quad_entries().collect();
    if !quad.is_empty() {
        out.push_str(if first { "[ " } else { "+ [ " });
        let mut inner = true;
        for (i, j, v) in quad {
            let (coef, body) = if i == j {
                (v * scale, format!("{} ^ 2", cols[i]))
            } else {
                (2.0 * v * scale, format!("{} * {}", cols[i], cols[j]))
            };
            push_term(&mut out, &mut inner, coef, &body);
        }
        out.push(']');
        first = false;
    }
    if first {
        // An empty expression still needs one term.
        let _ = write!(out, "0.0 {}", cols.first().map_or("_", String::as_str));
    }
    out.trim_end().to_string()
}

fn linear_part(q: &QuadraticExpr) -> QuadraticExpr {
    let mut l = QuadraticExpr::new();
    for (j, c) in q.linear_entries() {
        l.add_linear(j, c);
    }
    l
}

fn drop_constant(q: &QuadraticExpr) -> QuadraticExpr {
    let mut out = q.clone();
    out.add_constant(-q.constant_term());
    out
}

fn sense_text(s: Sense) -> &'static str {
    match s {
        Sense::Le => "<=",
        Sense::Ge => ">=",
        Sense::Eq => "=",
    }
}

pub fn export_lp_with_report(m: &MinlpModel) -> Result<LpExport, LpError> {
    let mut names = Names::new();
    let cols: Vec<String> = m.vars.iter().map(|v| names.make(&v.name)).collect();
    let mut rows = Names::new();

    let mut lowered = Vec::new();
    let mut quad_rows = Vec::new();
    for r in &m.nonlinear {
        let p = lower_row(&r.body);
        let q = p.to_quadratic().ok_or_else(|| LpError::DegreeTooHigh {
            row: r.name.clone(),
            degree: p.degree(),
        })?;
        if matches!(r.body, RowBody::EpsQuadratic { .. } | RowBody::EpsPerspective { .. }) {
            lowered.push(r.name.clone());
        }
        quad_rows.push((r.name.as_str(), q));
    }

    let mut out = String::new();
    let _ = writeln!(out, "\\ model: {}", m.name);
    for r in &lowered {
        let _ = writeln!(out, "\\ lowered: {r} multiplied by (1-eps)*y + eps");
    }
    out.push_str("MIN\n");
    let obj = &m.objective;
    let lin = linear_part(obj);
    let quad = obj.quadratic_part();
    let has_lin = lin.linear_entries().next().is_some();
    let has_quad = quad.quad_entries().next().is_some();
    let mut text = match (has_lin, has_quad) {
        (_, false) => expr_text(&lin, &cols, 1.0),
        (false, true) => format!("{} / 2", expr_text(&quad, &cols, 2.0)),
        (true, true) => format!("{} + {} / 2", expr_text(&lin, &cols, 1.0), expr_text(&quad, &cols, 2.0)),
    };
    let c = obj.constant_term();
    if c != 0.0 {
        let _ = write!(text, " {} {}", if c < 0.0 { '-' } else { '+' }, num(c.abs()));
    }
    let _ = writeln!(out, " obj: {text}");

    out.push_str("SUBJECT TO\n");
    for r in &m.linear {
        let mut q = QuadraticExpr::new();
        for (&j, &c) in &r.terms {
            q.add_linear(j, c);
        }
        let _ = writeln!(
            out,
            " {}: {} {} {}",
            rows.make(&r.name),
            expr_text(&q, &cols, 1.0),
            sense_text(r.sense),
            num(r.rhs)
        );
    }
    for (name, q) in &quad_rows {
        let rhs = -q.constant_term();
        let _ = writeln!(
            out,
            " {}: {} <= {}",
            rows.make(name),
            expr_text(&drop_constant(q), &cols, 1.0),
            num(rhs)
        );
    }

    out.push_str("BOUNDS\n");
    for (v, c) in m.vars.iter().zip(&cols) {
        let line = match (v.lower.is_finite(), v.upper.is_finite()) {
            (true, true) => format!(" {} <= {c} <= {}", num(v.lower), num(v.upper)),
            (true, false) => format!(" {c} >= {}", num(v.lower)),
            (false, true) => format!(" -inf <= {c} <= {}", num(v.upper)),
            (false, false) => format!(" {c} free"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    let bins: Vec<&str> = m
        .vars
        .iter()
        .zip(&cols)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, c)| c.as_str())
        .collect();
    if !bins.is_empty() {
        out.push_str("BINARY\n");
        for chunk in bins.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("END\n");
    Ok(LpExport { text: out, lowered })
}

pub fn export_lp(m: &MinlpModel) -> Result<String, LpError> {
    export_lp_with_report(m).map(|e| e.text)
}
