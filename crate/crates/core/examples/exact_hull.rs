//! Reformulates a two-disjunct disc model with every transform and prints
//! the disjunct rows plus an LP export of the exact hull.
//!
//! cargo run --example exact_hull

use gdpq::io::export_lp;
use gdpq::model::{Constraint, Disjunct, Disjunction, GdpModel, QuadraticExpr};
use gdpq::reform::{reformulate, Method, ReformConfig};

fn main() {
    let mut m = GdpModel::new("discs");
    let x = m.add_var("x", -1.0, 1.0);
    let y = m.add_var("y", -1.0, 1.0);
    // x² + y² − 1 ≤ 0, or the half-plane x ≥ 0.5.
    let mut disc = QuadraticExpr::new().with_term(x, x, 1.0).with_term(y, y, 1.0);
    disc.add_constant(-1.0);
    let mut right = QuadraticExpr::new().with_linear(x, -1.0);
    right.add_constant(0.5);
    m.disjunctions.push(Disjunction::new(
        "d",
        vec![
            Disjunct::new("A").with(Constraint::le("disc", disc)),
            Disjunct::new("B").with(Constraint::le("right", right)),
        ],
    ));
    m.objective = QuadraticExpr::new().with_linear(x, 1.0).with_linear(y, 1.0);

    for cfg in [
        ReformConfig::new(Method::Bigm),
        ReformConfig::new(Method::HullEps),
        ReformConfig::new(Method::HullExact),
        ReformConfig::new(Method::HullExact).with_s3(),
        ReformConfig::new(Method::HullPoly),
        ReformConfig::new(Method::BinaryMult),
    ] {
        let (minlp, report) = reformulate(&m, &cfg).expect("model is valid");
        println!("== {} ({} columns)", cfg.label(), minlp.vars.len());
        for row in &minlp.nonlinear {
            println!("  {}: {:?}", row.name, row.body.degree());
        }
        for w in &report.warnings {
            println!("  warning: {w}");
        }
    }

    let (exact, _) = reformulate(&m, &ReformConfig::new(Method::HullExact)).unwrap();
    println!("\n{}", export_lp(&exact).unwrap());
}
