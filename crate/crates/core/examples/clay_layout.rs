//! Loads a layout instance (the synthetic fixture by default), builds the
//! GDP and compares reformulation sizes for both norms.
//!
//! cargo run --example clay_layout -- [instance.json]

use gdpq::gen::{gen_clay, ClayInstance, Norm};
use gdpq::reform::{reformulate, Method, ReformConfig};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/clay_synthetic_l1.json").to_string());
    let mut inst: ClayInstance = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    println!("{} ({})", inst.name, inst.provenance);
    for norm in [Norm::L1, Norm::L2] {
        inst.norm = norm;
        let gdp = gen_clay(&inst).unwrap();
        println!("{norm:?}: {} variables, {} disjunctions", gdp.variables.len(), gdp.disjunctions.len());
        for cfg in [
            ReformConfig::new(Method::Bigm),
            ReformConfig::new(Method::HullExact),
            ReformConfig::new(Method::HullExact).with_s3(),
        ] {
            let (_, r) = reformulate(&gdp, &cfg).unwrap();
            println!(
                "  {:<14} vars {:>4}  linear {:>4}  nonlinear {:>3}  s3 rows {}",
                cfg.label(),
                r.counts.continuous_vars + r.counts.binary_vars,
                r.counts.linear_rows,
                r.counts.nonlinear_rows,
                r.s3_rows
            );
        }
    }
}
