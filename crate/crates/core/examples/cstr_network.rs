//! Builds CSTR superstructures for one to three stages, prints their sizes
//! and writes the two-stage Big-M model as LP.
//!
//! cargo run --example cstr_network

use gdpq::gen::{gen_cstr, CstrParams};
use gdpq::io::export_lp;
use gdpq::model::{for_each_assignment, GdpModel};
use gdpq::reform::{reformulate, Method, ReformConfig};

fn consistent(gdp: &GdpModel) -> usize {
    let sizes: Vec<usize> = gdp.disjunctions.iter().map(|d| d.disjuncts.len()).collect();
    let mut n = 0;
    for_each_assignment(&sizes, |c| n += usize::from(gdp.assignment_is_consistent(c)));
    n
}

fn main() {
    for nt in 1..=3 {
        let gdp = gen_cstr(&CstrParams::preset(nt)).unwrap();
        let rows: usize = gdp.global_constraints.len()
            + gdp.disjunctions.iter().flat_map(|d| &d.disjuncts).map(|j| j.constraints.len()).sum::<usize>();
        println!(
            "NT={nt}: {} variables, {} disjunctions, {} rows, {} clauses, {} consistent selections",
            gdp.variables.len(),
            gdp.disjunctions.len(),
            rows,
            gdp.logic.len(),
            consistent(&gdp)
        );
        for method in [Method::Bigm, Method::HullExact] {
            let (_, r) = reformulate(&gdp, &ReformConfig::new(method)).unwrap();
            println!("  {method}: {:?}", r.counts);
        }
    }
    let gdp = gen_cstr(&CstrParams::preset(2)).unwrap();
    let (minlp, _) = reformulate(&gdp, &ReformConfig::new(Method::Bigm)).unwrap();
    let path = std::env::temp_dir().join("cstr_nt2_bigm.lp");
    std::fs::write(&path, export_lp(&minlp).unwrap()).unwrap();
    println!("wrote {}", path.display());
}
