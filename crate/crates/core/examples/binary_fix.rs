//! Generates a random GDP, round-trips it through JSON, and checks that every
//! transform agrees with the GDP at every fixed binary assignment.
//!
//! cargo run --release --example binary_fix -- [seed]

use gdpq::gen::{gen_random, RandomGdpParams};
use gdpq::io::{read_model, write_model, ModelDocument};
use gdpq::model::for_each_assignment;
use gdpq::oracle::fixed_binary_check;
use gdpq::reform::{reformulate, Method, ReformConfig};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let gdp = gen_random(&RandomGdpParams::new(3, 3, 3, 2, seed)).unwrap();

    let text = write_model(&ModelDocument::gdp(gdp.clone()));
    let back = read_model(&text).unwrap();
    assert_eq!(back.as_gdp(), Some(&gdp));
    println!("{}: {} bytes of JSON, round trip ok", gdp.name, text.len());

    let sizes: Vec<usize> = gdp.disjunctions.iter().map(|d| d.disjuncts.len()).collect();
    for method in Method::ALL {
        let (minlp, _) = reformulate(&gdp, &ReformConfig::new(method)).unwrap();
        let (mut samples, mut bad, mut worst) = (0, 0, 0.0f64);
        for_each_assignment(&sizes, |choice| {
            let rep = fixed_binary_check(&gdp, &minlp, choice, 200, seed).unwrap();
            samples += rep.samples_total;
            bad += rep.disagree.len();
            worst = worst.max(rep.max_abs_gap);
        });
        println!("{:<12} {samples} samples, {bad} disagreements, max gap {worst:.2e}", method.as_str());
    }
}
