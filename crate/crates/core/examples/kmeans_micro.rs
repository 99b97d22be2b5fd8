//! Five points, two clusters: solves the hull-exact MINLP by brute force and
//! compares with exhaustive enumeration of the cluster assignments.
//!
//! cargo run --release --example kmeans_micro

use gdpq::gen::{gen_kmeans, KmeansParams};
use gdpq::oracle::{brute_force_solve, BruteForceBudget};
use gdpq::reform::{reformulate, Method, ReformConfig};

fn wcss(points: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let dims = points[0].len();
    (0..k)
        .map(|c| {
            let members: Vec<&Vec<f64>> = points.iter().zip(labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
            if members.is_empty() {
                return 0.0;
            }
            let mean: Vec<f64> = (0..dims).map(|d| members.iter().map(|p| p[d]).sum::<f64>() / members.len() as f64).collect();
            members.iter().map(|p| p.iter().zip(&mean).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).sum::<f64>()
        })
        .sum()
}

fn main() {
    let params = KmeansParams::sampled(5, 2, 2, 3);
    let points = params.resolve_points();
    let gdp = gen_kmeans(&params).unwrap();
    let (minlp, report) = reformulate(&gdp, &ReformConfig::new(Method::HullExact)).unwrap();
    println!("hull-exact: {} columns, {} nonlinear rows", minlp.vars.len(), report.counts.nonlinear_rows);

    let res = brute_force_solve(&minlp, &BruteForceBudget::default()).unwrap();
    println!("brute force: {:?} objective {:?}", res.status, res.best_objective);

    let best = (0..1usize << points.len())
        .map(|mask| (0..points.len()).map(|i| (mask >> i) & 1).collect::<Vec<_>>())
        .filter(|l| l.contains(&0) && l.contains(&1))
        .map(|l| wcss(&points, &l, 2))
        .fold(f64::INFINITY, f64::min);
    println!("enumeration: {best:.9}");
}
