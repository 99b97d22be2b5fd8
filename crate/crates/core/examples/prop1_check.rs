//! Samples (v, y) for random quadratics and compares the perspective
//! closure row with the exact quadratic hull row.
//!
//! cargo run --release --example prop1_check -- [count] [samples]

use gdpq::oracle::{check_s1_s2, random_quadratic};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("counts are integers"));
    let count = args.next().unwrap_or(20);
    let samples = args.next().unwrap_or(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let bounds = vec![(-2.0, 2.0); 3];
    let mut dirty = 0;
    for i in 0..count {
        let psd = i % 2 == 0;
        let h = random_quadratic(3, psd, &mut rng);
        let r = check_s1_s2(&h, &bounds, samples, i as u64);
        println!(
            "{i:>3} {:<10} agree {:>6} banded {:>4} disagree {} max|gap| {:.3e}",
            if psd { "psd" } else { "indefinite" },
            r.agree,
            r.banded,
            r.disagree.len(),
            r.max_abs_gap
        );
        dirty += usize::from(!r.is_clean());
    }
    println!("{dirty} of {count} bodies disagreed");
}
