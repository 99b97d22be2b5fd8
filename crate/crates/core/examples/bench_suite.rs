//! Runs a small convex suite with tightness estimates and prints the CSV,
//! a per-method summary and a profile over reformulation time.
//!
//! cargo run --release --example bench_suite

use std::path::Path;

use gdpq::bench::{performance_profile, run_suite, summarize, write_csv, Check, InstanceSpec, SuiteManifest, TightnessConfig};
use gdpq::gen::{GeneratorParams, RandomGdpParams};
use gdpq::reform::{Method, ReformConfig};

fn main() {
    let gen = GeneratorParams::Random(RandomGdpParams::new(2, 2, 3, 2, 0).convex());
    let mut manifest = SuiteManifest::new(
        vec![InstanceSpec::generated("convex", gen).with_seeds(0..4)],
        vec![
            ReformConfig::new(Method::Bigm),
            ReformConfig::new(Method::HullEps),
            ReformConfig::new(Method::HullExact),
            ReformConfig::new(Method::HullExact).with_s3(),
        ],
    );
    manifest.checks = [Check::Counts, Check::BinaryFix].into();
    manifest.check_samples = 200;
    manifest.tightness = Some(TightnessConfig {
        samples: 2000,
        ..TightnessConfig::default()
    });

    let records = run_suite(&manifest, Path::new(".")).unwrap();
    write_csv(&records, std::io::stdout()).unwrap();
    println!("{}", serde_json::to_string_pretty(&summarize(&records)).unwrap());
    for (method, steps) in performance_profile(&records, 1.0) {
        println!("{method}: {} solved by the limit", steps.last().map_or(0, |s| s.1));
    }
}
