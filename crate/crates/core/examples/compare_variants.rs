//! Percent deviation of each bound from the feasible tour, averaged over a
//! few generated instances.

use mtbound::cli::percent_deviation;
use mtbound::feasible::{find_feasible, DEFAULT_SAMPLES};
use mtbound::graph::build;
use mtbound::gtsp::{solve_exact, Effort};
use mtbound::model::generate;
use mtbound::{DiscretizationLevel, GeneratorConfig, InstanceKind, SamplingParams, Variant};

fn main() {
    let delta = DiscretizationLevel::Level(4).delta();
    let mut sums = [0.0; 4];
    let mut count = 0;
    for seed in 1..=5 {
        let inst = generate(&GeneratorConfig::standard(InstanceKind::Simple, 5, seed)).unwrap();
        let Ok(ub) = find_feasible(&inst, DEFAULT_SAMPLES, Effort::Thorough) else { continue };
        count += 1;
        for (k, variant) in Variant::ALL.into_iter().enumerate() {
            let g = build(&inst, delta, variant, SamplingParams::default()).unwrap();
            let lb = solve_exact(&g).unwrap().cost;
            sums[k] += percent_deviation(ub.completion_time, lb).unwrap();
        }
    }
    println!("mean % deviation over {count} instances at delta {delta}:");
    for (k, variant) in Variant::ALL.into_iter().enumerate() {
        println!("  {variant:>10}  {:6.2}", sums[k] / count as f64);
    }
}
