//! Lower bounds tighten as the windows are cut finer.

use mtbound::graph::{build, partition};
use mtbound::gtsp::solve_exact;
use mtbound::model::generate;
use mtbound::{DiscretizationLevel, GeneratorConfig, InstanceKind, SamplingParams, Variant};

fn main() {
    let inst = generate(&GeneratorConfig::standard(InstanceKind::Complex, 5, 13)).unwrap();
    println!("level  delta  intervals  lite      geometric  linear");
    for level in 1..=4 {
        let delta = DiscretizationLevel::Level(level).delta();
        let per_target = partition(&inst, delta)[0].len();
        let lbs: Vec<String> = [Variant::Lite, Variant::Geometric, Variant::Linear]
            .into_iter()
            .map(|v| {
                let g = build(&inst, delta, v, SamplingParams::default()).unwrap();
                format!("{:<9.4}", solve_exact(&g).unwrap().cost)
            })
            .collect();
        println!("{level:>5}  {delta:<5}  {per_target:>9}  {}", lbs.join("  "));
    }
    let custom = 0.4;
    let g = build(&inst, custom, Variant::Linear, SamplingParams::default()).unwrap();
    println!("custom delta {custom}: linear {:.4}", solve_exact(&g).unwrap().cost);
}
