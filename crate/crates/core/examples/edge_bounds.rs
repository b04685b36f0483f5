//! The four travel-time bounds on pairs of trajectory intervals.

use mtbound::bounds::{edge_cost, gate, Gate, Locus};
use mtbound::graph::partition;
use mtbound::model::generate;
use mtbound::{GeneratorConfig, InstanceKind, SamplingParams, Variant};

fn main() {
    let inst = generate(&GeneratorConfig::standard(InstanceKind::Complex, 3, 3)).unwrap();
    let parts = partition(&inst, 2.5);
    let mut shown = [false; 3];
    for &(_, a_lo, a_hi) in &parts[0] {
        for &(_, b_lo, b_hi) in &parts[1] {
            let from = Locus::new(&inst.targets[0].trajectory, a_lo, a_hi);
            let to = Locus::new(&inst.targets[1].trajectory, b_lo, b_hi);
            let g = gate(&from, &to, inst.v_max);
            let slot = match g {
                Gate::Infeasible => 0,
                Gate::TrivialOptimal(_) => 1,
                Gate::NeedsBounding => 2,
            };
            if std::mem::replace(&mut shown[slot], true) {
                continue;
            }
            println!("target 1 over [{a_lo:.3}, {a_hi:.3}] -> target 2 over [{b_lo:.3}, {b_hi:.3}]: {g:?}");
            for variant in Variant::ALL {
                match edge_cost(&from, &to, inst.v_max, variant, SamplingParams::default()).finite() {
                    Some(v) => println!("  {variant:>10}: {v:.4} s"),
                    None => println!("  {variant:>10}: infeasible"),
                }
            }
        }
    }
}
