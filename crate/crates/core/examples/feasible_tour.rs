//! Upper bound from sampled trajectory points, checked and compared with the
//! tour recovered from a lower bound.

use mtbound::feasible::{check_tour, feasible_from_lower_bound, find_feasible, DEFAULT_SAMPLES};
use mtbound::graph::build;
use mtbound::gtsp::{solve_exact, Effort};
use mtbound::model::generate;
use mtbound::{DiscretizationLevel, GeneratorConfig, InstanceKind, SamplingParams, Variant};

fn main() {
    let inst = generate(&GeneratorConfig::standard(InstanceKind::Complex, 6, 8)).unwrap();
    let ub = find_feasible(&inst, DEFAULT_SAMPLES, Effort::Thorough).unwrap();
    assert!(check_tour(&inst, &ub));
    println!("sampled tour {:?} completes at {:.4} s", ub.visit_order, ub.completion_time);
    for (k, (&id, &t)) in ub.visit_order.iter().zip(&ub.arrival_times).enumerate() {
        println!("  target {id} at {t:.3} s (window {})", ub.window_choice[k]);
    }

    let graph = build(&inst, DiscretizationLevel::Level(4).delta(), Variant::Linear, SamplingParams::default()).unwrap();
    let lb = solve_exact(&graph).unwrap();
    println!("lower bound {:.4} s", lb.cost);
    match feasible_from_lower_bound(&inst, &graph, &lb) {
        Ok(t) => println!("lower-bound order {:?} completes at {:.4} s", t.visit_order, t.completion_time),
        Err(e) => println!("lower-bound order is not feasible: {e}"),
    }
}
