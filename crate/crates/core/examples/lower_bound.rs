//! Lower bound for one instance: partition windows, build the clustered
//! graph, solve it exactly.

use mtbound::graph::build;
use mtbound::gtsp::solve_exact;
use mtbound::model::generate;
use mtbound::{DiscretizationLevel, GeneratorConfig, InstanceKind, SamplingParams, Variant};

fn main() {
    let inst = generate(&GeneratorConfig::standard(InstanceKind::Simple, 6, 5)).unwrap();
    let delta = DiscretizationLevel::Level(3).delta();
    let graph = build(&inst, delta, Variant::Linear, SamplingParams::default()).unwrap();
    println!("{} nodes in {} clusters, built in {:.3} s", graph.n_nodes(), graph.n_clusters(), graph.build_seconds());
    let sol = solve_exact(&graph).unwrap();
    println!("lower bound {:.4} s ({} states)", sol.cost, sol.stats.states_expanded);
    for (&u, c) in sol.node_sequence.iter().skip(1).zip(&sol.edge_costs) {
        let n = graph.node(u);
        match n.target {
            Some(id) => println!("  +{c:7.3}  target {id} during [{:.3}, {:.3}]", n.t_lo, n.t_hi),
            None => println!("  +{c:7.3}  depot"),
        }
    }
}
