//! Exact, enumerative and heuristic generalized TSP on a random graph.

use mtbound::gtsp::{solve_bruteforce, solve_exact, solve_heuristic, Effort};
use mtbound::{ClusteredGraph, EdgeCost};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let sizes = [3, 2, 4, 3, 2];
    let total = sizes.iter().sum::<usize>() + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let table: Vec<EdgeCost> = (0..total * total)
        .map(|_| if rng.gen_bool(0.2) { EdgeCost::Infeasible } else { EdgeCost::Finite(rng.gen_range(1.0..9.0)) })
        .collect();
    let g = ClusteredGraph::from_cost_fn(&sizes, |u, v| table[u * total + v]);

    let exact = solve_exact(&g).unwrap();
    let brute = solve_bruteforce(&g).unwrap();
    println!("exact      {:.4} {:?}", exact.cost, exact.node_sequence);
    println!("brute      {:.4} {:?}", brute.cost, brute.node_sequence);
    for effort in [Effort::Fast, Effort::Thorough] {
        let h = solve_heuristic(&g, effort).unwrap();
        println!("{:<10} {:.4} {:?}", format!("{effort:?}").to_lowercase(), h.cost, h.node_sequence);
    }
}
