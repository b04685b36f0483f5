//! Generalized TSP over a [`ClusteredGraph`]: leave the departure depot,
//! visit exactly one node of every cluster, end at the return depot.
//!
//! Tour costs are always summed from the last edge backwards, so the exact
//! solver, the enumeration oracle and the heuristic agree to the last bit on
//! the cost of any given tour. Among optimal tours the lexicographically
//! smallest node sequence is returned.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::EdgeCost;
use crate::graph::ClusteredGraph;

pub const MAX_EXACT_CLUSTERS: usize = 16;
pub const MAX_BRUTE_CLUSTERS: usize = 7;
pub const MAX_BRUTE_NODES: usize = 6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub states_expanded: u64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GtspSolution {
    /// Depot out, one node per cluster, depot in.
    pub node_sequence: Vec<usize>,
    pub edge_costs: Vec<f64>,
    pub cost: f64,
    pub exact: bool,
    pub stats: SolveStats,
}

impl GtspSolution {
    fn from_sequence(graph: &ClusteredGraph, node_sequence: Vec<usize>, exact: bool, stats: SolveStats) -> Self {
        let edge_costs: Vec<f64> = node_sequence.windows(2).map(|w| graph.value(w[0], w[1])).collect();
        let cost = right_fold(&edge_costs);
        GtspSolution { node_sequence, edge_costs, cost, exact, stats }
    }

    /// Visited clusters in tour order.
    pub fn cluster_order(&self, graph: &ClusteredGraph) -> Vec<usize> {
        self.node_sequence.iter().filter_map(|&u| graph.cluster_of(u)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GtspError {
    #[error("{0} clusters exceed the exact solver limit of {MAX_EXACT_CLUSTERS}; use fewer targets or the heuristic solver")]
    TooManyClusters(usize),
    #[error("enumeration is limited to {MAX_BRUTE_CLUSTERS} clusters of at most {MAX_BRUTE_NODES} nodes")]
    TooLarge,
    #[error("no tour with all edges feasible exists")]
    Infeasible,
    #[error("the heuristic found no tour with all edges feasible")]
    NotFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Effort {
    #[default]
    Fast,
    /// Adds seeded random restarts.
    Thorough,
}

fn right_fold(costs: &[f64]) -> f64 {
    costs.iter().rev().fold(0.0, |acc, c| c + acc)
}

/// Cost of a node sequence, summed from the end.
pub fn tour_cost(graph: &ClusteredGraph, seq: &[usize]) -> f64 {
    seq.windows(2).rev().fold(0.0, |acc, w| graph.value(w[0], w[1]) + acc)
}

struct ClusterIndex {
    /// Cluster of each target node, indexed by node id.
    cluster: Vec<usize>,
    /// Position of each target node inside its cluster.
    pos: Vec<usize>,
    /// Total node count of the clusters in each subset.
    size: Vec<usize>,
}

impl ClusterIndex {
    fn new(graph: &ClusteredGraph) -> Self {
        let n = graph.n_clusters();
        let mut cluster = vec![usize::MAX; graph.n_nodes()];
        let mut pos = vec![usize::MAX; graph.n_nodes()];
        for (c, ids) in graph.clusters().iter().enumerate() {
            for (k, &u) in ids.iter().enumerate() {
                cluster[u] = c;
                pos[u] = k;
            }
        }
        let mut size = vec![0usize; 1 << n];
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            size[mask] = size[mask & (mask - 1)] + graph.clusters()[low].len();
        }
        ClusterIndex { cluster, pos, size }
    }

    #[inline]
    fn local(&self, mask: usize, u: usize) -> usize {
        let c = self.cluster[u];
        self.size[mask & ((1 << c) - 1)] + self.pos[u]
    }
}

/// Exact solution by dynamic programming over (visited-cluster subset, last
/// node), one popcount layer at a time.
pub fn solve_exact(graph: &ClusteredGraph) -> Result<GtspSolution, GtspError> {
    let started = Instant::now();
    let n = graph.n_clusters();
    if n > MAX_EXACT_CLUSTERS {
        return Err(GtspError::TooManyClusters(n));
    }
    let (out, back) = (graph.depot_out(), graph.depot_in());
    if n == 0 {
        return Err(GtspError::Infeasible);
    }
    let idx = ClusterIndex::new(graph);
    let full = (1usize << n) - 1;
    let clusters = graph.clusters();

    // g[mask][local(v)]: cheapest completion from v after visiting `mask`
    let mut g: Vec<Vec<f64>> = vec![Vec::new(); 1 << n];
    g[full] = (0..n)
        .flat_map(|c| clusters[c].iter().map(|&v| graph.value(v, back)))
        .collect();
    let mut by_count: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for mask in 1..=full {
        by_count[mask.count_ones() as usize].push(mask);
    }
    let mut states = g[full].len() as u64;
    for layer in (1..n).rev() {
        let computed: Vec<(usize, Vec<f64>)> = by_count[layer]
            .par_iter()
            .map(|&mask| {
                let mut row = Vec::with_capacity(idx.size[mask]);
                for c in (0..n).filter(|c| mask >> c & 1 == 1) {
                    for &v in &clusters[c] {
                        let mut best = f64::INFINITY;
                        for c2 in (0..n).filter(|c2| mask >> c2 & 1 == 0) {
                            let next = mask | 1 << c2;
                            let tail = &g[next];
                            for &w in &clusters[c2] {
                                let val = graph.value(v, w) + tail[idx.local(next, w)];
                                if val < best {
                                    best = val;
                                }
                            }
                        }
                        row.push(best);
                    }
                }
                (mask, row)
            })
            .collect();
        for (mask, row) in computed {
            states += row.len() as u64;
            g[mask] = row;
        }
    }

    let mut best = f64::INFINITY;
    for (c, members) in clusters.iter().enumerate() {
        let mask = 1usize << c;
        for &w in members {
            let val = graph.value(out, w) + g[mask][idx.local(mask, w)];
            if val < best {
                best = val;
            }
        }
    }
    if !best.is_finite() {
        return Err(GtspError::Infeasible);
    }

    // forward reconstruction, smallest node id among exact matches
    let mut seq = vec![out];
    let (mut cur, mut mask, mut target) = (out, 0usize, best);
    while mask != full {
        let mut chosen = None;
        let mut candidates: Vec<usize> = (0..n)
            .filter(|c| mask >> c & 1 == 0)
            .flat_map(|c| clusters[c].iter().copied())
            .collect();
        candidates.sort_unstable();
        for w in candidates {
            let next = mask | 1 << idx.cluster[w];
            let tail = g[next][idx.local(next, w)];
            if graph.value(cur, w) + tail == target {
                chosen = Some((w, next, tail));
                break;
            }
        }
        let (w, next, tail) = chosen.expect("optimal continuation exists");
        seq.push(w);
        cur = w;
        mask = next;
        target = tail;
    }
    seq.push(back);
    let stats = SolveStats { states_expanded: states, wall_seconds: started.elapsed().as_secs_f64() };
    let sol = GtspSolution::from_sequence(graph, seq, true, stats);
    debug_assert_eq!(sol.cost, best);
    Ok(sol)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Exhaustive enumeration of cluster orders and node choices.
pub fn solve_bruteforce(graph: &ClusteredGraph) -> Result<GtspSolution, GtspError> {
    let started = Instant::now();
    let n = graph.n_clusters();
    if n > MAX_BRUTE_CLUSTERS || graph.clusters().iter().any(|c| c.len() > MAX_BRUTE_NODES) {
        return Err(GtspError::TooLarge);
    }
    if n == 0 {
        return Err(GtspError::Infeasible);
    }
    let clusters = graph.clusters();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0u64;
    loop {
        let mut choice = vec![0usize; n];
        loop {
            let mut seq = Vec::with_capacity(n + 2);
            seq.push(graph.depot_out());
            seq.extend(perm.iter().zip(&choice).map(|(&c, &k)| clusters[c][k]));
            seq.push(graph.depot_in());
            let cost = tour_cost(graph, &seq);
            count += 1;
            let better = match &best {
                None => cost.is_finite(),
                Some((bc, bs)) => cost < *bc || (cost == *bc && seq < *bs),
            };
            if better {
                best = Some((cost, seq));
            }
            // odometer over node choices
            let mut k = 0;
            while k < n {
                choice[k] += 1;
                if choice[k] < clusters[perm[k]].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (_, seq) = best.ok_or(GtspError::Infeasible)?;
    let stats = SolveStats { states_expanded: count, wall_seconds: started.elapsed().as_secs_f64() };
    Ok(GtspSolution::from_sequence(graph, seq, true, stats))
}

/// Infeasible legs first, then cost. Lets local search walk out of orders
/// that admit no feasible node selection.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Score {
    broken: u32,
    cost: f64,
}

impl Score {
    const ZERO: Score = Score { broken: 0, cost: 0.0 };

    fn add(self, c: EdgeCost) -> Score {
        match c.finite() {
            Some(v) => Score { broken: self.broken, cost: self.cost + v },
            None => Score { broken: self.broken + 1, cost: self.cost },
        }
    }

    fn better(self, o: Score) -> bool {
        self.broken < o.broken || (self.broken == o.broken && self.cost < o.cost)
    }
}

/// Best node per cluster for a fixed cluster order, by a layered shortest
/// path. Returns the full node sequence and its score.
fn select_nodes(graph: &ClusteredGraph, order: &[usize]) -> (Vec<usize>, Score) {
    let clusters = graph.clusters();
    let mut dist: Vec<Score> = vec![Score::ZERO];
    let mut prev_nodes = vec![graph.depot_out()];
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(order.len() + 1);
    let last = [graph.depot_in()];
    let layers = order.iter().map(|&c| clusters[c].as_slice()).chain(std::iter::once(&last[..]));
    for layer in layers {
        let mut next = Vec::with_capacity(layer.len());
        let mut arg = Vec::with_capacity(layer.len());
        for &w in layer {
            let mut best = (Score { broken: u32::MAX, cost: f64::INFINITY }, 0usize);
            for (k, &v) in prev_nodes.iter().enumerate() {
                let val = dist[k].add(graph.cost(v, w));
                if val.better(best.0) {
                    best = (val, k);
                }
            }
            next.push(best.0);
            arg.push(best.1);
        }
        dist = next;
        back.push(arg);
        prev_nodes = layer.to_vec();
    }
    let score = dist[0];
    let mut seq = vec![graph.depot_in()];
    let mut k = 0usize;
    for (depth, arg) in back.iter().enumerate().rev() {
        k = arg[k];
        let node = if depth == 0 { graph.depot_out() } else { clusters[order[depth - 1]][k] };
        seq.push(node);
    }
    seq.reverse();
    (seq, score)
}

fn cheapest_insertion(graph: &ClusteredGraph) -> Option<Vec<usize>> {
    let n = graph.n_clusters();
    let clusters = graph.clusters();
    let mut seq = vec![graph.depot_out(), graph.depot_in()];
    let mut used = vec![false; n];
    for _ in 0..n {
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for c in (0..n).filter(|&c| !used[c]) {
            for &w in &clusters[c] {
                for pos in 1..seq.len() {
                    let (u, v) = (seq[pos - 1], seq[pos]);
                    let removed = if graph.has_edge(u, v) { graph.value(u, v) } else { 0.0 };
                    let delta = graph.value(u, w) + graph.value(w, v) - removed;
                    if delta.is_finite() && best.is_none_or(|b| delta < b.0) {
                        best = Some((delta, c, w, pos));
                    }
                }
            }
        }
        let (_, c, w, pos) = best?;
        used[c] = true;
        seq.insert(pos, w);
    }
    Some(seq)
}

fn nearest_neighbour(graph: &ClusteredGraph) -> Option<Vec<usize>> {
    let n = graph.n_clusters();
    let mut used = vec![false; n];
    let mut seq = vec![graph.depot_out()];
    let mut cur = graph.depot_out();
    for _ in 0..n {
        let mut best: Option<(f64, usize, usize)> = None;
        for c in (0..n).filter(|&c| !used[c]) {
            for &w in &graph.clusters()[c] {
                let val = graph.value(cur, w);
                if val.is_finite() && best.is_none_or(|b| val < b.0) {
                    best = Some((val, c, w));
                }
            }
        }
        let (_, c, w) = best?;
        used[c] = true;
        seq.push(w);
        cur = w;
    }
    seq.push(graph.depot_in());
    Some(seq)
}

/// Clusters ordered by the earliest start time among their nodes.
fn earliest_window_order(graph: &ClusteredGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..graph.n_clusters()).collect();
    let key = |c: usize| graph.clusters()[c].iter().map(|&u| graph.node(u).t_lo).fold(f64::INFINITY, f64::min);
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
    order
}

fn order_of(graph: &ClusteredGraph, seq: &[usize]) -> Vec<usize> {
    seq.iter().filter_map(|&u| graph.cluster_of(u)).collect()
}

/// First-improvement local search over cluster orders with 2-opt and or-opt
/// moves, every candidate order re-optimized by node selection.
fn improve(graph: &ClusteredGraph, mut order: Vec<usize>) -> (Vec<usize>, Score) {
    let (mut seq, mut cost) = select_nodes(graph, &order);
    let n = order.len();
    let mut improved = true;
    while improved {
        improved = false;
        'moves: for i in 0..n {
            for j in i + 1..n {
                let mut cand = order.clone();
                cand[i..=j].reverse();
                let (s, c) = select_nodes(graph, &cand);
                if c.better(cost) {
                    (order, seq, cost) = (cand, s, c);
                    improved = true;
                    break 'moves;
                }
            }
            for len in 1..=3.min(n) {
                if i + len > n {
                    break;
                }
                for to in 0..=n - len {
                    if to == i {
                        continue;
                    }
                    let mut cand = order.clone();
                    let block: Vec<usize> = cand.drain(i..i + len).collect();
                    let at = to.min(cand.len());
                    cand.splice(at..at, block);
                    let (s, c) = select_nodes(graph, &cand);
                    if c.better(cost) {
                        (order, seq, cost) = (cand, s, c);
                        improved = true;
                        break 'moves;
                    }
                }
            }
        }
    }
    (seq, cost)
}

/// Heuristic tour: several constructions, each refined by local search.
pub fn solve_heuristic(graph: &ClusteredGraph, effort: Effort) -> Result<GtspSolution, GtspError> {
    let started = Instant::now();
    let n = graph.n_clusters();
    if n == 0 {
        return Err(GtspError::NotFound);
    }
    let mut starts: Vec<Vec<usize>> = vec![earliest_window_order(graph)];
    starts.extend(cheapest_insertion(graph).map(|s| order_of(graph, &s)));
    starts.extend(nearest_neighbour(graph).map(|s| order_of(graph, &s)));
    if effort == Effort::Thorough {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..8 {
            let mut o: Vec<usize> = (0..n).collect();
            o.shuffle(&mut rng);
            starts.push(o);
        }
    }
    starts.dedup();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut evaluated = 0u64;
    for order in starts {
        let (seq, score) = improve(graph, order);
        evaluated += 1;
        if score.broken > 0 {
            continue;
        }
        let cost = tour_cost(graph, &seq);
        if best.as_ref().is_none_or(|(bc, bs)| cost < *bc || (cost == *bc && seq < *bs)) {
            best = Some((cost, seq));
        }
    }
    let (_, seq) = best.ok_or(GtspError::NotFound)?;
    let stats = SolveStats { states_expanded: evaluated, wall_seconds: started.elapsed().as_secs_f64() };
    Ok(GtspSolution::from_sequence(graph, seq, false, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_graph(seed: u64, sizes: &[usize]) -> ClusteredGraph {
        use rand::Rng;
        let total: usize = sizes.iter().sum::<usize>() + 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table: Vec<EdgeCost> = (0..total * total)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    EdgeCost::Infeasible
                } else {
                    EdgeCost::Finite(f64::from(rng.gen_range(0u32..20)) * 0.5)
                }
            })
            .collect();
        ClusteredGraph::from_cost_fn(sizes, move |u, v| table[u * total + v])
    }

    #[test]
    fn single_cluster_single_node() {
        let g = ClusteredGraph::from_cost_fn(&[1], |u, _| EdgeCost::Finite(if u == 0 { 2.0 } else { 3.0 }));
        let s = solve_exact(&g).unwrap();
        assert_eq!(s.cost, 5.0);
        assert_eq!(s.node_sequence, vec![0, 1, 2]);
        assert_eq!(solve_heuristic(&g, Effort::Fast).unwrap().cost, 5.0);
    }

    #[test]
    fn unreachable_cluster_is_infeasible() {
        let g = ClusteredGraph::from_cost_fn(&[2, 1], |_, v| if v == 3 { EdgeCost::Infeasible } else { EdgeCost::Finite(1.0) });
        assert_eq!(solve_exact(&g), Err(GtspError::Infeasible));
        assert_eq!(solve_bruteforce(&g), Err(GtspError::Infeasible));
        assert_eq!(solve_heuristic(&g, Effort::Thorough), Err(GtspError::NotFound));
    }

    #[test]
    fn exact_matches_enumeration() {
        for seed in 0..40 {
            let sizes: Vec<usize> = (0..(seed % 5 + 1) as usize).map(|k| (k + seed as usize) % 4 + 1).collect();
            let g = random_graph(seed, &sizes);
            let a = solve_exact(&g);
            let b = solve_bruteforce(&g);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    assert_eq!(a.cost, b.cost);
                    assert_eq!(a.node_sequence, b.node_sequence);
                    let h = solve_heuristic(&g, Effort::Thorough).unwrap();
                    assert!(h.cost >= a.cost);
                }
                (Err(a), Err(b)) => assert_eq!(a, b),
                (a, b) => panic!("disagreement: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn limits() {
        let g = ClusteredGraph::from_cost_fn(&[1; 17], |_, _| EdgeCost::Finite(1.0));
        assert_eq!(solve_exact(&g), Err(GtspError::TooManyClusters(17)));
        assert_eq!(solve_bruteforce(&g), Err(GtspError::TooLarge));
    }

    #[test]
    fn permutations_enumerate_all() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }
}
