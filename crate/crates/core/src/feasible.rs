//! Feasible tours (upper bounds).
//!
//! A tour is found by solving the generalized TSP heuristically on a graph of
//! sampled trajectory points, then re-timing the resulting visit order with
//! [`reoptimize_arrivals`]. The same re-timing turns the visit order of a
//! lower-bound tour into a feasible tour when one exists for that order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::EdgeCost;
use crate::graph::{ClusteredGraph, EdgeModel};
use crate::gtsp::{solve_heuristic, Effort, GtspSolution};
use crate::kinematics::{efat_trajectory, feasible};
use crate::model::Instance;

pub const DEFAULT_SAMPLES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleTour {
    #[serde(rename = "order")]
    pub visit_order: Vec<u32>,
    /// Arrival time at each visited target, in visit order.
    #[serde(rename = "arrivals")]
    pub arrival_times: Vec<f64>,
    /// Index of the window used at each visit, in visit order.
    #[serde(rename = "windows")]
    pub window_choice: Vec<usize>,
    pub completion_time: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeasibleError {
    #[error("no window assignment completes the given visit order")]
    Infeasible,
    #[error("no feasible tour found: {0}")]
    NotFound(String),
}

/// Splits `total` samples over windows in proportion to their durations
/// (largest remainder).
fn allocate(durations: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = durations.iter().sum();
    let quotas: Vec<f64> = durations.iter().map(|d| total as f64 * d / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut rest: Vec<usize> = (0..durations.len()).collect();
    rest.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())).then(a.cmp(&b)));
    let missing = total - counts.iter().sum::<usize>();
    for &k in rest.iter().take(missing) {
        counts[k] += 1;
    }
    counts
}

/// Equally spaced times covering `[lo, hi]` including both ends; a single
/// sample sits at the midpoint.
fn sample_times(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..m).map(|k| if k + 1 == m { hi } else { lo + (hi - lo) * k as f64 / (m - 1) as f64 }).collect(),
    }
}

/// Graph whose nodes are trajectory points sampled inside the windows. Edge
/// costs are exact travel times: `t_v − t_u` when the agent can make the move,
/// departure from the depot at time 0, return to the depot at full speed.
pub fn sample_point_graph(inst: &Instance, samples_per_target: usize) -> ClusteredGraph {
    assert!(samples_per_target >= 1, "need at least one sample per target");
    let clusters = inst
        .targets
        .iter()
        .map(|t| {
            let durations: Vec<f64> = t.windows.iter().map(|w| w.duration()).collect();
            allocate(&durations, samples_per_target)
                .into_iter()
                .zip(&t.windows)
                .flat_map(|(m, w)| sample_times(w.lo, w.hi, m))
                .map(|s| (t.id, s, s))
                .collect()
        })
        .collect();
    let position = |node: &crate::graph::IntervalNode| match node.target {
        Some(id) => inst.targets[id as usize - 1].trajectory.position_clamped(node.t_lo),
        None => inst.depot,
    };
    ClusteredGraph::from_parts(clusters, inst.horizon, EdgeModel::Points, None, |u, v| {
        let (pu, pv) = (position(u), position(v));
        if v.target.is_none() {
            return EdgeCost::Finite(pu.dist(pv) / inst.v_max);
        }
        if feasible(pu, u.t_lo, pv, v.t_lo, inst.v_max) {
            EdgeCost::Finite(v.t_lo - u.t_lo)
        } else {
            EdgeCost::Infeasible
        }
    })
}

/// Earliest-arrival re-timing of a fixed visit order: for every window of the
/// next target, keep the earliest arrival over all windows of the previous
/// one. Arriving earlier never hurts later visits, so this minimizes the
/// completion time for the order.
pub fn reoptimize_arrivals(inst: &Instance, order: &[u32]) -> Result<FeasibleTour, FeasibleError> {
    let mut seen = vec![false; inst.targets.len()];
    for &id in order {
        let k = (id as usize).wrapping_sub(1);
        assert!(k < seen.len() && !seen[k], "order must list each target id at most once");
        seen[k] = true;
    }
    if order.is_empty() {
        return Err(FeasibleError::Infeasible);
    }
    // per step, per window: (arrival, window index of the previous step)
    let mut steps: Vec<Vec<Option<(f64, usize)>>> = Vec::with_capacity(order.len());
    for (k, &id) in order.iter().enumerate() {
        let target = &inst.targets[id as usize - 1];
        let row = target
            .windows
            .iter()
            .map(|w| {
                if k == 0 {
                    return efat_trajectory(inst.depot, 0.0, &target.trajectory, (w.lo, w.hi), inst.v_max).map(|t| (t, 0));
                }
                let prev = &inst.targets[order[k - 1] as usize - 1].trajectory;
                let mut best: Option<(f64, usize)> = None;
                for (pw, state) in steps[k - 1].iter().enumerate() {
                    let Some((t_prev, _)) = *state else { continue };
                    let from = prev.position_clamped(t_prev);
                    if let Some(t) = efat_trajectory(from, t_prev, &target.trajectory, (w.lo, w.hi), inst.v_max) {
                        if best.is_none_or(|b| t < b.0) {
                            best = Some((t, pw));
                        }
                    }
                }
                best
            })
            .collect();
        steps.push(row);
    }
    let last = &inst.targets[*order.last().expect("non-empty") as usize - 1].trajectory;
    let mut end: Option<(f64, usize)> = None;
    for (w, state) in steps.last().expect("non-empty").iter().enumerate() {
        if let Some((t, _)) = *state {
            let done = t + last.position_clamped(t).dist(inst.depot) / inst.v_max;
            if end.is_none_or(|e| done < e.0) {
                end = Some((done, w));
            }
        }
    }
    let (completion_time, mut w) = end.ok_or(FeasibleError::Infeasible)?;
    let mut arrival_times = vec![0.0; order.len()];
    let mut window_choice = vec![0; order.len()];
    for k in (0..order.len()).rev() {
        let (t, pw) = steps[k][w].expect("state on the optimal chain");
        arrival_times[k] = t;
        window_choice[k] = w;
        w = pw;
    }
    Ok(FeasibleTour { visit_order: order.to_vec(), arrival_times, window_choice, completion_time })
}

/// Heuristic tour on the sampled point graph, re-timed.
pub fn find_feasible(inst: &Instance, samples_per_target: usize, effort: Effort) -> Result<FeasibleTour, FeasibleError> {
    let graph = sample_point_graph(inst, samples_per_target);
    let sol = solve_heuristic(&graph, effort).map_err(|e| FeasibleError::NotFound(e.to_string()))?;
    let order = target_order(&graph, &sol);
    reoptimize_arrivals(inst, &order)
        .map_err(|_| FeasibleError::NotFound("sampled tour order could not be re-timed".into()))
}

/// Re-times the target order of a lower-bound tour.
pub fn feasible_from_lower_bound(
    inst: &Instance,
    graph: &ClusteredGraph,
    lb: &GtspSolution,
) -> Result<FeasibleTour, FeasibleError> {
    let order = target_order(graph, lb);
    reoptimize_arrivals(inst, &order)
        .map_err(|_| FeasibleError::NotFound("the lower-bound visit order admits no feasible timing".into()))
}

/// Target ids visited by a graph tour, in order.
pub fn target_order(graph: &ClusteredGraph, sol: &GtspSolution) -> Vec<u32> {
    sol.node_sequence.iter().filter_map(|&u| graph.node(u).target).collect()
}

/// Whether `tour` is kinematically realizable for `inst`: every arrival inside
/// its window, every leg within `v_max`, completion no earlier than the
/// closest return.
pub fn check_tour(inst: &Instance, tour: &FeasibleTour) -> bool {
    let mut at = inst.depot;
    let mut now = 0.0;
    for ((&id, &t), &w) in tour.visit_order.iter().zip(&tour.arrival_times).zip(&tour.window_choice) {
        let Some(target) = inst.target(id) else { return false };
        let Some(window) = target.windows.get(w) else { return false };
        if !window.contains(t) {
            return false;
        }
        let p = target.trajectory.position_clamped(t);
        if !feasible(at, now, p, t, inst.v_max) {
            return false;
        }
        (at, now) = (p, t);
    }
    tour.visit_order.len() == inst.targets.len()
        && tour.completion_time + 1e-9 >= now + at.dist(inst.depot) / inst.v_max
}
