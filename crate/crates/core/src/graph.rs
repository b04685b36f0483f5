//! Clustered graph over trajectory intervals.
//!
//! Each target's windows are cut into intervals of width Δ; every interval is
//! a node and the nodes of one target form a cluster. Node `0` is the depot at
//! departure (pinned to time 0) and the last node is the depot on return.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{depot_trajectory, edge_cost, sft_to_depot, EdgeCost, Locus, SamplingParams, Variant};
use crate::model::{Instance, ParseError};

pub const GRAPH_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscretizationLevel {
    /// Levels 1–4: Δ = 5, 2.5, 1.25, 0.625 s.
    Level(u8),
    Custom(f64),
}

impl DiscretizationLevel {
    pub fn from_level(level: u8) -> Option<Self> {
        (1..=4).contains(&level).then_some(DiscretizationLevel::Level(level))
    }

    pub fn delta(self) -> f64 {
        match self {
            DiscretizationLevel::Level(l) => {
                assert!((1..=4).contains(&l), "discretization level {l} outside 1..=4");
                5.0 / f64::from(1u32 << (l - 1))
            }
            DiscretizationLevel::Custom(d) => d,
        }
    }
}

/// What the edge costs of a graph represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeModel {
    Bound(Variant),
    /// Exact travel times between sampled trajectory points.
    Points,
}

impl EdgeModel {
    pub fn name(self) -> &'static str {
        match self {
            EdgeModel::Bound(v) => v.name(),
            EdgeModel::Points => "points",
        }
    }
}

impl fmt::Display for EdgeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EdgeModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "points" {
            Ok(EdgeModel::Points)
        } else {
            s.parse().map(EdgeModel::Bound)
        }
    }
}

impl Serialize for EdgeModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EdgeModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A graph node: a target's trajectory over `[t_lo, t_hi]`, or a depot copy
/// (`target == None`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalNode {
    pub id: usize,
    pub target: Option<u32>,
    pub t_lo: f64,
    pub t_hi: f64,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("the linear variant needs piecewise-linear trajectories; this {kind} instance has arcs")]
    VariantUnsupported { kind: String },
    #[error("discretization width must be positive, got {0}")]
    BadDelta(f64),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredGraph {
    nodes: Vec<IntervalNode>,
    clusters: Vec<Vec<usize>>,
    cluster_of: Vec<Option<usize>>,
    costs: Vec<EdgeCost>,
    model: EdgeModel,
    delta: Option<f64>,
    build_seconds: f64,
}

impl ClusteredGraph {
    /// Assembles a graph from target nodes grouped by cluster and a cost
    /// function. Node ids are assigned in order: depot out, cluster nodes,
    /// depot in. `cost` is only queried for edges that exist.
    pub fn from_parts(
        target_nodes: Vec<Vec<(u32, f64, f64)>>,
        horizon: f64,
        model: EdgeModel,
        delta: Option<f64>,
        cost: impl Fn(&IntervalNode, &IntervalNode) -> EdgeCost + Sync,
    ) -> Self {
        let mut nodes = vec![IntervalNode { id: 0, target: None, t_lo: 0.0, t_hi: 0.0 }];
        let mut clusters = Vec::with_capacity(target_nodes.len());
        for cluster in target_nodes {
            let ids = cluster
                .into_iter()
                .map(|(target, t_lo, t_hi)| {
                    let id = nodes.len();
                    nodes.push(IntervalNode { id, target: Some(target), t_lo, t_hi });
                    id
                })
                .collect();
            clusters.push(ids);
        }
        let id = nodes.len();
        nodes.push(IntervalNode { id, target: None, t_lo: 0.0, t_hi: horizon });
        let mut g = ClusteredGraph::skeleton(nodes, clusters, model, delta);
        let n = g.nodes.len();
        let rows: Vec<Vec<EdgeCost>> = (0..n)
            .into_par_iter()
            .map(|u| {
                (0..n)
                    .map(|v| if g.has_edge(u, v) { cost(&g.nodes[u], &g.nodes[v]) } else { EdgeCost::Infeasible })
                    .collect()
            })
            .collect();
        g.costs = rows.concat();
        g
    }

    fn skeleton(nodes: Vec<IntervalNode>, clusters: Vec<Vec<usize>>, model: EdgeModel, delta: Option<f64>) -> Self {
        let mut cluster_of = vec![None; nodes.len()];
        for (c, ids) in clusters.iter().enumerate() {
            for &u in ids {
                cluster_of[u] = Some(c);
            }
        }
        let n = nodes.len();
        ClusteredGraph {
            nodes,
            clusters,
            cluster_of,
            costs: vec![EdgeCost::Infeasible; n * n],
            model,
            delta,
            build_seconds: 0.0,
        }
    }

    /// Graph with explicit clusters of the given sizes and arbitrary costs;
    /// nodes carry empty time intervals. Useful for exercising the solvers.
    pub fn from_cost_fn(cluster_sizes: &[usize], cost: impl Fn(usize, usize) -> EdgeCost + Sync) -> Self {
        let nodes = cluster_sizes
            .iter()
            .enumerate()
            .map(|(c, &size)| (0..size).map(|_| (c as u32 + 1, 0.0, 0.0)).collect())
            .collect();
        ClusteredGraph::from_parts(nodes, 0.0, EdgeModel::Points, None, |u, v| cost(u.id, v.id))
    }

    pub fn nodes(&self) -> &[IntervalNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &IntervalNode {
        &self.nodes[id]
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, u: usize) -> Option<usize> {
        self.cluster_of[u]
    }

    pub fn depot_out(&self) -> usize {
        0
    }

    pub fn depot_in(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn model(&self) -> EdgeModel {
        self.model
    }

    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    /// Wall-clock time spent computing edge costs; not part of the dump.
    pub fn build_seconds(&self) -> f64 {
        self.build_seconds
    }

    /// Whether `(u, v)` is an edge: distinct clusters, out of the departure
    /// depot, into the return depot, never depot to depot.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (out, back) = (self.depot_out(), self.depot_in());
        if u == v || u == back || v == out || (u == out && v == back) {
            return false;
        }
        match (self.cluster_of[u], self.cluster_of[v]) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        }
    }

    pub fn cost(&self, u: usize, v: usize) -> EdgeCost {
        self.costs[u * self.nodes.len() + v]
    }

    /// Edge cost as a number, `+∞` when infeasible or absent.
    #[inline]
    pub fn value(&self, u: usize, v: usize) -> f64 {
        self.costs[u * self.nodes.len() + v].value()
    }

    pub fn set_cost(&mut self, u: usize, v: usize, c: EdgeCost) {
        assert!(self.has_edge(u, v), "({u}, {v}) is not an edge");
        let n = self.nodes.len();
        self.costs[u * n + v] = c;
    }

    /// All edges in `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, EdgeCost)> + '_ {
        let n = self.nodes.len();
        (0..n).flat_map(move |u| (0..n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v, self.cost(u, v))))
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            version: GRAPH_FORMAT_VERSION,
            variant: self.model,
            delta: self.delta,
            nodes: self.nodes.clone(),
            edges: self.edges().collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| ParseError::from_json(&e))?;
        if doc.version != GRAPH_FORMAT_VERSION {
            return Err(ParseError::plain(format!(
                "unsupported graph version {} (expected {GRAPH_FORMAT_VERSION})",
                doc.version
            ))
            .into());
        }
        let n = doc.nodes.len();
        if n < 2 || doc.nodes.iter().enumerate().any(|(k, node)| node.id != k) {
            return Err(ParseError::plain("node ids must run 0..n with at least the two depot nodes").into());
        }
        if doc.nodes[0].target.is_some() || doc.nodes[n - 1].target.is_some() {
            return Err(ParseError::plain("first and last nodes must be the depot").into());
        }
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut last_target = None;
        for node in &doc.nodes[1..n - 1] {
            let Some(t) = node.target else {
                return Err(ParseError::plain(format!("node {} has no target", node.id)).into());
            };
            if last_target != Some(t) {
                if last_target.is_some_and(|l| l > t) || clusters.iter().any(|c| doc.nodes[c[0]].target == Some(t)) {
                    return Err(ParseError::plain("nodes of a cluster must be contiguous").into());
                }
                clusters.push(Vec::new());
                last_target = Some(t);
            }
            clusters.last_mut().expect("cluster pushed").push(node.id);
        }
        let mut g = ClusteredGraph::skeleton(doc.nodes, clusters, doc.variant, doc.delta);
        for (u, v, c) in doc.edges {
            if u >= n || v >= n || !g.has_edge(u, v) {
                return Err(ParseError::plain(format!("({u}, {v}) is not an edge of this graph")).into());
            }
            g.set_cost(u, v, c);
        }
        Ok(g)
    }

    pub fn dump(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| GraphError::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| GraphError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    version: u32,
    variant: EdgeModel,
    delta: Option<f64>,
    nodes: Vec<IntervalNode>,
    edges: Vec<(usize, usize, EdgeCost)>,
}

/// Splits every window of every target into consecutive intervals of width
/// `delta`; a width that does not divide a window leaves a shorter last
/// interval.
pub fn partition(inst: &Instance, delta: f64) -> Vec<Vec<(u32, f64, f64)>> {
    assert!(delta > 0.0, "delta must be positive");
    inst.targets
        .iter()
        .map(|t| {
            let mut out = Vec::new();
            for w in &t.windows {
                let span = (w.hi - w.lo) / delta;
                let count = ((span - 1e-9).ceil() as usize).max(1);
                if (span - span.round()).abs() > 1e-9 {
                    log::warn!(
                        "target {}: window [{}, {}] is not a multiple of {delta}; last interval is shorter",
                        t.id,
                        w.lo,
                        w.hi
                    );
                }
                for m in 0..count {
                    let lo = w.lo + m as f64 * delta;
                    let hi = if m + 1 == count { w.hi } else { w.lo + (m + 1) as f64 * delta };
                    out.push((t.id, lo, hi));
                }
            }
            out
        })
        .collect()
}

/// Partitions the windows and evaluates every edge with `variant`.
pub fn build(inst: &Instance, delta: f64, variant: Variant, params: SamplingParams) -> Result<ClusteredGraph, GraphError> {
    if !(delta > 0.0) {
        return Err(GraphError::BadDelta(delta));
    }
    if variant == Variant::Linear && !inst.is_piecewise_linear() {
        return Err(GraphError::VariantUnsupported { kind: inst.kind.to_string() });
    }
    let started = Instant::now();
    let depot = depot_trajectory(inst);
    let locus = |node: &IntervalNode| match node.target {
        Some(id) => Locus::new(&inst.targets[id as usize - 1].trajectory, node.t_lo, node.t_hi),
        None => Locus::new(&depot, 0.0, 0.0),
    };
    let n_targets = inst.targets.len();
    let mut g = ClusteredGraph::from_parts(
        partition(inst, delta),
        inst.horizon,
        EdgeModel::Bound(variant),
        Some(delta),
        |u, v| {
            if v.target.is_none() {
                sft_to_depot(&locus(u), inst.depot, inst.v_max)
            } else {
                edge_cost(&locus(u), &locus(v), inst.v_max, variant, params)
            }
        },
    );
    g.build_seconds = started.elapsed().as_secs_f64();
    log::debug!(
        "built {variant} graph: {} targets, {} nodes, delta {delta}, {:.3}s",
        n_targets,
        g.n_nodes(),
        g.build_seconds
    );
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate, GeneratorConfig, InstanceKind};

    #[test]
    fn levels_map_to_widths() {
        let d: Vec<f64> = (1..=4).map(|l| DiscretizationLevel::Level(l).delta()).collect();
        assert_eq!(d, vec![5.0, 2.5, 1.25, 0.625]);
        assert!(DiscretizationLevel::from_level(5).is_none());
    }

    #[test]
    fn partition_counts() {
        let inst = generate(&GeneratorConfig::standard(InstanceKind::Complex, 3, 2)).unwrap();
        for (level, want) in [(1u8, 4usize), (2, 8), (3, 16), (4, 32)] {
            let parts = partition(&inst, DiscretizationLevel::Level(level).delta());
            assert!(parts.iter().all(|c| c.len() == want));
        }
        let parts = partition(&inst, 15.0);
        assert!(parts.iter().all(|c| c.len() == 2));
    }

    #[test]
    fn partition_short_tail() {
        let inst = generate(&GeneratorConfig::standard(InstanceKind::Simple, 1, 2)).unwrap();
        let parts = partition(&inst, 3.0);
        assert_eq!(parts[0].len(), 7);
        let (_, lo, hi) = parts[0][6];
        assert!((hi - lo - 2.0).abs() < 1e-12);
    }

    #[test]
    fn edge_structure_and_round_trip() {
        let inst = generate(&GeneratorConfig::standard(InstanceKind::Simple, 5, 3)).unwrap();
        let g = build(&inst, 0.625, Variant::Lite, SamplingParams::default()).unwrap();
        assert_eq!(g.n_nodes(), 162);
        assert_eq!(g.edges().count(), 160 * (160 - 32) + 2 * 160);
        assert!(g.edges().all(|(_, _, c)| c.finite().is_none_or(|x| x >= 0.0)));
        let text = g.to_json();
        let back = ClusteredGraph::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let again = build(&inst, 0.625, Variant::Lite, SamplingParams::default()).unwrap();
        assert_eq!(again.to_json(), text);
    }

    #[test]
    fn version_mismatch_rejected() {
        let g = ClusteredGraph::from_cost_fn(&[1], |_, _| EdgeCost::Finite(1.0));
        let text = g.to_json().replace("\"version\": 1", "\"version\": 2");
        assert!(matches!(ClusteredGraph::from_json(&text), Err(GraphError::Parse(_))));
    }

    #[test]
    fn linear_rejects_arcs() {
        let inst = generate(&GeneratorConfig::standard(InstanceKind::Generic, 2, 2)).unwrap();
        assert!(matches!(
            build(&inst, 5.0, Variant::Linear, SamplingParams::default()),
            Err(GraphError::VariantUnsupported { .. })
        ));
    }
}
