//! Edge costs of the clustered graph: lower bounds on the shortest feasible
//! travel (SFT) between two trajectory intervals.
//!
//! Every bound first goes through [`gate`], which settles the infeasible and
//! trivially optimal cases. The remaining pairs are bounded by one of four
//! [`Variant`]s, ordered from cheapest to tightest.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{min_distance_piece_sets, point_piece_distance, Piece, Point2, Trajectory};
use crate::kinematics::{
    efat_bisect, efat_trajectory, feasible, lfdt_trajectory, stationary_candidates, LinearMotion, PairCoefficients,
};
use crate::model::Instance;

/// Trajectories closer than this at a common time are treated as touching.
pub const INTERSECT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Lite,
    Geometric,
    Sampling,
    Linear,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Lite, Variant::Geometric, Variant::Sampling, Variant::Linear];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Lite => "lite",
            Variant::Geometric => "geometric",
            Variant::Sampling => "sampling",
            Variant::Linear => "linear",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown variant `{s}` (expected lite, geometric, sampling or linear)"))
    }
}

/// Cost of an edge; `Infeasible` serializes as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "Option<f64>", into = "Option<f64>")]
pub enum EdgeCost {
    Finite(f64),
    Infeasible,
}

impl From<Option<f64>> for EdgeCost {
    fn from(v: Option<f64>) -> Self {
        v.map_or(EdgeCost::Infeasible, EdgeCost::Finite)
    }
}

impl From<EdgeCost> for Option<f64> {
    fn from(c: EdgeCost) -> Self {
        c.finite()
    }
}

impl EdgeCost {
    pub fn finite(self) -> Option<f64> {
        match self {
            EdgeCost::Finite(c) => Some(c),
            EdgeCost::Infeasible => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, EdgeCost::Finite(_))
    }

    /// Finite costs as-is, `Infeasible` as `+∞`.
    pub fn value(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    fn from_value(v: f64) -> Self {
        if v.is_finite() {
            EdgeCost::Finite(v.max(0.0))
        } else {
            EdgeCost::Infeasible
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub k: usize,
    pub eps: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams { k: 10, eps: 0.05 }
    }
}

/// A trajectory restricted to `[t_lo, t_hi]`.
#[derive(Debug, Clone, Copy)]
pub struct Locus<'a> {
    pub traj: &'a Trajectory,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl<'a> Locus<'a> {
    pub fn new(traj: &'a Trajectory, t_lo: f64, t_hi: f64) -> Self {
        debug_assert!(t_lo <= t_hi);
        Locus { traj, t_lo, t_hi }
    }

    pub fn at(&self, t: f64) -> Point2 {
        self.traj.position_clamped(t)
    }

    pub fn pieces(&self) -> Vec<Piece> {
        self.traj.clip(self.t_lo, self.t_hi)
    }

    pub fn is_linear(&self) -> bool {
        self.traj.pieces().iter().all(|p| p.is_line() || p.t_end() < self.t_lo || p.t_start() > self.t_hi)
    }

    fn window(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Infeasible,
    TrivialOptimal(f64),
    NeedsBounding,
}

/// Infeasible when even the earliest departure cannot reach the latest
/// arrival; trivially optimal (cost `t_lo(j) − t_hi(i)`) when the latest
/// departure reaches the earliest arrival.
pub fn gate(i: &Locus, j: &Locus, v_max: f64) -> Gate {
    if !feasible(i.at(i.t_lo), i.t_lo, j.at(j.t_hi), j.t_hi, v_max) {
        Gate::Infeasible
    } else if feasible(i.at(i.t_hi), i.t_hi, j.at(j.t_lo), j.t_lo, v_max) {
        Gate::TrivialOptimal(j.t_lo - i.t_hi)
    } else {
        Gate::NeedsBounding
    }
}

pub fn sft_lite(i: &Locus, j: &Locus) -> EdgeCost {
    EdgeCost::Finite((j.t_lo - i.t_hi).max(0.0))
}

/// Distance between the two clipped loci at full agent speed.
pub fn sft_geometric(i: &Locus, j: &Locus, v_max: f64) -> EdgeCost {
    EdgeCost::Finite(min_distance_piece_sets(&i.pieces(), &j.pieces()) / v_max)
}

/// Splits the departure interval into `k` sub-intervals and charges each its
/// earliest arrival from the sub-interval start minus the sub-interval end.
pub fn sft_sampling(i: &Locus, j: &Locus, v_max: f64, params: SamplingParams) -> EdgeCost {
    assert!(params.k >= 1 && params.eps > 0.0, "sampling needs k >= 1 and eps > 0");
    let exact = j.is_linear();
    let (a, b) = (i.t_lo, i.t_hi);
    let k = params.k as f64;
    let best = (0..params.k)
        .map(|p| {
            let s = a + (b - a) * p as f64 / k;
            let e = if p + 1 == params.k { b } else { a + (b - a) * (p + 1) as f64 / k };
            let from = i.at(s);
            if !feasible(from, s, j.at(j.t_hi), j.t_hi, v_max) {
                return f64::INFINITY;
            }
            let arrival = if exact {
                efat_trajectory(from, s, j.traj, j.window(), v_max)
            } else {
                efat_bisect(from, s, j.traj, j.window(), v_max, params.eps).map(|br| br.lo)
            };
            arrival.map_or(f64::INFINITY, |t| t - e)
        })
        .fold(f64::INFINITY, f64::min);
    EdgeCost::from_value(best)
}

/// Smallest distance between the two trajectories over their common time
/// range within both intervals.
fn min_common_time_distance(i: &Locus, j: &Locus) -> f64 {
    let lo = i.t_lo.max(j.t_lo);
    let hi = i.t_hi.min(j.t_hi);
    if lo > hi {
        return f64::INFINITY;
    }
    let mut cuts = i.traj.breakpoints_within(lo, hi);
    cuts.extend(j.traj.breakpoints_within(lo, hi));
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let gap = |t: f64| i.at(t).dist(j.at(t));
    let mut best = gap(lo);
    for w in cuts.windows(2) {
        let (s, e) = (w[0], w[1]);
        best = best.min(gap(e));
        if e <= s {
            continue;
        }
        // relative motion is linear on [s, e]
        let d0 = j.at(s) - i.at(s);
        let d1 = j.at(e) - i.at(e);
        let dv = d1 - d0;
        let len2 = dv.norm_sq();
        if len2 > 0.0 {
            let u = (-d0.dot(dv) / len2).clamp(0.0, 1.0);
            best = best.min((d0 + dv * u).norm());
        }
    }
    best
}

/// Exact SFT between two piecewise-linear loci.
///
/// The departure interval is first shrunk so that the earliest arrival maps
/// its ends inside the arrival interval. It is then cut at the corners of the
/// departure trajectory and at the latest departures that reach the corners of
/// the arrival trajectory, so that on every sub-interval both motions are
/// linear. On each sub-interval the minimum of `EFAT(t) − t` is attained at an
/// end point or at a stationary point of the pair equation.
pub fn sft_linear(i: &Locus, j: &Locus, v_max: f64) -> EdgeCost {
    match gate(i, j, v_max) {
        Gate::Infeasible => return EdgeCost::Infeasible,
        Gate::TrivialOptimal(c) => return EdgeCost::Finite(c),
        Gate::NeedsBounding => {}
    }
    if min_common_time_distance(i, j) <= INTERSECT_TOL {
        return EdgeCost::Finite(0.0);
    }
    let (a, b, c, d) = (i.t_lo, i.t_hi, j.t_lo, j.t_hi);
    let efat = |t: f64| efat_trajectory(i.at(t), t, j.traj, (c, d), v_max);
    let cost = |t: f64| efat(t).map_or(f64::INFINITY, |e| e - t);

    // lower end: departures that reach π_j(c) all pay c − t, best at L(c)
    let lo = if feasible(i.at(a), a, j.at(c), c, v_max) {
        lfdt_trajectory(i.traj, (a, b), j.at(c), c, v_max).unwrap_or(a)
    } else {
        a
    };
    // upper end: later departures cannot reach the interval at all
    let hi = if feasible(i.at(b), b, j.at(d), d, v_max) {
        b
    } else {
        lfdt_trajectory(i.traj, (a, b), j.at(d), d, v_max).unwrap_or(a)
    };
    if hi <= lo {
        log::debug!("departure interval [{a}, {b}] shrinks to a point at {lo}");
        return EdgeCost::from_value(cost(lo));
    }

    let (Some(e_lo), Some(e_hi)) = (efat(lo), efat(hi)) else {
        return EdgeCost::from_value(cost(lo).min(cost(hi)));
    };
    let mut cuts = vec![lo, hi];
    cuts.extend(i.traj.breakpoints_within(lo, hi));
    for corner in j.traj.breakpoints_within(e_lo, e_hi) {
        if corner > e_lo && corner < e_hi {
            if let Some(t) = lfdt_trajectory(i.traj, (lo, hi), j.at(corner), corner, v_max) {
                cuts.push(t);
            }
        }
    }
    cuts.retain(|t| *t >= lo && *t <= hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut best = f64::INFINITY;
    for w in cuts.windows(2) {
        let (s, e) = (w[0], w[1]);
        best = best.min(cost(s)).min(cost(e));
        if e <= s {
            continue;
        }
        let Piece::Line(pi) = i.traj.piece_at(0.5 * (s + e)) else {
            continue;
        };
        let (Some(es), Some(ee)) = (efat(s), efat(e)) else {
            continue;
        };
        let Piece::Line(pj) = j.traj.piece_at(0.5 * (es + ee)) else {
            continue;
        };
        let coeffs = PairCoefficients::new(&LinearMotion::from_line(pi), &LinearMotion::from_line(pj), v_max);
        for t in stationary_candidates(&coeffs, s, e) {
            best = best.min(cost(t));
        }
    }
    EdgeCost::from_value(best)
}

/// Closest approach of the locus to `depot`, covered at full speed.
pub fn sft_to_depot(i: &Locus, depot: Point2, v_max: f64) -> EdgeCost {
    let d = i.pieces().iter().map(|p| point_piece_distance(depot, p)).fold(f64::INFINITY, f64::min);
    EdgeCost::Finite(d / v_max)
}

/// Gate, then the chosen variant's bound.
pub fn edge_cost(i: &Locus, j: &Locus, v_max: f64, variant: Variant, params: SamplingParams) -> EdgeCost {
    match gate(i, j, v_max) {
        Gate::Infeasible => EdgeCost::Infeasible,
        Gate::TrivialOptimal(c) => EdgeCost::Finite(c),
        Gate::NeedsBounding => match variant {
            Variant::Lite => sft_lite(i, j),
            Variant::Geometric => sft_geometric(i, j, v_max),
            Variant::Sampling => sft_sampling(i, j, v_max, params),
            Variant::Linear => sft_linear(i, j, v_max),
        },
    }
}

/// The depot as a parked target over the whole horizon.
pub fn depot_trajectory(inst: &Instance) -> Trajectory {
    Trajectory::stationary(inst.depot, 0.0, inst.horizon)
}

/// Edge from the depot (departing at time 0) into `q`.
pub fn sft_from_depot(q: &Locus, inst: &Instance, variant: Variant, params: SamplingParams) -> EdgeCost {
    let depot = depot_trajectory(inst);
    edge_cost(&Locus::new(&depot, 0.0, 0.0), q, inst.v_max, variant, params)
}
