//! Travel feasibility and interception times for a speed-capped agent.
//!
//! For two targets moving linearly, the squared feasibility equation
//! `|π_j(t) − π_i(t_i)|² = v_max² (t − t_i)²` is a bivariate quadratic in
//! the departure time `t_i` and arrival time `t`. [`PairCoefficients`] holds
//! its coefficients; fixing `t_i` gives the earliest feasible arrival time
//! (EFAT), fixing `t` gives the latest feasible departure time (LFDT), and
//! the stationary points of `EFAT(t_i) − t_i` follow from a third quadratic.
//!
//! Squaring introduces a spurious root on each branch, so every candidate root
//! is re-checked against the unsquared equation.

use crate::geometry::{LinePiece, Piece, Point2, Trajectory, GEOM_EPS};

/// Tolerance when re-checking a root against the unsquared equation.
pub const ROOT_CHECK_TOL: f64 = 1e-7;

/// Leading coefficients below this magnitude are treated as zero.
const DEGENERATE_A: f64 = 1e-12;

/// Interval width at which interception bisection stops by default.
pub const BISECT_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleTravelQuery {
    pub from_point: Point2,
    pub depart: f64,
    pub to_point: Point2,
    pub arrive: f64,
    pub v_max: f64,
}

/// Whether the agent can leave `from_point` at `depart` and be at `to_point`
/// by `arrive` without exceeding `v_max`.
pub fn travel_feasible(q: &FeasibleTravelQuery) -> bool {
    feasible(q.from_point, q.depart, q.to_point, q.arrive, q.v_max)
}

#[inline]
pub fn feasible(from: Point2, depart: f64, to: Point2, arrive: f64, v_max: f64) -> bool {
    arrive >= depart && from.dist(to) <= v_max * (arrive - depart) + GEOM_EPS
}

/// Coefficients of `a2·x² + a1·x + a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoeffs {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl QuadraticCoeffs {
    pub fn eval(&self, x: f64) -> f64 {
        (self.a2 * x + self.a1) * x + self.a0
    }

    /// Real roots in ascending order, using the cancellation-free form
    /// `q = −(b + sign(b)·√disc)/2`, roots `q/a` and `c/q`. Falls back to the
    /// linear equation when `|a2|` is negligible. Slightly negative
    /// discriminants (rounding) are treated as a double root.
    pub fn real_roots(&self) -> Vec<f64> {
        let (a, b, c) = (self.a2, self.a1, self.a0);
        if a.abs() < DEGENERATE_A {
            if b == 0.0 {
                return Vec::new();
            }
            return vec![-c / b];
        }
        let mut disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            let scale = (b * b).max((4.0 * a * c).abs());
            if disc < -1e-12 * scale {
                return Vec::new();
            }
            disc = 0.0;
        }
        let sq = disc.sqrt();
        let q = if b >= 0.0 { -0.5 * (b + sq) } else { -0.5 * (b - sq) };
        let mut roots = if q == 0.0 {
            vec![0.0]
        } else {
            vec![q / a, c / q]
        };
        roots.sort_by(|x, y| x.total_cmp(y));
        roots
    }
}

/// A point moving with constant velocity: `origin + velocity·(t − t_ref)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMotion {
    pub origin: Point2,
    pub t_ref: f64,
    pub velocity: Point2,
}

impl LinearMotion {
    pub fn stationary(at: Point2) -> Self {
        LinearMotion { origin: at, t_ref: 0.0, velocity: Point2::default() }
    }

    pub fn from_line(piece: &LinePiece) -> Self {
        let velocity = if piece.duration() > 0.0 { piece.velocity() } else { Point2::default() };
        LinearMotion { origin: piece.start, t_ref: piece.t_start, velocity }
    }

    pub fn position_at(&self, t: f64) -> Point2 {
        self.origin + self.velocity * (t - self.t_ref)
    }
}

/// Coefficients of the squared feasibility equation between a departure
/// motion `i` and an arrival motion `j`:
///
/// `A t² + (2B' t_i + 2C') t + (A' t_i² − D' t_i + E') = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCoefficients {
    pub a: f64,
    pub a_p: f64,
    pub b_p: f64,
    pub c_p: f64,
    pub d_p: f64,
    pub e_p: f64,
}

impl PairCoefficients {
    pub fn new(from: &LinearMotion, to: &LinearMotion, v_max: f64) -> Self {
        let (ax, ay) = (from.velocity.x, from.velocity.y);
        let (xd, yd) = (to.velocity.x, to.velocity.y);
        let c1 = to.origin.x - xd * to.t_ref - from.origin.x + ax * from.t_ref;
        let c2 = to.origin.y - yd * to.t_ref - from.origin.y + ay * from.t_ref;
        let v2 = v_max * v_max;
        PairCoefficients {
            a: xd * xd + yd * yd - v2,
            a_p: ax * ax + ay * ay - v2,
            b_p: -ax * xd - ay * yd + v2,
            c_p: c1 * xd + c2 * yd,
            d_p: 2.0 * ax * c1 + 2.0 * ay * c2,
            e_p: c1 * c1 + c2 * c2,
        }
    }

    /// Quadratic in the arrival time `t` for a fixed departure `t_i`.
    pub fn arrival_quadratic(&self, t_i: f64) -> QuadraticCoeffs {
        QuadraticCoeffs {
            a2: self.a,
            a1: 2.0 * self.b_p * t_i + 2.0 * self.c_p,
            a0: self.a_p * t_i * t_i - self.d_p * t_i + self.e_p,
        }
    }

    /// Quadratic in the departure time `t_i` for a fixed arrival `t`.
    pub fn departure_quadratic(&self, t: f64) -> QuadraticCoeffs {
        QuadraticCoeffs {
            a2: self.a_p,
            a1: 2.0 * self.b_p * t - self.d_p,
            a0: self.a * t * t + 2.0 * self.c_p * t + self.e_p,
        }
    }

    /// `P t_i² + Q t_i + R = 0`, whose roots are the stationary points of
    /// `EFAT(t_i) − t_i`.
    pub fn stationary_quadratic(&self) -> QuadraticCoeffs {
        let Self { a, a_p, b_p, c_p, d_p, e_p } = *self;
        let k = 4.0 * (a + b_p) * (a + b_p);
        let p = k * (b_p * b_p - a * a_p) - 4.0 * b_p.powi(4) - (4.0 * a * a * a_p * a_p - 8.0 * a * a_p * b_p * b_p);
        let q = k * (2.0 * b_p * c_p + a * d_p)
            - 8.0 * b_p.powi(3) * c_p
            - (4.0 * a * b_p * b_p * d_p - 8.0 * a * a_p * b_p * c_p - 4.0 * a * a * a_p * d_p);
        let r = k * (c_p * c_p - a * e_p) - 4.0 * b_p * b_p * c_p * c_p - (4.0 * a * b_p * c_p * d_p + a * a * d_p * d_p);
        QuadraticCoeffs { a2: p, a1: q, a0: r }
    }
}

/// Unconstrained earliest interception of motion `to` from `start` leaving
/// at `depart`: the root `t ≥ depart` of the unsquared equation.
fn intercept_motion(start: Point2, depart: f64, to: &LinearMotion, v_max: f64) -> Option<f64> {
    let gap = |t: f64| to.position_at(t).dist(start) - v_max * (t - depart);
    if gap(depart) <= 0.0 {
        return Some(depart);
    }
    let coeffs = PairCoefficients::new(&LinearMotion::stationary(start), to, v_max);
    let q = coeffs.arrival_quadratic(depart);
    let scale = 1.0 + to.position_at(depart).dist(start);
    q.real_roots()
        .into_iter()
        .filter(|&t| t >= depart - ROOT_CHECK_TOL)
        .find(|&t| gap(t).abs() <= ROOT_CHECK_TOL * scale)
        .map(|t| t.max(depart))
}

/// Latest departure from motion `from` that still reaches `target` at
/// `arrive`: the root `t_i ≤ arrive` of the unsquared equation.
fn latest_departure_motion(from: &LinearMotion, target: Point2, arrive: f64, v_max: f64) -> Option<f64> {
    let gap = |ti: f64| from.position_at(ti).dist(target) - v_max * (arrive - ti);
    if gap(arrive) <= 0.0 {
        return Some(arrive);
    }
    let coeffs = PairCoefficients::new(from, &LinearMotion::stationary(target), v_max);
    // the arrival motion is stationary, so the squared relation in t_i is the
    // departure quadratic evaluated at the fixed arrival time
    let q = coeffs.departure_quadratic(arrive);
    let scale = 1.0 + from.position_at(arrive).dist(target);
    q.real_roots()
        .into_iter()
        .rev()
        .filter(|&t| t <= arrive + ROOT_CHECK_TOL)
        .find(|&t| gap(t).abs() <= ROOT_CHECK_TOL * scale)
        .map(|t| t.min(arrive))
}

/// Earliest time in the span of `piece` at which the agent, leaving `start`
/// at `depart`, can be at the target's position.
pub fn efat_linear(start: Point2, depart: f64, piece: &LinePiece, v_max: f64) -> Option<f64> {
    if depart > piece.t_end {
        return None;
    }
    let lo = piece.t_start.max(depart);
    let reach = |t: f64| feasible(start, depart, piece.position_at(t), t, v_max);
    if reach(lo) {
        return Some(lo);
    }
    if !reach(piece.t_end) {
        return None;
    }
    let motion = LinearMotion::from_line(piece);
    match intercept_motion(start, depart, &motion, v_max) {
        Some(t) if t <= piece.t_end + ROOT_CHECK_TOL => Some(t.clamp(lo, piece.t_end)),
        // root filtering failed numerically; the bracket [lo, t_end] is valid
        _ => Some(bisect_upward(lo, piece.t_end, BISECT_EPS, reach).1),
    }
}

/// Latest time in the span of `piece` from which the agent can leave the
/// target and reach `arrive_point` by `arrive`.
pub fn lfdt_linear(piece: &LinePiece, arrive_point: Point2, arrive: f64, v_max: f64) -> Option<f64> {
    if arrive < piece.t_start {
        return None;
    }
    let hi = piece.t_end.min(arrive);
    let reach = |t: f64| feasible(piece.position_at(t), t, arrive_point, arrive, v_max);
    if reach(hi) {
        return Some(hi);
    }
    if !reach(piece.t_start) {
        return None;
    }
    let motion = LinearMotion::from_line(piece);
    match latest_departure_motion(&motion, arrive_point, arrive, v_max) {
        Some(t) if t >= piece.t_start - ROOT_CHECK_TOL => Some(t.clamp(piece.t_start, hi)),
        _ => Some(bisect_downward(piece.t_start, hi, BISECT_EPS, reach).0),
    }
}

/// Bisection on an upward-closed predicate with `ok(hi)` true and `ok(lo)`
/// false. Returns `(lo, hi)` with `hi − lo ≤ eps`.
fn bisect_upward(mut lo: f64, mut hi: f64, eps: f64, ok: impl Fn(f64) -> bool) -> (f64, f64) {
    while hi - lo > eps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Bisection on a downward-closed predicate with `ok(lo)` true and `ok(hi)`
/// false. Returns `(lo, hi)` with `hi − lo ≤ eps`.
fn bisect_downward(mut lo: f64, mut hi: f64, eps: f64, ok: impl Fn(f64) -> bool) -> (f64, f64) {
    while hi - lo > eps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Bracket `[lo, hi]` around an earliest arrival: `hi` reachable, `lo` not
/// (or `lo == hi` when the window start is already reachable).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfatBracket {
    pub lo: f64,
    pub hi: f64,
}

/// Binary search for the earliest arrival on `traj` within `[t_lo, t_hi]`.
/// Works for any trajectory because the set of reachable arrival times is
/// upward closed (the agent can shadow a slower target).
pub fn efat_bisect(
    start: Point2,
    depart: f64,
    traj: &Trajectory,
    window: (f64, f64),
    v_max: f64,
    eps: f64,
) -> Option<EfatBracket> {
    assert!(eps > 0.0, "bisection tolerance must be positive");
    let (t_lo, t_hi) = window;
    let reach = |t: f64| feasible(start, depart, traj.position_clamped(t), t, v_max);
    if t_hi < depart || !reach(t_hi) {
        return None;
    }
    let lo = t_lo.max(depart);
    if reach(lo) {
        return Some(EfatBracket { lo, hi: lo });
    }
    let (lo, hi) = bisect_upward(lo, t_hi, eps, reach);
    Some(EfatBracket { lo, hi })
}

/// Earliest arrival on `traj` restricted to `[t_lo, t_hi]`, leaving `start`
/// at `depart`. Line pieces use the closed form, arcs use bisection (the
/// returned time is always reachable).
pub fn efat_trajectory(start: Point2, depart: f64, traj: &Trajectory, window: (f64, f64), v_max: f64) -> Option<f64> {
    let (t_lo, t_hi) = window;
    let lo = t_lo.max(depart);
    if t_hi < lo || !feasible(start, depart, traj.position_clamped(t_hi), t_hi, v_max) {
        return None;
    }
    for piece in traj.pieces() {
        if piece.t_end() < lo || piece.t_start() > t_hi {
            continue;
        }
        let a = piece.t_start().max(lo);
        let b = piece.t_end().min(t_hi);
        let hit = match piece {
            Piece::Line(l) if b > a => efat_linear(start, depart, &l.clip(a, b), v_max),
            Piece::Line(l) => {
                let p = l.position_at(a);
                feasible(start, depart, p, a, v_max).then_some(a)
            }
            Piece::Arc(arc) => {
                let reach = |t: f64| feasible(start, depart, arc.position_at(t), t, v_max);
                if !reach(b) {
                    None
                } else if reach(a) {
                    Some(a)
                } else {
                    Some(bisect_upward(a, b, BISECT_EPS, reach).1)
                }
            }
        };
        if hit.is_some() {
            return hit;
        }
    }
    // the end check passed, so only rounding at a piece seam can land here
    Some(t_hi)
}

/// Latest departure from `traj` within `[t_lo, t_hi]` that reaches
/// `arrive_point` by `arrive`.
pub fn lfdt_trajectory(traj: &Trajectory, window: (f64, f64), arrive_point: Point2, arrive: f64, v_max: f64) -> Option<f64> {
    let (t_lo, t_hi) = window;
    let hi = t_hi.min(arrive);
    if hi < t_lo || !feasible(traj.position_clamped(t_lo), t_lo, arrive_point, arrive, v_max) {
        return None;
    }
    for piece in traj.pieces().iter().rev() {
        if piece.t_start() > hi || piece.t_end() < t_lo {
            continue;
        }
        let a = piece.t_start().max(t_lo);
        let b = piece.t_end().min(hi);
        let hit = match piece {
            Piece::Line(l) if b > a => lfdt_linear(&l.clip(a, b), arrive_point, arrive, v_max),
            Piece::Line(l) => {
                let p = l.position_at(a);
                feasible(p, a, arrive_point, arrive, v_max).then_some(a)
            }
            Piece::Arc(arc) => {
                let reach = |t: f64| feasible(arc.position_at(t), t, arrive_point, arrive, v_max);
                if !reach(a) {
                    None
                } else if reach(b) {
                    Some(b)
                } else {
                    Some(bisect_downward(a, b, BISECT_EPS, reach).0)
                }
            }
        };
        if hit.is_some() {
            return hit;
        }
    }
    Some(t_lo)
}

/// Candidate departure times minimizing `EFAT(t) − t` when both targets move
/// on single line pieces: the real stationary roots inside the span of
/// `piece_i`, plus both span endpoints.
pub fn sft_stationary_points(piece_i: &LinePiece, piece_j: &LinePiece, v_max: f64) -> Vec<f64> {
    let coeffs = PairCoefficients::new(&LinearMotion::from_line(piece_i), &LinearMotion::from_line(piece_j), v_max);
    stationary_candidates(&coeffs, piece_i.t_start, piece_i.t_end)
}

pub(crate) fn stationary_candidates(coeffs: &PairCoefficients, t0: f64, t1: f64) -> Vec<f64> {
    let mut out = vec![t0, t1];
    let quad = coeffs.stationary_quadratic();
    let scale = quad.a2.abs().max(quad.a1.abs()).max(quad.a0.abs());
    if scale == 0.0 {
        return out;
    }
    let roots = if quad.a2.abs() <= 1e-14 * scale {
        if quad.a1.abs() <= 1e-14 * scale {
            Vec::new()
        } else {
            vec![-quad.a0 / quad.a1]
        }
    } else {
        quad.real_roots()
    };
    out.extend(roots.into_iter().filter(|r| r.is_finite() && *r > t0 && *r < t1));
    out
}
