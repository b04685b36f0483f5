//! Planar primitives and constant-speed trajectory pieces.
//!
//! A [`Trajectory`] is a time-contiguous sequence of [`Piece`]s, each either a
//! straight [`LinePiece`] or a circular [`ArcPiece`]. Positions are obtained by
//! linear (resp. angular) interpolation of the piece's time span.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used by every geometric comparison.
pub const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("time {t} is outside the trajectory span [{start}, {end}]")]
    OutOfHorizon { t: f64, start: f64, end: f64 },
    #[error("invalid piece: {0}")]
    InvalidPiece(String),
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2 { x: v[0], y: v[1] }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Point on the circle of radius `r` around `self` at polar angle `theta`.
    pub fn polar(self, r: f64, theta: f64) -> Point2 {
        Point2::new(self.x + r * theta.cos(), self.y + r * theta.sin())
    }

    /// Polar angle of `self - center`, in `[0, 2π)`.
    pub fn angle_from(self, center: Point2) -> f64 {
        normalize_angle((self.y - center.y).atan2(self.x - center.x))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// Maps any angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Straight motion from `start` (at `t_start`) to `end` (at `t_end`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinePiece {
    pub start: Point2,
    pub end: Point2,
    pub t_start: f64,
    pub t_end: f64,
}

impl LinePiece {
    pub fn new(start: Point2, end: Point2, t_start: f64, t_end: f64) -> Result<Self, GeometryError> {
        let piece = LinePiece { start, end, t_start, t_end };
        piece.check()?;
        Ok(piece)
    }

    fn check(&self) -> Result<(), GeometryError> {
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(GeometryError::InvalidPiece("non-finite line endpoint".into()));
        }
        if !(self.t_end > self.t_start) || !self.t_start.is_finite() || !self.t_end.is_finite() {
            return Err(GeometryError::InvalidPiece(format!(
                "line time span [{}, {}] is empty",
                self.t_start, self.t_end
            )));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn length(&self) -> f64 {
        self.start.dist(self.end)
    }

    pub fn velocity(&self) -> Point2 {
        (self.end - self.start) * (1.0 / self.duration())
    }

    pub fn speed(&self) -> f64 {
        self.length() / self.duration()
    }

    pub fn position_at(&self, t: f64) -> Point2 {
        let s = ((t - self.t_start) / self.duration()).clamp(0.0, 1.0);
        if s == 0.0 {
            self.start
        } else if s == 1.0 {
            self.end
        } else {
            self.start + (self.end - self.start) * s
        }
    }

    /// Restriction to `[t0, t1]` (clamped to the piece span).
    pub fn clip(&self, t0: f64, t1: f64) -> LinePiece {
        let a = t0.max(self.t_start);
        let b = t1.min(self.t_end);
        LinePiece {
            start: self.position_at(a),
            end: self.position_at(b),
            t_start: a,
            t_end: b,
        }
    }
}

/// Circular motion around `center`; the swept angle is traversed
/// counter-clockwise when `ccw` is set, clockwise otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcPiece {
    pub center: Point2,
    pub radius: f64,
    pub theta_start: f64,
    pub theta_end: f64,
    pub ccw: bool,
    pub t_start: f64,
    pub t_end: f64,
}

impl ArcPiece {
    /// Builds an arc from a start angle and a positive sweep. Angles are
    /// normalized into `[0, 2π)`.
    pub fn from_sweep(
        center: Point2,
        radius: f64,
        theta_start: f64,
        sweep: f64,
        ccw: bool,
        t_start: f64,
        t_end: f64,
    ) -> Result<Self, GeometryError> {
        if !(sweep > 0.0 && sweep < TAU) {
            return Err(GeometryError::InvalidPiece(format!("arc sweep {sweep} outside (0, 2π)")));
        }
        let end = if ccw { theta_start + sweep } else { theta_start - sweep };
        let arc = ArcPiece {
            center,
            radius,
            theta_start: normalize_angle(theta_start),
            theta_end: normalize_angle(end),
            ccw,
            t_start,
            t_end,
        };
        arc.check()?;
        Ok(arc)
    }

    fn check(&self) -> Result<(), GeometryError> {
        if !(self.radius > 0.0) || !self.radius.is_finite() || !self.center.is_finite() {
            return Err(GeometryError::InvalidPiece(format!("arc radius {} must be positive", self.radius)));
        }
        if !(self.t_end > self.t_start) || !self.t_start.is_finite() || !self.t_end.is_finite() {
            return Err(GeometryError::InvalidPiece(format!(
                "arc time span [{}, {}] is empty",
                self.t_start, self.t_end
            )));
        }
        if !(self.theta_start.is_finite() && self.theta_end.is_finite()) {
            return Err(GeometryError::InvalidPiece("non-finite arc angle".into()));
        }
        Ok(())
    }

    /// Swept angle in `(0, 2π)`. Coincident start and end angles denote a
    /// degenerate arc with zero sweep.
    pub fn sweep(&self) -> f64 {
        let d = if self.ccw {
            self.theta_end - self.theta_start
        } else {
            self.theta_start - self.theta_end
        };
        normalize_angle(d)
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn length(&self) -> f64 {
        self.radius * self.sweep()
    }

    pub fn speed(&self) -> f64 {
        self.length() / self.duration()
    }

    pub fn angle_at(&self, t: f64) -> f64 {
        let s = ((t - self.t_start) / self.duration()).clamp(0.0, 1.0);
        let sweep = self.sweep() * s;
        if self.ccw {
            self.theta_start + sweep
        } else {
            self.theta_start - sweep
        }
    }

    pub fn position_at(&self, t: f64) -> Point2 {
        self.center.polar(self.radius, self.angle_at(t))
    }

    pub fn start_point(&self) -> Point2 {
        self.center.polar(self.radius, self.theta_start)
    }

    pub fn end_point(&self) -> Point2 {
        self.center.polar(self.radius, self.theta_end)
    }

    /// Smallest counter-clockwise angle of the covered range; the arc covers
    /// `[lo, lo + sweep]` in counter-clockwise terms.
    fn ccw_low(&self) -> f64 {
        if self.ccw {
            self.theta_start
        } else {
            self.theta_end
        }
    }

    /// Whether polar angle `theta` lies inside the covered angular range.
    pub fn contains_angle(&self, theta: f64) -> bool {
        let off = normalize_angle(theta - self.ccw_low());
        let sweep = self.sweep();
        off <= sweep + GEOM_EPS || off >= TAU - GEOM_EPS
    }

    pub fn clip(&self, t0: f64, t1: f64) -> ArcPiece {
        let a = t0.max(self.t_start);
        let b = t1.min(self.t_end);
        ArcPiece {
            center: self.center,
            radius: self.radius,
            theta_start: normalize_angle(self.angle_at(a)),
            theta_end: normalize_angle(self.angle_at(b)),
            ccw: self.ccw,
            t_start: a,
            t_end: b,
        }
    }

    /// Axis-aligned bounding box `(min, max)` of the covered arc.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut pts = vec![self.start_point(), self.end_point()];
        for k in 0..4 {
            let theta = k as f64 * PI / 2.0;
            if self.contains_angle(theta) {
                pts.push(self.center.polar(self.radius, theta));
            }
        }
        bbox(&pts)
    }
}

fn bbox(pts: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Piece {
    Line(LinePiece),
    Arc(ArcPiece),
}

impl Piece {
    pub fn t_start(&self) -> f64 {
        match self {
            Piece::Line(l) => l.t_start,
            Piece::Arc(a) => a.t_start,
        }
    }

    pub fn t_end(&self) -> f64 {
        match self {
            Piece::Line(l) => l.t_end,
            Piece::Arc(a) => a.t_end,
        }
    }

    pub fn position_at(&self, t: f64) -> Point2 {
        match self {
            Piece::Line(l) => l.position_at(t),
            Piece::Arc(a) => a.position_at(t),
        }
    }

    pub fn start_point(&self) -> Point2 {
        match self {
            Piece::Line(l) => l.start,
            Piece::Arc(a) => a.start_point(),
        }
    }

    pub fn end_point(&self) -> Point2 {
        match self {
            Piece::Line(l) => l.end,
            Piece::Arc(a) => a.end_point(),
        }
    }

    pub fn speed(&self) -> f64 {
        match self {
            Piece::Line(l) => l.speed(),
            Piece::Arc(a) => a.speed(),
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Piece::Line(_))
    }

    pub fn clip(&self, t0: f64, t1: f64) -> Piece {
        match self {
            Piece::Line(l) => Piece::Line(l.clip(t0, t1)),
            Piece::Arc(a) => Piece::Arc(a.clip(t0, t1)),
        }
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        match self {
            Piece::Line(l) => bbox(&[l.start, l.end]),
            Piece::Arc(a) => a.bounding_box(),
        }
    }

    fn check(&self) -> Result<(), GeometryError> {
        match self {
            Piece::Line(l) => l.check(),
            Piece::Arc(a) => a.check(),
        }
    }
}

/// Constant-speed, time-contiguous, positionally continuous chain of pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pieces: Vec<Piece>,
    speed: f64,
}

impl Trajectory {
    pub fn new(pieces: Vec<Piece>, speed: f64) -> Result<Self, GeometryError> {
        if pieces.is_empty() {
            return Err(GeometryError::InvalidTrajectory("no pieces".into()));
        }
        if !(speed >= 0.0) || !speed.is_finite() {
            return Err(GeometryError::InvalidTrajectory(format!("speed {speed} must be finite and non-negative")));
        }
        let speed_tol = GEOM_EPS * speed.max(1.0);
        for (k, p) in pieces.iter().enumerate() {
            p.check()?;
            let s = p.speed();
            if (s - speed).abs() > speed_tol {
                return Err(GeometryError::InvalidTrajectory(format!(
                    "piece {k} moves at {s}, trajectory speed is {speed}"
                )));
            }
        }
        for (k, w) in pieces.windows(2).enumerate() {
            if w[0].t_end() != w[1].t_start() {
                return Err(GeometryError::InvalidTrajectory(format!(
                    "pieces {k} and {} are not time-contiguous",
                    k + 1
                )));
            }
            if w[0].end_point().dist(w[1].start_point()) > GEOM_EPS {
                return Err(GeometryError::InvalidTrajectory(format!(
                    "pieces {k} and {} are not positionally continuous",
                    k + 1
                )));
            }
        }
        Ok(Trajectory { pieces, speed })
    }

    /// A target parked at `at` for the whole span `[t0, t1]`.
    pub fn stationary(at: Point2, t0: f64, t1: f64) -> Self {
        Trajectory {
            pieces: vec![Piece::Line(LinePiece { start: at, end: at, t_start: t0, t_end: t1 })],
            speed: 0.0,
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn t_start(&self) -> f64 {
        self.pieces[0].t_start()
    }

    pub fn t_end(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].t_end()
    }

    pub fn is_piecewise_linear(&self) -> bool {
        self.pieces.iter().all(Piece::is_line)
    }

    /// Index of the piece covering `t` (the earlier piece on a boundary).
    pub fn piece_index_at(&self, t: f64) -> usize {
        let idx = self.pieces.partition_point(|p| p.t_end() < t);
        idx.min(self.pieces.len() - 1)
    }

    pub fn piece_at(&self, t: f64) -> &Piece {
        &self.pieces[self.piece_index_at(t)]
    }

    pub fn position_at(&self, t: f64) -> Result<Point2, GeometryError> {
        let (start, end) = (self.t_start(), self.t_end());
        if !(t >= start - GEOM_EPS && t <= end + GEOM_EPS) {
            return Err(GeometryError::OutOfHorizon { t, start, end });
        }
        Ok(self.piece_at(t).position_at(t))
    }

    /// Position with `t` clamped into the trajectory span.
    pub fn position_clamped(&self, t: f64) -> Point2 {
        let t = t.clamp(self.t_start(), self.t_end());
        self.piece_at(t).position_at(t)
    }

    /// The pieces covering `[t0, t1]`, split exactly at the interval ends.
    /// A degenerate interval yields a single zero-length line piece.
    pub fn clip(&self, t0: f64, t1: f64) -> Vec<Piece> {
        let t0 = t0.max(self.t_start());
        let t1 = t1.min(self.t_end());
        if t1 <= t0 {
            let p = self.position_clamped(t0);
            return vec![Piece::Line(LinePiece { start: p, end: p, t_start: t0, t_end: t0 })];
        }
        self.pieces
            .iter()
            .filter(|p| p.t_end() > t0 && p.t_start() < t1)
            .map(|p| p.clip(t0, t1))
            .collect()
    }

    /// Interior piece boundaries strictly inside `(t0, t1)`.
    pub fn breakpoints_within(&self, t0: f64, t1: f64) -> Vec<f64> {
        self.pieces
            .iter()
            .skip(1)
            .map(Piece::t_start)
            .filter(|&t| t > t0 && t < t1)
            .collect()
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        let boxes: Vec<Point2> = self
            .pieces
            .iter()
            .flat_map(|p| {
                let (a, b) = p.bounding_box();
                [a, b]
            })
            .collect();
        bbox(&boxes)
    }
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    p.dist(closest_point_on_segment(p, a, b))
}

pub fn closest_point_on_segment(p: Point2, a: Point2, b: Point2) -> Point2 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return a;
    }
    let s = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * s
}

pub fn point_arc_distance(p: Point2, arc: &ArcPiece) -> f64 {
    let d = p.dist(arc.center);
    if d == 0.0 {
        return arc.radius;
    }
    if arc.contains_angle(p.angle_from(arc.center)) {
        (d - arc.radius).abs()
    } else {
        p.dist(arc.start_point()).min(p.dist(arc.end_point()))
    }
}

pub fn point_piece_distance(p: Point2, piece: &Piece) -> f64 {
    match piece {
        Piece::Line(l) => point_segment_distance(p, l.start, l.end),
        Piece::Arc(a) => point_arc_distance(p, a),
    }
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let orient = |p: Point2, q: Point2, r: Point2| (q - p).cross(r - p);
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    // collinear and touching cases fall back to the endpoint distances, which are 0 there
    false
}

pub fn segment_segment_distance(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

fn segment_arc_distance(a: Point2, b: Point2, arc: &ArcPiece) -> f64 {
    let mut best = point_arc_distance(a, arc)
        .min(point_arc_distance(b, arc))
        .min(point_segment_distance(arc.start_point(), a, b))
        .min(point_segment_distance(arc.end_point(), a, b));

    let c = arc.center;
    let r = arc.radius;
    let foot = closest_point_on_segment(c, a, b);
    let dc = foot.dist(c);
    if dc == 0.0 {
        // every arc point sits at distance r from the foot
        best = best.min(r);
    } else {
        let theta = foot.angle_from(c);
        for th in [theta, normalize_angle(theta + PI)] {
            if arc.contains_angle(th) {
                best = best.min(foot.dist(c.polar(r, th)));
            }
        }
    }

    // crossings of the segment with the supporting circle
    let ab = b - a;
    let qa = ab.norm_sq();
    if qa > 0.0 {
        let f = a - c;
        let qb = 2.0 * f.dot(ab);
        let qc = f.norm_sq() - r * r;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for s in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                if (-GEOM_EPS..=1.0 + GEOM_EPS).contains(&s) {
                    let p = a + ab * s.clamp(0.0, 1.0);
                    if arc.contains_angle(p.angle_from(c)) {
                        return 0.0;
                    }
                }
            }
        }
    }
    best
}

fn arc_arc_distance(p: &ArcPiece, q: &ArcPiece) -> f64 {
    let mut best = point_arc_distance(p.start_point(), q)
        .min(point_arc_distance(p.end_point(), q))
        .min(point_arc_distance(q.start_point(), p))
        .min(point_arc_distance(q.end_point(), p));

    let d = p.center.dist(q.center);
    if d <= GEOM_EPS {
        // concentric: radial pairs exist wherever the angular ranges overlap
        let overlap = q.contains_angle(p.theta_start)
            || q.contains_angle(p.theta_end)
            || p.contains_angle(q.theta_start)
            || p.contains_angle(q.theta_end);
        if overlap {
            best = best.min((p.radius - q.radius).abs());
        }
        return best;
    }

    // collinear points along the line of centers
    let u = q.center.angle_from(p.center);
    let v = normalize_angle(u + PI);
    for tp in [u, v] {
        if !p.contains_angle(tp) {
            continue;
        }
        let pp = p.center.polar(p.radius, tp);
        for tq in [u, v] {
            if q.contains_angle(tq) {
                best = best.min(pp.dist(q.center.polar(q.radius, tq)));
            }
        }
    }

    // circle-circle intersections
    let (r1, r2) = (p.radius, q.radius);
    if d <= r1 + r2 + GEOM_EPS && d + GEOM_EPS >= (r1 - r2).abs() {
        let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
        let h = (r1 * r1 - a * a).max(0.0).sqrt();
        let dir = (q.center - p.center) * (1.0 / d);
        let mid = p.center + dir * a;
        let perp = Point2::new(-dir.y, dir.x);
        for x in [mid + perp * h, mid - perp * h] {
            if p.contains_angle(x.angle_from(p.center)) && q.contains_angle(x.angle_from(q.center)) {
                return 0.0;
            }
        }
    }
    best
}

/// Minimum Euclidean distance between the geometric loci of two pieces
/// (time parameterization ignored).
pub fn min_distance_pieces(a: &Piece, b: &Piece) -> f64 {
    match (a, b) {
        (Piece::Line(l), Piece::Line(m)) => segment_segment_distance(l.start, l.end, m.start, m.end),
        (Piece::Line(l), Piece::Arc(c)) | (Piece::Arc(c), Piece::Line(l)) => segment_arc_distance(l.start, l.end, c),
        (Piece::Arc(p), Piece::Arc(q)) => {
            // fixed argument order keeps the result symmetric bit-for-bit
            if arc_key(p) <= arc_key(q) {
                arc_arc_distance(p, q)
            } else {
                arc_arc_distance(q, p)
            }
        }
    }
}

fn arc_key(a: &ArcPiece) -> [u64; 5] {
    [
        a.center.x.to_bits(),
        a.center.y.to_bits(),
        a.radius.to_bits(),
        a.theta_start.to_bits(),
        a.theta_end.to_bits(),
    ]
}

/// Minimum over all pairs of [`min_distance_pieces`].
pub fn min_distance_piece_sets(a: &[Piece], b: &[Piece]) -> f64 {
    let mut best = f64::INFINITY;
    for p in a {
        for q in b {
            best = best.min(min_distance_pieces(p, q));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}
