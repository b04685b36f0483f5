//! Problem instances: targets with trajectories and time windows, validation,
//! the JSON instance format, and a seeded random generator.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasible;
use crate::geometry::{ArcPiece, LinePiece, Piece, Point2, Trajectory};
use crate::gtsp::Effort;

pub const FORMAT_VERSION: u32 = 1;

/// Samples per target used when the generator looks for a seed tour.
const SEED_TOUR_SAMPLES: usize = 32;
const MAX_TRAJECTORY_REDRAWS: usize = 25;
/// Window starts are snapped to this grid so durations stay exact.
const WINDOW_GRID: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct TimeWindow {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for TimeWindow {
    fn from(v: [f64; 2]) -> Self {
        TimeWindow { lo: v[0], hi: v[1] }
    }
}

impl From<TimeWindow> for [f64; 2] {
    fn from(w: TimeWindow) -> Self {
        [w.lo, w.hi]
    }
}

impl TimeWindow {
    pub fn new(lo: f64, hi: f64) -> Self {
        TimeWindow { lo, hi }
    }

    pub fn duration(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub id: u32,
    pub trajectory: Trajectory,
    pub windows: Vec<TimeWindow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Simple,
    Complex,
    Generic,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            InstanceKind::Simple => "simple",
            InstanceKind::Complex => "complex",
            InstanceKind::Generic => "generic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub depot: Point2,
    pub v_max: f64,
    pub horizon: f64,
    pub targets: Vec<Target>,
    pub kind: InstanceKind,
}

impl Instance {
    pub fn target(&self, id: u32) -> Option<&Target> {
        self.targets.iter().find(|t| t.id == id)
    }

    pub fn is_piecewise_linear(&self) -> bool {
        self.targets.iter().all(|t| t.trajectory.is_piecewise_linear())
    }

    /// Copy of the instance with every window replaced by the full horizon.
    pub fn with_full_windows(&self) -> Instance {
        let mut out = self.clone();
        for t in &mut out.targets {
            t.windows = vec![TimeWindow::new(0.0, self.horizon)];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule")]
pub enum Violation {
    NonPositiveSpeedCap,
    NonPositiveHorizon,
    NoTargets,
    NonContiguousIds { expected: u32, found: u32 },
    InvalidTrajectory { id: u32, reason: String },
    SpeedExceedsAgent { id: u32 },
    NoWindows { id: u32 },
    EmptyWindow { id: u32, index: usize },
    WindowOutsideHorizon { id: u32, index: usize },
    WindowOutsideTrajectory { id: u32, index: usize },
    UnsortedWindows { id: u32 },
    OverlappingWindows { id: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveSpeedCap => write!(f, "v_max must be positive"),
            Violation::NonPositiveHorizon => write!(f, "horizon must be positive"),
            Violation::NoTargets => write!(f, "instance has no targets"),
            Violation::NonContiguousIds { expected, found } => {
                write!(f, "target ids must run 1..n: expected {expected}, found {found}")
            }
            Violation::InvalidTrajectory { id, reason } => write!(f, "target {id}: {reason}"),
            Violation::SpeedExceedsAgent { id } => write!(f, "target {id}: speed is not below v_max"),
            Violation::NoWindows { id } => write!(f, "target {id}: no time windows"),
            Violation::EmptyWindow { id, index } => write!(f, "target {id}: window {index} has lo >= hi"),
            Violation::WindowOutsideHorizon { id, index } => {
                write!(f, "target {id}: window {index} is outside [0, horizon]")
            }
            Violation::WindowOutsideTrajectory { id, index } => {
                write!(f, "target {id}: window {index} is outside the trajectory span")
            }
            Violation::UnsortedWindows { id } => write!(f, "target {id}: windows are not sorted"),
            Violation::OverlappingWindows { id } => write!(f, "target {id}: windows overlap"),
        }
    }
}

/// Every broken invariant of `inst`; empty when the instance is valid.
pub fn validate(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(inst.v_max > 0.0) {
        out.push(Violation::NonPositiveSpeedCap);
    }
    if !(inst.horizon > 0.0) {
        out.push(Violation::NonPositiveHorizon);
    }
    if inst.targets.is_empty() {
        out.push(Violation::NoTargets);
    }
    for (k, t) in inst.targets.iter().enumerate() {
        let expected = k as u32 + 1;
        if t.id != expected {
            out.push(Violation::NonContiguousIds { expected, found: t.id });
        }
        check_target(t, inst, &mut out);
    }
    out
}

fn check_target(t: &Target, inst: &Instance, out: &mut Vec<Violation>) {
    let id = t.id;
    if t.trajectory.speed() >= inst.v_max {
        out.push(Violation::SpeedExceedsAgent { id });
    }
    if t.windows.is_empty() {
        out.push(Violation::NoWindows { id });
    }
    for (index, w) in t.windows.iter().enumerate() {
        if !(w.lo < w.hi) {
            out.push(Violation::EmptyWindow { id, index });
        }
        if !(w.lo >= 0.0 && w.hi <= inst.horizon) {
            out.push(Violation::WindowOutsideHorizon { id, index });
        }
        if w.lo < t.trajectory.t_start() || w.hi > t.trajectory.t_end() {
            out.push(Violation::WindowOutsideTrajectory { id, index });
        }
    }
    if t.windows.windows(2).any(|p| p[1].lo < p[0].lo) {
        out.push(Violation::UnsortedWindows { id });
    }
    let mut sorted = t.windows.clone();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    if sorted.windows(2).any(|p| p[1].lo < p[0].hi) {
        out.push(Violation::OverlappingWindows { id });
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)?;
        if let Some(field) = &self.field {
            write!(f, ", field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        let message = err.to_string();
        let field = ["missing field `", "unknown field `", "duplicate field `"]
            .iter()
            .find_map(|pat| {
                let rest = &message[message.find(pat)? + pat.len()..];
                Some(rest[..rest.find('`')?].to_string())
            });
        ParseError { line: err.line(), column: err.column(), field, message }
    }

    pub(crate) fn plain(message: impl Into<String>) -> Self {
        ParseError { line: 0, column: 0, field: None, message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid instance: {}", join_violations(.0))]
    Validation(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Units {
    length: String,
    time: String,
    speed: String,
}

impl Default for Units {
    fn default() -> Self {
        Units { length: "unit".into(), time: "s".into(), speed: "unit/s".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDoc {
    id: u32,
    speed: f64,
    windows: Vec<TimeWindow>,
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    version: u32,
    units: Units,
    kind: InstanceKind,
    depot: Point2,
    v_max: f64,
    horizon: f64,
    targets: Vec<TargetDoc>,
}

impl InstanceDoc {
    fn from_instance(inst: &Instance) -> Self {
        InstanceDoc {
            version: FORMAT_VERSION,
            units: Units::default(),
            kind: inst.kind,
            depot: inst.depot,
            v_max: inst.v_max,
            horizon: inst.horizon,
            targets: inst
                .targets
                .iter()
                .map(|t| TargetDoc {
                    id: t.id,
                    speed: t.trajectory.speed(),
                    windows: t.windows.clone(),
                    pieces: t.trajectory.pieces().to_vec(),
                })
                .collect(),
        }
    }

    fn into_instance(self) -> Result<Instance, ModelError> {
        if self.version != FORMAT_VERSION {
            return Err(ParseError::plain(format!(
                "unsupported instance version {} (expected {FORMAT_VERSION})",
                self.version
            ))
            .into());
        }
        let mut violations = Vec::new();
        let mut targets = Vec::with_capacity(self.targets.len());
        for t in self.targets {
            match Trajectory::new(t.pieces, t.speed) {
                Ok(trajectory) => targets.push(Target { id: t.id, trajectory, windows: t.windows }),
                Err(e) => violations.push(Violation::InvalidTrajectory { id: t.id, reason: e.to_string() }),
            }
        }
        if !violations.is_empty() {
            return Err(ModelError::Validation(violations));
        }
        Ok(Instance { depot: self.depot, v_max: self.v_max, horizon: self.horizon, targets, kind: self.kind })
    }
}

/// Serializes an instance to its JSON document (pretty-printed, trailing
/// newline).
pub fn to_json(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceDoc::from_instance(inst)).expect("instance serializes");
    s.push('\n');
    s
}

/// Parses and validates an instance document.
pub fn from_json(text: &str) -> Result<Instance, ModelError> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| ParseError::from_json(&e))?;
    let inst = doc.into_instance()?;
    let violations = validate(&inst);
    if violations.is_empty() {
        Ok(inst)
    } else {
        Err(ModelError::Validation(violations))
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<Instance, ModelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ModelError::Io { path: path.to_path_buf(), source })?;
    from_json(&text)
}

pub fn save(inst: &Instance, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    fs::write(path, to_json(inst)).map_err(|source| ModelError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_targets: usize,
    pub area_side: f64,
    pub horizon: f64,
    pub depot: Point2,
    pub v_max: f64,
    pub target_speed_range: (f64, f64),
    pub total_window_duration: f64,
    pub primary_window: f64,
    pub secondary_window: Option<f64>,
    pub kind: InstanceKind,
    pub rng_seed: u64,
}

impl GeneratorConfig {
    /// Defaults: 100×100 area, horizon 100 s, depot (10, 10), `v_max` 4,
    /// target speeds in [0.5, 1], 20 s of windows per target (one 20 s window
    /// for simple instances, 15 s + 5 s otherwise).
    pub fn standard(kind: InstanceKind, n_targets: usize, rng_seed: u64) -> Self {
        let (primary_window, secondary_window) = match kind {
            InstanceKind::Simple => (20.0, None),
            InstanceKind::Complex | InstanceKind::Generic => (15.0, Some(5.0)),
        };
        GeneratorConfig {
            n_targets,
            area_side: 100.0,
            horizon: 100.0,
            depot: Point2::new(10.0, 10.0),
            v_max: 4.0,
            target_speed_range: (0.5, 1.0),
            total_window_duration: 20.0,
            primary_window,
            secondary_window,
            kind,
            rng_seed,
        }
    }

    fn check(&self) -> Result<(), GenerateError> {
        let bad = |m: &str| Err(GenerateError::InvalidConfig(m.to_string()));
        let (s_lo, s_hi) = self.target_speed_range;
        if self.n_targets == 0 {
            return bad("n_targets must be at least 1");
        }
        if !(self.area_side > 0.0 && self.horizon > 0.0 && self.v_max > 0.0) {
            return bad("area_side, horizon and v_max must be positive");
        }
        if !(s_lo > 0.0 && s_lo <= s_hi && s_hi < self.v_max) {
            return bad("target speeds must satisfy 0 < lo <= hi < v_max");
        }
        let total = self.primary_window + self.secondary_window.unwrap_or(0.0);
        if (total - self.total_window_duration).abs() > 1e-12 {
            return bad("primary + secondary window must equal total_window_duration");
        }
        if !(self.primary_window > 0.0 && total < self.horizon) {
            return bad("windows must be positive and fit inside the horizon");
        }
        if self.secondary_window.is_some_and(|s| !(s > 0.0)) {
            return bad("secondary window must be positive");
        }
        if self.kind == InstanceKind::Simple && self.secondary_window.is_some() {
            return bad("simple instances have a single window");
        }
        let inside = |p: Point2| p.x >= 0.0 && p.y >= 0.0 && p.x <= self.area_side && p.y <= self.area_side;
        if !inside(self.depot) {
            return bad("depot must lie inside the area");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("no feasible seed tour found after {redraws} trajectory redraws")]
    GenerationFailed { redraws: usize },
}

/// Random instance following a three-step protocol: draw confined
/// trajectories, find a feasible tour with full-horizon windows, then place a
/// primary window around each visit time and (for complex and generic
/// instances) a disjoint secondary window. Deterministic in `cfg`.
pub fn generate(cfg: &GeneratorConfig) -> Result<Instance, GenerateError> {
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for _ in 0..=MAX_TRAJECTORY_REDRAWS {
        let targets: Vec<Target> = (1..=cfg.n_targets as u32)
            .map(|id| Target {
                id,
                trajectory: draw_trajectory(cfg, &mut rng),
                windows: vec![TimeWindow::new(0.0, cfg.horizon)],
            })
            .collect();
        let mut inst = Instance { depot: cfg.depot, v_max: cfg.v_max, horizon: cfg.horizon, targets, kind: cfg.kind };
        let Ok(tour) = feasible::find_feasible(&inst, SEED_TOUR_SAMPLES, Effort::Fast) else {
            log::debug!("seed tour not found, redrawing trajectories");
            continue;
        };
        for (pos, &id) in tour.visit_order.iter().enumerate() {
            let visit = tour.arrival_times[pos];
            let target = &mut inst.targets[id as usize - 1];
            target.windows = place_windows(cfg, visit, &mut rng);
        }
        debug_assert!(validate(&inst).is_empty());
        return Ok(inst);
    }
    Err(GenerateError::GenerationFailed { redraws: MAX_TRAJECTORY_REDRAWS })
}

fn snap_down(x: f64) -> f64 {
    (x * WINDOW_GRID).floor() / WINDOW_GRID
}

fn snap_up(x: f64) -> f64 {
    (x * WINDOW_GRID).ceil() / WINDOW_GRID
}

/// Uniform grid point in `[lo, hi]`, or the unsnapped midpoint when the range
/// holds no grid point.
fn grid_uniform(lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> f64 {
    let (a, b) = (snap_up(lo), snap_down(hi));
    if a > b {
        return 0.5 * (lo + hi);
    }
    let steps = ((b - a) * WINDOW_GRID).round() as u64;
    a + rng.gen_range(0..=steps) as f64 / WINDOW_GRID
}

fn place_windows(cfg: &GeneratorConfig, visit: f64, rng: &mut ChaCha8Rng) -> Vec<TimeWindow> {
    let p = cfg.primary_window;
    let lo = grid_uniform((visit - p).max(0.0), visit.min(cfg.horizon - p), rng);
    let primary = TimeWindow::new(lo, lo + p);
    let Some(s) = cfg.secondary_window else {
        return vec![primary];
    };
    loop {
        let slo = grid_uniform(0.0, cfg.horizon - s, rng);
        let secondary = TimeWindow::new(slo, slo + s);
        if secondary.hi < primary.lo || secondary.lo > primary.hi {
            let mut out = vec![primary, secondary];
            out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            return out;
        }
    }
}

fn draw_trajectory(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Trajectory {
    loop {
        let (lo, hi) = cfg.target_speed_range;
        let speed = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        let attempt = match cfg.kind {
            InstanceKind::Simple => draw_simple(cfg, speed, rng),
            InstanceKind::Complex => draw_polyline(cfg, speed, rng),
            InstanceKind::Generic => draw_dubins_like(cfg, speed, rng),
        };
        if let Some(t) = attempt {
            return t;
        }
    }
}

fn inside(cfg: &GeneratorConfig, p: Point2) -> bool {
    p.x >= 0.0 && p.y >= 0.0 && p.x <= cfg.area_side && p.y <= cfg.area_side
}

fn random_point(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Point2 {
    Point2::new(rng.gen_range(0.0..=cfg.area_side), rng.gen_range(0.0..=cfg.area_side))
}

fn heading(theta: f64) -> Point2 {
    Point2::new(theta.cos(), theta.sin())
}

fn draw_simple(cfg: &GeneratorConfig, speed: f64, rng: &mut ChaCha8Rng) -> Option<Trajectory> {
    let length = speed * cfg.horizon;
    for _ in 0..10_000 {
        let start = random_point(cfg, rng);
        let end = start + heading(rng.gen_range(0.0..TAU)) * length;
        if inside(cfg, end) {
            let piece = LinePiece::new(start, end, 0.0, cfg.horizon).ok()?;
            return Trajectory::new(vec![Piece::Line(piece)], speed).ok();
        }
    }
    None
}

/// Random durations for `n` pieces summing to `total`, each at least a tenth
/// of the even share.
fn split_durations(total: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..=1.0)).collect();
    let sum: f64 = weights.iter().sum();
    weights.iter().map(|w| total * w / sum).collect()
}

fn draw_polyline(cfg: &GeneratorConfig, speed: f64, rng: &mut ChaCha8Rng) -> Option<Trajectory> {
    let n = rng.gen_range(2..=5);
    'restart: for _ in 0..1_000 {
        let durations = split_durations(cfg.horizon, n, rng);
        let mut p = random_point(cfg, rng);
        let mut t = 0.0;
        let mut pieces = Vec::with_capacity(n);
        for (k, d) in durations.iter().enumerate() {
            let t_end = if k + 1 == n { cfg.horizon } else { t + d };
            let len = speed * (t_end - t);
            let end = (0..200).map(|_| p + heading(rng.gen_range(0.0..TAU)) * len).find(|&e| inside(cfg, e));
            let Some(end) = end else { continue 'restart };
            pieces.push(Piece::Line(LinePiece::new(p, end, t, t_end).ok()?));
            p = end;
            t = t_end;
        }
        return Trajectory::new(pieces, speed).ok();
    }
    None
}

fn piece_inside(cfg: &GeneratorConfig, piece: &Piece) -> bool {
    let (lo, hi) = piece.bounding_box();
    inside(cfg, lo) && inside(cfg, hi)
}

/// Alternating lines and arcs with tangent continuity, starting and ending
/// with a line.
fn draw_dubins_like(cfg: &GeneratorConfig, speed: f64, rng: &mut ChaCha8Rng) -> Option<Trajectory> {
    for _ in 0..1_000 {
        let n_arcs = rng.gen_range(1..=2);
        let arcs: Vec<(f64, f64, bool)> = (0..n_arcs)
            .map(|_| (rng.gen_range(5.0..=20.0), rng.gen_range(PI / 6.0..=PI), rng.gen_bool(0.5)))
            .collect();
        let arc_time: f64 = arcs.iter().map(|(r, sweep, _)| r * sweep / speed).sum();
        if arc_time > 0.7 * cfg.horizon {
            continue;
        }
        let lines = split_durations(cfg.horizon - arc_time, n_arcs + 1, rng);
        let mut p = random_point(cfg, rng);
        let mut h = rng.gen_range(0.0..TAU);
        let mut t = 0.0;
        let mut pieces = Vec::new();
        let mut ok = true;
        for k in 0..=n_arcs {
            let t_end = if k == n_arcs { cfg.horizon } else { t + lines[k] };
            let end = p + heading(h) * (speed * (t_end - t));
            let line = Piece::Line(LinePiece::new(p, end, t, t_end).ok()?);
            if !piece_inside(cfg, &line) {
                ok = false;
                break;
            }
            pieces.push(line);
            p = end;
            t = t_end;
            if k == n_arcs {
                break;
            }
            let (r, sweep, ccw) = arcs[k];
            let normal = if ccw { h + FRAC_PI_2 } else { h - FRAC_PI_2 };
            let center = p + heading(normal) * r;
            let theta_start = normal + PI;
            let t_arc = t + r * sweep / speed;
            let arc = ArcPiece::from_sweep(center, r, theta_start, sweep, ccw, t, t_arc).ok()?;
            let arc = Piece::Arc(arc);
            if !piece_inside(cfg, &arc) {
                ok = false;
                break;
            }
            p = arc.end_point();
            pieces.push(arc);
            h = if ccw { h + sweep } else { h - sweep };
            t = t_arc;
        }
        if ok {
            if let Ok(traj) = Trajectory::new(pieces, speed) {
                return Some(traj);
            }
        }
    }
    None
}
