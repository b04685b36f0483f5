#![allow(dead_code)]

use mtbound::geometry::{LinePiece, Piece, Point2, Trajectory};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Earliest arrival on a piecewise-linear trajectory within `[c, d]`, from
/// the textbook quadratic formula on each piece (no cancellation guards).
pub fn naive_efat(start: Point2, depart: f64, traj: &Trajectory, c: f64, d: f64, v: f64) -> Option<f64> {
    let reach = |t: f64, p: Point2| t >= depart && p.dist(start) <= v * (t - depart) + 1e-9;
    for piece in traj.pieces() {
        let Piece::Line(l) = piece else { panic!("naive oracle handles lines only") };
        let lo = l.t_start.max(c).max(depart);
        let hi = l.t_end.min(d);
        if lo > hi {
            continue;
        }
        let pos = |t: f64| {
            let u = if l.t_end > l.t_start { (t - l.t_start) / (l.t_end - l.t_start) } else { 0.0 };
            Point2::new(l.start.x + (l.end.x - l.start.x) * u, l.start.y + (l.end.y - l.start.y) * u)
        };
        if reach(lo, pos(lo)) {
            return Some(lo);
        }
        if !reach(hi, pos(hi)) {
            continue;
        }
        let vel = if l.t_end > l.t_start {
            Point2::new((l.end.x - l.start.x) / (l.t_end - l.t_start), (l.end.y - l.start.y) / (l.t_end - l.t_start))
        } else {
            Point2::new(0.0, 0.0)
        };
        // |w + vel·t|² = v²(t − depart)², w = start of line at t = 0 minus agent start
        let w = Point2::new(l.start.x - vel.x * l.t_start - start.x, l.start.y - vel.y * l.t_start - start.y);
        let a = vel.x * vel.x + vel.y * vel.y - v * v;
        let b = 2.0 * (w.x * vel.x + w.y * vel.y) + 2.0 * v * v * depart;
        let cc = w.x * w.x + w.y * w.y - v * v * depart * depart;
        let disc = (b * b - 4.0 * a * cc).max(0.0);
        let r1 = (-b + disc.sqrt()) / (2.0 * a);
        let r2 = (-b - disc.sqrt()) / (2.0 * a);
        let mut roots = [r1, r2];
        roots.sort_by(f64::total_cmp);
        let hit = roots.into_iter().find(|&r| r >= lo - 1e-9 && r <= hi + 1e-9).map(|r| r.clamp(lo, hi));
        return Some(hit.unwrap_or(hi));
    }
    None
}

/// Shortest feasible travel by scanning `n + 1` evenly spaced departures.
pub fn grid_sft(ti: &Trajectory, (a, b): (f64, f64), tj: &Trajectory, (c, d): (f64, f64), v: f64, n: usize) -> f64 {
    (0..=n)
        .map(|k| {
            let t = if k == n { b } else { a + (b - a) * k as f64 / n as f64 };
            let p = ti.position_clamped(t);
            naive_efat(p, t, tj, c, d, v).map_or(f64::INFINITY, |e| e - t)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Constant-speed polyline through random vertices in `[0, side]²`, starting
/// at time 0, with `pieces` segments and a speed in [0.5, 1).
pub fn random_polyline(rng: &mut ChaCha8Rng, pieces: std::ops::RangeInclusive<usize>, side: f64) -> Trajectory {
    let pieces = rng.gen_range(pieces);
    let speed = rng.gen_range(0.5..1.0);
    let mut p = Point2::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side));
    let mut t = 0.0;
    let mut out = Vec::with_capacity(pieces);
    for _ in 0..pieces {
        let q = Point2::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side));
        let t1 = t + p.dist(q).max(1e-3) / speed;
        let q = if p.dist(q) < 1e-3 { Point2::new(p.x + 1e-3, p.y) } else { q };
        out.push(Piece::Line(LinePiece::new(p, q, t, t1).unwrap()));
        p = q;
        t = t1;
    }
    Trajectory::new(out, speed).unwrap()
}

/// Min distance between two piece sets by sampling `n` points on each.
pub fn sampled_distance(a: &[Piece], b: &[Piece], n: usize) -> f64 {
    let sample = |set: &[Piece]| -> Vec<Point2> {
        let per = (n / set.len()).max(2);
        set.iter()
            .flat_map(|p| (0..per).map(move |k| p.position_at(p.t_start() + (p.t_end() - p.t_start()) * k as f64 / (per - 1) as f64)))
            .collect()
    };
    let (pa, pb) = (sample(a), sample(b));
    let mut best = f64::INFINITY;
    for p in &pa {
        for q in &pb {
            best = best.min(p.dist(*q));
        }
    }
    best
}
