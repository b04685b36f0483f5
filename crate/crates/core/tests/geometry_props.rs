mod common;

use mtbound::geometry::{min_distance_piece_sets, min_distance_pieces, point_piece_distance, Piece, Trajectory};
use mtbound::model::generate;
use mtbound::{GeneratorConfig, InstanceKind};
use proptest::prelude::*;

fn generic_trajectories(seed: u64) -> Vec<Trajectory> {
    generate(&GeneratorConfig::standard(InstanceKind::Generic, 2, seed))
        .unwrap()
        .targets
        .into_iter()
        .map(|t| t.trajectory)
        .collect()
}

fn sub_pieces(traj: &Trajectory, a: f64, w: f64) -> Vec<Piece> {
    let span = traj.t_end() - traj.t_start();
    let lo = traj.t_start() + a * span;
    traj.clip(lo, (lo + w).min(traj.t_end()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_symmetric(seed in 0u64..500, a in 0.0..0.9f64, b in 0.0..0.9f64, w in 0.5..30.0f64) {
        let ts = generic_trajectories(seed);
        let (p, q) = (sub_pieces(&ts[0], a, w), sub_pieces(&ts[1], b, w));
        for x in &p {
            for y in &q {
                prop_assert!((min_distance_pieces(x, y) - min_distance_pieces(y, x)).abs() <= 1e-12);
            }
        }
        prop_assert!((min_distance_piece_sets(&p, &q) - min_distance_piece_sets(&q, &p)).abs() <= 1e-12);
    }

    #[test]
    fn distance_bounds_sampled_pairs(seed in 0u64..500, a in 0.0..0.9f64, b in 0.0..0.9f64, w in 0.5..30.0f64) {
        let ts = generic_trajectories(seed);
        let (p, q) = (sub_pieces(&ts[0], a, w), sub_pieces(&ts[1], b, w));
        let exact = min_distance_piece_sets(&p, &q);
        let sampled = common::sampled_distance(&p, &q, 400);
        prop_assert!(exact <= sampled + 1e-9, "exact {exact} above sampled {sampled}");
        // sample spacing is at most speed·w/(per−1) on each side
        let slack = 2.0 * w / ((400 / p.len().max(q.len())).max(2) - 1) as f64;
        prop_assert!(sampled - exact <= slack, "exact {exact} too far below sampled {sampled}");
    }

    #[test]
    fn points_on_a_piece_have_zero_distance(seed in 0u64..500, u in 0.0..1.0f64) {
        for traj in generic_trajectories(seed) {
            for piece in traj.pieces() {
                let t = piece.t_start() + u * (piece.t_end() - piece.t_start());
                prop_assert!(point_piece_distance(piece.position_at(t), piece) <= 1e-9);
            }
        }
    }
}
