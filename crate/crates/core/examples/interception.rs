//! Earliest arrival at, and latest departure from, a moving target.

use mtbound::geometry::{LinePiece, Piece, Point2, Trajectory};
use mtbound::kinematics::{efat_trajectory, lfdt_trajectory};

fn main() {
    let v_max = 4.0;
    // target heading east at 0.8 units/s, turning north at t = 30
    let a = LinePiece::new(Point2::new(20.0, 10.0), Point2::new(44.0, 10.0), 0.0, 30.0).unwrap();
    let b = LinePiece::new(Point2::new(44.0, 10.0), Point2::new(44.0, 42.0), 30.0, 70.0).unwrap();
    let target = Trajectory::new(vec![Piece::Line(a), Piece::Line(b)], 0.8).unwrap();

    let agent = Point2::new(0.0, 0.0);
    for depart in [0.0, 10.0, 25.0] {
        match efat_trajectory(agent, depart, &target, (0.0, 70.0), v_max) {
            Some(t) => {
                let p = target.position_clamped(t);
                println!("leave at {depart:5.1} s -> intercept at {t:7.3} s at ({:.2}, {:.2})", p.x, p.y);
            }
            None => println!("leave at {depart:5.1} s -> unreachable"),
        }
    }

    let meet = Point2::new(60.0, 60.0);
    let deadline = 50.0;
    match lfdt_trajectory(&target, (0.0, 70.0), meet, deadline, v_max) {
        Some(t) => println!("to be at (60, 60) by {deadline} s, leave the target no later than {t:.3} s"),
        None => println!("(60, 60) cannot be reached by {deadline} s"),
    }
}
