//! Lower and upper bounds for the moving-target traveling salesman problem
//! with time windows.
//!
//! The lower bound partitions each target's time windows into intervals,
//! builds a clustered graph whose edge costs under-estimate the shortest
//! feasible travel between trajectory intervals, and solves the resulting
//! generalized TSP exactly. Upper bounds come from a sampled point graph and an
//! arrival-time reoptimizer for a fixed visit order.
//!
//! ```
//! use mtbound::model::{generate, GeneratorConfig, InstanceKind};
//! use mtbound::graph::{build, DiscretizationLevel};
//! use mtbound::bounds::{SamplingParams, Variant};
//! use mtbound::gtsp::solve_exact;
//!
//! let inst = generate(&GeneratorConfig::standard(InstanceKind::Simple, 3, 7)).unwrap();
//! let delta = DiscretizationLevel::Level(1).delta();
//! let graph = build(&inst, delta, Variant::Lite, SamplingParams::default()).unwrap();
//! let lb = solve_exact(&graph).unwrap();
//! assert!(lb.cost >= 0.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod feasible;
pub mod geometry;
pub mod graph;
pub mod gtsp;
pub mod kinematics;
pub mod model;

pub use bounds::{EdgeCost, Gate, SamplingParams, Variant};
pub use geometry::{ArcPiece, LinePiece, Piece, Point2, Trajectory};
pub use graph::{ClusteredGraph, DiscretizationLevel};
pub use gtsp::GtspSolution;
pub use model::{GeneratorConfig, Instance, InstanceKind, Target, TimeWindow};
