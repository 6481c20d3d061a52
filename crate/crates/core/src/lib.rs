//! Memory-strategy dynamics for the repeated prisoner's dilemma.
//!
//! Players choose their action from the running average payoff pair only.
//! A strategy profile therefore induces a deterministic averaged dynamical
//! system on the payoff polytope, and this crate simulates it, predicts its
//! limits, and checks the set-theoretic properties used to reason about it.
//!
//! Module map:
//!
//! - [`geometry`]: planar kernel (lines, half-planes, convex polygons, proximal points).
//! - [`game`]: two-player normal-form games, minmax values, weak Pareto frontier, β-core image.
//! - [`strategies`]: good, semi-cooperative, simple, constant and custom memory strategies.
//! - [`dynamics`]: the averaging map, trajectories, limit estimation and the limit classifier.
//! - [`verification`]: empirical checkers for approachability, invariance, absorption, escape and safety.
//! - [`metagame`]: the induced game whose actions are β-core anchor points.
//! - [`io`]: trajectory CSV, game files and report/matrix serialization.
//! - [`acceptance`]: the end-to-end acceptance criteria, shared by tests and the CLI.

// `!(x > 0.0)` is used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod geometry;
pub mod io;
pub mod metagame;
pub mod strategies;
pub mod verification;

pub use dynamics::{
    beta_step, estimate_limit, predicted_limit, simulate, step_map, y_distance_formula, y_limit_point, y_point,
    LimitCase, LimitEstimate, LimitPrediction, Profile, Trajectory,
};
pub use error::{Error, Result};
pub use game::{make_pd, BetaCoreImage, CorrelatedStrategy, Game};
pub use geometry::{ConvexPolygon, HalfPlane, Line, Point2, Segment, ETA};
pub use metagame::{MetagameMatrix, Mode};
pub use strategies::{Action, MemoryStrategy, Player, PlayerType};
