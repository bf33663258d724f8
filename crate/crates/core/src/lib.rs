//! Camera trajectory evaluation.
//!
//! The crate provides the Translation, Rotation and Pose Alignment Scores
//! ([`scores`]), the usual comparison metrics ([`baselines`]), the alignment
//! machinery both rely on ([`sim3`], [`so3`]) and a seeded Monte Carlo
//! harness for studying how the metrics respond to noise, outliers,
//! collinear motion and trajectory length ([`simlab`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod evaluate;
pub mod geom;
pub mod scores;
pub mod sim3;
pub mod simlab;
pub mod so3;
pub mod stats;
pub mod trajectory;

pub use error::{Error, Result};
pub use evaluate::{evaluate, EvalOptions, Evaluation, Metric};
pub use geom::{angular_distance, Rotation, Vec3};
pub use scores::{pas, ras, score_from_errors, tas, CumulativeHistogram, ScoreReport, TasConfig};
pub use sim3::{register_robust, umeyama, RegistrationConfig, SimilarityTransform};
pub use trajectory::Trajectory;
