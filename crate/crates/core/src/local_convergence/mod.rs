//! Rooted balls, relabeling-invariant keys and neighbourhood distributions.

mod ball;
mod canon;
mod distribution;

pub use ball::{extract_ball, local_distance, RootedBall};
pub use canon::{canonical_key, canonical_key_with_cap, CanonicalKey, DEFAULT_KEY_CAP};
pub use distribution::{
    convergence_report, empirical_ball_distribution, limit_ball_distribution, tv_distance, BallDistribution,
    BallSampler, ConvergenceReport, ConvergenceRow, UbgwSampler,
};
