#![no_std]

//! Contact-process simulation on finite sparse graphs and their local limits.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`graphs`]: the [`Graph`] type, the random graph families (configuration
//!   model, random regular, augmented torus Gilbert graph, stars, cycles,
//!   lattice boxes), unimodular Galton–Watson balls and degree statistics.
//! * [`local_convergence`]: depth-`k` ball extraction, relabeling-invariant
//!   keys and empirical/limit neighbourhood distributions.
//! * [`contact_process`]: the graphical representation ([`Timeline`]), the
//!   pathwise sweep ([`evolve`]), a direct event-driven engine
//!   ([`run_direct`]) and an exact small-graph CTMC oracle.
//!
//! Everything that touches files, threads or the command line lives in the
//! `cp-lab` crate.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod contact_process;
mod error;
pub mod graphs;
pub mod local_convergence;
pub mod math;
pub mod rng;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use contact_process::{
    ctmc_exact_expected_extinction, evolve, first_passage_radius, reverse_timeline, run_direct,
    sample_timeline, thin_timeline, Extinction, FirstPassage, RunOptions, Timeline, Trajectory,
};
pub use error::{Error, Result};
pub use graphs::{DegreeDistribution, Graph, RadiusLaw};
pub use local_convergence::{BallDistribution, CanonicalKey, RootedBall};
