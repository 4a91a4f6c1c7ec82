//! Contact process: graphical representation, pathwise evolution and a
//! direct event-driven simulator.

mod ctmc;
mod direct;
mod evolve;
mod timeline;

pub use ctmc::{ctmc_exact_expected_extinction, CTMC_MAX_VERTICES};
pub use direct::{first_passage_radius, geometric_grid, run_direct, Budget, Extinction, FirstPassage, RunOptions, Trajectory};
pub use evolve::{evolve, evolve_sweep, timeline_extinction_time, Sweep};
pub use timeline::{reverse_timeline, sample_timeline, thin_timeline, Arrow, Timeline};
