//! Experiment driver for contact-process simulations: Monte Carlo
//! estimators, statistics, file formats and preset experiments on top of
//! `cplab-core`.

pub mod config;
pub mod estimators;
pub mod experiment;
pub mod io;
pub mod pool;
pub mod stats;
