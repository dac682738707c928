//! Command-line front end for the `carleman` solver: configuration, run
//! orchestration and plain-text outputs.

pub mod args;
pub mod config;
pub mod output;
pub mod run;

pub use config::RunConfig;
pub use run::{Failure, RunReport};
