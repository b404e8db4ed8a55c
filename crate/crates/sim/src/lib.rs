//! Monte Carlo harness for the SO(3) tracking controllers of `eqtrack`.
//!
//! [`experiment::run_experiment`] simulates every configured controller from
//! the same perturbed initial conditions, averages the metrics pointwise
//! over runs and [`output::write_csv`] emits them. [`check`] holds the
//! randomized identity suites behind the `check` subcommand.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod config;
mod error;
pub mod experiment;
pub mod output;

pub use config::ExperimentConfig;
pub use error::{Result, SimError};
pub use experiment::{run_experiment, Series, SimRecord};
