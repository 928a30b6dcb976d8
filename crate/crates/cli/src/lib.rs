//! Experiment runner behind the `oamlis` binary: configuration handling and
//! CSV-producing experiment drivers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;

pub use config::{DetectorSpec, ExperimentConfig, Kind, Sweep};
pub use run::run;
