//! Experiment runner for the `ccm` solver: configs, run archives,
//! checkpoints, CSV tables and the five experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod archive;
pub mod checkpoint;
pub mod config;
pub mod error;
pub mod experiments;
pub mod plots;
pub mod tables;

pub use archive::{RunArchive, RunVerdict, Summary};
pub use config::{ExperimentConfig, Tag};
pub use error::{LabError, Result};
