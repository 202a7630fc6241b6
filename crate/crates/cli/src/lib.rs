//! Batch pipeline over replicated series: simulate, estimate, threshold,
//! decompose, cluster, validate and render, each stage reading the files
//! of the one before.

pub mod config;
pub mod error;
pub mod layout;
pub mod render;
pub mod stages;
pub mod tables;

pub use config::{Overrides, PipelineConfig};
pub use error::{CliError, Result};
pub use layout::Layout;
pub use stages::{run_all, run_stage, Report, Stage};
