//! Pipeline stages. Each reads the artifacts of the stage before it from
//! the output directory and writes its own; see [`crate::layout`].

mod cluster;
mod decompose;
mod estimate;
mod render;
mod simulate;
mod threshold;
mod validate;

use std::fmt;

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::layout::Layout;

pub use cluster::cluster;
pub use decompose::decompose;
pub use estimate::{estimate, taper_warnings};
pub use render::render;
pub use simulate::simulate;
pub use threshold::threshold;
pub use validate::{validate, Check, Outcome, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Simulate,
    Estimate,
    Threshold,
    Decompose,
    Cluster,
    Validate,
    Render,
}

impl Stage {
    /// Stages in pipeline order; `simulate` is skipped by [`run_all`] when
    /// the configuration names existing trials.
    pub const ALL: [Stage; 7] = [
        Stage::Simulate,
        Stage::Estimate,
        Stage::Threshold,
        Stage::Decompose,
        Stage::Cluster,
        Stage::Validate,
        Stage::Render,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Simulate => "simulate",
            Stage::Estimate => "estimate",
            Stage::Threshold => "threshold",
            Stage::Decompose => "decompose",
            Stage::Cluster => "cluster",
            Stage::Validate => "validate",
            Stage::Render => "render",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Runs one stage and returns a one-line summary.
pub fn run_stage(stage: Stage, cfg: &PipelineConfig) -> Result<String> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.output_dir);
    match stage {
        Stage::Simulate => simulate(cfg, &layout),
        Stage::Estimate => estimate(cfg, &layout),
        Stage::Threshold => threshold(cfg, &layout),
        Stage::Decompose => decompose(cfg, &layout),
        Stage::Cluster => cluster(cfg, &layout),
        Stage::Validate => validate(cfg, &layout).map(|report| report.summary()),
        Stage::Render => render(cfg, &layout),
    }
}

/// Runs every stage in order and returns their summaries.
pub fn run_all(cfg: &PipelineConfig) -> Result<Vec<(Stage, String)>> {
    Stage::ALL
        .iter()
        .filter(|&&s| s != Stage::Simulate || cfg.trials.is_none())
        .map(|&s| run_stage(s, cfg).map(|m| (s, m)))
        .collect()
}
