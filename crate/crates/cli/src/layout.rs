//! File locations of every stage's artifacts under the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn trials_bin(&self) -> PathBuf {
        self.root.join("simulate/trials.bin")
    }

    pub fn truth_labels(&self) -> PathBuf {
        self.root.join("simulate/labels.csv")
    }

    pub fn run_log(&self) -> PathBuf {
        self.root.join("estimate/run_log.toml")
    }

    pub fn tapers_csv(&self) -> PathBuf {
        self.root.join("estimate/tapers.csv")
    }

    pub fn coherency(&self, trial: usize) -> PathBuf {
        self.root.join(format!("estimate/coherency/trial_{trial:04}.lvdfm"))
    }

    pub fn batch_mean(&self, batch: usize) -> PathBuf {
        self.root.join(format!("estimate/batch_means/batch_{batch:02}.lvdfm"))
    }

    pub fn thresholded(&self, trial: usize) -> PathBuf {
        self.root.join(format!("threshold/trial_{trial:04}.lvdfm"))
    }

    pub fn threshold_table(&self, trial: usize) -> PathBuf {
        self.root.join(format!("threshold/trial_{trial:04}.csv"))
    }

    pub fn threshold_summary(&self) -> PathBuf {
        self.root.join("threshold/summary.csv")
    }

    pub fn decompose_dir(&self) -> PathBuf {
        self.root.join("decompose")
    }

    pub fn singular_values(&self) -> PathBuf {
        self.root.join("decompose/singular_values.csv")
    }

    pub fn loadings(&self) -> PathBuf {
        self.root.join("decompose/loadings.csv")
    }

    pub fn components(&self) -> PathBuf {
        self.root.join("decompose/components.csv")
    }

    /// `index` counts from one.
    pub fn component_layout(&self, index: usize) -> PathBuf {
        self.root.join(format!("decompose/component_{index:02}.csv"))
    }

    pub fn sparsity(&self) -> PathBuf {
        self.root.join("decompose/sparsity.csv")
    }

    pub fn cluster_labels(&self) -> PathBuf {
        self.root.join("cluster/labels.csv")
    }

    pub fn centroids(&self) -> PathBuf {
        self.root.join("cluster/centroids.csv")
    }

    pub fn elbow(&self) -> PathBuf {
        self.root.join("cluster/elbow.csv")
    }

    pub fn cluster_summary(&self) -> PathBuf {
        self.root.join("cluster/summary.txt")
    }

    pub fn validation_report(&self) -> PathBuf {
        self.root.join("validate/report.txt")
    }

    pub fn render_dir(&self) -> PathBuf {
        self.root.join("render")
    }
}

/// Fails with the command that produces `path` when it does not exist.
pub fn require(path: &Path, command: &'static str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::MissingStage { path: path.to_path_buf(), command })
    }
}

pub fn read_text(path: &Path, command: &'static str) -> Result<String> {
    require(path, command)?;
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Settings of the estimation run that later stages must agree with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunLog {
    pub trials: String,
    pub num_trials: usize,
    pub series_length: usize,
    pub sample_rate_hz: f64,
    pub nw: f64,
    pub num_tapers: usize,
    pub band_hz: [f64; 2],
    pub grid_size: usize,
    pub grid_low_hz: f64,
    pub grid_high_hz: f64,
    pub batch_size: usize,
    pub num_batches: usize,
}

impl RunLog {
    pub fn load(layout: &Layout) -> Result<Self> {
        let path = layout.run_log();
        let text = read_text(&path, "estimate")?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run log serializes")
    }

    /// Rayleigh bandwidth `2NW/T` in cycles per sample.
    pub fn bandwidth(&self) -> f64 {
        2.0 * self.nw / self.series_length as f64
    }
}
