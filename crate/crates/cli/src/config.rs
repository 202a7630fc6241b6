//! Pipeline configuration: a TOML file plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Model specification read by `simulate`.
    pub model: Option<PathBuf>,
    /// Existing trial file (CSV or binary); when unset, `estimate` reads the
    /// output of `simulate`.
    pub trials: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub nw: f64,
    pub num_tapers: usize,
    pub band_hz: [f64; 2],
    pub fdr_rate_q: f64,
    pub subsample_half: bool,
    pub batch_size: usize,
    pub svd_k_keep: usize,
    pub cluster_k: usize,
    pub cluster_dims: usize,
    /// Seeds k-means and the validation simulations.
    pub seed: u64,
    pub max_frequencies: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            model: None,
            trials: None,
            output_dir: PathBuf::from("loeve-out"),
            nw: 4.0,
            num_tapers: 7,
            band_hz: [-30.0, 30.0],
            fdr_rate_q: 0.05,
            subsample_half: true,
            batch_size: 20,
            svd_k_keep: 4,
            cluster_k: 2,
            cluster_dims: 2,
            seed: 0,
            max_frequencies: loeve_core::grid::DEFAULT_MAX_FREQUENCIES,
        }
    }
}

/// Flags that replace the corresponding configuration entries.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    #[arg(long, global = true)]
    pub trials: Option<PathBuf>,
    #[arg(long = "out", global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub nw: Option<f64>,
    #[arg(long = "tapers", global = true)]
    pub num_tapers: Option<usize>,
    /// Analysis band in Hz, e.g. `--band=-30,30`.
    #[arg(long = "band", global = true, value_parser = parse_band, allow_hyphen_values = true)]
    pub band_hz: Option<(f64, f64)>,
    #[arg(long = "q", global = true)]
    pub fdr_rate_q: Option<f64>,
    /// Test every band frequency instead of every second one.
    #[arg(long, global = true)]
    pub no_decimate: bool,
    #[arg(long, global = true)]
    pub batch_size: Option<usize>,
    #[arg(long = "k-keep", global = true)]
    pub svd_k_keep: Option<usize>,
    #[arg(long = "clusters", global = true)]
    pub cluster_k: Option<usize>,
    #[arg(long = "dims", global = true)]
    pub cluster_dims: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub max_frequencies: Option<usize>,
}

/// `LOW,HIGH` in Hz.
fn parse_band(text: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    let [lo, hi] = parts[..] else {
        return Err(format!("expected LOW,HIGH, got {text:?}"));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("{s:?} is not a number"));
    Ok((num(lo)?, num(hi)?))
}

impl PipelineConfig {
    /// Parses TOML; relative paths are resolved against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        cfg.model.as_mut().map(resolve);
        cfg.trials.as_mut().map(resolve);
        resolve(&mut cfg.output_dir);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.model {
            self.model = Some(v.clone());
        }
        if let Some(v) = &o.trials {
            self.trials = Some(v.clone());
        }
        if let Some(v) = &o.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = o.nw {
            self.nw = v;
        }
        if let Some(v) = o.num_tapers {
            self.num_tapers = v;
        }
        if let Some((lo, hi)) = o.band_hz {
            self.band_hz = [lo, hi];
        }
        if let Some(v) = o.fdr_rate_q {
            self.fdr_rate_q = v;
        }
        if o.no_decimate {
            self.subsample_half = false;
        }
        if let Some(v) = o.batch_size {
            self.batch_size = v;
        }
        if let Some(v) = o.svd_k_keep {
            self.svd_k_keep = v;
        }
        if let Some(v) = o.cluster_k {
            self.cluster_k = v;
        }
        if let Some(v) = o.cluster_dims {
            self.cluster_dims = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.max_frequencies {
            self.max_frequencies = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CliError::Config(m));
        if !(self.nw.is_finite() && self.nw > 0.0) {
            return fail(format!("nw = {} must be positive", self.nw));
        }
        if self.num_tapers == 0 {
            return fail("num_tapers must be at least 1".into());
        }
        let [lo, hi] = self.band_hz;
        if !(lo < hi) {
            return fail(format!("band_hz = [{lo}, {hi}] must be increasing"));
        }
        if !(self.fdr_rate_q > 0.0 && self.fdr_rate_q < 1.0) {
            return fail(format!("fdr_rate_q = {} must lie in (0, 1)", self.fdr_rate_q));
        }
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1".into());
        }
        if self.svd_k_keep == 0 {
            return fail("svd_k_keep must be at least 1".into());
        }
        if self.cluster_k < 2 {
            return fail("cluster_k must be at least 2".into());
        }
        if self.cluster_dims == 0 || self.cluster_dims > self.svd_k_keep {
            return fail(format!(
                "cluster_dims = {} must lie in [1, svd_k_keep = {}]",
                self.cluster_dims, self.svd_k_keep
            ));
        }
        if self.max_frequencies < 2 {
            return fail("max_frequencies must be at least 2".into());
        }
        Ok(())
    }

    pub fn band(&self) -> (f64, f64) {
        (self.band_hz[0], self.band_hz[1])
    }
}
