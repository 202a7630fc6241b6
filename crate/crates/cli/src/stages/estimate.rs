use loeve_core::io::{read_trials, tapers_csv, write_dfm, write_dfm_csv, write_file};
use loeve_core::tapers::taper_count_warning;
use loeve_core::{dpss, magnitude_average, FrequencyGrid, MultitaperEstimator, TestConfig};
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::layout::{require, Layout, RunLog};

/// Taper settings that run but give poor or degenerate results.
pub fn taper_warnings(cfg: &PipelineConfig) -> Vec<String> {
    let mut out = Vec::new();
    if cfg.num_tapers == 1 {
        out.push("K = 1: every single-taper coherency has unit modulus, so thresholding is degenerate".to_string());
    }
    out.extend(taper_count_warning(cfg.nw, cfg.num_tapers));
    out
}

/// Per-trial coherency on the band grid and magnitude means over batches
/// of consecutive trials.
pub fn estimate(cfg: &PipelineConfig, layout: &Layout) -> Result<String> {
    let trials_path = match &cfg.trials {
        Some(p) => p.clone(),
        None => {
            let p = layout.trials_bin();
            require(&p, "simulate")?;
            p
        }
    };
    let trials = read_trials(&trials_path)?;
    let (len, rate) = (trials.series_length(), trials.sample_rate_hz);

    for w in taper_warnings(cfg) {
        log::warn!("{w}");
    }
    TestConfig { band_hz: cfg.band(), ..TestConfig::new(cfg.num_tapers, 0.0) }.validate(rate)?;

    let tapers = dpss(len, cfg.nw, cfg.num_tapers)?;
    let grid = FrequencyGrid::band(len, rate, cfg.band_hz[0], cfg.band_hz[1])?;
    let est = MultitaperEstimator::with_frequency_limit(tapers, grid, cfg.max_frequencies)?;

    let num_trials = trials.num_replicates();
    let starts: Vec<usize> = (0..num_trials).step_by(cfg.batch_size).collect();
    for (b, &start) in starts.iter().enumerate() {
        let end = (start + cfg.batch_size).min(num_trials);
        let batch = (start..end)
            .into_par_iter()
            .map(|r| {
                let coh = est.coherency(&trials.trial(r))?;
                write_dfm(&coh, &layout.coherency(r))?;
                Ok(coh)
            })
            .collect::<Result<Vec<_>>>()?;
        let mean = magnitude_average(&batch)?;
        let path = layout.batch_mean(b);
        write_dfm(&mean, &path)?;
        write_file(&path.with_extension("csv"), write_dfm_csv(&mean))?;
    }

    let grid = est.grid();
    let log = RunLog {
        trials: trials_path.display().to_string(),
        num_trials,
        series_length: len,
        sample_rate_hz: rate,
        nw: cfg.nw,
        num_tapers: cfg.num_tapers,
        band_hz: cfg.band_hz,
        grid_size: grid.len(),
        grid_low_hz: grid.hz(0),
        grid_high_hz: grid.hz(grid.len() - 1),
        batch_size: cfg.batch_size,
        num_batches: starts.len(),
    };
    write_file(&layout.run_log(), log.to_toml())?;
    write_file(&layout.tapers_csv(), tapers_csv(est.tapers()))?;
    Ok(format!(
        "estimated {num_trials} coherency matrices on {} frequencies with NW = {}, K = {}; {} batch mean(s)",
        grid.len(),
        cfg.nw,
        cfg.num_tapers,
        starts.len()
    ))
}
