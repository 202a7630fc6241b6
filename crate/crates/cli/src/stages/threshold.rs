use loeve_core::io::{read_dfm, threshold_csv, write_dfm, write_file};
use loeve_core::{fdr_threshold, TestConfig};
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::layout::{require, Layout, RunLog};
use crate::tables::numeric_csv;

pub(crate) fn test_config(cfg: &PipelineConfig, log: &RunLog) -> TestConfig {
    TestConfig {
        fdr_rate_q: cfg.fdr_rate_q,
        band_hz: cfg.band(),
        num_tapers: log.num_tapers,
        subsample_half: cfg.subsample_half,
        exclusion_bandwidth: log.bandwidth(),
    }
}

/// Per-trial FDR thresholding of the estimated coherency.
pub fn threshold(cfg: &PipelineConfig, layout: &Layout) -> Result<String> {
    let log = RunLog::load(layout)?;
    let tc = test_config(cfg, &log);
    let counts = (0..log.num_trials)
        .into_par_iter()
        .map(|r| {
            let path = layout.coherency(r);
            require(&path, "estimate")?;
            let res = fdr_threshold(&read_dfm(&path)?, &tc)?;
            write_dfm(&res.thresholded, &layout.thresholded(r))?;
            write_file(&layout.threshold_table(r), threshold_csv(&res))?;
            Ok(vec![r as f64, res.num_tested as f64, res.num_rejected as f64, res.cutoff])
        })
        .collect::<Result<Vec<_>>>()?;
    let header = ["trial", "num_tested", "num_rejected", "cutoff"].map(String::from);
    let rejected: f64 = counts.iter().map(|c| c[2]).sum();
    let tested = counts.first().map_or(0.0, |c| c[1]);
    write_file(&layout.threshold_summary(), numeric_csv(&header, counts))?;
    Ok(format!(
        "thresholded {} trials at q = {}: {} tested pairs per trial, {:.1} rejected on average",
        log.num_trials,
        cfg.fdr_rate_q,
        tested,
        rejected / log.num_trials.max(1) as f64
    ))
}
