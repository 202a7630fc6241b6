//! Self-checks of the estimator on the configured taper settings: taper
//! quality, the exponential null of `K|τ̂|²` on white noise, and the
//! Gaussian periodogram moments against Monte Carlo.

use std::fmt;

use loeve_core::io::{load_model_spec, write_file};
use loeve_core::model::{simulate_modulated, BaseProcessSpec, ComponentSpec, ModelSpec, ReplicateParams};
use loeve_core::moments::model_second_order;
use loeve_core::rng::{substream, Purpose};
use loeve_core::{
    dpss, null_coherence_distribution_check, periodogram_moments, FrequencyGrid, MultitaperEstimator, TaperSet,
};
use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::layout::{Layout, RunLog};

/// White-noise trials for the null check.
const NULL_TRIALS: usize = 2000;
/// Replicates for the moment comparison.
const MOMENT_TRIALS: usize = 2000;
/// Standard errors allowed between Monte Carlo and theory.
const MOMENT_SE: f64 = 4.0;
const KS_ALPHA: f64 = 0.01;
/// Off-diagonal test pairs as fractions of the sampling rate; their sums and
/// differences stay clear of zero for `T >= 64` at `NW = 4`.
const PAIRS: [(f64, f64); 3] = [(0.1, 0.3), (-0.22, 0.05), (-0.35, 0.02)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn push(&mut self, name: impl Into<String>, pass: Option<bool>, detail: String) {
        let outcome = match pass {
            Some(true) => Outcome::Pass,
            Some(false) => Outcome::Fail,
            None => Outcome::Info,
        };
        self.checks.push(Check { name: name.into(), outcome, detail });
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.outcome == Outcome::Fail).count()
    }

    pub fn summary(&self) -> String {
        let passed = self.checks.iter().filter(|c| c.outcome == Outcome::Pass).count();
        format!("validation: {passed} passed, {} failed", self.failures())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.outcome {
                Outcome::Pass => "PASS",
                Outcome::Fail => "FAIL",
                Outcome::Info => "INFO",
            };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn bin(f: f64, len: usize) -> i64 {
    (f * len as f64).round() as i64
}

/// Model used for the moment checks: state 0 of the configured model with
/// unit replicate parameters, or unit white noise.
fn moment_model(cfg: &PipelineConfig, len: usize, seed: u64) -> Result<ModelSpec> {
    let mut spec = match &cfg.model {
        Some(path) => {
            let mut spec = load_model_spec(path)?;
            spec.states.truncate(1);
            spec.mixture_weights = vec![vec![1.0]];
            spec
        }
        None => ModelSpec::single_state(
            BaseProcessSpec::white(1.0),
            vec![ComponentSpec::constant(0, 1.0, 1.0, len)],
            len,
            1,
            0,
        ),
    };
    spec.num_replicates = MOMENT_TRIALS;
    spec.rng_seed = seed;
    Ok(spec)
}

fn null_samples(tapers: &TaperSet, seed: u64, pair: (i64, i64)) -> Result<Vec<f64>> {
    let len = tapers.len();
    let k = tapers.num_tapers() as f64;
    let grid = FrequencyGrid::on_lattice(len, vec![pair.0, pair.1], 1.0)?;
    let est = MultitaperEstimator::new(tapers.clone(), grid)?;
    (0..NULL_TRIALS)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, Purpose::Validation, i as u64);
            let trial: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let coh = est.coherency(&trial)?;
            Ok(k * coh.get(0, 1).norm_sqr())
        })
        .collect()
}

struct Sample {
    mean: Complex64,
    variance: f64,
    variance_se: f64,
}

fn monte_carlo(values: &[Complex64]) -> Sample {
    let n = values.len() as f64;
    let mean = values.iter().sum::<Complex64>() / n;
    let dev: Vec<f64> = values.iter().map(|z| (z - mean).norm_sqr()).collect();
    let variance = dev.iter().sum::<f64>() / (n - 1.0);
    let spread = dev.iter().map(|d| (d - variance).powi(2)).sum::<f64>() / (n - 1.0);
    Sample { mean, variance, variance_se: (spread / n).sqrt() }
}

/// Runs every check and writes the report.
pub fn validate(cfg: &PipelineConfig, layout: &Layout) -> Result<Report> {
    let mut report = Report::default();
    let len = match (RunLog::load(layout), &cfg.model) {
        (Ok(log), _) => log.series_length,
        (Err(_), Some(path)) => load_model_spec(path)?.series_length,
        _ => 256,
    };
    let k = cfg.num_tapers;
    let tapers = dpss(len, cfg.nw, k)?;

    let resid = tapers.orthonormality_residual();
    report.push("taper_orthonormality", Some(resid < 1e-10), format!("max |H Hᵀ − I| = {resid:.2e} (T = {len})"));
    let eig = tapers.eigenvalues();
    report.push(
        "taper_concentration",
        None,
        format!("NW = {}, K = {k}: smallest eigenvalue {:.6}", cfg.nw, eig.iter().cloned().fold(1.0, f64::min)),
    );

    let mut seeds = substream(cfg.seed, Purpose::Validation, u64::MAX);
    for &(f1, f2) in &PAIRS {
        let pair = (bin(f1, len), bin(f2, len));
        let samples = null_samples(&tapers, seeds.next_u64(), pair)?;
        let ks = null_coherence_distribution_check(&samples, KS_ALPHA)?;
        report.push(
            format!("null_coherence_ks[{f1}, {f2}]"),
            Some(ks.pass),
            format!("{} white-noise trials, D = {:.4}, p = {:.3} (alpha = {KS_ALPHA})", ks.num_samples, ks.statistic, ks.pvalue),
        );
    }

    let spec = moment_model(cfg, len, seeds.next_u64())?;
    if spec.series_length != len {
        report.push(
            "periodogram_moments",
            None,
            format!("skipped: model length {} differs from the analysed length {len}", spec.series_length),
        );
    } else {
        let tapers = dpss(spec.series_length, cfg.nw, k)?;
        let params = vec![ReplicateParams::unit(spec.max_index()); spec.num_replicates];
        let sim = simulate_modulated(&spec, &params)?;
        let mut pairs: Vec<(i64, i64)> = PAIRS.iter().map(|&(a, b)| (bin(a, len), bin(b, len))).collect();
        pairs.push((bin(0.1, len), bin(0.1, len)));
        for (b1, b2) in pairs {
            let (f1, f2) = (b1 as f64 / len as f64, b2 as f64 / len as f64);
            let q = model_second_order(&spec, 0, &tapers, f1, f2)?;
            let theory = periodogram_moments(&q, k)?;
            let single = periodogram_moments(&q, 1)?;
            let scale_gap = (single.variance - k as f64 * theory.variance).abs()
                + (single.relation - theory.relation * k as f64).norm();
            let tol = 1e-12 * (single.variance + single.relation.norm()).max(f64::MIN_POSITIVE);
            report.push(
                format!("k_scaling[{f1}, {f2}]"),
                Some(scale_gap <= tol),
                format!("|K·var_K − var_1| + |K·rel_K − rel_1| = {scale_gap:.2e}"),
            );
            let psd = theory.augmented_min_eigenvalue();
            report.push(
                format!("moments_psd[{f1}, {f2}]"),
                Some(psd >= -1e-9 * theory.variance.max(f64::MIN_POSITIVE)),
                format!("smallest augmented eigenvalue {psd:.3e}"),
            );

            // A diagonal pair needs a one-point grid.
            let (bins, entry) = if b1 == b2 { (vec![b1], (0, 0)) } else { (vec![b1, b2], (0, 1)) };
            let grid = FrequencyGrid::on_lattice(len, bins, 1.0)?;
            let est = MultitaperEstimator::new(tapers.clone(), grid)?;
            let values = (0..sim.trials.num_replicates())
                .into_par_iter()
                .map(|r| Ok(est.spectrum(&sim.trials.trial(r))?.get(entry.0, entry.1)))
                .collect::<Result<Vec<_>>>()?;
            let mc = monte_carlo(&values);
            let n = values.len() as f64;
            let mean_se = (mc.variance / n).sqrt();
            let mean_gap = (mc.mean - theory.mean).norm();
            let var_gap = (mc.variance - theory.variance).abs();
            report.push(
                format!("moments_monte_carlo[{f1}, {f2}]"),
                Some(mean_gap <= MOMENT_SE * mean_se && var_gap <= MOMENT_SE * mc.variance_se),
                format!(
                    "{} replicates: mean off by {:.2} SE, variance off by {:.2} SE",
                    values.len(),
                    mean_gap / mean_se.max(f64::MIN_POSITIVE),
                    var_gap / mc.variance_se.max(f64::MIN_POSITIVE)
                ),
            );
        }
    }

    write_file(&layout.validation_report(), report.to_string())?;
    Ok(report)
}
