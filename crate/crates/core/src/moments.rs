//! Complex-Gaussian moments of the multitaper Loève periodogram and the
//! null distribution check for coherency.
//!
//! For a zero-mean Gaussian harmonizable process, Isserlis' theorem gives
//! the mean, variance and relation (complementary variance) of
//! `Ī(f₁, f₂)` from the spectrum `S` and the complementary spectrum `C`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{theoretical_covariance_matrix, ModelSpec, ReplicateParams};
use crate::stats::{ks_pvalue, ks_statistic};
use crate::tapers::TaperSet;

/// Fewest samples accepted by [`null_coherence_distribution_check`].
pub const MIN_KS_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMoment {
    pub mean: Complex64,
    pub variance: f64,
    pub relation: Complex64,
}

impl ComplexMoment {
    /// Smallest eigenvalue of `[[σ², c], [c*, σ²]]`, i.e. `σ² − |c|`.
    pub fn augmented_min_eigenvalue(&self) -> f64 {
        self.variance - self.relation.norm()
    }
}

/// Spectrum and complementary spectrum at `f₁`, `f₂` and the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrder {
    pub s11: f64,
    pub s22: f64,
    pub s12: Complex64,
    pub c11: Complex64,
    pub c22: Complex64,
    pub c12: Complex64,
}

/// Mean `S₁₂`, variance `(S₁₁S₂₂ + |C₁₂|²)/K` and relation
/// `(C₁₁C₂₂* + S₁₂²)/K` of the `K`-taper periodogram.
pub fn periodogram_moments(q: &SecondOrder, num_tapers: usize) -> Result<ComplexMoment> {
    if num_tapers == 0 {
        return Err(Error::validation("taper count must be positive"));
    }
    if !(q.s11 >= 0.0 && q.s22 >= 0.0) {
        return Err(Error::validation(format!(
            "diagonal spectra must be nonnegative, got {} and {}",
            q.s11, q.s22
        )));
    }
    let k = num_tapers as f64;
    Ok(ComplexMoment {
        mean: q.s12,
        variance: (q.s11 * q.s22 + q.c12.norm_sqr()) / k,
        relation: (q.c11 * q.c22.conj() + q.s12 * q.s12) / k,
    })
}

/// Taper-averaged `(1/K) Σ_k E[x_k(f₁) x_k*(f₂)]` for a model state with
/// unit replicate parameters, by direct summation over the covariance.
pub fn expected_multitaper_spectrum(
    spec: &ModelSpec,
    state: usize,
    tapers: &TaperSet,
    f1: f64,
    f2: f64,
) -> Result<Complex64> {
    let cov = unit_covariance(spec, state, tapers)?;
    Ok(taper_average(&cov, tapers, f1, f2))
}

fn unit_covariance(spec: &ModelSpec, state: usize, tapers: &TaperSet) -> Result<Array2<f64>> {
    if tapers.len() != spec.series_length {
        return Err(Error::validation("taper length differs from the series length"));
    }
    theoretical_covariance_matrix(spec, state, &ReplicateParams::unit(spec.max_index()))
}

fn taper_average(cov: &Array2<f64>, tapers: &TaperSet, f1: f64, f2: f64) -> Complex64 {
    let len = tapers.len();
    let phase = |f: f64, t: usize| {
        let c = f * t as f64;
        Complex64::from_polar(1.0, -2.0 * PI * (c - c.round()))
    };
    let e1: Vec<Complex64> = (0..len).map(|t| phase(f1, t)).collect();
    let e2: Vec<Complex64> = (0..len).map(|t| phase(f2, t).conj()).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..tapers.num_tapers() {
        let h = tapers.taper(k);
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..len {
            let mut inner = Complex64::new(0.0, 0.0);
            for s in 0..len {
                inner += e2[s] * (h[s] * cov[[t, s]]);
            }
            acc += inner * e1[t] * h[t];
        }
        total += acc;
    }
    total / tapers.num_tapers() as f64
}

/// Second-order inputs for a real-valued model, using `x(−f) = x*(f)` so
/// that `C(f₁, f₂) = S(f₁, −f₂)`.
pub fn model_second_order(
    spec: &ModelSpec,
    state: usize,
    tapers: &TaperSet,
    f1: f64,
    f2: f64,
) -> Result<SecondOrder> {
    let cov = unit_covariance(spec, state, tapers)?;
    let s = |a: f64, b: f64| taper_average(&cov, tapers, a, b);
    Ok(SecondOrder {
        s11: s(f1, f1).re,
        s22: s(f2, f2).re,
        s12: s(f1, f2),
        c11: s(f1, -f1),
        c22: s(f2, -f2),
        c12: s(f1, -f2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsReport {
    pub num_samples: usize,
    pub statistic: f64,
    pub pvalue: f64,
    pub alpha: f64,
    pub pass: bool,
}

/// One-sample KS test of `K|τ̂|²` samples against Exponential(1), the
/// distribution of `½χ²₂`.
pub fn null_coherence_distribution_check(samples: &[f64], alpha: f64) -> Result<KsReport> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::validation(format!(
            "{} samples is too few for the KS check (need {MIN_KS_SAMPLES})",
            samples.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::validation("alpha must lie in (0, 1)"));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("samples must be finite"));
    }
    let statistic = ks_statistic(samples, |x| if x <= 0.0 { 0.0 } else { 1.0 - (-x).exp() });
    let pvalue = ks_pvalue(statistic, samples.len());
    Ok(KsReport { num_samples: samples.len(), statistic, pvalue, alpha, pass: pvalue >= alpha })
}
