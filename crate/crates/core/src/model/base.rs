//! Stationary base processes `U_t`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    White,
    /// Causal autoregression `U_t = Σ φ_i U_{t-i} + e_t`.
    Autoregressive,
    /// Spectral density sampled at `f_j = -1/2 + j/n`, `j = 0..n`.
    SpectralShape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseProcessSpec {
    pub kind: BaseKind,
    /// AR coefficients or sampled spectral density, depending on `kind`.
    pub params: Vec<f64>,
    pub innovation_variance: f64,
}

impl BaseProcessSpec {
    pub fn white(variance: f64) -> Self {
        Self {
            kind: BaseKind::White,
            params: Vec::new(),
            innovation_variance: variance,
        }
    }

    pub fn autoregressive(coefficients: Vec<f64>, innovation_variance: f64) -> Self {
        Self {
            kind: BaseKind::Autoregressive,
            params: coefficients,
            innovation_variance,
        }
    }

    pub fn spectral_shape(density: Vec<f64>, scale: f64) -> Self {
        Self {
            kind: BaseKind::SpectralShape,
            params: density,
            innovation_variance: scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.innovation_variance.is_finite() && self.innovation_variance > 0.0) {
            return Err(Error::validation("innovation variance must be positive"));
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::validation("base process parameters must be finite"));
        }
        match self.kind {
            BaseKind::White => Ok(()),
            BaseKind::Autoregressive => {
                let pacf = reflection_coefficients(&self.params);
                match pacf.iter().position(|k| k.abs() >= 1.0 || !k.is_finite()) {
                    Some(_) => Err(Error::Model(format!(
                        "AR coefficients {:?} are not causal: a characteristic root lies on or inside the unit circle",
                        self.params
                    ))),
                    None => Ok(()),
                }
            }
            BaseKind::SpectralShape => {
                let n = self.params.len();
                if n < 2 {
                    return Err(Error::validation("spectral shape needs at least two samples"));
                }
                if self.params.iter().any(|&s| s < 0.0) {
                    return Err(Error::validation("spectral density must be nonnegative"));
                }
                for j in 1..n {
                    let (a, b) = (self.params[j], self.params[n - j]);
                    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                        return Err(Error::validation(format!(
                            "spectral density is not even: S[{j}] = {a} but its mirror is {b}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Autocovariance `s̃(l)` for `l = 0..=max_lag`.
    pub fn autocovariance(&self, max_lag: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let var = self.innovation_variance;
        Ok(match self.kind {
            BaseKind::White => {
                let mut out = vec![0.0; max_lag + 1];
                out[0] = var;
                out
            }
            BaseKind::Autoregressive => ar_autocovariance(&self.params, var, max_lag)?,
            BaseKind::SpectralShape => {
                let n = self.params.len();
                (0..=max_lag)
                    .map(|l| {
                        let s: f64 = self
                            .params
                            .iter()
                            .enumerate()
                            .map(|(j, &d)| d * (2.0 * PI * shape_frequency(j, n) * l as f64).cos())
                            .sum();
                        var * s / n as f64
                    })
                    .collect()
            }
        })
    }

    /// Draws `len` consecutive samples of the stationary process.
    pub fn simulate<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.validate()?;
        let sd = self.innovation_variance.sqrt();
        Ok(match self.kind {
            BaseKind::White => (0..len).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect(),
            BaseKind::Autoregressive => {
                let p = self.params.len();
                let burn = 10 * len;
                let mut buf = vec![0.0; burn + len];
                for t in 0..buf.len() {
                    let mut v = sd * rng.sample::<f64, _>(StandardNormal);
                    for i in 1..=p.min(t) {
                        v += self.params[i - 1] * buf[t - i];
                    }
                    buf[t] = v;
                }
                buf.split_off(burn)
            }
            BaseKind::SpectralShape => {
                // Sum of independent random sinusoids, one per density sample;
                // its covariance equals the autocovariance above at every lag.
                let n = self.params.len();
                let mut re = Vec::with_capacity(n);
                let mut im = Vec::with_capacity(n);
                for &d in &self.params {
                    let amp = (d / n as f64).sqrt();
                    re.push(amp * rng.sample::<f64, _>(StandardNormal));
                    im.push(amp * rng.sample::<f64, _>(StandardNormal));
                }
                (0..len)
                    .map(|t| {
                        let mut acc = 0.0;
                        for j in 0..n {
                            let (s, c) = (2.0 * PI * shape_frequency(j, n) * t as f64).sin_cos();
                            acc += re[j] * c - im[j] * s;
                        }
                        sd * acc
                    })
                    .collect()
            }
        })
    }
}

pub(crate) fn shape_frequency(j: usize, n: usize) -> f64 {
    -0.5 + j as f64 / n as f64
}

/// Step-down recursion from AR coefficients to reflection coefficients; the
/// model is causal iff every reflection coefficient has modulus below one.
pub fn reflection_coefficients(phi: &[f64]) -> Vec<f64> {
    let mut a = phi.to_vec();
    let mut kappas = vec![0.0; a.len()];
    for k in (1..=a.len()).rev() {
        let kappa = a[k - 1];
        kappas[k - 1] = kappa;
        if kappa.abs() >= 1.0 {
            break;
        }
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (1..k).map(|j| (a[j - 1] + kappa * a[k - j - 1]) / denom).collect();
        a.truncate(k - 1);
        a.copy_from_slice(&prev);
    }
    kappas
}

fn ar_autocovariance(phi: &[f64], var: f64, max_lag: usize) -> Result<Vec<f64>> {
    let p = phi.len();
    // γ(k) - Σ φ_i γ(|k - i|) = σ² δ_k for k = 0..=p.
    let mut a = DMatrix::<f64>::zeros(p + 1, p + 1);
    let mut b = DVector::<f64>::zeros(p + 1);
    b[0] = var;
    for k in 0..=p {
        a[(k, k)] += 1.0;
        for i in 1..=p {
            let lag = (k as i64 - i as i64).unsigned_abs() as usize;
            a[(k, lag)] -= phi[i - 1];
        }
    }
    let head = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular Yule-Walker system".into()))?;
    let mut gamma: Vec<f64> = head.iter().copied().collect();
    while gamma.len() <= max_lag {
        let k = gamma.len();
        let v = (1..=p).map(|i| phi[i - 1] * gamma[k - i]).sum();
        gamma.push(v);
    }
    gamma.truncate(max_lag + 1);
    Ok(gamma)
}
