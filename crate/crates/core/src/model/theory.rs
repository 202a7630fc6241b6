//! Closed-form second-order structure of the generative model.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{modulation_at, ModelSpec, ReplicateParams};
use crate::dfm::{hermitian_from_upper, DualFrequencyMatrix, MatrixKind};
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, DEFAULT_MAX_FREQUENCIES};

/// `Cov(X_t, X_{t-l})` for state `state` with unit replicate parameters.
pub fn theoretical_covariance(spec: &ModelSpec, state: usize, t: usize, lag: i64) -> Result<f64> {
    let params = ReplicateParams::unit(spec.max_index());
    theoretical_covariance_with(spec, state, &params, t, lag)
}

/// `Cov(X_t, X_{t-l}) = m(t) m(t-l) s̃(l)` for one replicate's parameters.
///
/// Amplitudes are indexed circularly, so `t - l` may fall outside `0..T`.
pub fn theoretical_covariance_with(
    spec: &ModelSpec,
    state: usize,
    params: &ReplicateParams,
    t: usize,
    lag: i64,
) -> Result<f64> {
    let len = spec.series_length;
    let st = spec.state(state)?;
    if t >= len || lag.unsigned_abs() as usize >= len {
        return Err(Error::validation(format!(
            "(t, l) = ({t}, {lag}) outside 0 <= t < {len}, |l| < {len}"
        )));
    }
    let acvf = spec.base.autocovariance(lag.unsigned_abs() as usize)?;
    let s = acvf[lag.unsigned_abs() as usize];
    let t = t as i64;
    Ok(modulation_at(st, params, len, t) * modulation_at(st, params, len, t - lag) * s)
}

/// Full `T × T` matrix `Cov(X_t, X_s) = m(t) m(s) s̃(t - s)` for one
/// replicate's parameters.
pub fn theoretical_covariance_matrix(spec: &ModelSpec, state: usize, params: &ReplicateParams) -> Result<Array2<f64>> {
    let len = spec.series_length;
    let m = spec.modulation(state, params)?;
    let acvf = spec.base.autocovariance(len.saturating_sub(1))?;
    Ok(Array2::from_shape_fn((len, len), |(t, s)| m[t] * m[s] * acvf[t.abs_diff(s)]))
}

/// Finite-sample Loève spectrum `E[J(f1) J*(f2)]` of state `state`, where
/// `J(f) = T^{-1/2} Σ_t X_t e^{-2πift}`, with unit replicate parameters.
pub fn theoretical_loeve_spectrum(
    spec: &ModelSpec,
    state: usize,
    grid: &FrequencyGrid,
) -> Result<DualFrequencyMatrix> {
    let params = ReplicateParams::unit(spec.max_index());
    theoretical_loeve_spectrum_with(spec, state, &params, grid)
}

/// Loève spectrum for given replicate parameters.
///
/// With `M(g) = Σ_t m(t) e^{-2πigt}` and `S̃_j` the transform of the base
/// autocovariance on lags `|l| < T` at `λ_j = j/n`, `n = 2T`,
///
/// ```text
/// S(f1, f2) = (1 / (T n)) Σ_j S̃_j M(f1 - λ_j) M*(f2 - λ_j).
/// ```
///
/// Each cyclic term of `m` contributes a kernel `A_c` centred at `c/D`, so
/// the products place mass near the lines `f1 - f2 = (c - c')/D`.
pub fn theoretical_loeve_spectrum_with(
    spec: &ModelSpec,
    state: usize,
    params: &ReplicateParams,
    grid: &FrequencyGrid,
) -> Result<DualFrequencyMatrix> {
    grid.check_size(DEFAULT_MAX_FREQUENCIES)?;
    let len = spec.series_length;
    let modulation = spec.modulation(state, params)?;
    let acvf = spec.base.autocovariance(len - 1)?;
    let n = 2 * len;

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut base = vec![Complex64::new(0.0, 0.0); n];
    base[0] = Complex64::new(acvf[0], 0.0);
    for l in 1..len {
        base[l] = Complex64::new(acvf[l], 0.0);
        base[n - l] = Complex64::new(acvf[l], 0.0);
    }
    forward.process(&mut base);
    let weights: Vec<f64> = base.iter().map(|z| z.re).collect();

    let nf = grid.len();
    let mut kernel = Array2::<Complex64>::zeros((nf, n));
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, &f) in grid.frequencies().iter().enumerate() {
        buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (t, &m) in modulation.iter().enumerate() {
            buf[t] = Complex64::from_polar(m, -2.0 * std::f64::consts::PI * f * t as f64);
        }
        // Unnormalized inverse transform: Σ_t y_t e^{+2πijt/n} = M(f - j/n).
        inverse.process(&mut buf);
        for j in 0..n {
            kernel[[i, j]] = buf[j];
        }
    }

    let scale = 1.0 / (len as f64 * n as f64);
    let values = hermitian_from_upper(nf, |a, b| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += kernel[[a, j]] * kernel[[b, j]].conj() * weights[j];
        }
        acc * scale
    });
    DualFrequencyMatrix::new(values, grid.clone(), MatrixKind::Spectrum)
}
