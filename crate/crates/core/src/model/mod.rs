//! Generative models for replicated modulated cyclostationary processes.
//!
//! A trial is `X_t = m(t) U_t`, where `U_t` is a stationary base process and
//! the modulation `m(t)` is a sum of cyclic terms
//!
//! ```text
//! m(t) = Σ_c θ_c α_c a_c(t - δ) exp(i(2π c t / D + φ_c + φ_c(t - δ)))
//! ```
//!
//! over `c = -C..C`, with the `-c` term the complex conjugate of the `c` term
//! so that `m(t)` is real. Only `c >= 0` is specified; the mirror is implied.
//! Products of the cyclic terms place the covariance on lines
//! `f1 - f2 = (c - c') / D`, and slowly varying amplitudes `a_c(t)` broaden
//! those lines. `θ`, `φ` and `δ` are the replicate-specific amplitude
//! factors, phase shifts and time shift.

mod base;
mod simulate;
mod theory;

use std::f64::consts::PI;

use ndarray::Array2;

pub use base::{reflection_coefficients, BaseKind, BaseProcessSpec};
pub use simulate::{draw_replicate_params, simulate_cyclostationary, simulate_modulated, Simulation};
pub use theory::{
    theoretical_covariance, theoretical_covariance_matrix, theoretical_covariance_with, theoretical_loeve_spectrum,
    theoretical_loeve_spectrum_with,
};

use crate::error::{Error, Result};

/// One cyclic term of the modulation (and, implicitly, its conjugate mirror).
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    /// Harmonic index `c >= 0`.
    pub index: u32,
    /// Samples per cycle.
    pub cyclic_period: f64,
    /// `a_c(t)` for `t = 0..T`.
    pub amplitude: Vec<f64>,
    /// Optional frequency modulation `φ_c(t)` in radians.
    pub phase: Option<Vec<f64>>,
    /// Coupling weight `α_c`.
    pub weight: f64,
}

impl ComponentSpec {
    pub fn constant(index: u32, cyclic_period: f64, weight: f64, len: usize) -> Self {
        Self {
            index,
            cyclic_period,
            amplitude: vec![1.0; len],
            phase: None,
            weight,
        }
    }

    /// Cycle frequency `c / D` in cycles per sample.
    pub fn cycle_frequency(&self) -> f64 {
        self.index as f64 / self.cyclic_period
    }

    pub fn has_constant_amplitude(&self) -> bool {
        self.amplitude.windows(2).all(|w| w[0] == w[1])
    }

    /// Fraction of the energy of `a_c` inside `(-c/D, c/D)`, measured on a
    /// zero-padded periodogram. `None` for `c = 0`.
    pub fn band_concentration(&self) -> Option<f64> {
        if self.index == 0 {
            return None;
        }
        let edge = self.cycle_frequency().abs();
        let len = self.amplitude.len();
        let n = (4 * len).next_power_of_two().max(64);
        let mut inside = 0.0;
        let mut total = 0.0;
        for j in 0..n {
            let f = if j <= n / 2 { j as f64 / n as f64 } else { j as f64 / n as f64 - 1.0 };
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &a) in self.amplitude.iter().enumerate() {
                let (s, c) = (2.0 * PI * f * t as f64).sin_cos();
                re += a * c;
                im -= a * s;
            }
            let e = re * re + im * im;
            total += e;
            if f.abs() < edge {
                inside += e;
            }
        }
        Some(if total == 0.0 { 1.0 } else { inside / total })
    }

    /// Mean instantaneous frequency offset `Σ a² φ' / Σ a²` in cycles per sample.
    pub fn mean_frequency_offset(&self) -> f64 {
        let Some(phase) = &self.phase else { return 0.0 };
        let (mut num, mut den) = (0.0, 0.0);
        for t in 1..phase.len() {
            let a2 = self.amplitude[t] * self.amplitude[t];
            num += a2 * (phase[t] - phase[t - 1]) / (2.0 * PI);
            den += a2;
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

/// Components active in one mixture state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub name: String,
    pub components: Vec<ComponentSpec>,
}

impl StateSpec {
    /// Offsets `f1 - f2` (cycles per sample) on which the covariance of this
    /// state has lines: all differences of `±c/D` over component pairs.
    pub fn line_offsets(&self) -> Vec<f64> {
        let mut freqs = Vec::new();
        for comp in &self.components {
            let f = comp.cycle_frequency();
            freqs.push(f);
            if comp.index != 0 {
                freqs.push(-f);
            }
        }
        let mut out: Vec<f64> = Vec::new();
        for &a in &freqs {
            for &b in &freqs {
                let d = a - b;
                if !out.iter().any(|&o| (o - d).abs() < 1e-12) {
                    out.push(d);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn max_index(&self) -> u32 {
        self.components.iter().map(|c| c.index).max().unwrap_or(0)
    }
}

/// Distributions from which replicate parameters are drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateVariation {
    /// `δ` is uniform on `-max_time_shift..=max_time_shift`.
    pub max_time_shift: u32,
    /// `φ_c` (c >= 1) is uniform on `(-phase_spread, phase_spread]`, at most π.
    pub phase_spread: f64,
    /// `θ_c` is uniform on `[lo, hi]`.
    pub amplitude_range: (f64, f64),
}

impl Default for ReplicateVariation {
    fn default() -> Self {
        Self {
            max_time_shift: 0,
            phase_spread: 0.0,
            amplitude_range: (1.0, 1.0),
        }
    }
}

/// Replicate-specific shifts; vectors are indexed by harmonic `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateParams {
    pub time_shift: i64,
    pub phase_shifts: Vec<f64>,
    pub amplitude_factors: Vec<f64>,
}

impl ReplicateParams {
    /// No shift, no phase, unit factors for harmonics `0..=max_index`.
    pub fn unit(max_index: u32) -> Self {
        let n = max_index as usize + 1;
        Self {
            time_shift: 0,
            phase_shifts: vec![0.0; n],
            amplitude_factors: vec![1.0; n],
        }
    }

    pub fn phase(&self, c: u32) -> f64 {
        self.phase_shifts.get(c as usize).copied().unwrap_or(0.0)
    }

    pub fn factor(&self, c: u32) -> f64 {
        self.amplitude_factors.get(c as usize).copied().unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&p0) = self.phase_shifts.first() {
            if p0 != 0.0 {
                return Err(Error::validation("phase shift of harmonic 0 must be exactly 0"));
            }
        }
        if let Some(p) = self.phase_shifts.iter().find(|p| !(**p > -PI && **p <= PI)) {
            return Err(Error::validation(format!("phase shift {p} outside (-π, π]")));
        }
        if let Some(t) = self.amplitude_factors.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(Error::validation(format!("amplitude factor {t} must be >= 0")));
        }
        Ok(())
    }
}

/// Full generative description of a replicated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub base: BaseProcessSpec,
    pub states: Vec<StateSpec>,
    /// Probability vectors over states; replicate `r` uses row `r % rows`.
    pub mixture_weights: Vec<Vec<f64>>,
    pub series_length: usize,
    pub num_replicates: usize,
    pub sample_rate_hz: f64,
    pub rng_seed: u64,
    pub variation: ReplicateVariation,
}

impl ModelSpec {
    /// Single-state model with unit mixture weights.
    pub fn single_state(
        base: BaseProcessSpec,
        components: Vec<ComponentSpec>,
        series_length: usize,
        num_replicates: usize,
        rng_seed: u64,
    ) -> Self {
        Self {
            base,
            states: vec![StateSpec {
                name: "state0".into(),
                components,
            }],
            mixture_weights: vec![vec![1.0]],
            series_length,
            num_replicates,
            sample_rate_hz: 1.0,
            rng_seed,
            variation: ReplicateVariation::default(),
        }
    }

    pub fn max_index(&self) -> u32 {
        self.states.iter().map(StateSpec::max_index).max().unwrap_or(0)
    }

    pub fn state(&self, m: usize) -> Result<&StateSpec> {
        self.states.get(m).ok_or_else(|| {
            Error::validation(format!(
                "state index {m} out of range for {} states",
                self.states.len()
            ))
        })
    }

    /// Hard checks. Returns soft-constraint warnings on success.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.base.validate()?;
        if self.series_length < 2 {
            return Err(Error::validation("series length must be at least 2"));
        }
        if self.num_replicates == 0 {
            return Err(Error::validation("number of replicates must be at least 1"));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::validation("sample rate must be positive"));
        }
        if self.states.is_empty() {
            return Err(Error::validation("model needs at least one state"));
        }
        if self.mixture_weights.is_empty() {
            return Err(Error::validation("mixture weights are empty"));
        }
        for (r, w) in self.mixture_weights.iter().enumerate() {
            if w.len() != self.states.len() {
                return Err(Error::validation(format!(
                    "mixture weight row {r} has {} entries for {} states",
                    w.len(),
                    self.states.len()
                )));
            }
            if w.iter().any(|p| !(*p >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::validation(format!(
                    "mixture weight row {r} is not a probability vector"
                )));
            }
        }
        let v = &self.variation;
        if !(v.phase_spread >= 0.0 && v.phase_spread <= PI) {
            return Err(Error::validation("phase spread must lie in [0, π]"));
        }
        let (lo, hi) = v.amplitude_range;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::validation("amplitude factor range must satisfy 0 <= lo <= hi"));
        }

        let mut warnings = Vec::new();
        for state in &self.states {
            let mut seen = Vec::new();
            for comp in &state.components {
                if seen.contains(&comp.index) {
                    return Err(Error::validation(format!(
                        "state {}: harmonic {} listed twice",
                        state.name, comp.index
                    )));
                }
                seen.push(comp.index);
                if !(comp.cyclic_period.is_finite() && comp.cyclic_period > 0.0) {
                    return Err(Error::validation(format!(
                        "state {}: cyclic period {} must be positive",
                        state.name, comp.cyclic_period
                    )));
                }
                if comp.amplitude.len() != self.series_length {
                    return Err(Error::validation(format!(
                        "state {}: harmonic {} amplitude has {} samples, expected {}",
                        state.name,
                        comp.index,
                        comp.amplitude.len(),
                        self.series_length
                    )));
                }
                if comp.amplitude.iter().any(|a| !a.is_finite()) || !comp.weight.is_finite() {
                    return Err(Error::validation("amplitudes and weights must be finite"));
                }
                if let Some(phase) = &comp.phase {
                    if comp.index == 0 {
                        return Err(Error::validation(
                            "harmonic 0 cannot carry frequency modulation",
                        ));
                    }
                    if phase.len() != self.series_length || phase.iter().any(|p| !p.is_finite()) {
                        return Err(Error::validation(format!(
                            "state {}: harmonic {} phase must have {} finite samples",
                            state.name, comp.index, self.series_length
                        )));
                    }
                    let offset = comp.mean_frequency_offset();
                    if offset.abs() > 0.1 * comp.cycle_frequency() {
                        warnings.push(format!(
                            "state {}: harmonic {} frequency modulation shifts the mean frequency by {offset:.4} cycles/sample",
                            state.name, comp.index
                        ));
                    }
                }
                if let Some(conc) = comp.band_concentration() {
                    if conc < 0.99 {
                        warnings.push(format!(
                            "state {}: harmonic {} amplitude keeps only {:.2}% of its energy inside ±c/D",
                            state.name,
                            comp.index,
                            100.0 * conc
                        ));
                    }
                }
            }
        }
        Ok(warnings)
    }

    /// Real modulation `m(t)` of state `m` for one replicate, `t = 0..T`.
    pub fn modulation(&self, state: usize, params: &ReplicateParams) -> Result<Vec<f64>> {
        let st = self.state(state)?;
        let len = self.series_length;
        Ok((0..len as i64)
            .map(|t| modulation_at(st, params, len, t))
            .collect())
    }
}

/// `m(t)` at any integer `t`; amplitudes and phases are indexed circularly.
pub(crate) fn modulation_at(state: &StateSpec, params: &ReplicateParams, len: usize, t: i64) -> f64 {
    let idx = (t - params.time_shift).rem_euclid(len as i64) as usize;
    let mut m = 0.0;
    for comp in &state.components {
        let scale = params.factor(comp.index) * comp.weight * comp.amplitude[idx];
        if comp.index == 0 {
            m += scale;
        } else {
            let fm = comp.phase.as_ref().map_or(0.0, |p| p[idx]);
            let angle = 2.0 * PI * comp.cycle_frequency() * t as f64 + params.phase(comp.index) + fm;
            m += 2.0 * scale * angle.cos();
        }
    }
    m
}

/// Replicated series, one row per replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMatrix {
    pub data: Array2<f64>,
    pub sample_rate_hz: f64,
    pub state_labels: Option<Vec<usize>>,
}

impl TrialMatrix {
    pub fn new(data: Array2<f64>, sample_rate_hz: f64) -> Result<Self> {
        let (r, t) = data.dim();
        if r < 1 || t < 2 {
            return Err(Error::validation(format!(
                "trial matrix must be at least 1 x 2, got {r} x {t}"
            )));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::validation("sample rate must be positive"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("trial data must be finite"));
        }
        Ok(Self {
            data,
            sample_rate_hz,
            state_labels: None,
        })
    }

    pub fn num_replicates(&self) -> usize {
        self.data.nrows()
    }

    pub fn series_length(&self) -> usize {
        self.data.ncols()
    }

    pub fn trial(&self, r: usize) -> Vec<f64> {
        self.data.row(r).to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulation_is_real_cosine_pair() {
        let len = 16;
        let st = StateSpec {
            name: "s".into(),
            components: vec![
                ComponentSpec::constant(0, 8.0, 1.0, len),
                ComponentSpec::constant(1, 8.0, 0.25, len),
            ],
        };
        let p = ReplicateParams::unit(1);
        for t in 0..len as i64 {
            let want = 1.0 + 0.5 * (2.0 * PI * t as f64 / 8.0).cos();
            assert!((modulation_at(&st, &p, len, t) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn line_offsets_of_first_harmonic() {
        let st = StateSpec {
            name: "s".into(),
            components: vec![
                ComponentSpec::constant(0, 8.0, 1.0, 4),
                ComponentSpec::constant(1, 8.0, 0.5, 4),
            ],
        };
        let lines = st.line_offsets();
        let want = [-0.25, -0.125, 0.0, 0.125, 0.25];
        assert_eq!(lines.len(), want.len());
        for (a, b) in lines.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn replicate_params_validation() {
        let mut p = ReplicateParams::unit(2);
        assert!(p.validate().is_ok());
        p.phase_shifts[0] = 0.1;
        assert!(p.validate().is_err());
        let mut p = ReplicateParams::unit(2);
        p.phase_shifts[1] = -PI;
        assert!(p.validate().is_err());
        p.phase_shifts[1] = PI;
        assert!(p.validate().is_ok());
        p.amplitude_factors[2] = -0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn band_concentration_flags_fast_amplitudes() {
        let len = 256;
        let slow: Vec<f64> = (0..len)
            .map(|t| (-0.5 * ((t as f64 - 128.0) / 32.0).powi(2)).exp())
            .collect();
        let fast: Vec<f64> = (0..len)
            .map(|t| 1.0 + (2.0 * PI * 0.3 * t as f64).cos())
            .collect();
        let mut comp = ComponentSpec::constant(1, 8.0, 1.0, len);
        comp.amplitude = slow;
        assert!(comp.band_concentration().unwrap() > 0.999);
        comp.amplitude = fast;
        assert!(comp.band_concentration().unwrap() < 0.9);
    }

    #[test]
    fn spec_validation_errors() {
        let len = 32;
        let mut spec = ModelSpec::single_state(
            BaseProcessSpec::white(1.0),
            vec![ComponentSpec::constant(0, 8.0, 1.0, len)],
            len,
            4,
            1,
        );
        assert!(spec.validate().unwrap().is_empty());
        spec.states[0].components[0].cyclic_period = 0.0;
        assert!(matches!(spec.validate(), Err(Error::Validation(_))));
        spec.states[0].components[0].cyclic_period = 8.0;
        spec.num_replicates = 0;
        assert!(spec.validate().is_err());
        spec.num_replicates = 2;
        spec.mixture_weights = vec![vec![0.4]];
        assert!(spec.validate().is_err());
    }
}
