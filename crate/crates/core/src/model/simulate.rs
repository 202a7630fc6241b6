use std::f64::consts::PI;

use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;

use super::{modulation_at, ModelSpec, ReplicateParams, TrialMatrix};
use crate::error::{Error, Result};
use crate::rng::{substream, Purpose};

/// Simulated trials together with any soft-constraint warnings.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub trials: TrialMatrix,
    pub params: Vec<ReplicateParams>,
    pub warnings: Vec<String>,
}

/// Simulates a cyclostationary model: constant amplitudes and no replicate
/// variation. Identical (same seed) to [`simulate_modulated`] with unit
/// replicate parameters.
pub fn simulate_cyclostationary(spec: &ModelSpec) -> Result<Simulation> {
    for state in &spec.states {
        if let Some(c) = state.components.iter().find(|c| !c.has_constant_amplitude()) {
            return Err(Error::validation(format!(
                "state {}: harmonic {} has a time-varying amplitude; use simulate_modulated",
                state.name, c.index
            )));
        }
    }
    let params = vec![ReplicateParams::unit(spec.max_index()); spec.num_replicates];
    simulate_modulated(spec, &params)
}

/// Simulates every replicate: draws its state, its base series, and applies
/// the modulation with the replicate's shift, phases and factors.
pub fn simulate_modulated(spec: &ModelSpec, params: &[ReplicateParams]) -> Result<Simulation> {
    let warnings = spec.validate()?;
    if params.len() != spec.num_replicates {
        return Err(Error::validation(format!(
            "{} replicate parameter sets for {} replicates",
            params.len(),
            spec.num_replicates
        )));
    }
    for p in params {
        p.validate()?;
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let len = spec.series_length;
    let rows: Vec<(usize, Vec<f64>)> = params
        .par_iter()
        .enumerate()
        .map(|(r, p)| {
            let state = draw_state(spec, r);
            let mut rng = substream(spec.rng_seed, Purpose::Innovations, r as u64);
            let u = spec.base.simulate(len, &mut rng)?;
            let st = &spec.states[state];
            let x = u
                .iter()
                .enumerate()
                .map(|(t, ut)| modulation_at(st, p, len, t as i64) * ut)
                .collect();
            Ok((state, x))
        })
        .collect::<Result<_>>()?;

    let mut data = Array2::zeros((spec.num_replicates, len));
    let mut labels = Vec::with_capacity(rows.len());
    for (r, (state, x)) in rows.into_iter().enumerate() {
        labels.push(state);
        data.row_mut(r).assign(&ndarray::Array1::from(x));
    }
    let mut trials = TrialMatrix::new(data, spec.sample_rate_hz)?;
    trials.state_labels = Some(labels);
    Ok(Simulation {
        trials,
        params: params.to_vec(),
        warnings,
    })
}

fn draw_state(spec: &ModelSpec, r: usize) -> usize {
    let weights = &spec.mixture_weights[r % spec.mixture_weights.len()];
    let mut rng = substream(spec.rng_seed, Purpose::MixtureState, r as u64);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (m, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return m;
        }
    }
    // Rounding in the cumulative sum: take the last state with positive weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Draws replicate parameters from the model's variation distributions.
pub fn draw_replicate_params(spec: &ModelSpec) -> Vec<ReplicateParams> {
    let v = &spec.variation;
    let n = spec.max_index() as usize + 1;
    (0..spec.num_replicates)
        .map(|r| {
            let mut rng = substream(spec.rng_seed, Purpose::ReplicateParams, r as u64);
            let shift = v.max_time_shift as i64;
            let time_shift = if shift > 0 { rng.random_range(-shift..=shift) } else { 0 };
            let phase_shifts = (0..n)
                .map(|c| {
                    if c == 0 || v.phase_spread == 0.0 {
                        0.0
                    } else {
                        // Uniform on (-s, s]: reflect the half-open [0, 1) draw.
                        let u: f64 = rng.random();
                        v.phase_spread * (1.0 - 2.0 * u)
                    }
                })
                .map(|p: f64| if p <= -PI { PI } else { p })
                .collect();
            let (lo, hi) = v.amplitude_range;
            let amplitude_factors = (0..n)
                .map(|_| if hi > lo { rng.random_range(lo..=hi) } else { lo })
                .collect();
            ReplicateParams {
                time_shift,
                phase_shifts,
                amplitude_factors,
            }
        })
        .collect()
}
