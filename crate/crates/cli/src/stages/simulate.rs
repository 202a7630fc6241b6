use loeve_core::io::{labels_csv, load_model_spec, write_file, write_trials};
use loeve_core::model::{draw_replicate_params, simulate_modulated};

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::layout::Layout;

/// Draws the replicates of the model and writes them with their states.
pub fn simulate(cfg: &PipelineConfig, layout: &Layout) -> Result<String> {
    let path = cfg
        .model
        .as_ref()
        .ok_or_else(|| CliError::Config("simulate needs a model file (`model` or --model)".into()))?;
    let spec = load_model_spec(path)?;
    let params = draw_replicate_params(&spec);
    let sim = simulate_modulated(&spec, &params)?;
    write_trials(&sim.trials, &layout.trials_bin())?;
    if let Some(labels) = &sim.trials.state_labels {
        write_file(&layout.truth_labels(), labels_csv(labels))?;
    }
    Ok(format!(
        "simulated {} trials of length {} at {} Hz from {} state(s)",
        spec.num_replicates,
        spec.series_length,
        spec.sample_rate_hz,
        spec.states.len()
    ))
}
