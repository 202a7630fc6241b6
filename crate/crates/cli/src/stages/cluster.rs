use loeve_core::io::{parse_labels_csv, write_file};
use loeve_core::kmeans::label_accuracy;
use loeve_core::{inertia_elbow, kmeans_loadings};
use ndarray::s;

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::layout::{read_text, Layout};
use crate::tables::{numeric_csv, parse_numeric_csv};

/// Cluster counts tried for the inertia elbow table.
const ELBOW_KS: [usize; 6] = [1, 2, 3, 4, 5, 6];

/// Ground-truth states when the trials came from `simulate` and the label
/// file matches the trial count.
pub(crate) fn truth_labels(cfg: &PipelineConfig, layout: &Layout, num_trials: usize) -> Result<Option<Vec<usize>>> {
    let path = layout.truth_labels();
    if cfg.trials.is_some() || !path.exists() {
        return Ok(None);
    }
    let text = read_text(&path, "simulate")?;
    let labels = parse_labels_csv(&text, &path.display().to_string())?;
    Ok((labels.len() == num_trials).then_some(labels))
}

/// k-means on the leading loadings; reports accuracy against simulated
/// states when they are known.
pub fn cluster(cfg: &PipelineConfig, layout: &Layout) -> Result<String> {
    let path = layout.loadings();
    let (header, table) = parse_numeric_csv(&read_text(&path, "decompose")?, &path)?;
    if table.ncols() < 2 || table.nrows() == 0 {
        return Err(CliError::Config(format!("{} holds no loadings", path.display())));
    }
    let loadings = table.slice(s![.., 1..]).to_owned();
    if cfg.cluster_k > loadings.nrows() {
        return Err(CliError::Config(format!(
            "cluster_k = {} exceeds the {} trials",
            cfg.cluster_k,
            loadings.nrows()
        )));
    }
    let fit = kmeans_loadings(&loadings, cfg.cluster_k, cfg.cluster_dims, cfg.seed)?;
    let truth = truth_labels(cfg, layout, loadings.nrows())?;

    let mut cols = vec!["trial".to_string(), "cluster".into()];
    if truth.is_some() {
        cols.push("state".into());
    }
    let rows = (0..loadings.nrows()).map(|r| {
        let mut row = vec![table[[r, 0]], fit.labels[r] as f64];
        if let Some(t) = &truth {
            row.push(t[r] as f64);
        }
        row
    });
    write_file(&layout.cluster_labels(), numeric_csv(&cols, rows))?;

    let mut cols = vec!["cluster".to_string()];
    cols.extend(header[1..=cfg.cluster_dims].iter().cloned());
    let rows = fit.centroids.rows().into_iter().enumerate().map(|(c, row)| {
        let mut out = vec![c as f64];
        out.extend(row.iter());
        out
    });
    write_file(&layout.centroids(), numeric_csv(&cols, rows))?;

    let elbow = inertia_elbow(&loadings, cfg.cluster_dims, &ELBOW_KS, cfg.seed)?;
    let rows = elbow.iter().map(|&(k, inertia)| vec![k as f64, inertia]);
    write_file(&layout.elbow(), numeric_csv(&["k".into(), "inertia".into()], rows))?;

    let accuracy = truth.as_ref().map(|t| label_accuracy(&fit.labels, t));
    let mut summary = format!(
        "clusters = {}\ndims = {}\ninertia = {:?}\n",
        cfg.cluster_k, cfg.cluster_dims, fit.inertia
    );
    if let Some(a) = accuracy {
        summary.push_str(&format!("accuracy = {a:?}\n"));
    }
    write_file(&layout.cluster_summary(), summary)?;

    let mut sizes = vec![0usize; cfg.cluster_k];
    fit.labels.iter().for_each(|&l| sizes[l] += 1);
    let mut msg = format!("clustered {} trials into sizes {sizes:?}", loadings.nrows());
    if let Some(a) = accuracy {
        msg.push_str(&format!("; accuracy against simulated states {:.1}%", 100.0 * a));
    }
    Ok(msg)
}
