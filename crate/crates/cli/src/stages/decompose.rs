use loeve_core::io::{parse_threshold_csv, read_dfm, write_file};
use loeve_core::{build_stack, sparsity_metrics, svd_stack};
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::layout::{read_text, require, Layout};
use crate::tables::{matrix_csv, numeric_csv, parse_numeric_csv};

/// Number of trials recorded by the threshold stage.
pub(crate) fn thresholded_trials(layout: &Layout) -> Result<usize> {
    let path = layout.threshold_summary();
    let (_, table) = parse_numeric_csv(&read_text(&path, "threshold")?, &path)?;
    Ok(table.nrows())
}

/// Stacks thresholded trials, takes the truncated SVD and writes singular
/// values, loadings, components (also on the dual-frequency layout) and
/// sparsity records.
pub fn decompose(cfg: &PipelineConfig, layout: &Layout) -> Result<String> {
    let n = thresholded_trials(layout)?;
    let results = (0..n)
        .into_par_iter()
        .map(|r| {
            let (bin, table) = (layout.thresholded(r), layout.threshold_table(r));
            require(&bin, "threshold")?;
            let text = read_text(&table, "threshold")?;
            Ok(parse_threshold_csv(&text, read_dfm(&bin)?, &table.display().to_string())?)
        })
        .collect::<Result<Vec<_>>>()?;
    let stack = build_stack(&results, cfg.band())?;
    let max_keep = stack.num_trials().min(stack.num_pairs());
    if cfg.svd_k_keep > max_keep {
        return Err(CliError::Config(format!(
            "svd_k_keep = {} exceeds min(trials, pairs) = {max_keep}",
            cfg.svd_k_keep
        )));
    }
    let svd = svd_stack(&stack, cfg.svd_k_keep)?;
    let k = svd.k_keep();
    let grid = &stack.grid;

    let sv_rows = svd.singular_values.iter().enumerate().map(|(i, &v)| vec![(i + 1) as f64, v]);
    write_file(&layout.singular_values(), numeric_csv(&["index".into(), "value".into()], sv_rows))?;

    let mut header = vec!["trial".to_string()];
    header.extend((1..=k).map(|c| format!("u{c}")));
    let rows = (0..stack.num_trials()).map(|r| {
        let mut row = vec![stack.trial_ids[r] as f64];
        row.extend(svd.loadings.row(r).iter());
        row
    });
    write_file(&layout.loadings(), numeric_csv(&header, rows))?;

    let mut header = vec!["f1_hz".to_string(), "f2_hz".into()];
    header.extend((1..=k).map(|c| format!("v{c}")));
    let rows = stack.pair_index.iter().enumerate().map(|(p, &(i, j))| {
        let mut row = vec![grid.hz(i), grid.hz(j)];
        row.extend(svd.components.row(p).iter());
        row
    });
    write_file(&layout.components(), numeric_csv(&header, rows))?;

    for c in 0..k {
        let column: Vec<f64> = svd.components.column(c).to_vec();
        write_file(&layout.component_layout(c + 1), matrix_csv(grid, &stack.to_layout(&column)?))?;
    }

    let records = sparsity_metrics(&stack, &svd)?;
    let mut header = vec!["trial".to_string(), "fraction_nonzero".into()];
    header.extend((1..=k.min(3)).map(|c| format!("loading_{c}")));
    let rows = records.iter().map(|rec| {
        let mut row = vec![rec.trial as f64, rec.fraction_nonzero];
        row.extend(&rec.loadings);
        row
    });
    write_file(&layout.sparsity(), numeric_csv(&header, rows))?;

    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    let kept: f64 = svd.singular_values[..k].iter().map(|s| s * s).sum();
    Ok(format!(
        "decomposed a {} x {} stack; {k} components keep {:.1}% of the energy",
        stack.num_trials(),
        stack.num_pairs(),
        if total > 0.0 { 100.0 * kept / total } else { 0.0 }
    ))
}
