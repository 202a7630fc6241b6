use std::path::Path;

use loeve_core::io::{read_dfm, write_file};
use ndarray::{s, Array2};

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::layout::{read_text, Layout};
use crate::render::{heatmap, label_strip, save_png, scatter, scree};
use crate::tables::{matrix_csv, numeric_csv, parse_numeric_csv};

/// Writes `name.png` and `name.csv` side by side in the render directory.
fn emit(layout: &Layout, name: &str, img: &image::RgbImage, csv: &str) -> Result<()> {
    let dir = layout.render_dir();
    write_file(&dir.join(format!("{name}.csv")), csv)?;
    save_png(img, &dir.join(format!("{name}.png")))
}

fn dfm_heatmap(layout: &Layout, path: &Path, name: &str) -> Result<()> {
    let m = read_dfm(path)?;
    let modulus = m.modulus();
    let axis: Vec<f64> = (0..m.len()).map(|i| m.grid.hz(i)).collect();
    emit(layout, name, &heatmap(&axis, &modulus), &matrix_csv(&m.grid, &modulus))
}

/// Reads a table written by [`matrix_csv`] back into its axis and values.
fn parse_matrix_csv(text: &str, path: &Path) -> Result<(Vec<f64>, Array2<f64>)> {
    let (header, table) = parse_numeric_csv(text, path)?;
    let axis = header[1..]
        .iter()
        .map(|h| h.parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("{}: header is not a frequency axis", path.display())))?;
    if table.nrows() != axis.len() {
        return Err(CliError::Config(format!(
            "{}: {} rows for a {}-point axis",
            path.display(),
            table.nrows(),
            axis.len()
        )));
    }
    Ok((axis, table.slice(s![.., 1..]).to_owned()))
}

/// Renders every artifact present in the output directory.
pub fn render(_cfg: &PipelineConfig, layout: &Layout) -> Result<String> {
    let mut count = 0;

    let mut batch = 0;
    while layout.batch_mean(batch).exists() {
        dfm_heatmap(layout, &layout.batch_mean(batch), &format!("batch_mean_{batch:02}"))?;
        batch += 1;
        count += 1;
    }
    if layout.thresholded(0).exists() {
        dfm_heatmap(layout, &layout.thresholded(0), "thresholded_trial_0000")?;
        count += 1;
    }

    let mut c = 1;
    while layout.component_layout(c).exists() {
        let path = layout.component_layout(c);
        let text = read_text(&path, "decompose")?;
        let (axis, values) = parse_matrix_csv(&text, &path)?;
        emit(layout, &format!("component_{c:02}"), &heatmap(&axis, &values), &text)?;
        c += 1;
        count += 1;
    }
    if layout.singular_values().exists() {
        let path = layout.singular_values();
        let text = read_text(&path, "decompose")?;
        let (_, table) = parse_numeric_csv(&text, &path)?;
        if table.ncols() >= 2 {
            emit(layout, "scree", &scree(&table.column(1).to_vec()), &text)?;
            count += 1;
        }
    }

    let clusters = if layout.cluster_labels().exists() {
        let path = layout.cluster_labels();
        let text = read_text(&path, "cluster")?;
        let (header, table) = parse_numeric_csv(&text, &path)?;
        let col = |j: usize| table.column(j).iter().map(|&v| v as usize).collect::<Vec<_>>();
        let labels = col(1);
        let truth = (header.len() > 2).then(|| col(2));
        emit(layout, "labels", &label_strip(&labels, truth.as_deref()), &text)?;
        count += 1;
        Some(labels)
    } else {
        None
    };
    if layout.loadings().exists() {
        let path = layout.loadings();
        let (_, table) = parse_numeric_csv(&read_text(&path, "decompose")?, &path)?;
        let n = table.nrows();
        let labels = clusters.filter(|l| l.len() == n).unwrap_or_else(|| vec![0; n]);
        let (xs, ys): (Vec<f64>, Vec<f64>) = if table.ncols() >= 3 {
            (table.column(1).to_vec(), table.column(2).to_vec())
        } else {
            (table.column(0).to_vec(), table.column(1).to_vec())
        };
        let points: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
        let rows = (0..n).map(|r| vec![table[[r, 0]], points[r].0, points[r].1, labels[r] as f64]);
        let csv = numeric_csv(&["trial".into(), "x".into(), "y".into(), "cluster".into()], rows);
        emit(layout, "loadings", &scatter(&points, &labels), &csv)?;
        count += 1;
    }

    if count == 0 {
        return Err(CliError::MissingStage { path: layout.run_log(), command: "estimate" });
    }
    Ok(format!("rendered {count} figures to {}", layout.render_dir().display()))
}
