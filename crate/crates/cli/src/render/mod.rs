//! Static PNG plots of pipeline artifacts.

mod canvas;

use std::path::Path;

use image::{Rgb, RgbImage};
use ndarray::Array2;

use crate::error::{CliError, Result};
use canvas::{tick_label, ticks, Canvas, BLACK, CHAR_H, GREY};

/// Viridis sampled at nine evenly spaced points.
const VIRIDIS: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

const PALETTE: [[u8; 3]; 8] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
];

const MARGIN_LEFT: i64 = 48;
const MARGIN_BOTTOM: i64 = 28;
const MARGIN: i64 = 10;
const TICK: i64 = 4;

/// Viridis color at `t` in `[0, 1]`, linearly interpolated.
pub fn viridis(t: f64) -> Rgb<u8> {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let w = x - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    Rgb(std::array::from_fn(|c| (a[c] as f64 + w * (b[c] as f64 - a[c] as f64)).round() as u8))
}

pub fn category_color(label: usize) -> Rgb<u8> {
    Rgb(PALETTE[label % PALETTE.len()])
}

/// Plot frame: data area inside fixed margins with tick marks and labels.
struct Frame {
    x0: i64,
    y0: i64,
    w: i64,
    h: i64,
}

impl Frame {
    fn new(data_w: i64, data_h: i64) -> (Canvas, Frame) {
        let canvas = Canvas::new((MARGIN_LEFT + data_w + MARGIN) as u32, (MARGIN + data_h + MARGIN_BOTTOM) as u32);
        (canvas, Frame { x0: MARGIN_LEFT, y0: MARGIN, w: data_w, h: data_h })
    }

    fn border(&self, c: &mut Canvas) {
        c.hline(self.x0 - 1, self.x0 + self.w, self.y0 - 1, BLACK);
        c.hline(self.x0 - 1, self.x0 + self.w, self.y0 + self.h, BLACK);
        c.vline(self.x0 - 1, self.y0 - 1, self.y0 + self.h, BLACK);
        c.vline(self.x0 + self.w, self.y0 - 1, self.y0 + self.h, BLACK);
    }

    /// `pos` maps a value to a pixel offset along the axis.
    fn x_ticks(&self, c: &mut Canvas, values: &[f64], pos: impl Fn(f64) -> i64) {
        let y = self.y0 + self.h;
        let step = spacing(values);
        for &v in values {
            let x = self.x0 + pos(v);
            c.vline(x, y, y + TICK, BLACK);
            let label = tick_label(v, step);
            c.text(x - Canvas::text_width(&label) / 2, y + TICK + 3, &label, BLACK);
        }
    }

    /// `pos` measures from the top of the data area.
    fn y_ticks(&self, c: &mut Canvas, values: &[f64], pos: impl Fn(f64) -> i64) {
        let step = spacing(values);
        for &v in values {
            let y = self.y0 + pos(v);
            c.hline(self.x0 - 1 - TICK, self.x0 - 1, y, BLACK);
            let label = tick_label(v, step);
            c.text(self.x0 - TICK - 3 - Canvas::text_width(&label), y - CHAR_H as i64 / 2, &label, BLACK);
        }
    }
}

/// Spacing of evenly spaced ticks; `1` for a single tick.
fn spacing(values: &[f64]) -> f64 {
    match values {
        [a, b, ..] => (b - a).abs(),
        _ => 1.0,
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Heatmap of an `N × N` matrix on the frequency axis `axis_hz`: rows
/// (`f1`) increase upwards, columns (`f2`) to the right; colors span the
/// matrix's own range.
pub fn heatmap(axis_hz: &[f64], values: &Array2<f64>) -> RgbImage {
    let n = axis_hz.len().max(1);
    let cell = (512 / n).max(1) as i64;
    let side = cell * n as i64;
    let (mut c, frame) = Frame::new(side, side);
    let (lo, hi) = range(values.iter().copied());
    let span = if hi > lo { hi - lo } else { 1.0 };
    for ((i, j), &v) in values.indexed_iter() {
        let t = if hi > lo { (v - lo) / span } else { 0.0 };
        let y = frame.y0 + side - (i as i64 + 1) * cell;
        c.rect(frame.x0 + j as i64 * cell, y, cell, cell, viridis(t));
    }
    frame.border(&mut c);
    if let (Some(&a), Some(&b)) = (axis_hz.first(), axis_hz.last()) {
        let step = if n > 1 { (b - a) / (n - 1) as f64 } else { 1.0 };
        let centre = |v: f64| (((v - a) / step + 0.5) * cell as f64).round() as i64;
        let t = ticks(a, b, 6);
        frame.x_ticks(&mut c, &t, centre);
        frame.y_ticks(&mut c, &t, |v| side - centre(v));
    }
    c.img
}

/// Bar chart of singular values in the given order.
pub fn scree(values: &[f64]) -> RgbImage {
    let n = values.len().max(1) as i64;
    let bar = (400 / n).clamp(2, 40);
    let (mut c, frame) = Frame::new(bar * n, 240);
    let top = range(values.iter().copied()).1.max(0.0);
    let scale = if top > 0.0 { frame.h as f64 / top } else { 0.0 };
    for (k, &v) in values.iter().enumerate() {
        let h = (v.max(0.0) * scale).round() as i64;
        let x = frame.x0 + k as i64 * bar;
        c.rect(x + 1, frame.y0 + frame.h - h, (bar - 2).max(1), h, category_color(0));
    }
    frame.border(&mut c);
    frame.y_ticks(&mut c, &ticks(0.0, top, 4), |v| frame.h - (v * scale).round() as i64);
    let step = values.len().div_ceil(10).max(1);
    let idx: Vec<f64> = (1..=values.len()).step_by(step).map(|k| k as f64).collect();
    frame.x_ticks(&mut c, &idx, |v| ((v - 0.5) * bar as f64).round() as i64);
    c.img
}

/// Scatter of `(x, y)` points colored by label.
pub fn scatter(points: &[(f64, f64)], labels: &[usize]) -> RgbImage {
    let side = 360;
    let (mut c, frame) = Frame::new(side, side);
    let pad = |(lo, hi): (f64, f64)| {
        let w = if hi > lo { hi - lo } else { 1.0 };
        (lo - 0.05 * w, hi + 0.05 * w)
    };
    let (xl, xh) = pad(range(points.iter().map(|p| p.0)));
    let (yl, yh) = pad(range(points.iter().map(|p| p.1)));
    let px = |x: f64| ((x - xl) / (xh - xl) * side as f64).round() as i64;
    let py = |y: f64| ((yh - y) / (yh - yl) * side as f64).round() as i64;
    for (p, &(x, y)) in points.iter().enumerate() {
        if x.is_finite() && y.is_finite() {
            let color = category_color(labels.get(p).copied().unwrap_or(0));
            c.rect(frame.x0 + px(x) - 2, frame.y0 + py(y) - 2, 5, 5, color);
        }
    }
    frame.border(&mut c);
    frame.x_ticks(&mut c, &ticks(xl, xh, 4), px);
    frame.y_ticks(&mut c, &ticks(yl, yh, 4), py);
    c.img
}

/// One column per trial: the top row shows cluster labels, the optional
/// bottom row the reference labels.
pub fn label_strip(labels: &[usize], reference: Option<&[usize]>) -> RgbImage {
    let n = labels.len().max(1) as i64;
    let col = (600 / n).clamp(1, 12);
    let row = 24;
    let rows = if reference.is_some() { 2 } else { 1 };
    let (mut c, frame) = Frame::new(col * n, row * rows + (rows - 1) * 4);
    for (t, &l) in labels.iter().enumerate() {
        c.rect(frame.x0 + t as i64 * col, frame.y0, col, row, category_color(l));
    }
    if let Some(truth) = reference {
        for (t, &l) in truth.iter().enumerate() {
            c.rect(frame.x0 + t as i64 * col, frame.y0 + row + 4, col, row, category_color(l));
        }
        c.hline(frame.x0, frame.x0 + frame.w - 1, frame.y0 + row + 1, GREY);
    }
    frame.border(&mut c);
    let step = labels.len().div_ceil(5).max(1);
    let idx: Vec<f64> = (0..labels.len()).step_by(step).map(|t| t as f64).collect();
    frame.x_ticks(&mut c, &idx, |v| (v * col as f64 + col as f64 / 2.0).round() as i64);
    c.img
}

pub fn save_png(img: &RgbImage, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| CliError::Image { path: path.to_path_buf(), message: e.to_string() })
}
