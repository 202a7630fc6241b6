//! Minimal raster drawing: filled rectangles, lines and a 3×5 digit font.

use image::{Rgb, RgbImage};

pub const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
pub const BLACK: Rgb<u8> = Rgb([0, 0, 0]);
pub const GREY: Rgb<u8> = Rgb([200, 200, 200]);

/// Rows of each glyph, three bits wide, most significant bit leftmost.
fn glyph(c: char) -> Option<[u8; 5]> {
    Some(match c {
        '0' => [0b111, 0b101, 0b101, 0b101, 0b111],
        '1' => [0b010, 0b110, 0b010, 0b010, 0b111],
        '2' => [0b111, 0b001, 0b111, 0b100, 0b111],
        '3' => [0b111, 0b001, 0b111, 0b001, 0b111],
        '4' => [0b101, 0b101, 0b111, 0b001, 0b001],
        '5' => [0b111, 0b100, 0b111, 0b001, 0b111],
        '6' => [0b111, 0b100, 0b111, 0b101, 0b111],
        '7' => [0b111, 0b001, 0b010, 0b010, 0b010],
        '8' => [0b111, 0b101, 0b111, 0b101, 0b111],
        '9' => [0b111, 0b101, 0b111, 0b001, 0b111],
        '-' => [0b000, 0b000, 0b111, 0b000, 0b000],
        '.' => [0b000, 0b000, 0b000, 0b000, 0b010],
        ' ' => [0; 5],
        _ => return None,
    })
}

/// Glyph pixel size.
pub const SCALE: u32 = 2;
pub const CHAR_W: u32 = 4 * SCALE;
pub const CHAR_H: u32 = 5 * SCALE;

pub struct Canvas {
    pub img: RgbImage,
}

impl Canvas {
    pub fn new(width: u32, height: u32) -> Self {
        Self { img: RgbImage::from_pixel(width, height, WHITE) }
    }

    /// Clipped to the image.
    pub fn rect(&mut self, x: i64, y: i64, w: i64, h: i64, color: Rgb<u8>) {
        let (iw, ih) = (self.img.width() as i64, self.img.height() as i64);
        for yy in y.max(0)..(y + h).min(ih) {
            for xx in x.max(0)..(x + w).min(iw) {
                self.img.put_pixel(xx as u32, yy as u32, color);
            }
        }
    }

    pub fn hline(&mut self, x0: i64, x1: i64, y: i64, color: Rgb<u8>) {
        self.rect(x0.min(x1), y, (x1 - x0).abs() + 1, 1, color);
    }

    pub fn vline(&mut self, x: i64, y0: i64, y1: i64, color: Rgb<u8>) {
        self.rect(x, y0.min(y1), 1, (y1 - y0).abs() + 1, color);
    }

    /// Draws `text` with its top-left corner at `(x, y)`; unknown characters
    /// are skipped.
    pub fn text(&mut self, x: i64, y: i64, text: &str, color: Rgb<u8>) {
        for (n, c) in text.chars().enumerate() {
            let Some(rows) = glyph(c) else { continue };
            let ox = x + (n as u32 * CHAR_W) as i64;
            for (r, bits) in rows.iter().enumerate() {
                for col in 0..3 {
                    if bits & (0b100 >> col) != 0 {
                        let s = SCALE as i64;
                        self.rect(ox + col * s, y + r as i64 * s, s, s, color);
                    }
                }
            }
        }
    }

    pub fn text_width(text: &str) -> i64 {
        (text.chars().count() as u32 * CHAR_W) as i64
    }
}

/// Tick label with as many decimals as the tick spacing `step` needs.
pub fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step > 0.0 { (-step.log10().floor()).max(0.0) as usize } else { 0 };
    let v = if v.abs() < 1e-9 * step.abs().max(1e-300) { 0.0 } else { v };
    format!("{v:.decimals$}")
}

/// Up to `max` round tick values covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64, max: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / max.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}
