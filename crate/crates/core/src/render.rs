//! Raster heatmaps of scale-by-time grids.
//!
//! One cell maps to a `cell_width x cell_height` pixel block. Rows run top
//! to bottom in increasing period (rows are already evenly spaced in
//! log2 period), columns run left to right in time. Cells inside the cone
//! of influence are dimmed, significant areas are outlined in black and
//! phase arrows point right for in-phase and up when the first series
//! leads.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{MaskGrid, RealGrid};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, fill: [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            pixels.extend_from_slice(&fill);
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        if x < self.width && y < self.height {
            let i = (y * self.width + x) * 3;
            self.pixels[i..i + 3].copy_from_slice(&rgb);
        }
    }

    /// Binary PPM (`P6`).
    pub fn write_ppm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)
    }

    pub fn write_png<W: Write>(&self, out: W) -> Result<()> {
        let mut enc = png::Encoder::new(out, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::Numeric(format!("png encoding: {e}")))?;
        writer
            .write_image_data(&self.pixels)
            .map_err(|e| Error::Numeric(format!("png encoding: {e}")))?;
        writer
            .finish()
            .map_err(|e| Error::Numeric(format!("png encoding: {e}")))
    }

    /// Writes PPM for a `.ppm` extension, PNG otherwise.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("ppm"))
        {
            self.write_ppm(&mut buf).map_err(|e| Error::io(path, e))?;
        } else {
            self.write_png(&mut buf)?;
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

/// Viridis control points, dark blue to yellow.
const RAMP: [[f64; 3]; 9] = [
    [68.0, 1.0, 84.0],
    [71.0, 44.0, 122.0],
    [59.0, 81.0, 139.0],
    [44.0, 113.0, 142.0],
    [33.0, 144.0, 141.0],
    [39.0, 173.0, 129.0],
    [92.0, 200.0, 99.0],
    [170.0, 220.0, 50.0],
    [253.0, 231.0, 37.0],
];

/// Maps `t` in `[0, 1]` (clamped) onto the color ramp.
pub fn color_ramp(t: f64) -> [u8; 3] {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let pos = t * (RAMP.len() - 1) as f64;
    let i = (pos.floor() as usize).min(RAMP.len() - 2);
    let f = pos - i as f64;
    let mut rgb = [0u8; 3];
    for (c, slot) in rgb.iter_mut().enumerate() {
        *slot = (RAMP[i][c] + (RAMP[i + 1][c] - RAMP[i][c]) * f).round() as u8;
    }
    rgb
}

fn dim(rgb: [u8; 3]) -> [u8; 3] {
    rgb.map(|c| (c as f64 * 0.45 + 255.0 * 0.25).round() as u8)
}

const BLACK: [u8; 3] = [0, 0, 0];

/// Unit arrow for a phase in screen coordinates (`y` grows downward):
/// `0` points right, `pi/2` points up.
pub fn arrow_vector(phase: f64) -> (f64, f64) {
    (phase.cos(), -phase.sin())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ValueRange {
    /// Grid minimum to maximum.
    Auto,
    Fixed(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatmapStyle {
    pub cell_width: usize,
    pub cell_height: usize,
    pub arrow_every_cols: usize,
    pub arrow_every_rows: usize,
    pub range: ValueRange,
}

impl Default for HeatmapStyle {
    fn default() -> Self {
        Self {
            cell_width: 3,
            cell_height: 4,
            arrow_every_cols: 8,
            arrow_every_rows: 4,
            range: ValueRange::Auto,
        }
    }
}

/// What to draw. `mask` adds contours and restricts arrows to significant
/// cells; `phase` adds arrows.
#[derive(Clone, Copy, Debug)]
pub struct HeatmapLayers<'a> {
    pub grid: &'a RealGrid,
    pub periods: &'a [f64],
    pub coi: &'a [f64],
    pub mask: Option<&'a MaskGrid>,
    pub phase: Option<&'a RealGrid>,
}

pub fn render_heatmap(layers: &HeatmapLayers<'_>, style: &HeatmapStyle) -> Result<RgbImage> {
    let grid = layers.grid;
    let (rows, cols) = grid.shape();
    if layers.periods.len() != rows
        || layers.coi.len() != cols
        || layers.mask.is_some_and(|m| m.shape() != grid.shape())
        || layers.phase.is_some_and(|p| p.shape() != grid.shape())
    {
        return Err(Error::GridMismatch(
            "heatmap layers disagree on shape".into(),
        ));
    }
    if style.cell_width == 0 || style.cell_height == 0 {
        return Err(Error::InvalidParams("cell size must be positive".into()));
    }
    let (lo, hi) = match style.range {
        ValueRange::Fixed(lo, hi) => (lo, hi),
        ValueRange::Auto => grid
            .as_slice()
            .iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            }),
    };
    let span = hi - lo;
    let scale = |v: f64| {
        if span > 0.0 && span.is_finite() {
            (v - lo) / span
        } else {
            0.0
        }
    };

    let (cw, ch) = (style.cell_width, style.cell_height);
    let mut img = RgbImage::new(cols * cw, rows * ch, BLACK);
    for j in 0..rows {
        for n in 0..cols {
            let mut rgb = color_ramp(scale(*grid.get(j, n)));
            if layers.periods[j] >= layers.coi[n] {
                rgb = dim(rgb);
            }
            for y in j * ch..(j + 1) * ch {
                for x in n * cw..(n + 1) * cw {
                    img.put(x, y, rgb);
                }
            }
        }
    }

    if let Some(mask) = layers.mask {
        draw_contours(&mut img, mask, cw, ch);
    }

    if let Some(phase) = layers.phase {
        let er = style.arrow_every_rows.max(1);
        let ec = style.arrow_every_cols.max(1);
        let len = ((ec * cw).min(er * ch) as f64 * 0.45).max(2.0);
        for j in (er / 2..rows).step_by(er) {
            for n in (ec / 2..cols).step_by(ec) {
                if layers.mask.is_some_and(|m| !*m.get(j, n)) {
                    continue;
                }
                let cx = (n * cw) as f64 + cw as f64 / 2.0;
                let cy = (j * ch) as f64 + ch as f64 / 2.0;
                draw_arrow(&mut img, cx, cy, *phase.get(j, n), len);
            }
        }
    }
    Ok(img)
}

/// Black outline along cell edges that separate significant from
/// non-significant cells.
fn draw_contours(img: &mut RgbImage, mask: &MaskGrid, cw: usize, ch: usize) {
    let (rows, cols) = mask.shape();
    let off = |j: usize, n: usize, dj: i64, dn: i64| -> bool {
        let r = j as i64 + dj;
        let c = n as i64 + dn;
        r < 0 || c < 0 || r >= rows as i64 || c >= cols as i64 || !*mask.get(r as usize, c as usize)
    };
    for j in 0..rows {
        for n in 0..cols {
            if !*mask.get(j, n) {
                continue;
            }
            let (x0, y0) = (n * cw, j * ch);
            if off(j, n, -1, 0) {
                (x0..x0 + cw).for_each(|x| img.put(x, y0, BLACK));
            }
            if off(j, n, 1, 0) {
                (x0..x0 + cw).for_each(|x| img.put(x, y0 + ch - 1, BLACK));
            }
            if off(j, n, 0, -1) {
                (y0..y0 + ch).for_each(|y| img.put(x0, y, BLACK));
            }
            if off(j, n, 0, 1) {
                (y0..y0 + ch).for_each(|y| img.put(x0 + cw - 1, y, BLACK));
            }
        }
    }
}

fn draw_line(img: &mut RgbImage, x0: f64, y0: f64, x1: f64, y1: f64) {
    let steps = ((x1 - x0).abs().max((y1 - y0).abs()).ceil() as usize).max(1) * 2;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let x = x0 + (x1 - x0) * t;
        let y = y0 + (y1 - y0) * t;
        if x >= 0.0 && y >= 0.0 {
            img.put(x as usize, y as usize, BLACK);
        }
    }
}

fn draw_arrow(img: &mut RgbImage, cx: f64, cy: f64, phase: f64, len: f64) {
    let (dx, dy) = arrow_vector(phase);
    let (tx, ty) = (cx + dx * len / 2.0, cy + dy * len / 2.0);
    draw_line(img, cx - dx * len / 2.0, cy - dy * len / 2.0, tx, ty);
    let head = len * 0.35;
    for turn in [2.6f64, -2.6] {
        let (s, c) = turn.sin_cos();
        let hx = dx * c - dy * s;
        let hy = dx * s + dy * c;
        draw_line(img, tx, ty, tx + hx * head, ty + hy * head);
    }
}

/// Stacks images top to bottom with a white gap; narrower images are
/// padded on the right.
pub fn stack_vertical(images: &[RgbImage], gap: usize) -> RgbImage {
    let width = images.iter().map(RgbImage::width).max().unwrap_or(0);
    let height =
        images.iter().map(RgbImage::height).sum::<usize>() + gap * images.len().saturating_sub(1);
    let mut out = RgbImage::new(width, height, [255, 255, 255]);
    let mut top = 0;
    for img in images {
        for y in 0..img.height() {
            for x in 0..img.width() {
                out.put(x, top + y, img.get(x, y));
            }
        }
        top += img.height() + gap;
    }
    out
}
