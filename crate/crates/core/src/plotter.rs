//! Turns a finished stroke into a binary glyph and registers glyphs to the
//! template grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryRaster, Point};
use crate::scalar::Scalar;

/// Fraction of the canvas left empty on each side.
pub const CANVAS_MARGIN: f64 = 0.1;

/// Crops more elongated than this are padded on their short side before
/// resampling, so thin strokes ('I', '-') keep some background.
pub const MAX_FIT_ASPECT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlyphCanvas {
    pub size: usize,
    pub stroke_thickness: usize,
}

impl Default for GlyphCanvas {
    fn default() -> Self {
        Self {
            size: 128,
            stroke_thickness: 3,
        }
    }
}

impl GlyphCanvas {
    pub fn validate(&self) -> Result<()> {
        if self.size < 16 {
            return Err(Error::InvalidConfig(format!(
                "canvas size {} < 16",
                self.size
            )));
        }
        if self.stroke_thickness < 1 || 4 * self.stroke_thickness >= self.size {
            return Err(Error::InvalidConfig(format!(
                "stroke thickness {} must be in [1, size/4)",
                self.stroke_thickness
            )));
        }
        Ok(())
    }
}

/// Integer line from `a` to `b` inclusive (Bresenham).
pub fn line_pixels(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let (mut x, mut y) = a;
    let dx = (b.0 - x).abs();
    let dy = -(b.1 - y).abs();
    let sx = if x < b.0 { 1 } else { -1 };
    let sy = if y < b.1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = Vec::with_capacity((dx.max(-dy) + 1) as usize);
    loop {
        out.push((x, y));
        if (x, y) == b {
            return out;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Square brush offsets for a given thickness.
fn brush(thickness: usize) -> std::ops::Range<i64> {
    let start = -((thickness as i64 - 1) / 2);
    start..start + thickness as i64
}

/// Maps stroke points to integer canvas coordinates: the stroke's bounding
/// box is scaled uniformly into the canvas minus margins and centered.
pub fn canvas_coordinates<T: Scalar>(
    stroke: &[Point<T>],
    canvas: &GlyphCanvas,
) -> Result<Vec<(i64, i64)>> {
    if stroke.len() < 2 {
        return Err(Error::ShortStroke(stroke.len()));
    }
    let (mut min_x, mut min_y) = (T::infinity(), T::infinity());
    let (mut max_x, mut max_y) = (T::neg_infinity(), T::neg_infinity());
    for p in stroke {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    let (bw, bh) = (max_x - min_x, max_y - min_y);
    let extent = bw.max(bh);
    if !(extent > T::zero()) {
        return Err(Error::DegenerateStroke);
    }
    let margin = T::lit(CANVAS_MARGIN) * T::from_count(canvas.size);
    let span = T::from_count(canvas.size - 1) - T::lit(2.0) * margin;
    let half = T::lit(0.5);
    let off_x = margin + half * span * (T::one() - bw / extent);
    let off_y = margin + half * span * (T::one() - bh / extent);
    Ok(stroke
        .iter()
        .map(|p| {
            // normalize before scaling so a global rescale of the input is exact
            let u = (p.x - min_x) / extent;
            let v = (p.y - min_y) / extent;
            let cx = (off_x + u * span).round_half_up();
            let cy = (off_y + v * span).round_half_up();
            (cx.to_i64().unwrap(), cy.to_i64().unwrap())
        })
        .collect())
}

/// Draws the stroke as joined, thickened segments on a square canvas.
pub fn rasterize_stroke<T: Scalar>(
    stroke: &[Point<T>],
    canvas: &GlyphCanvas,
) -> Result<BinaryRaster> {
    let pts = canvas_coordinates(stroke, canvas)?;
    let n = canvas.size as i64;
    let mut out = BinaryRaster::zeros(canvas.size, canvas.size);
    let brush = brush(canvas.stroke_thickness);
    for pair in pts.windows(2) {
        for (x, y) in line_pixels(pair[0], pair[1]) {
            for dy in brush.clone() {
                for dx in brush.clone() {
                    let (px, py) = (x + dx, y + dy);
                    if (0..n).contains(&px) && (0..n).contains(&py) {
                        out.set(px as usize, py as usize, true);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Tight crop followed by nearest-neighbor resampling to a square grid.
///
/// Aspect ratio is not preserved, except that a crop longer than
/// [`MAX_FIT_ASPECT`] times its short side is first padded (centered) on
/// the short side.
pub fn fit_to_template(glyph: &BinaryRaster, template_size: usize) -> Result<BinaryRaster> {
    let (x0, y0, x1, y1) = glyph.bounding_box().ok_or(Error::EmptyGlyph)?;
    let (cw, ch) = (x1 - x0 + 1, y1 - y0 + 1);
    let long = cw.max(ch);
    let min_short = long.div_ceil(MAX_FIT_ASPECT);
    let (fw, fh) = (cw.max(min_short), ch.max(min_short));
    // origin of the (possibly padded) frame in glyph coordinates
    let ox = x0 as i64 - ((fw - cw) / 2) as i64;
    let oy = y0 as i64 - ((fh - ch) / 2) as i64;
    let in_crop = |x: i64, y: i64| {
        (x0 as i64..=x1 as i64).contains(&x) && (y0 as i64..=y1 as i64).contains(&y)
    };
    Ok(BinaryRaster::from_fn(
        template_size,
        template_size,
        |i, j| {
            let sx = ox + ((2 * i + 1) * fw / (2 * template_size)) as i64;
            let sy = oy + ((2 * j + 1) * fh / (2 * template_size)) as i64;
            in_crop(sx, sy) && glyph.get(sx as usize, sy as usize)
        },
    ))
}
