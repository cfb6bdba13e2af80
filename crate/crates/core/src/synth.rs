//! Deterministic synthetic air-writing footage.
//!
//! Each letter is a single-stroke polyline in the unit square (`v` grows
//! downward). A red dot follows it at constant speed, holds still at the end
//! for the dwell pad, and spaces are rendered as runs of empty frames.
//! Frames are pre-mirrored, as a front camera would see them.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ocr::{Template, TemplateSet, DEFAULT_TEMPLATE_SIZE};
use crate::plotter::{fit_to_template, rasterize_stroke, GlyphCanvas};
use crate::raster::{Point, RgbRaster};

/// Width of the letter box relative to its height.
pub const LETTER_ASPECT: f64 = 0.75;
/// Letter box height relative to the frame height.
pub const LETTER_SCALE: f64 = 0.6;
/// Stroke thicknesses of the shipped template variants.
pub const TEMPLATE_THICKNESSES: [usize; 3] = [2, 3, 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub frame_size: (usize, usize),
    pub dot_radius: f64,
    pub dot_color: [u8; 3],
    pub background: [u8; 3],
    pub points_per_stroke: usize,
    pub jitter_sigma: f64,
    pub dwell_pad: usize,
    pub absence_pad: usize,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        // pads exceed the default tracker thresholds (15 dwell, 20 absence) by two
        Self {
            frame_size: (640, 480),
            dot_radius: 6.0,
            dot_color: [255, 30, 30],
            background: [200, 200, 200],
            points_per_stroke: 40,
            jitter_sigma: 0.0,
            dwell_pad: 17,
            absence_pad: 22,
            seed: 0,
        }
    }
}

impl SynthParams {
    fn validate(&self) -> Result<()> {
        let (w, h) = self.frame_size;
        if !(self.jitter_sigma >= 0.0) {
            return Err(Error::InvalidConfig("jitter_sigma must be >= 0".into()));
        }
        if self.points_per_stroke < 2 {
            return Err(Error::InvalidConfig(
                "points_per_stroke must be >= 2".into(),
            ));
        }
        if !(self.dot_radius > 0.0) || 2.0 * self.dot_radius + 1.0 > w.min(h) as f64 {
            return Err(Error::InvalidConfig("dot does not fit in frame".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LetterPath {
    pub label: char,
    pub waypoints: Vec<(f64, f64)>,
}

impl LetterPath {
    /// Polyline length in unit-square coordinates scaled by `sx`, `sy`.
    fn scaled(&self, sx: f64, sy: f64) -> Vec<(f64, f64)> {
        self.waypoints
            .iter()
            .map(|&(u, v)| (u * sx, v * sy))
            .collect()
    }
}

/// Points on an elliptical arc; angles in degrees, y down, so increasing
/// angle runs clockwise on screen.
fn arc(cx: f64, cy: f64, rx: f64, ry: f64, from: f64, to: f64, steps: usize) -> Vec<(f64, f64)> {
    (0..=steps)
        .map(|i| {
            let a = (from + (to - from) * i as f64 / steps as f64) * PI / 180.0;
            (cx + rx * a.cos(), cy + ry * a.sin())
        })
        .collect()
}

fn chain(parts: &[&[(f64, f64)]]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for part in parts {
        for &p in *part {
            if out
                .last()
                .is_none_or(|&q| (q.0 - p.0).hypot(q.1 - p.1) > 1e-9)
            {
                out.push(p);
            }
        }
    }
    out
}

/// Built-in single-stroke path for an uppercase letter.
pub fn letter_path(label: char) -> Result<LetterPath> {
    let waypoints = match label {
        'A' => vec![(0.0, 1.0), (0.5, 0.0), (1.0, 1.0), (0.75, 0.5), (0.25, 0.5)],
        'B' => vec![
            (0.0, 1.0),
            (0.0, 0.0),
            (0.7, 0.0),
            (0.9, 0.12),
            (0.9, 0.38),
            (0.7, 0.5),
            (0.0, 0.5),
            (0.8, 0.5),
            (1.0, 0.62),
            (1.0, 0.88),
            (0.8, 1.0),
            (0.0, 1.0),
        ],
        'C' => arc(0.5, 0.5, 0.5, 0.5, -40.0, -320.0, 14),
        'D' => chain(&[
            &[(0.0, 1.0), (0.0, 0.0), (0.45, 0.0)],
            &arc(0.45, 0.5, 0.55, 0.5, -90.0, 90.0, 10),
            &[(0.0, 1.0)],
        ]),
        'E' => vec![
            (1.0, 0.0),
            (0.0, 0.0),
            (0.0, 0.5),
            (0.7, 0.5),
            (0.0, 0.5),
            (0.0, 1.0),
            (1.0, 1.0),
        ],
        'F' => vec![
            (1.0, 0.0),
            (0.0, 0.0),
            (0.0, 0.5),
            (0.7, 0.5),
            (0.0, 0.5),
            (0.0, 1.0),
        ],
        'G' => chain(&[
            &arc(0.5, 0.5, 0.5, 0.5, -40.0, -360.0, 16),
            &[(1.0, 0.55), (0.55, 0.55)],
        ]),
        'H' => vec![
            (0.0, 0.0),
            (0.0, 1.0),
            (0.0, 0.5),
            (1.0, 0.5),
            (1.0, 0.0),
            (1.0, 1.0),
        ],
        'I' => vec![(0.5, 0.0), (0.5, 1.0)],
        'J' => chain(&[
            &[(1.0, 0.0), (1.0, 0.7)],
            &arc(0.5, 0.7, 0.5, 0.3, 0.0, 180.0, 8),
        ]),
        'K' => vec![
            (0.0, 0.0),
            (0.0, 1.0),
            (0.0, 0.6),
            (1.0, 0.0),
            (0.35, 0.45),
            (1.0, 1.0),
        ],
        'L' => vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)],
        'M' => vec![(0.0, 1.0), (0.0, 0.0), (0.5, 0.6), (1.0, 0.0), (1.0, 1.0)],
        'N' => vec![(0.0, 1.0), (0.0, 0.0), (1.0, 1.0), (1.0, 0.0)],
        'O' => arc(0.5, 0.5, 0.5, 0.5, -90.0, -450.0, 20),
        'P' => vec![
            (0.0, 1.0),
            (0.0, 0.0),
            (0.75, 0.0),
            (1.0, 0.15),
            (1.0, 0.4),
            (0.75, 0.55),
            (0.0, 0.55),
        ],
        'Q' => chain(&[
            &arc(0.5, 0.5, 0.5, 0.5, -90.0, -450.0, 20),
            &[(0.5, 0.0), (0.6, 0.7), (1.0, 1.0)],
        ]),
        'R' => vec![
            (0.0, 1.0),
            (0.0, 0.0),
            (0.75, 0.0),
            (1.0, 0.15),
            (1.0, 0.4),
            (0.75, 0.55),
            (0.0, 0.55),
            (1.0, 1.0),
        ],
        'S' => vec![
            (1.0, 0.1),
            (0.8, 0.0),
            (0.2, 0.0),
            (0.0, 0.15),
            (0.0, 0.35),
            (0.2, 0.5),
            (0.8, 0.5),
            (1.0, 0.65),
            (1.0, 0.85),
            (0.8, 1.0),
            (0.2, 1.0),
            (0.0, 0.9),
        ],
        'T' => vec![(0.0, 0.0), (1.0, 0.0), (0.5, 0.0), (0.5, 1.0)],
        'U' => chain(&[
            &[(0.0, 0.0), (0.0, 0.65)],
            &arc(0.5, 0.65, 0.5, 0.35, 180.0, 0.0, 10),
            &[(1.0, 0.0)],
        ]),
        'V' => vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)],
        'W' => vec![(0.0, 0.0), (0.25, 1.0), (0.5, 0.0), (0.75, 1.0), (1.0, 0.0)],
        'X' => vec![(0.0, 0.0), (1.0, 1.0), (0.5, 0.5), (1.0, 0.0), (0.0, 1.0)],
        'Y' => vec![(0.0, 0.0), (0.5, 0.5), (1.0, 0.0), (0.5, 0.5), (0.5, 1.0)],
        'Z' => vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)],
        other => return Err(Error::UnknownLabel(other)),
    };
    Ok(LetterPath { label, waypoints })
}

/// `n` points at equal arc-length spacing from the first to the last vertex.
pub fn resample_polyline(vertices: &[(f64, f64)], n: usize) -> Vec<(f64, f64)> {
    assert!(vertices.len() >= 2 && n >= 2);
    let seg_len: Vec<f64> = vertices
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .collect();
    let total: f64 = seg_len.iter().sum();
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    let mut walked = 0.0;
    for i in 0..n {
        let target = total * i as f64 / (n - 1) as f64;
        while seg + 1 < seg_len.len() && walked + seg_len[seg] < target {
            walked += seg_len[seg];
            seg += 1;
        }
        let t = if seg_len[seg] > 0.0 {
            ((target - walked) / seg_len[seg]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (a, b) = (vertices[seg], vertices[seg + 1]);
        out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
    }
    out
}

fn validate_text(text: &str) -> Result<()> {
    if text.is_empty() || !text.chars().all(|c| c == ' ' || c.is_ascii_uppercase()) {
        return Err(Error::InvalidText(text.to_string()));
    }
    Ok(())
}

fn draw_dot(frame: &mut RgbRaster, cx: f64, cy: f64, radius: f64, color: [u8; 3]) {
    let (w, h) = frame.dims();
    let x0 = (cx - radius).floor().max(0.0) as usize;
    let y0 = (cy - radius).floor().max(0.0) as usize;
    let x1 = ((cx + radius).ceil() as usize).min(w - 1);
    let y1 = ((cy + radius).ceil() as usize).min(h - 1);
    for y in y0..=y1 {
        for x in x0..=x1 {
            if (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= radius * radius {
                frame.set(x, y, color);
            }
        }
    }
}

/// Dot positions (in writer coordinates, before mirroring) for one letter.
pub fn letter_trajectory(
    label: char,
    params: &SynthParams,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(f64, f64)>> {
    let path = letter_path(label)?;
    let (w, h) = params.frame_size;
    let box_h = LETTER_SCALE * h as f64;
    let box_w = LETTER_ASPECT * box_h;
    let (x0, y0) = ((w as f64 - box_w) / 2.0, (h as f64 - box_h) / 2.0);
    let pts = resample_polyline(&path.scaled(box_w, box_h), params.points_per_stroke);
    let jitter = Normal::new(0.0, params.jitter_sigma).expect("validated sigma");
    let r = params.dot_radius;
    Ok(pts
        .into_iter()
        .map(|(x, y)| {
            let (jx, jy) = if params.jitter_sigma > 0.0 {
                (jitter.sample(rng), jitter.sample(rng))
            } else {
                (0.0, 0.0)
            };
            (
                (x0 + x + jx).clamp(r, w as f64 - 1.0 - r),
                (y0 + y + jy).clamp(r, h as f64 - 1.0 - r),
            )
        })
        .collect())
}

/// Renders `text` (A-Z and spaces) as a frame sequence.
pub fn render_sequence(text: &str, params: &SynthParams) -> Result<Vec<RgbRaster>> {
    validate_text(text)?;
    params.validate()?;
    let (w, h) = params.frame_size;
    let blank = RgbRaster::filled(w, h, params.background);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut frames = Vec::new();
    for c in text.chars() {
        if c == ' ' {
            frames.extend(std::iter::repeat_n(blank.clone(), params.absence_pad));
            continue;
        }
        let traj = letter_trajectory(c, params, &mut rng)?;
        let last = *traj.last().unwrap();
        let hold = std::iter::repeat_n(last, params.dwell_pad);
        for (x, y) in traj.iter().copied().chain(hold) {
            let mut frame = blank.clone();
            // camera view is the mirror image of the writer's motion
            draw_dot(
                &mut frame,
                (w - 1) as f64 - x,
                y,
                params.dot_radius,
                params.dot_color,
            );
            frames.push(frame);
        }
    }
    Ok(frames)
}

/// Template glyph of a letter drawn at the given stroke thickness.
pub fn render_template(label: char, thickness: usize, template_size: usize) -> Result<Template> {
    let path = letter_path(label)?;
    let stroke: Vec<Point<f64>> = path
        .scaled(100.0 * LETTER_ASPECT, 100.0)
        .into_iter()
        .map(|(x, y)| Point::new(x, y))
        .collect();
    let canvas = GlyphCanvas {
        size: GlyphCanvas::default().size,
        stroke_thickness: thickness,
    };
    let glyph = rasterize_stroke(&stroke, &canvas)?;
    Template::new(
        label,
        thickness as u32,
        fit_to_template(&glyph, template_size)?,
    )
}

/// The shipped template set: every letter at each of
/// [`TEMPLATE_THICKNESSES`], 64x64.
pub fn default_templates() -> Arc<TemplateSet> {
    static SET: OnceLock<Arc<TemplateSet>> = OnceLock::new();
    SET.get_or_init(|| {
        let templates = ('A'..='Z')
            .flat_map(|c| TEMPLATE_THICKNESSES.iter().map(move |&t| (c, t)))
            .map(|(c, t)| render_template(c, t, DEFAULT_TEMPLATE_SIZE).expect("built-in path"))
            .collect();
        Arc::new(TemplateSet::new(templates).expect("non-empty uniform set"))
    })
    .clone()
}
