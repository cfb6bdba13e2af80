//! Template OCR over binary glyphs.
//!
//! Each template is scored by zero-mean normalized cross-correlation at the
//! best of nine one-pixel offsets. Row-run signatures are reported as a
//! diagnostic and do not affect ranking.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::pnm;
use crate::raster::{BinaryRaster, GrayRaster};
use crate::scalar::Scalar;

pub const DEFAULT_TEMPLATE_SIZE: usize = 64;
pub const DEFAULT_BINARIZE_THRESHOLD: f64 = 128.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub label: char,
    pub variant: u32,
    pub image: BinaryRaster,
}

impl Template {
    pub fn new(label: char, variant: u32, image: BinaryRaster) -> Result<Self> {
        if image.width() != image.height() {
            return Err(Error::InvalidRaster(format!(
                "template {label}/{variant} is not square: {}x{}",
                image.width(),
                image.height()
            )));
        }
        if image.is_empty() {
            return Err(Error::EmptyGlyph);
        }
        Ok(Self {
            label,
            variant,
            image,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateSet {
    templates: Vec<Template>,
    template_size: usize,
}

impl TemplateSet {
    /// Sorts by label, then variant.
    pub fn new(mut templates: Vec<Template>) -> Result<Self> {
        let first = templates
            .first()
            .ok_or_else(|| Error::EmptySet(PathBuf::new()))?;
        let size = first.image.width();
        if let Some(t) = templates.iter().find(|t| t.image.width() != size) {
            return Err(Error::MixedSizes {
                path: PathBuf::from(format!("{}/{}", t.label, t.variant)),
                expected: size,
                actual: t.image.width(),
            });
        }
        templates.sort_by_key(|t| (t.label, t.variant));
        Ok(Self {
            templates,
            template_size: size,
        })
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn template_size(&self) -> usize {
        self.template_size
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    /// Distinct labels in load order.
    pub fn labels(&self) -> Vec<char> {
        let mut labels: Vec<char> = self.templates.iter().map(|t| t.label).collect();
        labels.dedup();
        labels
    }

    /// Writes `<label>/<variant>.pgm` files (lit pixels as 255).
    pub fn save(&self, dir: &Path) -> Result<()> {
        for t in &self.templates {
            let label_dir = dir.join(t.label.to_string());
            fs::create_dir_all(&label_dir)?;
            pnm::write_file(
                &label_dir.join(format!("{}.pgm", t.variant)),
                &pnm::encode_mask_pgm(&t.image),
            )?;
        }
        Ok(())
    }
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?;
    paths.sort();
    Ok(paths)
}

/// Loads `<label>/<variant>.pgm` templates. Labels are single characters
/// (A-Z, 0-9); variants are numeric file stems.
pub fn load_templates(dir: &Path) -> Result<TemplateSet> {
    let mut templates = Vec::new();
    let mut expected: Option<usize> = None;
    for label_dir in sorted_entries(dir)? {
        if !label_dir.is_dir() {
            continue;
        }
        let name = label_dir.file_name().and_then(|n| n.to_str()).unwrap_or("");
        let mut chars = name.chars();
        let label = match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_uppercase() || c.is_ascii_digit() => c,
            _ => return Err(Error::InvalidLabel(label_dir)),
        };
        let mut variants = Vec::new();
        for path in sorted_entries(&label_dir)? {
            if path.extension().and_then(|e| e.to_str()) != Some("pgm") {
                continue;
            }
            let variant = path
                .file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(|| Error::UnreadableImage {
                    path: path.clone(),
                    reason: "variant file stem must be numeric".into(),
                })?;
            variants.push((variant, path));
        }
        variants.sort();
        for (variant, path) in variants {
            let (w, h, gray) = pnm::read_pgm(&path)?;
            if w != h {
                return Err(Error::UnreadableImage {
                    path,
                    reason: format!("template must be square, got {w}x{h}"),
                });
            }
            match expected {
                None => expected = Some(w),
                Some(size) if size != w => {
                    return Err(Error::MixedSizes {
                        path,
                        expected: size,
                        actual: w,
                    })
                }
                _ => {}
            }
            let img = GrayRaster::new(w, h, gray.into_iter().map(f64::from).collect())?;
            let image = binarize(&img, DEFAULT_BINARIZE_THRESHOLD);
            let template =
                Template::new(label, variant, image).map_err(|e| Error::UnreadableImage {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
            templates.push(template);
        }
    }
    if templates.is_empty() {
        return Err(Error::EmptySet(dir.to_path_buf()));
    }
    TemplateSet::new(templates)
}

/// 1 where `intensity >= threshold`.
pub fn binarize<T: Scalar>(img: &GrayRaster<T>, threshold: T) -> BinaryRaster {
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| (v >= threshold) as u8)
        .collect();
    BinaryRaster::new(img.width(), img.height(), pixels).expect("same dimensions")
}

/// Number of maximal horizontal runs of lit pixels in each row.
pub fn row_run_signature(glyph: &BinaryRaster) -> Vec<u32> {
    glyph
        .pixels()
        .chunks_exact(glyph.width())
        .map(|row| {
            let mut runs = 0;
            let mut prev = 0;
            for &p in row {
                if p == 1 && prev == 0 {
                    runs += 1;
                }
                prev = p;
            }
            runs
        })
        .collect()
}

/// Pearson correlation of two equally sized binary images, with `b`
/// displaced by `(dx, dy)`; pixels shifted in from outside are 0.
fn shifted_correlation<T: Scalar>(a: &BinaryRaster, b: &BinaryRaster, dx: i64, dy: i64) -> T {
    let (w, h) = a.dims();
    let n = (w * h) as i64;
    let (mut sa, mut sb, mut sab) = (0i64, 0i64, 0i64);
    let pa = a.pixels();
    let pb = b.pixels();
    for y in 0..h {
        let by = y as i64 - dy;
        let row_a = &pa[y * w..(y + 1) * w];
        sa += row_a.iter().map(|&v| v as i64).sum::<i64>();
        if !(0..h as i64).contains(&by) {
            continue;
        }
        let row_b = &pb[by as usize * w..(by as usize + 1) * w];
        for (x, &va) in row_a.iter().enumerate() {
            let bx = x as i64 - dx;
            if (0..w as i64).contains(&bx) {
                let vb = row_b[bx as usize] as i64;
                sb += vb;
                sab += va as i64 * vb;
            }
        }
    }
    let var_a = n * sa - sa * sa;
    let var_b = n * sb - sb * sb;
    if var_a == 0 || var_b == 0 {
        return T::zero();
    }
    let cov = T::from_i64(n * sab - sa * sb).unwrap();
    let denom = (T::from_i64(var_a).unwrap() * T::from_i64(var_b).unwrap()).sqrt();
    (cov / denom).max(-T::one()).min(T::one())
}

fn require_same_dims(glyph: &BinaryRaster, other: &BinaryRaster) -> Result<()> {
    if glyph.dims() != other.dims() {
        return Err(Error::DimensionMismatch {
            expected: other.dims(),
            actual: glyph.dims(),
        });
    }
    Ok(())
}

/// Zero-offset Pearson correlation; 0 when either image is constant.
pub fn correlate<T: Scalar>(glyph: &BinaryRaster, template: &Template) -> Result<T> {
    require_same_dims(glyph, &template.image)?;
    Ok(shifted_correlation(glyph, &template.image, 0, 0))
}

/// Best correlation over the 3x3 neighborhood of offsets.
pub fn shift_tolerant_score<T: Scalar>(glyph: &BinaryRaster, template: &Template) -> Result<T> {
    require_same_dims(glyph, &template.image)?;
    let mut best = T::neg_infinity();
    for dy in -1..=1 {
        for dx in -1..=1 {
            best = best.max(shifted_correlation(glyph, &template.image, dx, dy));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult<T> {
    pub label: char,
    pub variant: u32,
    pub score: T,
    /// Best template of any other label.
    pub runner_up: Option<(char, T)>,
    /// L1 distance between row-run signatures of glyph and winner.
    pub signature_distance: u64,
}

pub fn recognize<T: Scalar>(glyph: &BinaryRaster, set: &TemplateSet) -> Result<MatchResult<T>> {
    if glyph.is_empty() {
        return Err(Error::EmptyGlyph);
    }
    let scores = set
        .templates
        .iter()
        .map(|t| shift_tolerant_score::<T>(glyph, t))
        .collect::<Result<Vec<T>>>()?;

    // templates are sorted by (label, variant): strict `>` keeps the first on ties
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let winner = &set.templates[best];
    let mut runner_up: Option<(char, T)> = None;
    for (t, &s) in set.templates.iter().zip(&scores) {
        if t.label != winner.label && runner_up.is_none_or(|(_, r)| s > r) {
            runner_up = Some((t.label, s));
        }
    }
    let signature_distance = row_run_signature(glyph)
        .iter()
        .zip(row_run_signature(&winner.image))
        .map(|(&a, b)| a.abs_diff(b) as u64)
        .sum();
    Ok(MatchResult {
        label: winner.label,
        variant: winner.variant,
        score: scores[best],
        runner_up,
        signature_distance,
    })
}
