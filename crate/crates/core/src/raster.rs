//! Pixel grids shared by every stage of the pipeline.
//!
//! All rasters are row-major with `x` growing rightward in `[0, width)` and
//! `y` growing downward in `[0, height)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidRaster(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    if width * height != len {
        return Err(Error::InvalidRaster(format!(
            "{width}x{height} raster needs {} pixels, got {len}",
            width * height
        )));
    }
    Ok(())
}

/// 8-bit RGB frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbRaster {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbRaster {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be positive"
        );
        Self {
            width,
            height,
            pixels: vec![rgb; width * height],
        }
    }

    /// Builds a frame from packed `r, g, b` bytes.
    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::InvalidRaster(format!(
                "{width}x{height} rgb8 frame needs {} bytes, got {}",
                width * height * 3,
                bytes.len()
            )));
        }
        let pixels = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Self::new(width, height, pixels)
    }

    pub fn to_rgb8(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        self.pixels[y * self.width + x] = rgb;
    }
}

/// Gray-level image with fractional precision; values stay in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayRaster<T> {
    width: usize,
    height: usize,
    pixels: Vec<T>,
}

impl<T: Scalar> GrayRaster<T> {
    pub fn new(width: usize, height: usize, pixels: Vec<T>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        let max = T::lit(255.0);
        if let Some(bad) = pixels.iter().find(|v| !(**v >= T::zero() && **v <= max)) {
            return Err(Error::InvalidRaster(format!(
                "gray value {bad} outside [0, 255]"
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("valid constant raster")
    }

    pub(crate) fn from_vec_unchecked(width: usize, height: usize, pixels: Vec<T>) -> Self {
        debug_assert_eq!(width * height, pixels.len());
        Self {
            width,
            height,
            pixels,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.pixels[y * self.width + x]
    }

    /// Quantizes every value to an integer intensity, rounding half up.
    pub fn quantized(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .map(|v| v.round_half_up().to_u8().unwrap_or(255))
            .collect()
    }
}

/// Binary mask: every pixel is 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryRaster {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryRaster {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        if pixels.iter().any(|&p| p > 1) {
            return Err(Error::InvalidRaster("binary pixel outside {0, 1}".into()));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be positive"
        );
        Self {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut out = Self::zeros(width, height);
        for y in 0..height {
            for x in 0..width {
                out.pixels[y * width + x] = f(x, y) as u8;
            }
        }
        out
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x] != 0
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        self.pixels[y * self.width + x] = on as u8;
    }

    pub fn count_ones(&self) -> usize {
        self.pixels.iter().filter(|&&p| p != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.iter().all(|&p| p == 0)
    }

    /// Pixelwise AND. Panics on mismatched dimensions.
    pub fn and(&self, other: &BinaryRaster) -> BinaryRaster {
        assert_eq!(self.dims(), other.dims(), "mask dimensions differ");
        let pixels = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| a & b)
            .collect();
        Self {
            width: self.width,
            height: self.height,
            pixels,
        }
    }

    pub fn complement(&self) -> BinaryRaster {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|p| 1 - p).collect(),
        }
    }

    /// Inclusive bounding box `(min_x, min_y, max_x, max_y)` of lit pixels.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let w = self.width;
        let lit_rows: Vec<usize> = (0..self.height)
            .filter(|&y| self.pixels[y * w..(y + 1) * w].contains(&1))
            .collect();
        let (&y0, &y1) = (lit_rows.first()?, lit_rows.last()?);
        let (mut x0, mut x1) = (w, 0);
        for &y in &lit_rows {
            let row = &self.pixels[y * w..(y + 1) * w];
            x0 = x0.min(row.iter().position(|&p| p == 1).unwrap());
            x1 = x1.max(row.iter().rposition(|&p| p == 1).unwrap());
        }
        Some((x0, y0, x1, y1))
    }

    /// Copy of the inclusive window `(x0, y0)..=(x1, y1)`.
    pub fn crop(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> BinaryRaster {
        assert!(
            x0 <= x1 && y0 <= y1 && x1 < self.width && y1 < self.height,
            "crop window out of range"
        );
        let pixels = (y0..=y1)
            .flat_map(|y| {
                self.pixels[y * self.width + x0..=y * self.width + x1]
                    .iter()
                    .copied()
            })
            .collect();
        Self {
            width: x1 - x0 + 1,
            height: y1 - y0 + 1,
            pixels,
        }
    }
}

/// Pixel-space point; coordinates may be fractional (centroids).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point<T>) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Luma conversion with 0.299 / 0.587 / 0.114 weights, rounded half up.
pub fn to_grayscale<T: Scalar>(frame: &RgbRaster) -> GrayRaster<T> {
    // Integer arithmetic keeps the half-up rounding exact.
    let pixels = frame
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            let weighted = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
            T::from_u32((weighted + 500) / 1000).expect("intensity fits scalar")
        })
        .collect();
    GrayRaster::from_vec_unchecked(frame.width, frame.height, pixels)
}
