//! Edge enhancement: Gaussian smoothing, Sobel gradient magnitude, min/max
//! stretch to `[0, 255]`, then suppression of weak responses.
//!
//! The thresholded output is still a gray-level image: surviving pixels keep
//! their stretched magnitude.

use crate::error::{Error, Result};
use crate::raster::{BinaryRaster, GrayRaster};
use crate::scalar::Scalar;

/// Default cut applied to the stretched edge image.
pub const DEFAULT_EDGE_THRESHOLD: f64 = 50.0;

/// Dense grid of unbounded values (signed gradients, raw magnitudes).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![T::zero(); width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                actual: (data.len(), 1),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
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
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v;
    }

    /// `(min, max)` over all cells.
    pub fn extrema(&self) -> (T, T) {
        self.data
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Smoothing window size to standard deviation: `0.3 (w/2 - 1) + 0.8`,
/// with `w/2` taken as a real number.
pub fn gaussian_sigma<T: Scalar>(window: usize) -> Result<T> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::InvalidWindow(window));
    }
    // 0.3 (w/2 - 1) + 0.8 == (3w + 10) / 20; one division keeps the
    // result correctly rounded (w=3 gives exactly the literal 0.95).
    Ok(T::from_count(3 * window + 10) / T::lit(20.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel<T> {
    window: usize,
    sigma: T,
    /// Normalized 1-D taps; the 2-D kernel is their outer product.
    taps: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> GaussianKernel<T> {
    /// Kernel whose sigma follows [`gaussian_sigma`].
    pub fn new(window: usize) -> Result<Self> {
        let sigma = gaussian_sigma(window)?;
        Ok(Self::with_sigma(window, sigma))
    }

    fn with_sigma(window: usize, sigma: T) -> Self {
        let half = (window / 2) as i64;
        let two_var = T::lit(2.0) * sigma * sigma;
        let raw: Vec<T> = (-half..=half)
            .map(|i| {
                let d = T::from_i64(i * i).unwrap();
                (-d / two_var).exp()
            })
            .collect();
        let total: T = raw.iter().copied().sum();
        let taps: Vec<T> = raw.iter().map(|&v| v / total).collect();
        let weights = taps
            .iter()
            .flat_map(|&wy| taps.iter().map(move |&wx| wy * wx))
            .collect();
        Self {
            window,
            sigma,
            taps,
            weights,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Row-major `w x w` coefficients summing to one.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, dx: usize, dy: usize) -> T {
        self.weights[dy * self.window + dx]
    }
}

#[inline]
fn clamp_index(v: isize, n: usize) -> usize {
    v.clamp(0, n as isize - 1) as usize
}

/// Horizontal taps over one row, replicating the row ends.
fn smooth_row<T: Scalar>(line: &[T], taps: &[T], padded: &mut Vec<T>, out: &mut [T]) {
    let w = line.len();
    let half = taps.len() / 2;
    padded.clear();
    padded.extend((0..w + 2 * half).map(|i| line[clamp_index(i as isize - half as isize, w)]));
    out.fill(T::zero());
    for (k, &tap) in taps.iter().enumerate() {
        for (o, &v) in out.iter_mut().zip(&padded[k..k + w]) {
            *o += tap * v;
        }
    }
}

/// Vertical taps for one output row; `row_at(k)` yields the horizontally
/// smoothed row under tap `k`.
fn smooth_column<'a, T: Scalar>(
    taps: &[T],
    row_at: impl Fn(usize) -> &'a [T],
    range: (T, T),
    out: &mut [T],
) {
    out.fill(T::zero());
    for (k, &tap) in taps.iter().enumerate() {
        for (d, &v) in out.iter_mut().zip(row_at(k)) {
            *d += tap * v;
        }
    }
    // rounding error must not push a convex combination outside the input range
    let (lo, hi) = range;
    for d in out.iter_mut() {
        *d = if *d < lo {
            lo
        } else if *d > hi {
            hi
        } else {
            *d
        };
    }
}

fn value_range<T: Scalar>(px: &[T]) -> (T, T) {
    px.iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &v| {
            (a.min(v), b.max(v))
        })
}

/// Separable convolution with edge replication at the border.
pub fn gaussian_smooth<T: Scalar>(
    img: &GrayRaster<T>,
    kernel: &GaussianKernel<T>,
) -> GrayRaster<T> {
    let (w, h) = img.dims();
    let half = kernel.window / 2;
    let src = img.pixels();
    let mut rows = vec![T::zero(); w * h];
    let mut padded = Vec::with_capacity(w + 2 * half);
    for (line, out) in src.chunks_exact(w).zip(rows.chunks_exact_mut(w)) {
        smooth_row(line, &kernel.taps, &mut padded, out);
    }
    let range = value_range(src);
    let mut out = vec![T::zero(); w * h];
    for (y, dst) in out.chunks_exact_mut(w).enumerate() {
        let row_at = |k: usize| {
            let sy = clamp_index(y as isize + k as isize - half as isize, h);
            &rows[sy * w..(sy + 1) * w]
        };
        smooth_column(&kernel.taps, row_at, range, dst);
    }
    GrayRaster::from_vec_unchecked(w, h, out)
}

#[inline(always)]
fn sobel_at<T: Scalar>(up: &[T], mid: &[T], down: &[T], x: usize) -> (T, T) {
    let two = T::lit(2.0);
    let gx =
        (up[x + 1] - up[x - 1]) + two * (mid[x + 1] - mid[x - 1]) + (down[x + 1] - down[x - 1]);
    let gy = (down[x - 1] + two * down[x] + down[x + 1]) - (up[x - 1] + two * up[x] + up[x + 1]);
    (gx, gy)
}

#[inline]
fn stretch<T: Scalar>(v: T, lo: T, range: T) -> T {
    let full = T::lit(255.0);
    if range > T::zero() {
        // multiply before dividing so the endpoints land exactly on 0 and 255
        (full * (v - lo) / range).round_half_up().min(full)
    } else {
        T::zero()
    }
}

/// Output of the edge chain. Later stages are filled in as the chain runs.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMaps<T> {
    /// Horizontal derivative (responds to vertical edges).
    pub e_h: Grid<T>,
    /// Vertical derivative.
    pub e_v: Grid<T>,
    /// Gradient magnitude.
    pub e: Grid<T>,
    /// `(E_min, E_max)` of `e`, recorded by normalization.
    pub extrema: Option<(T, T)>,
    pub e_n: Option<GrayRaster<T>>,
    pub e_nt: Option<GrayRaster<T>>,
}

impl<T: Scalar> EdgeMaps<T> {
    /// Maps holding only a magnitude field, for driving normalization directly.
    pub fn from_magnitude(e: Grid<T>) -> Self {
        let (w, h) = (e.width, e.height);
        Self {
            e_h: Grid::zeros(w, h),
            e_v: Grid::zeros(w, h),
            e,
            extrema: None,
            e_n: None,
            e_nt: None,
        }
    }

    pub fn width(&self) -> usize {
        self.e.width
    }

    pub fn height(&self) -> usize {
        self.e.height
    }
}

/// Standard 3x3 Sobel responses and their magnitude. The one-pixel border is
/// left at zero in all three grids.
pub fn sobel_gradient<T: Scalar>(img: &GrayRaster<T>) -> Result<EdgeMaps<T>> {
    let (w, h) = img.dims();
    if w < 3 || h < 3 {
        return Err(Error::TooSmall {
            width: w,
            height: h,
        });
    }
    let p = img.pixels();
    let mut e_h = Grid::zeros(w, h);
    let mut e_v = Grid::zeros(w, h);
    let mut e = Grid::zeros(w, h);
    for y in 1..h - 1 {
        let up = &p[(y - 1) * w..y * w];
        let mid = &p[y * w..(y + 1) * w];
        let down = &p[(y + 1) * w..(y + 2) * w];
        for x in 1..w - 1 {
            let (gx, gy) = sobel_at(up, mid, down, x);
            e_h.set(x, y, gx);
            e_v.set(x, y, gy);
            e.set(x, y, (gx * gx + gy * gy).sqrt());
        }
    }
    Ok(EdgeMaps {
        e_h,
        e_v,
        e,
        extrema: None,
        e_n: None,
        e_nt: None,
    })
}

/// Stretches `e` linearly so `E_min -> 0` and `E_max -> 255`, rounding half
/// up. A constant `e` normalizes to all zeros.
pub fn normalize_edges<T: Scalar>(mut maps: EdgeMaps<T>) -> EdgeMaps<T> {
    let (lo, hi) = maps.e.extrema();
    let range = hi - lo;
    let values = maps.e.data.iter().map(|&v| stretch(v, lo, range)).collect();
    maps.extrema = Some((lo, hi));
    maps.e_n = Some(GrayRaster::from_vec_unchecked(
        maps.e.width,
        maps.e.height,
        values,
    ));
    maps
}

/// Zeroes stretched responses below `threshold`; the rest pass through
/// unchanged. Normalizes first if that has not happened yet.
pub fn threshold_edges<T: Scalar>(maps: EdgeMaps<T>, threshold: T) -> EdgeMaps<T> {
    let mut maps = if maps.e_n.is_some() {
        maps
    } else {
        normalize_edges(maps)
    };
    let e_n = maps.e_n.as_ref().unwrap();
    let kept = e_n
        .pixels()
        .iter()
        .map(|&v| if v >= threshold { v } else { T::zero() })
        .collect();
    maps.e_nt = Some(GrayRaster::from_vec_unchecked(
        e_n.width(),
        e_n.height(),
        kept,
    ));
    maps
}

/// The full chain: smooth, Sobel, normalize, threshold.
pub fn enhance<T: Scalar>(
    img: &GrayRaster<T>,
    kernel: &GaussianKernel<T>,
    threshold: T,
) -> Result<EdgeMaps<T>> {
    let smoothed = gaussian_smooth(img, kernel);
    let maps = sobel_gradient(&smoothed)?;
    Ok(threshold_edges(normalize_edges(maps), threshold))
}

/// `mask AND (e_nt > 0)` without materializing the edge maps.
///
/// Gives the same answer as running [`enhance`] and testing `e_nt` at every
/// masked pixel. The image is streamed through small row rings; the stretch
/// needs the global magnitude range, which is tracked on squared magnitudes,
/// so the square root and the stretch only run where the mask is lit.
pub fn edge_gate<T: Scalar>(
    img: &GrayRaster<T>,
    kernel: &GaussianKernel<T>,
    threshold: T,
    mask: &BinaryRaster,
) -> Result<BinaryRaster> {
    let (w, h) = img.dims();
    if mask.dims() != (w, h) {
        return Err(Error::DimensionMismatch {
            expected: (w, h),
            actual: mask.dims(),
        });
    }
    if w < 3 || h < 3 {
        return Err(Error::TooSmall {
            width: w,
            height: h,
        });
    }
    let src = img.pixels();
    let half = kernel.window / 2;
    let range = value_range(src);
    let mut padded = Vec::with_capacity(w + 2 * half);

    // ring of horizontally smoothed rows, slot = row % window
    let mut h_ring = vec![T::zero(); kernel.window * w];
    let mut h_done = 0;
    // ring of fully smoothed rows, slot = row % 3
    let mut s_ring = vec![T::zero(); 3 * w];
    let mut column = vec![T::zero(); w];

    // magnitudes are non-negative and the border is zero, so the minimum is 0
    let mut hi2 = T::zero();
    let mut m2_row = vec![T::zero(); w];
    let mut lit: Vec<(usize, usize, T)> = Vec::new();
    let bits = mask.pixels();

    for y in 0..h {
        while h_done <= (y + half).min(h - 1) {
            let slot = h_done % kernel.window;
            smooth_row(
                &src[h_done * w..(h_done + 1) * w],
                &kernel.taps,
                &mut padded,
                &mut column,
            );
            h_ring[slot * w..(slot + 1) * w].copy_from_slice(&column);
            h_done += 1;
        }
        let slot = y % 3;
        {
            let row_at = |k: usize| {
                let sy = clamp_index(y as isize + k as isize - half as isize, h) % kernel.window;
                &h_ring[sy * w..(sy + 1) * w]
            };
            smooth_column(
                &kernel.taps,
                row_at,
                range,
                &mut s_ring[slot * w..(slot + 1) * w],
            );
        }
        // once row y is smoothed, Sobel can run on row y - 1
        if y >= 2 {
            let c = y - 1;
            let ring_row = |r: usize| &s_ring[(r % 3) * w..(r % 3 + 1) * w];
            let (up, mid, down) = (ring_row(c - 1), ring_row(c), ring_row(c + 1));
            for (x, slot) in m2_row.iter_mut().enumerate().take(w - 1).skip(1) {
                let (gx, gy) = sobel_at(up, mid, down, x);
                *slot = gx * gx + gy * gy;
            }
            for &m2 in &m2_row[1..w - 1] {
                if m2 > hi2 {
                    hi2 = m2;
                }
            }
            let row_bits = &bits[c * w..(c + 1) * w];
            if row_bits.contains(&1) {
                for x in 1..w - 1 {
                    if row_bits[x] != 0 {
                        lit.push((x, c, m2_row[x]));
                    }
                }
            }
        }
    }

    let (lo, hi) = (T::zero(), hi2.sqrt());
    let span = hi - lo;
    let mut out = BinaryRaster::zeros(w, h);
    // masked border pixels have e = 0 and only pass a non-positive threshold,
    // which the `n > 0` test rejects anyway
    for (x, y, m2) in lit {
        let n = stretch(m2.sqrt(), lo, span);
        out.set(x, y, n >= threshold && n > T::zero());
    }
    Ok(out)
}
