//! Connected-component labeling and per-region measurements.

use serde::{Deserialize, Serialize};

use crate::raster::{BinaryRaster, Point};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    /// N, S, E, W neighbors.
    Four,
    /// All eight neighbors.
    #[default]
    Eight,
}

impl Connectivity {
    pub fn from_count(n: u8) -> Option<Self> {
        match n {
            4 => Some(Self::Four),
            8 => Some(Self::Eight),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRaster {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: u32,
}

impl LabelRaster {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major labels, 0 for background.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }
}

/// Disjoint sets over provisional labels with path halving.
struct Equivalences {
    parent: Vec<u32>,
}

impl Equivalences {
    fn new() -> Self {
        // slot 0 is the background and never merged
        Self { parent: vec![0] }
    }

    fn fresh(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut a: u32) -> u32 {
        while self.parent[a as usize] != a {
            let grand = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = grand;
            a = grand;
        }
        a
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Two-pass labeling. Final labels are numbered `1..=count` in the order
/// their regions are first met in a row-major scan.
pub fn label(mask: &BinaryRaster, connectivity: Connectivity) -> LabelRaster {
    let (w, h) = mask.dims();
    let mut labels = vec![0u32; w * h];
    let mut eq = Equivalences::new();

    // first pass: provisional labels from already-visited neighbors
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let mut neighbors = [0u32; 4];
            let mut n = 0;
            let mut push = |l: u32| {
                if l != 0 {
                    neighbors[n] = l;
                    n += 1;
                }
            };
            if x > 0 {
                push(labels[y * w + x - 1]);
            }
            if y > 0 {
                push(labels[(y - 1) * w + x]);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        push(labels[(y - 1) * w + x - 1]);
                    }
                    if x + 1 < w {
                        push(labels[(y - 1) * w + x + 1]);
                    }
                }
            }
            labels[y * w + x] = if n == 0 {
                eq.fresh()
            } else {
                let mut root = neighbors[0];
                for &other in &neighbors[1..n] {
                    root = eq.union(root, other);
                }
                eq.find(root)
            };
        }
    }

    // second pass: resolve equivalences and renumber by first encounter
    let mut renumber = vec![0u32; eq.parent.len()];
    let mut count = 0;
    for l in labels.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = eq.find(*l) as usize;
        if renumber[root] == 0 {
            count += 1;
            renumber[root] = count;
        }
        *l = renumber[root];
    }

    LabelRaster {
        width: w,
        height: h,
        labels,
        count,
    }
}

/// Inclusive axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BoundingBox {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.min_x..=self.max_x).contains(&x) && (self.min_y..=self.max_y).contains(&y)
    }

    pub fn width(&self) -> usize {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> usize {
        self.max_y - self.min_y + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionProps<T> {
    pub label: u32,
    pub area: usize,
    pub bbox: BoundingBox,
    pub centroid: Point<T>,
    /// Major-axis angle in `(-pi/2, pi/2]`, image coordinates (y down).
    pub orientation: T,
}

struct Moments {
    area: usize,
    bbox: BoundingBox,
    sum_x: f64,
    sum_y: f64,
    sum_xx: f64,
    sum_yy: f64,
    sum_xy: f64,
}

/// Area, bounding box, centroid and orientation for labels `1..=count`.
pub fn region_props<T: Scalar>(labels: &LabelRaster) -> Vec<RegionProps<T>> {
    region_props_at(labels, (0, 0))
}

/// [`region_props`] for a label raster cut from a larger image whose top-left
/// corner sat at `origin`; results are in the larger image's coordinates.
pub fn region_props_at<T: Scalar>(
    labels: &LabelRaster,
    origin: (usize, usize),
) -> Vec<RegionProps<T>> {
    let mut acc: Vec<Option<Moments>> = (0..labels.count).map(|_| None).collect();
    for ly in 0..labels.height {
        for lx in 0..labels.width {
            let l = labels.get(lx, ly);
            if l == 0 {
                continue;
            }
            let (x, y) = (lx + origin.0, ly + origin.1);
            let (fx, fy) = (x as f64, y as f64);
            let m = acc[(l - 1) as usize].get_or_insert(Moments {
                area: 0,
                bbox: BoundingBox {
                    min_x: x,
                    min_y: y,
                    max_x: x,
                    max_y: y,
                },
                sum_x: 0.0,
                sum_y: 0.0,
                sum_xx: 0.0,
                sum_yy: 0.0,
                sum_xy: 0.0,
            });
            m.area += 1;
            m.bbox.min_x = m.bbox.min_x.min(x);
            m.bbox.max_x = m.bbox.max_x.max(x);
            m.bbox.min_y = m.bbox.min_y.min(y);
            m.bbox.max_y = m.bbox.max_y.max(y);
            m.sum_x += fx;
            m.sum_y += fy;
            m.sum_xx += fx * fx;
            m.sum_yy += fy * fy;
            m.sum_xy += fx * fy;
        }
    }

    acc.into_iter()
        .enumerate()
        .map(|(i, m)| {
            let m = m.expect("every label in 1..=count has pixels");
            let n = m.area as f64;
            let (cx, cy) = (m.sum_x / n, m.sum_y / n);
            let mu20 = m.sum_xx / n - cx * cx;
            let mu02 = m.sum_yy / n - cy * cy;
            let mu11 = m.sum_xy / n - cx * cy;
            RegionProps {
                label: i as u32 + 1,
                area: m.area,
                bbox: m.bbox,
                centroid: Point::new(T::lit(cx), T::lit(cy)),
                orientation: T::lit(orientation(mu20, mu02, mu11)),
            }
        })
        .collect()
}

/// `0.5 * atan2(2 mu11, mu20 - mu02)`, folded into `(-pi/2, pi/2]`.
fn orientation(mu20: f64, mu02: f64, mu11: f64) -> f64 {
    const EPS: f64 = 1e-12;
    let spread = mu20.abs().max(mu02.abs()).max(EPS);
    let (a, b) = (2.0 * mu11, mu20 - mu02);
    if a.abs() <= EPS * spread && b.abs() <= EPS * spread {
        return 0.0;
    }
    // centered moments of an axis-aligned shape can come out as -0.0 or tiny noise
    let a = if a.abs() <= EPS * spread { 0.0 } else { a };
    let theta = 0.5 * a.atan2(b);
    if theta <= -std::f64::consts::FRAC_PI_2 {
        theta + std::f64::consts::PI
    } else {
        theta
    }
}

/// Largest region with `area >= min_area`; ties go to the smaller label.
pub fn select_target<T: Clone>(
    props: &[RegionProps<T>],
    min_area: usize,
) -> Option<RegionProps<T>> {
    props
        .iter()
        .filter(|p| p.area >= min_area)
        .fold(None::<&RegionProps<T>>, |best, p| match best {
            Some(b) if b.area > p.area || (b.area == p.area && b.label < p.label) => Some(b),
            _ => Some(p),
        })
        .cloned()
}
