//! Red fingertip extraction, optionally gated by the difference against the
//! previous frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryRaster, RgbRaster};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RedParams {
    pub min_red: u8,
    pub min_dominance: u8,
    pub diff_threshold: u8,
    pub use_motion_gate: bool,
}

impl Default for RedParams {
    fn default() -> Self {
        Self {
            min_red: 150,
            min_dominance: 70,
            diff_threshold: 25,
            use_motion_gate: false,
        }
    }
}

impl RedParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_red < self.min_dominance {
            return Err(Error::InvalidConfig(format!(
                "min_red ({}) must be >= min_dominance ({})",
                self.min_red, self.min_dominance
            )));
        }
        Ok(())
    }

    #[inline]
    fn is_red(&self, [r, g, b]: [u8; 3]) -> bool {
        r >= self.min_red && r as i16 - g.max(b) as i16 >= self.min_dominance as i16
    }
}

fn require_same_dims(a: &RgbRaster, b: &RgbRaster) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dims(),
            actual: b.dims(),
        });
    }
    Ok(())
}

pub fn red_mask(frame: &RgbRaster, params: &RedParams) -> BinaryRaster {
    let pixels = frame
        .pixels()
        .iter()
        .map(|&p| params.is_red(p) as u8)
        .collect();
    BinaryRaster::new(frame.width(), frame.height(), pixels).expect("same dimensions as frame")
}

/// Lit where any channel changed by more than `diff_threshold`.
pub fn frame_diff(
    current: &RgbRaster,
    previous: &RgbRaster,
    params: &RedParams,
) -> Result<BinaryRaster> {
    require_same_dims(current, previous)?;
    let pixels = current
        .pixels()
        .iter()
        .zip(previous.pixels())
        .map(|(c, p)| {
            let delta = (0..3).map(|i| c[i].abs_diff(p[i])).max().unwrap();
            (delta > params.diff_threshold) as u8
        })
        .collect();
    Ok(BinaryRaster::new(current.width(), current.height(), pixels).expect("same dimensions"))
}

/// Red mask, intersected with the motion mask when the gate is enabled and a
/// reference frame exists.
pub fn object_mask(
    current: &RgbRaster,
    previous: Option<&RgbRaster>,
    params: &RedParams,
) -> Result<BinaryRaster> {
    if let Some(prev) = previous {
        require_same_dims(current, prev)?;
    }
    let red = red_mask(current, params);
    match previous {
        Some(prev) if params.use_motion_gate => Ok(red.and(&frame_diff(current, prev, params)?)),
        _ => Ok(red),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SKIN: [u8; 3] = [224, 172, 140];
    const TAPE: [u8; 3] = [230, 20, 25];

    fn dot_frame(cx: i64, cy: i64, r: i64) -> RgbRaster {
        let mut f = RgbRaster::filled(40, 30, SKIN);
        for y in 0..30 {
            for x in 0..40 {
                if (x - cx).pow(2) + (y - cy).pow(2) <= r * r {
                    f.set(x as usize, y as usize, TAPE);
                }
            }
        }
        f
    }

    fn dot_support(cx: i64, cy: i64, r: i64) -> BinaryRaster {
        BinaryRaster::from_fn(40, 30, |x, y| {
            (x as i64 - cx).pow(2) + (y as i64 - cy).pow(2) <= r * r
        })
    }

    #[test]
    fn red_mask_basics() {
        let p = RedParams::default();
        assert!(red_mask(&RgbRaster::filled(5, 5, [0, 0, 0]), &p).is_empty());
        assert_eq!(
            red_mask(&RgbRaster::filled(1, 1, [255, 0, 0]), &p).pixels(),
            &[1]
        );
        assert_eq!(
            red_mask(&RgbRaster::filled(1, 1, [255, 200, 0]), &p).pixels(),
            &[0]
        );
    }

    #[test]
    fn red_mask_finds_exactly_the_tape_patch() {
        let mut frame = RgbRaster::filled(20, 16, SKIN);
        for y in 4..9 {
            for x in 11..15 {
                frame.set(x, y, TAPE);
            }
        }
        let oracle =
            BinaryRaster::from_fn(20, 16, |x, y| (11..15).contains(&x) && (4..9).contains(&y));
        assert_eq!(red_mask(&frame, &RedParams::default()), oracle);
    }

    #[test]
    fn frame_diff_cases() {
        let p = RedParams::default();
        let a = dot_frame(10, 10, 3);
        assert!(frame_diff(&a, &a, &p).unwrap().is_empty());

        let mut b = RgbRaster::filled(4, 4, [0, 0, 0]);
        let base = b.clone();
        b.set(2, 1, [0, 255, 0]);
        let d = frame_diff(&b, &base, &p).unwrap();
        assert_eq!(d.count_ones(), 1);
        assert!(d.get(2, 1));

        let moved = dot_frame(15, 10, 3);
        let union = BinaryRaster::from_fn(40, 30, |x, y| {
            dot_support(10, 10, 3).get(x, y) || dot_support(15, 10, 3).get(x, y)
        });
        // the two dots overlap; overlapping pixels are tape in both frames
        let overlap = dot_support(10, 10, 3).and(&dot_support(15, 10, 3));
        let expected = BinaryRaster::from_fn(40, 30, |x, y| union.get(x, y) && !overlap.get(x, y));
        assert_eq!(frame_diff(&moved, &a, &p).unwrap(), expected);

        assert!(matches!(
            frame_diff(&a, &RgbRaster::filled(3, 3, SKIN), &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn object_mask_gating() {
        let off = RedParams::default();
        let on = RedParams {
            use_motion_gate: true,
            ..off
        };
        let prev = dot_frame(10, 10, 4);
        let cur = dot_frame(16, 12, 4);
        assert_eq!(
            object_mask(&cur, Some(&prev), &off).unwrap(),
            red_mask(&cur, &off)
        );
        assert_eq!(object_mask(&cur, None, &on).unwrap(), red_mask(&cur, &on));
        assert!(object_mask(&prev, Some(&prev), &on).unwrap().is_empty());

        let expected = dot_support(16, 12, 4).and(&dot_support(10, 10, 4).complement());
        assert_eq!(object_mask(&cur, Some(&prev), &on).unwrap(), expected);
    }

    fn arb_frame() -> impl Strategy<Value = RgbRaster> {
        proptest::collection::vec(any::<[u8; 3]>(), 48)
            .prop_map(|px| RgbRaster::new(8, 6, px).unwrap())
    }

    proptest! {
        #[test]
        fn red_mask_monotone_in_min_red(frame in arb_frame(), lo in 0u8..=255, bump in 0u8..=255) {
            let hi = lo.saturating_add(bump);
            let p_lo = RedParams { min_red: lo, min_dominance: 0, ..RedParams::default() };
            let p_hi = RedParams { min_red: hi, ..p_lo };
            let m_lo = red_mask(&frame, &p_lo);
            let m_hi = red_mask(&frame, &p_hi);
            prop_assert_eq!(m_hi.and(&m_lo), m_hi);
        }

        #[test]
        fn frame_diff_symmetric(a in arb_frame(), b in arb_frame(), t: u8) {
            let p = RedParams { diff_threshold: t, ..RedParams::default() };
            prop_assert_eq!(frame_diff(&a, &b, &p).unwrap(), frame_diff(&b, &a, &p).unwrap());
        }

        #[test]
        fn object_mask_within_red_mask(a in arb_frame(), b in arb_frame(), gate: bool) {
            let p = RedParams { use_motion_gate: gate, min_red: 100, min_dominance: 20, ..RedParams::default() };
            let obj = object_mask(&a, Some(&b), &p).unwrap();
            let red = red_mask(&a, &p);
            prop_assert_eq!(obj.and(&red), obj);
        }
    }
}
