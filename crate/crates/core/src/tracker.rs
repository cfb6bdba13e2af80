//! Stroke accumulation and character/space segmentation.
//!
//! A character ends when the fingertip holds still (dwell) or disappears
//! for a while (absence). A sustained absence after a finished character is
//! a space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Point;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig<T> {
    /// Consecutive still frames that complete a character.
    pub dwell_frames: usize,
    /// Maximum centroid displacement, in pixels, that counts as still.
    pub dwell_epsilon: T,
    /// Consecutive frames without a detection that complete a character
    /// and then signal a space.
    pub absence_frames: usize,
    pub frame_width: usize,
}

impl<T: Scalar> Default for TrackerConfig<T> {
    fn default() -> Self {
        Self {
            dwell_frames: 15,
            dwell_epsilon: T::lit(3.0),
            absence_frames: 20,
            frame_width: 640,
        }
    }
}

impl<T: Scalar> TrackerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.dwell_frames == 0 || self.absence_frames == 0 {
            return Err(Error::InvalidConfig(
                "tracker frame counts must be >= 1".into(),
            ));
        }
        if !(self.dwell_epsilon > T::zero()) {
            return Err(Error::InvalidConfig("dwell_epsilon must be > 0".into()));
        }
        if self.frame_width == 0 {
            return Err(Error::InvalidConfig("frame_width must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrackerEvent<T> {
    PointAppended(Point<T>),
    /// Always carries at least two points.
    CharacterComplete(Vec<Point<T>>),
    SpaceEmitted,
    Idle,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackerState<T> {
    pub stroke: Vec<Point<T>>,
    pub dwell_counter: usize,
    pub absence_counter: usize,
    /// Last appended (or dwelt-on) position; cleared by a full absence run.
    pub last_centroid: Option<Point<T>>,
    pub frames_seen: usize,
    /// A character finished since the last space, so a space may follow.
    pub space_armed: bool,
    /// An absence run completed a character; its space is still due.
    pub space_owed: bool,
}

impl<T: Scalar> TrackerState<T> {
    pub fn new() -> Self {
        Self {
            stroke: Vec::new(),
            dwell_counter: 0,
            absence_counter: 0,
            last_centroid: None,
            frames_seen: 0,
            space_armed: false,
            space_owed: false,
        }
    }

    fn complete(&mut self) -> TrackerEvent<T> {
        self.dwell_counter = 0;
        self.space_armed = true;
        TrackerEvent::CharacterComplete(std::mem::take(&mut self.stroke))
    }

    fn emit_space(&mut self) -> TrackerEvent<T> {
        self.space_armed = false;
        self.space_owed = false;
        TrackerEvent::SpaceEmitted
    }

    /// Completes the pending stroke immediately, as a full dwell would.
    /// Returns `None` when fewer than two points are pending.
    pub fn force_complete(&mut self) -> Option<TrackerEvent<T>> {
        (self.stroke.len() >= 2).then(|| {
            self.absence_counter = 0;
            self.complete()
        })
    }

    /// End-of-session flush of a pending stroke. Owed spaces are dropped so
    /// a session never ends on a space.
    pub fn finish(&mut self) -> Option<TrackerEvent<T>> {
        self.space_owed = false;
        self.force_complete()
    }
}

/// One frame of the segmentation state machine.
pub fn step<T: Scalar>(
    mut state: TrackerState<T>,
    detection: Option<Point<T>>,
    cfg: &TrackerConfig<T>,
) -> (TrackerState<T>, TrackerEvent<T>) {
    state.frames_seen += 1;
    let event = match detection {
        Some(p) => {
            // a space owed by a run that ended in a character completion is
            // delivered now; the detection is still recorded
            let space = state.space_owed.then(|| state.emit_space());
            state.absence_counter = 0;
            let moved = match state.last_centroid {
                Some(last) => p.distance(&last) > cfg.dwell_epsilon,
                None => true,
            };
            let event = if moved {
                state.stroke.push(p);
                state.last_centroid = Some(p);
                state.dwell_counter = 0;
                TrackerEvent::PointAppended(p)
            } else {
                state.dwell_counter += 1;
                if state.dwell_counter >= cfg.dwell_frames && state.stroke.len() >= 2 {
                    state.complete()
                } else {
                    TrackerEvent::Idle
                }
            };
            space.unwrap_or(event)
        }
        None => {
            state.dwell_counter = 0;
            state.absence_counter += 1;
            if state.space_owed {
                state.emit_space()
            } else if state.absence_counter == cfg.absence_frames {
                state.last_centroid = None;
                if state.stroke.len() >= 2 {
                    state.space_owed = true;
                    state.complete()
                } else {
                    state.stroke.clear();
                    if state.space_armed {
                        state.emit_space()
                    } else {
                        TrackerEvent::Idle
                    }
                }
            } else {
                TrackerEvent::Idle
            }
        }
    };
    (state, event)
}

/// Horizontal reflection `x -> frame_width - 1 - x`.
pub fn mirror_x<T: Scalar>(stroke: &[Point<T>], frame_width: usize) -> Vec<Point<T>> {
    let edge = T::from_count(frame_width) - T::one();
    stroke.iter().map(|p| Point::new(edge - p.x, p.y)).collect()
}
