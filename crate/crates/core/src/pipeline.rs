//! Frame-by-frame orchestration: object mask, optional edge gate, blob
//! selection, tracking, and recognition of each completed stroke.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::blobs::{label, region_props_at, select_target, Connectivity, RegionProps};
use crate::edge::{edge_gate, GaussianKernel, DEFAULT_EDGE_THRESHOLD};
use crate::error::{Error, Result};
use crate::ocr::{load_templates, recognize, TemplateSet};
use crate::plotter::{fit_to_template, rasterize_stroke, GlyphCanvas};
use crate::raster::{to_grayscale, BinaryRaster, Point, RgbRaster};
use crate::scalar::Scalar;
use crate::segmentation::{object_mask, RedParams};
use crate::synth::default_templates;
use crate::tracker::{mirror_x, step, TrackerConfig, TrackerEvent, TrackerState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub red: RedParams,
    pub gaussian_window: usize,
    pub edge_threshold: f64,
    /// Intersect the object mask with the thresholded edge image.
    pub edge_gate: bool,
    pub connectivity: Connectivity,
    pub min_blob_area: usize,
    /// `frame_width` is replaced by the width of the first frame.
    pub tracker: TrackerConfig<f64>,
    pub canvas: GlyphCanvas,
    /// Template directory; the built-in set is used when absent.
    pub templates: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            red: RedParams::default(),
            gaussian_window: 3,
            edge_threshold: DEFAULT_EDGE_THRESHOLD,
            edge_gate: true,
            connectivity: Connectivity::Eight,
            min_blob_area: 15,
            tracker: TrackerConfig::default(),
            canvas: GlyphCanvas::default(),
            templates: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.red.validate()?;
        GaussianKernel::<f64>::new(self.gaussian_window)?;
        if !(0.0..=255.0).contains(&self.edge_threshold) {
            return Err(Error::InvalidConfig(format!(
                "edge threshold {} outside [0, 255]",
                self.edge_threshold
            )));
        }
        self.tracker.validate()?;
        self.canvas.validate()
    }

    pub fn load_templates(&self) -> Result<Arc<TemplateSet>> {
        match &self.templates {
            Some(dir) => Ok(Arc::new(load_templates(dir)?)),
            None => Ok(default_templates()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharRecord<T> {
    pub label: char,
    pub score: T,
    pub runner_up: Option<(char, T)>,
    pub stroke_len: usize,
    /// First and last frame index (0-based) of the stroke.
    pub frames: (usize, usize),
    /// Stroke completion to label emission.
    pub recognition_time: Duration,
    pub glyph: BinaryRaster,
}

/// Cumulative time spent per stage.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StageTimings {
    pub segmentation_s: f64,
    pub edge_s: f64,
    pub blobs_s: f64,
    pub tracking_s: f64,
    pub recognition_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome<T> {
    pub detection: Option<RegionProps<T>>,
    pub event: TrackerEvent<T>,
    /// Set when this frame completed a character.
    pub recognized: Option<CharRecord<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionReport<T> {
    pub text: String,
    pub per_char: Vec<CharRecord<T>>,
    pub spaces: usize,
    pub frames: usize,
    pub stages: StageTimings,
    pub total: Duration,
}

impl<T: Scalar> RecognitionReport<T> {
    pub fn per_char_seconds(&self) -> Vec<f64> {
        self.per_char
            .iter()
            .map(|c| c.recognition_time.as_secs_f64())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let per_char: Vec<_> = self
            .per_char
            .iter()
            .map(|c| {
                serde_json::json!({
                    "label": c.label.to_string(),
                    "score": c.score.to_f64_lossy(),
                    "frames": [c.frames.0, c.frames.1],
                    "stroke_len": c.stroke_len,
                })
            })
            .collect();
        serde_json::json!({
            "text": self.text,
            "per_char": per_char,
            "timings": {
                "total_s": self.total.as_secs_f64(),
                "per_char_s": self.per_char_seconds(),
                "stages": self.stages,
            },
        })
    }
}

/// One writer's stream of frames. Frame order matters; a session is not
/// shared between threads while processing.
pub struct Session<T: Scalar> {
    cfg: PipelineConfig,
    templates: Arc<TemplateSet>,
    kernel: GaussianKernel<T>,
    tracker_cfg: Option<TrackerConfig<T>>,
    state: TrackerState<T>,
    previous: Option<RgbRaster>,
    dims: Option<(usize, usize)>,
    frame_index: usize,
    stroke_start: Option<usize>,
    text: String,
    per_char: Vec<CharRecord<T>>,
    spaces: usize,
    stages: StageTimings,
    busy: Duration,
}

impl<T: Scalar> Session<T> {
    pub fn new(cfg: PipelineConfig, templates: Arc<TemplateSet>) -> Result<Self> {
        cfg.validate()?;
        let kernel = GaussianKernel::new(cfg.gaussian_window)?;
        Ok(Self {
            cfg,
            templates,
            kernel,
            tracker_cfg: None,
            state: TrackerState::new(),
            previous: None,
            dims: None,
            frame_index: 0,
            stroke_start: None,
            text: String::new(),
            per_char: Vec::new(),
            spaces: 0,
            stages: StageTimings::default(),
            busy: Duration::ZERO,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn templates(&self) -> Arc<TemplateSet> {
        self.templates.clone()
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn frames_processed(&self) -> usize {
        self.frame_index
    }

    pub fn tracker_state(&self) -> &TrackerState<T> {
        &self.state
    }

    /// Locates the fingertip in one frame.
    pub fn detect(&mut self, frame: &RgbRaster) -> Result<Option<RegionProps<T>>> {
        let t0 = Instant::now();
        let mut mask = object_mask(frame, self.previous.as_ref(), &self.cfg.red)?;
        let t1 = Instant::now();
        self.stages.segmentation_s += (t1 - t0).as_secs_f64();

        // with an empty mask the gate cannot add anything
        if self.cfg.edge_gate && !mask.is_empty() {
            let gray = to_grayscale::<T>(frame);
            mask = edge_gate(&gray, &self.kernel, T::lit(self.cfg.edge_threshold), &mask)?;
        }
        let t2 = Instant::now();
        self.stages.edge_s += (t2 - t1).as_secs_f64();

        // components never leave the lit bounding box, and row-major order
        // inside it matches the full frame, so labeling the crop is exact
        let target = mask.bounding_box().and_then(|(x0, y0, x1, y1)| {
            let labels = label(&mask.crop(x0, y0, x1, y1), self.cfg.connectivity);
            select_target(
                &region_props_at::<T>(&labels, (x0, y0)),
                self.cfg.min_blob_area,
            )
        });
        self.stages.blobs_s += t2.elapsed().as_secs_f64();
        Ok(target)
    }

    pub fn process_frame(&mut self, frame: &RgbRaster) -> Result<FrameOutcome<T>> {
        let start = Instant::now();
        if let Some(dims) = self.dims {
            if dims != frame.dims() {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    actual: frame.dims(),
                });
            }
        }
        self.dims = Some(frame.dims());
        let tracker_cfg = *self.tracker_cfg.get_or_insert_with(|| {
            let c = self.cfg.tracker;
            TrackerConfig {
                dwell_frames: c.dwell_frames,
                dwell_epsilon: T::lit(c.dwell_epsilon),
                absence_frames: c.absence_frames,
                frame_width: frame.width(),
            }
        });

        let detection = self.detect(frame)?;
        let t_track = Instant::now();
        let state = std::mem::take(&mut self.state);
        let (state, event) = step(state, detection.as_ref().map(|d| d.centroid), &tracker_cfg);
        self.state = state;
        self.stages.tracking_s += t_track.elapsed().as_secs_f64();

        let index = self.frame_index;
        self.frame_index += 1;
        // the reference frame is only read by the motion gate
        if self.cfg.red.use_motion_gate {
            self.previous = Some(frame.clone());
        }

        let recognized = match &event {
            TrackerEvent::PointAppended(_) => {
                self.stroke_start.get_or_insert(index);
                None
            }
            TrackerEvent::CharacterComplete(stroke) => Some(self.recognize_stroke(stroke, index)?),
            TrackerEvent::SpaceEmitted => {
                self.text.push(' ');
                self.spaces += 1;
                // the detection that delivered an owed space opens a new stroke
                if self.state.stroke.len() == 1 {
                    self.stroke_start = Some(index);
                }
                None
            }
            TrackerEvent::Idle => None,
        };
        if self.state.stroke.is_empty() {
            self.stroke_start = None;
        }
        self.busy += start.elapsed();
        Ok(FrameOutcome {
            detection,
            event,
            recognized,
        })
    }

    fn recognize_stroke(&mut self, stroke: &[Point<T>], end_frame: usize) -> Result<CharRecord<T>> {
        let t0 = Instant::now();
        let width = self
            .tracker_cfg
            .map_or(self.cfg.tracker.frame_width, |c| c.frame_width);
        let corrected = mirror_x(stroke, width);
        let glyph = rasterize_stroke(&corrected, &self.cfg.canvas)?;
        let fitted = fit_to_template(&glyph, self.templates.template_size())?;
        let m = recognize::<T>(&fitted, &self.templates)?;
        let record = CharRecord {
            label: m.label,
            score: m.score,
            runner_up: m.runner_up,
            stroke_len: stroke.len(),
            frames: (self.stroke_start.take().unwrap_or(end_frame), end_frame),
            recognition_time: t0.elapsed(),
            glyph: fitted,
        };
        self.stages.recognition_s += record.recognition_time.as_secs_f64();
        self.text.push(record.label);
        self.per_char.push(record.clone());
        Ok(record)
    }

    /// Completes the pending stroke as if the writer had dwelt.
    pub fn commit(&mut self) -> Result<Option<CharRecord<T>>> {
        match self.state.force_complete() {
            Some(TrackerEvent::CharacterComplete(stroke)) => {
                let end = self.frame_index.saturating_sub(1);
                Ok(Some(self.recognize_stroke(&stroke, end)?))
            }
            _ => Ok(None),
        }
    }

    /// Flushes the pending stroke and drops a trailing space.
    pub fn finish(&mut self) -> Result<Option<CharRecord<T>>> {
        let flushed = match self.state.finish() {
            Some(TrackerEvent::CharacterComplete(stroke)) => {
                let end = self.frame_index.saturating_sub(1);
                Some(self.recognize_stroke(&stroke, end)?)
            }
            _ => None,
        };
        if self.text.ends_with(' ') {
            self.text.pop();
            self.spaces -= 1;
        }
        Ok(flushed)
    }

    pub fn report(&self) -> RecognitionReport<T> {
        RecognitionReport {
            text: self.text.clone(),
            per_char: self.per_char.clone(),
            spaces: self.spaces,
            frames: self.frame_index,
            stages: self.stages,
            total: self.busy,
        }
    }
}

/// Runs a whole frame sequence through a fresh session.
pub fn recognize_sequence_with<T: Scalar>(
    frames: &[RgbRaster],
    cfg: &PipelineConfig,
    templates: Arc<TemplateSet>,
) -> Result<RecognitionReport<T>> {
    if frames.is_empty() {
        return Err(Error::EmptyInput);
    }
    let start = Instant::now();
    let mut session = Session::<T>::new(cfg.clone(), templates)?;
    for frame in frames {
        session.process_frame(frame)?;
    }
    session.finish()?;
    let mut report = session.report();
    report.total = start.elapsed();
    Ok(report)
}

/// As [`recognize_sequence_with`], loading templates from the config.
pub fn recognize_sequence<T: Scalar>(
    frames: &[RgbRaster],
    cfg: &PipelineConfig,
) -> Result<RecognitionReport<T>> {
    if frames.is_empty() {
        return Err(Error::EmptyInput);
    }
    recognize_sequence_with(frames, cfg, cfg.load_templates()?)
}
