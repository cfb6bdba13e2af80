//! Transport-free session logic: one message in, a batch of events out.

use std::sync::Arc;

use airwrite_core::ocr::TemplateSet;
use airwrite_core::pipeline::{CharRecord, PipelineConfig, Session};
use airwrite_core::pnm::decode_ppm;
use airwrite_core::tracker::TrackerEvent;
use airwrite_core::{Real, RgbRaster};
use base64::engine::general_purpose::STANDARD;
use base64::Engine;

use crate::protocol::{ClientMessage, ErrorCode, FrameEncoding, ServerEvent};

pub struct LiveSession {
    base: PipelineConfig,
    templates: Arc<TemplateSet>,
    active: Option<Active>,
    closed: bool,
}

struct Active {
    id: String,
    cfg: PipelineConfig,
    session: Session<Real>,
    last_seq: Option<u64>,
}

impl LiveSession {
    pub fn new(base: PipelineConfig, templates: Arc<TemplateSet>) -> Self {
        Self {
            base,
            templates,
            active: None,
            closed: false,
        }
    }

    /// Set once `end` has been handled; the transport should close.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn session_id(&self) -> Option<&str> {
        self.active.as_ref().map(|a| a.id.as_str())
    }

    /// Parses one wire message and handles it.
    pub fn handle_text(&mut self, raw: &str) -> Vec<ServerEvent> {
        match serde_json::from_str::<ClientMessage>(raw) {
            Ok(msg) => self.handle(msg),
            Err(e) => vec![ServerEvent::error(ErrorCode::InvalidMessage, e.to_string())],
        }
    }

    pub fn handle(&mut self, msg: ClientMessage) -> Vec<ServerEvent> {
        match msg {
            ClientMessage::Start { config } => self.start(config),
            ClientMessage::Frame {
                seq,
                encoding,
                width,
                height,
                data,
            } => self.frame(seq, encoding, width, height, &data),
            ClientMessage::Commit => self.with_active(|a| {
                let mut out = Vec::new();
                match a.session.commit() {
                    Ok(Some(rec)) => push_char(&mut out, &rec, a.session.text()),
                    Ok(None) => {}
                    Err(e) => out.push(ServerEvent::error(ErrorCode::Internal, e.to_string())),
                }
                out
            }),
            ClientMessage::Reset => {
                self.with_active(
                    |a| match Session::new(a.cfg.clone(), a.session_templates()) {
                        Ok(s) => {
                            a.session = s;
                            a.last_seq = None;
                            vec![ServerEvent::Text {
                                text: String::new(),
                            }]
                        }
                        Err(e) => vec![ServerEvent::error(ErrorCode::Internal, e.to_string())],
                    },
                )
            }
            ClientMessage::End => {
                let out = self.with_active(|a| {
                    let mut out = Vec::new();
                    match a.session.finish() {
                        Ok(Some(rec)) => push_char(&mut out, &rec, a.session.text()),
                        Ok(None) => {}
                        Err(e) => out.push(ServerEvent::error(ErrorCode::Internal, e.to_string())),
                    }
                    // finishing may also have dropped a trailing space
                    out.push(ServerEvent::Text {
                        text: a.session.text().to_owned(),
                    });
                    out
                });
                if self.active.is_some() {
                    self.closed = true;
                }
                out
            }
        }
    }

    fn with_active(&mut self, f: impl FnOnce(&mut Active) -> Vec<ServerEvent>) -> Vec<ServerEvent> {
        match self.active.as_mut() {
            Some(a) => f(a),
            None => vec![ServerEvent::error(
                ErrorCode::NotStarted,
                "send start first",
            )],
        }
    }

    fn start(&mut self, overrides: Option<serde_json::Value>) -> Vec<ServerEvent> {
        let cfg = match merge_config(&self.base, overrides) {
            Ok(cfg) => cfg,
            Err(msg) => return vec![ServerEvent::error(ErrorCode::InvalidConfig, msg)],
        };
        match Session::new(cfg.clone(), self.templates.clone()) {
            Ok(session) => {
                let id = uuid::Uuid::new_v4().to_string();
                self.active = Some(Active {
                    id: id.clone(),
                    cfg,
                    session,
                    last_seq: None,
                });
                vec![ServerEvent::Ack { session: id }]
            }
            Err(e) => vec![ServerEvent::error(ErrorCode::InvalidConfig, e.to_string())],
        }
    }

    fn frame(
        &mut self,
        seq: u64,
        encoding: FrameEncoding,
        width: usize,
        height: usize,
        data: &str,
    ) -> Vec<ServerEvent> {
        self.with_active(|a| {
            if a.last_seq.is_some_and(|last| seq <= last) {
                return vec![ServerEvent::error(
                    ErrorCode::OutOfOrder,
                    format!("seq {seq} after {}", a.last_seq.unwrap()),
                )];
            }
            let frame = match decode_frame(encoding, width, height, data) {
                Ok(f) => f,
                Err(msg) => return vec![ServerEvent::error(ErrorCode::BadFrame, msg)],
            };
            let outcome = match a.session.process_frame(&frame) {
                Ok(o) => o,
                Err(e) => return vec![ServerEvent::error(ErrorCode::BadFrame, e.to_string())],
            };
            a.last_seq = Some(seq);

            let mut out = Vec::new();
            if let Some(d) = &outcome.detection {
                out.push(ServerEvent::Tracked {
                    seq,
                    x: d.centroid.x,
                    y: d.centroid.y,
                });
            }
            match (&outcome.event, &outcome.recognized) {
                (TrackerEvent::CharacterComplete(_), Some(rec)) => {
                    push_char(&mut out, rec, a.session.text())
                }
                (TrackerEvent::SpaceEmitted, _) => {
                    out.push(ServerEvent::Space);
                    out.push(ServerEvent::Text {
                        text: a.session.text().to_owned(),
                    });
                }
                _ => {}
            }
            out
        })
    }
}

impl Active {
    fn session_templates(&self) -> Arc<TemplateSet> {
        self.session.templates()
    }
}

fn push_char(out: &mut Vec<ServerEvent>, rec: &CharRecord<Real>, text: &str) {
    out.push(ServerEvent::Char {
        label: rec.label,
        score: rec.score,
    });
    out.push(ServerEvent::Text {
        text: text.to_owned(),
    });
}

fn decode_frame(
    encoding: FrameEncoding,
    width: usize,
    height: usize,
    data: &str,
) -> Result<RgbRaster, String> {
    let bytes = STANDARD.decode(data).map_err(|e| format!("base64: {e}"))?;
    let frame = match encoding {
        FrameEncoding::Rgb8Base64 => {
            RgbRaster::from_rgb8(width, height, &bytes).map_err(|e| e.to_string())?
        }
        FrameEncoding::PpmBase64 => decode_ppm(&bytes)?,
    };
    if frame.dims() != (width, height) {
        return Err(format!(
            "declared {width}x{height}, payload is {}x{}",
            frame.width(),
            frame.height()
        ));
    }
    Ok(frame)
}

/// Overlays client-supplied fields on the server configuration. Template
/// locations stay server-side.
fn merge_config(
    base: &PipelineConfig,
    overrides: Option<serde_json::Value>,
) -> Result<PipelineConfig, String> {
    let Some(overrides) = overrides else {
        return Ok(base.clone());
    };
    if !overrides.is_object() {
        return Err("config must be a JSON object".into());
    }
    if overrides.get("templates").is_some() {
        return Err("templates cannot be chosen by the client".into());
    }
    let mut merged = serde_json::to_value(base).map_err(|e| e.to_string())?;
    overlay(&mut merged, overrides);
    let cfg: PipelineConfig = serde_json::from_value(merged).map_err(|e| e.to_string())?;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn overlay(dst: &mut serde_json::Value, src: serde_json::Value) {
    match (dst, src) {
        (serde_json::Value::Object(d), serde_json::Value::Object(s)) => {
            for (k, v) in s {
                match d.get_mut(&k) {
                    Some(slot) => overlay(slot, v),
                    None => {
                        d.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overlay_is_field_by_field() {
        let base = PipelineConfig::default();
        let cfg = merge_config(
            &base,
            Some(json!({"tracker": {"dwell_frames": 9}, "edge_gate": false})),
        )
        .unwrap();
        assert_eq!(cfg.tracker.dwell_frames, 9);
        assert_eq!(cfg.tracker.absence_frames, base.tracker.absence_frames);
        assert!(!cfg.edge_gate);
        assert!(merge_config(&base, Some(json!({"gaussian_window": 4}))).is_err());
        assert!(merge_config(&base, Some(json!({"templates": "/etc"}))).is_err());
        assert!(merge_config(&base, Some(json!(3))).is_err());
        assert_eq!(merge_config(&base, None).unwrap(), base);
    }

    #[test]
    fn frame_payload_checks() {
        let raw = STANDARD.encode([1u8, 2, 3, 4, 5, 6]);
        assert_eq!(
            decode_frame(FrameEncoding::Rgb8Base64, 2, 1, &raw)
                .unwrap()
                .get(1, 0),
            [4, 5, 6]
        );
        assert!(decode_frame(FrameEncoding::Rgb8Base64, 3, 1, &raw).is_err());
        assert!(decode_frame(FrameEncoding::Rgb8Base64, 2, 1, "%%").is_err());
        let ppm = STANDARD.encode(b"P6\n2 1\n255\n\x01\x02\x03\x04\x05\x06");
        assert_eq!(
            decode_frame(FrameEncoding::PpmBase64, 2, 1, &ppm)
                .unwrap()
                .get(0, 0),
            [1, 2, 3]
        );
        assert!(decode_frame(FrameEncoding::PpmBase64, 1, 2, &ppm).is_err());
    }
}
