//! Wire types. Every message is one JSON object tagged by `type`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    /// Opens (or reopens) a session. `config` is merged over the server's
    /// pipeline configuration, field by field.
    Start {
        #[serde(default)]
        config: Option<serde_json::Value>,
    },
    Frame {
        seq: u64,
        #[serde(default)]
        encoding: FrameEncoding,
        width: usize,
        height: usize,
        data: String,
    },
    /// Completes the current character as a dwell would.
    Commit,
    Reset,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FrameEncoding {
    /// Raw row-major RGB bytes.
    #[default]
    #[serde(rename = "rgb8-base64")]
    Rgb8Base64,
    /// A binary PPM (P6) file.
    #[serde(rename = "ppm-base64")]
    PpmBase64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerEvent {
    Ack {
        session: String,
    },
    /// Target centroid in frame coordinates (not mirrored).
    Tracked {
        seq: u64,
        x: f64,
        y: f64,
    },
    Char {
        label: char,
        score: f64,
    },
    Space,
    Text {
        text: String,
    },
    Error {
        code: ErrorCode,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    /// Not valid JSON or not a known message.
    InvalidMessage,
    NotStarted,
    OutOfOrder,
    /// Undecodable payload or wrong dimensions; the frame is skipped.
    BadFrame,
    InvalidConfig,
    /// The pipeline failed on an otherwise valid request.
    Internal,
}

impl ServerEvent {
    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        Self::Error {
            code,
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("events always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_shapes() {
        let m: ClientMessage = serde_json::from_str(
            r#"{"type":"frame","seq":3,"encoding":"ppm-base64","width":2,"height":1,"data":""}"#,
        )
        .unwrap();
        assert!(matches!(
            m,
            ClientMessage::Frame {
                seq: 3,
                encoding: FrameEncoding::PpmBase64,
                ..
            }
        ));
        let m: ClientMessage =
            serde_json::from_str(r#"{"type":"frame","seq":0,"width":1,"height":1,"data":""}"#)
                .unwrap();
        assert!(matches!(
            m,
            ClientMessage::Frame {
                encoding: FrameEncoding::Rgb8Base64,
                ..
            }
        ));
        assert_eq!(
            serde_json::from_str::<ClientMessage>(r#"{"type":"start"}"#).unwrap(),
            ClientMessage::Start { config: None }
        );
        assert_eq!(
            serde_json::from_str::<ClientMessage>(r#"{"type":"commit"}"#).unwrap(),
            ClientMessage::Commit
        );

        assert_eq!(
            ServerEvent::Char {
                label: 'W',
                score: 0.5
            }
            .to_json(),
            r#"{"type":"char","label":"W","score":0.5}"#
        );
        assert_eq!(ServerEvent::Space.to_json(), r#"{"type":"space"}"#);
        assert_eq!(
            ServerEvent::error(ErrorCode::OutOfOrder, "x").to_json(),
            r#"{"type":"error","code":"out_of_order","message":"x"}"#
        );
        assert!(!ServerEvent::Text {
            text: "a\nb".into()
        }
        .to_json()
        .contains('\n'));
    }
}
