//! Live air-writing over WebSocket. Clients stream frames as JSON messages
//! and receive tracking, character, space and text events back.

pub mod protocol;
pub mod session;
mod ws;

pub use protocol::{ClientMessage, ErrorCode, FrameEncoding, ServerEvent};
pub use session::LiveSession;
pub use ws::{serve, Server, ServerError};
