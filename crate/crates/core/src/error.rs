use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
    #[error("gaussian window must be odd and >= 3, got {0}")]
    InvalidWindow(usize),
    #[error("image too small for a 3x3 operator: {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("stroke is degenerate: all points coincide")]
    DegenerateStroke,
    #[error("stroke needs at least 2 points, got {0}")]
    ShortStroke(usize),
    #[error("glyph has no lit pixels")]
    EmptyGlyph,
    #[error("template set is empty: {0}")]
    EmptySet(PathBuf),
    #[error("template {path} is {actual}x{actual}, expected {expected}x{expected}")]
    MixedSizes {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },
    #[error("unreadable image {path}: {reason}")]
    UnreadableImage { path: PathBuf, reason: String },
    #[error("invalid template label directory {0}")]
    InvalidLabel(PathBuf),
    #[error("no built-in letter path for {0:?}")]
    UnknownLabel(char),
    #[error("invalid synth text {0:?}: expected nonempty A-Z and spaces")]
    InvalidText(String),
    #[error("no frames to process")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
