//! Air-writing recognition: follow a red fingertip through video frames,
//! collect its trajectory, split it into characters and read each one by
//! template correlation.
//!
//! The numeric stages are generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix the scalar for the common cases.

// `!(x > 0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blobs;
pub mod edge;
pub mod error;
pub mod harness;
pub mod ocr;
pub mod pipeline;
pub mod plotter;
pub mod pnm;
pub mod raster;
pub mod scalar;
pub mod segmentation;
pub mod synth;
pub mod tracker;

pub use error::{Error, Result};
pub use raster::{BinaryRaster, RgbRaster};
pub use scalar::Scalar;

/// Scalar used by the CLI and the live server.
pub type Real = f64;

pub type GrayRaster = raster::GrayRaster<Real>;
pub type GrayRasterF32 = raster::GrayRaster<f32>;
pub type Point = raster::Point<Real>;
pub type PointF32 = raster::Point<f32>;
pub type EdgeMaps = edge::EdgeMaps<Real>;
pub type EdgeMapsF32 = edge::EdgeMaps<f32>;
pub type GaussianKernel = edge::GaussianKernel<Real>;
pub type RegionProps = blobs::RegionProps<Real>;
pub type TrackerConfig = tracker::TrackerConfig<Real>;
pub type TrackerState = tracker::TrackerState<Real>;
pub type TrackerEvent = tracker::TrackerEvent<Real>;
pub type MatchResult = ocr::MatchResult<Real>;
pub type Session = pipeline::Session<Real>;
pub type SessionF32 = pipeline::Session<f32>;
pub type CharRecord = pipeline::CharRecord<Real>;
pub type RecognitionReport = pipeline::RecognitionReport<Real>;
