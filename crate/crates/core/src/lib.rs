//! Minutiae-based fingerprint verification and identification.
//!
//! The pipeline runs enhancement (histogram equalization plus adaptive
//! denoising), block-wise ridge orientation estimation, curvature-peak core
//! detection, circular ROI extraction, binarization, thinning and binary
//! cleanup, crossing-number minutiae extraction with distance-based pruning,
//! and finally converts the minutiae constellation into a fixed-length
//! Fourier-descriptor template compared by Euclidean distance. An evaluation
//! harness sweeps decision thresholds over genuine/impostor score sets and
//! reports FAR/FRR curves, equal error rate and accuracy.

pub mod config;
pub mod corepoint;
pub mod descriptor;
pub mod enhance;
pub mod error;
pub mod eval;
pub mod imageio;
pub mod matcher;
pub mod minutiae;
pub mod orientation;
pub mod pipeline;
pub mod ridgemap;
pub mod synth;

pub use config::PipelineConfig;
pub use corepoint::{CorePoint, RoiMask};
pub use descriptor::{DescriptorMode, Template, TemplateMeta};
pub use error::{Error, Result};
pub use imageio::GrayImage;
pub use matcher::MatchDecision;
pub use minutiae::{Minutia, MinutiaKind, MinutiaeSet};
