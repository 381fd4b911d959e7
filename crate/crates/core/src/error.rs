use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the pipeline stages and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt image: {0}")]
    CorruptImage(String),

    #[error("target dimensions must be nonzero, got {width}x{height}")]
    ZeroDimension { width: u32, height: u32 },

    #[error("denoise window must be odd and >= 3, got {0}")]
    BadWindow(u32),

    #[error("image {width}x{height} smaller than one {block_size}x{block_size} block")]
    ImageTooSmall {
        width: u32,
        height: u32,
        block_size: u32,
    },

    #[error("orientation field is {cols}x{rows} blocks; need at least 3x3")]
    FieldTooSmall { cols: usize, rows: usize },

    #[error("no core point found: peak strength {strength:.4} below threshold {threshold:.4}")]
    NoCoreFound { strength: f64, threshold: f64 },

    #[error("roi radius must be positive")]
    BadRadius,

    #[error("skeleton is not thinned: 2x2 ridge block at ({x},{y})")]
    NotThinned { x: u32, y: u32 },

    #[error("cannot build a signature from an empty minutiae set")]
    EmptyMinutiaeSet,

    #[error("descriptor count {count} exceeds signature slots {slots}")]
    BadDescriptorCount { count: u16, slots: u16 },

    #[error("bad template magic")]
    BadMagic,

    #[error("unsupported template format version {0}")]
    VersionMismatch(u16),

    #[error("template checksum mismatch")]
    ChecksumMismatch,

    #[error("incompatible templates: {0}")]
    IncompatibleTemplates(String),

    #[error("empty template database")]
    EmptyDatabase,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
