//! Error type shared across the pipeline stages.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    /// Correlation is undefined for a constant image (zero variance).
    /// Callers should fall back to a direct pixel-wise comparison.
    #[error("degenerate image: zero intensity variance")]
    DegenerateImage,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("mask has no foreground pixels")]
    EmptyMask,

    #[error("mask is not a thin skeleton (contains a 2x2 foreground block at ({0}, {1}))")]
    NotThin(usize, usize),

    #[error("skeleton has {0} endpoint(s), need at least 2")]
    TooFewEndpoints(usize),

    #[error("no skeleton path between ({0:?}) and ({1:?})")]
    Unreachable((usize, usize), (usize, usize)),

    #[error("frame id {0} does not exceed last tracked id {1}")]
    NonMonotoneFrameId(u64, u64),

    #[error("final score {0} tenths is not one of the six legal values")]
    InvalidScore(u32),

    #[error("figure spec too small: {0}")]
    SpecTooSmall(String),

    #[error("image i/o: {0}")]
    Image(#[from] image::ImageError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
