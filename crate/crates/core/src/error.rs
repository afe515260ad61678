use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a star polygon needs at least 2 vertices, got n = {0}")]
    TooFewVertices(u32),

    #[error("density m = {m} is not valid for n = {n} (need 1 <= m <= n/2, half-integer only for m = n/2)")]
    DensityOutOfRange { n: u32, m: f64 },

    #[error("center index l = {l} is invalid for n = {n} (need 0 <= l <= n with the parity of n)")]
    ParityViolation { n: u32, l: u32 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("map scale {0} is not a contraction (must lie in (0, 1))")]
    NonContractive(f64),

    #[error("at least {expected} maps are required, got {got}")]
    TooFewMaps { expected: usize, got: usize },

    #[error("ratio list is empty")]
    EmptyRatios,

    #[error("depth {depth} exceeds the iteration limit of {limit}")]
    DepthLimit { depth: u32, limit: u32 },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("box counting: {0}")]
    BoxCount(String),

    #[error("{points} points cannot be split evenly among {seeds} seeds")]
    UnevenSplit { points: usize, seeds: usize },

    #[error("invalid render configuration: {0}")]
    Render(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<image::ImageError> for Error {
    fn from(err: image::ImageError) -> Self {
        Error::Io(err.to_string())
    }
}
