use std::path::PathBuf;

/// Errors raised while validating inputs or running the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid index window [{start}, {end}]: need start <= end and at least 2 indices")]
    InvalidWindow { start: i64, end: i64 },

    #[error("length mismatch: window holds {expected} indices but {found} values were given")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: i64, value: f64 },

    #[error("rate must be positive and finite, got {0}")]
    RateNotPositive(f64),

    #[error("trend must contain at least 2 levels, got {0}")]
    TrendTooShort(usize),

    #[error("probability must lie strictly inside (0, 1), got {0}")]
    ProbabilityOutOfRange(f64),

    #[error("slope must be positive and finite, got {0}")]
    SlopeNotPositive(f64),

    #[error("{name} must be positive and finite, got {value}")]
    ParameterNotPositive { name: &'static str, value: f64 },

    #[error("minimum location {t0} lies outside window [{start}, {end}]")]
    T0OutOfWindow { t0: i64, start: i64, end: i64 },

    #[error("window [{start}, {end}] does not contain index 0")]
    WindowExcludesZero { start: i64, end: i64 },

    #[error("alpha at index {index} must be positive and finite, got {value}")]
    AlphaNotPositive { index: i64, value: f64 },

    #[error("invalid probability mass: {0}")]
    InvalidMass(String),

    #[error("interval [{left}, {right}] is not ordered inside window [{start}, {end}]")]
    InvalidInterval {
        left: i64,
        right: i64,
        start: i64,
        end: i64,
    },

    #[error("bandwidth must be at least 1")]
    BandwidthZero,

    #[error("bandwidth {h} too large for a series of length {len} (need 2h+1 <= len)")]
    BandwidthTooLarge { h: usize, len: usize },

    #[error("series window [{a_start}, {a_end}] does not match trend window [{b_start}, {b_end}]")]
    WindowMismatch {
        a_start: i64,
        a_end: i64,
        b_start: i64,
        b_end: i64,
    },

    #[error("every residual is zero; the noise rate cannot be fitted")]
    AllResidualsZero,

    #[error("invalid residual {0}: residuals must be finite and nonnegative")]
    InvalidResidual(f64),

    #[error("study needs at least one realization")]
    NoRealizations,

    #[error("study needs at least one bandwidth")]
    NoBandwidths,

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}:{line}: index {found} breaks the contiguous run (expected {expected})", path.display())]
    NonContiguousIndex {
        path: PathBuf,
        line: usize,
        expected: i64,
        found: i64,
    },

    #[error("{}: no data rows", .0.display())]
    EmptyFile(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
