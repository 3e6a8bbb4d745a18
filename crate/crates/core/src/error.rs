use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("value overflows the target format: {0}")]
    RoundingOverflow(String),
    #[error("precision must be 'single' or 'double', got {0:?}")]
    InvalidPrecision(String),
    #[error("ndigits must be at least 16, got {0}")]
    InvalidDigits(u32),
    #[error("degree {m} admits no one-product saving; use the Paterson-Stockmeyer method")]
    RecommendPs { m: usize },
    #[error("leading coefficient b_m is zero")]
    LeadingCoefficientZero,
    #[error("block size s={s} violates 2 <= s and 4s <= m (m={m})")]
    BlockSize { s: usize, m: usize },
    #[error("type_pol must be 1, 2 or 3, got {0}")]
    InvalidVariant(u8),
    #[error("coefficient layout does not match the scheme: {0}")]
    LayoutMismatch(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("solver found no solution sets")]
    SolverFailure,
    #[error("no real candidate coefficient sets")]
    NoRealCandidates,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("report: {0}")]
    Report(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
