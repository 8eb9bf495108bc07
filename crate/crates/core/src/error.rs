use alloc::string::String;
use alloc::vec::Vec;

use crate::data::Quarter;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid date '{0}'")]
    InvalidDate(String),
    #[error("invalid quarter '{0}'")]
    InvalidQuarter(String),
    #[error("series has no observations")]
    EmptySeries,
    #[error("series needs at least {needed} present quarters, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("series is not strictly increasing at {0}")]
    Unordered(Quarter),
    #[error("non-finite value at {0}")]
    NonFinite(Quarter),
    #[error("division by zero: value at {0} is 0")]
    DivisionByZero(Quarter),
    #[error("missing indicator {0}")]
    MissingIndicator(String),
    #[error("panel too short: {found} aligned quarters, minimum is {minimum}")]
    PanelTooShort { found: usize, minimum: usize },
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("unknown model spec '{name}' (valid: {valid})")]
    UnknownSpec { name: String, valid: String },
    #[error("unknown indicator '{0}'")]
    UnknownIndicator(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero observed value at index {0} (MAPE undefined)")]
    ZeroObserved(usize),
    #[error("degenerate range: all values equal")]
    DegenerateRange,
    #[error("constant feature column '{0}'")]
    ConstantFeature(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("panel too short for tree growth: n={n}, need at least {needed}")]
    TooShortForTrees { n: usize, needed: usize },
    #[error("rank deficient design; collinear columns: {columns:?}")]
    RankDeficient { columns: Vec<String> },
    #[error("singular regression")]
    Singular,
    #[error("series too short: {found} observations, need {needed}")]
    SeriesTooShort { found: usize, needed: usize },
    #[error("feature mismatch: model expects [{expected}], got {found}")]
    FeatureMismatch { expected: String, found: String },
    #[error("grid too large: {rows} rows exceeds cap {cap}")]
    GridTooLarge { rows: u128, cap: u64 },
    #[error("conditional forecast needs {needed} future rows, got {found}")]
    MissingExogenous { needed: usize, found: usize },
}
