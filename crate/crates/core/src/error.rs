use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the analysis chain.
#[derive(Debug, Error)]
pub enum Error {
    // ---- ingestion / data ----
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    ParseError {
        row: usize,
        column: String,
        message: String,
    },

    #[error("date index is not strictly increasing at row {row} ({previous} then {current})")]
    NonMonotoneIndex {
        row: usize,
        previous: String,
        current: String,
    },

    #[error("date index has a gap between {before} and {after}")]
    GapInIndex { before: String, after: String },

    #[error("missing value in column `{column}` at row {row} violates policy `{policy}`")]
    MissingValuePolicyViolation {
        row: usize,
        column: String,
        policy: String,
    },

    #[error("non-positive value at position {position} of `{series}`; cannot take logs")]
    NonPositiveValue { series: String, position: usize },

    #[error("series `{series}` has {len} observations, needs more than {needed}")]
    SeriesTooShort {
        series: String,
        len: usize,
        needed: usize,
    },

    #[error("unknown series `{0}`")]
    UnknownSeries(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    // ---- numerical ----
    #[error("design matrix is rank deficient; collinear column(s): {}", .columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown coefficient `{0}`")]
    UnknownCoefficient(String),

    #[error("restricted model is degenerate: {0}")]
    DegenerateRestriction(String),

    #[error("unrestricted model fits perfectly (zero residual variance); F statistic undefined")]
    PerfectFitDegenerate,

    #[error("bandwidth {bandwidth} must be smaller than the sample length {len}")]
    BandwidthTooLarge { bandwidth: usize, len: usize },

    #[error("all residuals are zero")]
    AllZeroResiduals,

    #[error("sample too short: {0}")]
    SampleTooShort(String),

    #[error("levels feedback coefficient is zero; long-run relationship undefined")]
    DegenerateAdjustment,

    #[error("fitted values are constant; RESET powers are collinear with the intercept")]
    ConstantFitted,

    #[error("zero variance in sample")]
    ZeroVariance,

    #[error("first {k} observations do not identify the recursive regression")]
    RankDeficientPrefix { k: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("no critical values for {0}")]
    MissingCriticalValues(String),

    #[error("critical value table `{file}`: {message}")]
    Table { file: String, message: String },

    // ---- pipeline ----
    #[error("config error: {0}")]
    Config(String),

    #[error("variable `{0}` is integrated of order two or higher; the bounds test requires I(0)/I(1) variables")]
    I2VariablePresent(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse grouping used by the command line to choose an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Numerical,
    Precondition,
}

impl Error {
    pub fn in_stage(self, stage: impl Into<String>) -> Error {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Stage { source, .. } => source.class(),
            Error::Config(_) | Error::Table { .. } | Error::MissingCriticalValues(_) => {
                ErrorClass::Config
            }
            Error::FileNotFound(_)
            | Error::Io(_)
            | Error::ParseError { .. }
            | Error::NonMonotoneIndex { .. }
            | Error::GapInIndex { .. }
            | Error::MissingValuePolicyViolation { .. }
            | Error::NonPositiveValue { .. }
            | Error::SeriesTooShort { .. }
            | Error::UnknownSeries(_)
            | Error::InvalidDataset(_) => ErrorClass::Data,
            Error::I2VariablePresent(_) => ErrorClass::Precondition,
            _ => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
