use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed csv: {0}")]
    MalformedCsv(String),
    #[error("target column `{0}` not found in header")]
    UnknownTarget(String),
    #[error("row {row}: cannot parse label `{value}`")]
    UnparsableLabel { row: usize, value: String },
    #[error("row {row}, column `{column}`: non-numeric value `{value}`")]
    NonNumericValue {
        row: usize,
        column: String,
        value: String,
    },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dataset contains a single class; both classes are required")]
    SingleClassDataset,
    #[error("feature `{0}` has no present value to impute from")]
    AllMissingFeature(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("missing cell present at row {row}, feature `{feature}`")]
    MissingCellPresent { row: usize, feature: String },
    #[error("feature `{feature}`: category `{token}` was not seen during fitting")]
    UnseenCategory { feature: String, token: String },
    #[error("class {class} has {count} members, fewer than {folds} folds")]
    TooFewClassMembers {
        class: u8,
        count: usize,
        folds: usize,
    },
    #[error("empty input")]
    EmptyInput,
    #[error("negative or non-finite sample weight at {0}")]
    NegativeWeight(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("confusion matrix is empty")]
    EmptyConfusion,
    #[error("empty list")]
    EmptyList,
    #[error("confusion matrix has an all-zero row")]
    ZeroRow,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("invalid synthetic spec: {0}")]
    SpecInvalid(String),
    #[error("report has no importances")]
    EmptyReport,
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
