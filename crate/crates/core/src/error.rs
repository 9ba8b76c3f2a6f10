use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised while reading or reshaping a dataset.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("input has no header row")]
    MissingHeader,
    #[error("input has no data rows")]
    Empty,
    #[error("column `{0}` not found in header")]
    MissingColumn(String),
    #[error("duplicate column `{0}` in header")]
    DuplicateColumn(String),
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column `{column}`: `{value}` is not a finite number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: duration {value} is not positive")]
    NonPositiveDuration { row: usize, value: f64 },
    #[error("row {row}: event value {value} is not 0 or 1")]
    InvalidEvent { row: usize, value: String },
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("test fraction {0} must lie in (0, 1)")]
    InvalidFraction(f64),
    #[error("scale {0} must be positive and finite")]
    InvalidScale(f64),
    #[error("dataset with {0} rows is too small to split")]
    TooSmall(usize),
    #[error("split leaves the {side} part without events; try another seed")]
    SplitWithoutEvents { side: &'static str },
}

/// Errors raised by the numerical solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimError {
    #[error("objective is not finite at the starting point")]
    NonFiniteStart,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("weight must be non-negative, got {0}")]
    InvalidWeight(f64),
    #[error("starting point has length {found}, problem dimension is {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Errors raised while fitting a survival model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("coefficient vector has length {found}, dataset has {expected} covariates")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subject index {index} out of range for {len} subjects")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dataset contains no events")]
    NoEvents,
    #[error("non-finite objective encountered")]
    NonFinite,
    #[error("coefficients diverged (|beta|_inf = {0:.3e}); the data look separable")]
    Separation(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Optim(#[from] OptimError),
}

/// Errors raised by evaluation metrics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("{scores} scores supplied for {subjects} subjects")]
    LengthMismatch { scores: usize, subjects: usize },
    #[error("risk score {0} is not finite")]
    NonFiniteScore(f64),
    #[error("no comparable pairs; the concordance index is undefined")]
    NoComparablePairs,
    #[error("time grid has {0} usable points; at least two are required")]
    InsufficientGrid(usize),
}

/// Errors raised by the contamination generators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContaminationError {
    #[error("shift intensity {intensity} outside [1, {features}]")]
    InvalidIntensity { intensity: usize, features: usize },
    #[error("outlier ratio {0} outside (0, 1)")]
    InvalidRatio(f64),
    #[error("severity {0} outside 1..=5")]
    InvalidSeverity(u32),
    #[error("feature fraction {0} outside (0, 1]")]
    InvalidFeatureFraction(f64),
    #[error("outlier settings select no rows")]
    NoRowsSelected,
}

/// Errors raised by cross-validation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CvError {
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("grid value {0} is invalid")]
    InvalidGridValue(f64),
    #[error("fold count {0} must be at least 2 and at most the number of rows")]
    TooFewFolds(usize),
    #[error("fold {fold} contains no events; reseed or use fewer folds")]
    FoldWithoutEvents { fold: usize },
    #[error("no fold produced a defined concordance index for parameter {0}")]
    Undefined(f64),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Crate-level error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Contamination(#[from] ContaminationError),
    #[error(transparent)]
    Cv(#[from] CvError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
