//! Error types shared across the crate.

use thiserror::Error;

use crate::quarter::Quarter;

/// Coarse error class, used by callers to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input data.
    Data,
    /// A numerically degenerate problem (collinearity, identification, ...).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    // ---- data ingestion ----
    #[error("malformed date '{text}' (expected YYYYQn)")]
    MalformedDate { text: String },

    #[error("{path}:{line}: {source}")]
    AtLine {
        path: String,
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("duplicate quarter {quarter}")]
    DuplicateQuarter { quarter: Quarter },

    #[error("dates must be strictly increasing (saw {prev} then {next})")]
    OutOfOrder { prev: Quarter, next: Quarter },

    #[error("non-numeric value '{text}'")]
    BadNumber { text: String },

    #[error("{path}: no data rows")]
    EmptyFile { path: String },

    #[error("{path}: expected {expected} fields, got {got}")]
    BadRecord {
        path: String,
        expected: usize,
        got: usize,
    },

    #[error("{path}: missing '# form=' directive")]
    MissingFormDirective { path: String },

    #[error("unknown panel form '{text}'")]
    UnknownForm { text: String },

    #[error("mixed identifiers in one file: saw ({model_a},{variable_a}) and ({model_b},{variable_b})")]
    MixedPanel {
        model_a: String,
        variable_a: String,
        model_b: String,
        variable_b: String,
    },

    #[error("origin {origin}: duplicate horizon {horizon}")]
    DuplicateHorizon { origin: Quarter, horizon: usize },

    #[error("origin {origin}: horizon gap (horizons must be contiguous from 1, missing {missing})")]
    HorizonGap { origin: Quarter, missing: usize },

    #[error("{path}: io error: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    // ---- series domain ----
    #[error("series '{name}': nonpositive value {value} at {quarter}")]
    NonPositive {
        name: String,
        quarter: Quarter,
        value: f64,
    },

    #[error("series '{name}' is already in logs")]
    AlreadyLogged { name: String },

    #[error("series '{name}': missing value at {quarter}")]
    MissingValue { name: String, quarter: Quarter },

    #[error("series '{name}' ({range}) does not cover {quarter}")]
    OutOfCoverage {
        name: String,
        range: String,
        quarter: Quarter,
    },

    #[error("lag {s} must be smaller than the series length {len}")]
    LagExceedsLength { s: usize, len: usize },

    #[error("empty range {start}..{end}")]
    EmptyRange { start: Quarter, end: Quarter },

    // ---- estimation ----
    #[error("window {window}: {nobs} usable rows, need at least {min}")]
    WindowTooShort {
        window: String,
        nobs: usize,
        min: usize,
    },

    #[error("collinear regressors in window {window} (singular value ratio {ratio:e})")]
    Collinear { window: String, ratio: f64 },

    #[error("coefficients ({first}, {second}) are not separately identified (singular value ratio {ratio:e})")]
    NotIdentified {
        first: &'static str,
        second: &'static str,
        ratio: f64,
    },

    #[error("degenerate target: the dependent variable has zero variance over the sample")]
    DegenerateTarget,

    #[error("empty design: no usable target quarters in {period}")]
    EmptyDesign { period: String },

    #[error("design has {rows} rows, need at least {min}")]
    TooFewRows { rows: usize, min: usize },

    #[error("covariance lag {lag} must be smaller than the row count {rows}")]
    LagTooLarge { lag: usize, rows: usize },

    // ---- panels / conversion ----
    #[error("panel '{model}/{variable}': expected form {expected}, got {got}")]
    FormMismatch {
        model: String,
        variable: String,
        expected: String,
        got: String,
    },

    #[error("panels disagree at origin {origin}: {detail}")]
    PanelMismatch { origin: Quarter, detail: String },

    #[error("panel '{model}/{variable}': missing anchor value at {quarter}")]
    MissingAnchor {
        model: String,
        variable: String,
        quarter: Quarter,
    },

    #[error("growth rate {value}% at origin {origin}, horizon {horizon} is <= -100%")]
    GrowthOutOfRange {
        origin: Quarter,
        horizon: usize,
        value: f64,
    },

    #[error("no matched forecast/actual targets in {period}")]
    NoMatchedTargets { period: String },

    // ---- aggregation ----
    #[error("component model '{name}': {detail}")]
    BadComponentSpec { name: String, detail: String },

    #[error("component '{name}': {source}")]
    Component {
        name: String,
        #[source]
        source: Box<Error>,
    },

    // ---- scheme ----
    #[error("invalid rolling scheme: {detail}")]
    BadScheme { detail: String },

    #[error("origin {origin}: estimation window ends at {window_end}, future information would leak")]
    FutureInformation {
        origin: Quarter,
        window_end: Quarter,
    },
}

impl Error {
    /// Attach a file location to an error (used by the CSV readers).
    pub fn at(self, path: &str, line: usize) -> Error {
        Error::AtLine {
            path: path.to_string(),
            line,
            source: Box::new(self),
        }
    }

    /// Classify the error for exit-code mapping.
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            WindowTooShort { .. }
            | Collinear { .. }
            | NotIdentified { .. }
            | DegenerateTarget
            | TooFewRows { .. }
            | LagTooLarge { .. } => ErrorKind::Numerical,
            AtLine { source, .. } | Component { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }
}
