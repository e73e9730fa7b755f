use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` out of range: {value} ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("wall-flux profile integrates to {integral} over (-1, 0), expected alpha/2 = {expected}")]
    ProfileMassMismatch { integral: f64, expected: f64 },

    #[error("inconsistent wall-flux mode: {0}")]
    InconsistentMode(String),

    #[error("grid alignment: {0}")]
    Alignment(String),

    #[error("grid has no cells")]
    EmptyGrid,

    #[error("degenerate interval ({a}, {b}) with {n} cells")]
    DegenerateInterval { a: f64, b: f64, n: usize },

    #[error("interval ({a}, {b}) with {n} cells does not place x = 0 on a face")]
    OddCellCount { a: f64, b: f64, n: usize },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDivergence { iterations: usize, residual: f64 },

    #[error("non-finite value detected in {0}")]
    NaNDetected(&'static str),

    #[error("no unique boundary face tagged {0}")]
    NotBoundaryFace(String),

    #[error("boundary data does not match the assembled system: {0}")]
    BoundaryMismatch(String),

    #[error("fixed-point coupling did not converge after {iterations} iterations (last ratio {last_ratio})")]
    NoConvergence { iterations: usize, last_ratio: f64 },

    #[error("Dirac window delta = {delta} invalid for h = {h}: {reason}")]
    DeltaMisaligned { delta: f64, h: f64, reason: &'static str },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("zero denominator in relative error")]
    ZeroDenominator,

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("drift profile requires beta = 0, got {0}")]
    BetaUnsupported(f64),

    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("missing artifact: {0}")]
    MissingArtifact(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 for configuration problems, 2 for solver
    /// failures, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::OutOfRange { .. }
            | Error::ProfileMassMismatch { .. }
            | Error::InconsistentMode(_)
            | Error::Alignment(_)
            | Error::EmptyGrid
            | Error::DegenerateInterval { .. }
            | Error::OddCellCount { .. }
            | Error::DeltaMisaligned { .. }
            | Error::BetaUnsupported(_)
            | Error::InsufficientPoints { .. }
            | Error::Config { .. } => 1,
            Error::SolverDivergence { .. }
            | Error::NaNDetected(_)
            | Error::NotBoundaryFace(_)
            | Error::BoundaryMismatch(_)
            | Error::NoConvergence { .. }
            | Error::DomainMismatch(_)
            | Error::ZeroDenominator => 2,
            Error::MissingArtifact(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 3,
        }
    }
}
