use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("CFL guard exceeded (courant number {courant:.3e} > {limit:.3e}); retry with dt <= {advisory_dt:.3e}")]
    CflExceeded { courant: f64, limit: f64, advisory_dt: f64 },

    #[error("non-finite value in {field} at t = {t}")]
    NonFinite { field: &'static str, t: f64 },

    #[error("config error at line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("config field `{field}`: {message}")]
    ConfigField { field: String, message: String },

    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
