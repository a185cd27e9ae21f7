use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Violations of a bound or of a sampled
/// membership condition are report outcomes, never errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty domain: {0}")]
    EmptyDomain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("table range exceeded: u = {u} > u_max = {u_max}")]
    TableRange { u: f64, u_max: f64 },

    #[error("resource bound exceeded: {0}")]
    Resource(String),

    #[error("infeasible interval spec ({})", .0.code())]
    Infeasible(crate::bounds::Infeasible),

    #[error("invariant failure: {0}")]
    Invariant(String),

    #[error("frozen-constant regression: {0}")]
    Regression(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
