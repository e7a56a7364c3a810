use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the engine, the simulator and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid weight matrix: {0}")]
    InvalidWeights(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("pose ({x:.1}, {y:.1}) lies outside the {width} x {height} mm pen")]
    OutsidePen {
        x: f64,
        y: f64,
        width: f64,
        height: f64,
    },

    #[error("antigen id {id} out of range (pen has {total} types)")]
    AntigenOutOfRange { id: u32, total: u32 },

    #[error("empty range scan")]
    EmptyScan,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("run failed for median {median}, run {run_index} (seed {seed}): {source}")]
    RunFailed {
        median: f64,
        run_index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(name))
    }
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
