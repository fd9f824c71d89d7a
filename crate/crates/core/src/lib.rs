//! Adaptive measurement acquisition for underdetermined inverse problems.
//!
//! A recurrent reconstruction model and a continuous-action acquisition
//! policy are trained (jointly or separately) over Gaussian and Radon
//! sensing operators, with deterministic and variational formulations.
//! The crate provides the differentiable array core, the sensing
//! operators, the trajectory engine, policy-gradient machinery, the
//! training strategies, a classical ISTA baseline, dataset handling, and
//! the run/checkpoint plumbing used by the `adaptive-sense` CLI.

pub mod array;
pub mod baselines;
pub mod checkpoint;
pub mod config;
pub(crate) mod conv;
pub mod data;
pub mod driver;
pub mod environment;
pub mod metrics;
pub mod models;
pub mod reporting;
pub mod rl;
pub mod sensing;
pub mod tape;
pub mod trainer;

pub use array::Array;
pub use tape::{Tape, VarId};

/// Crate-wide error type. Variants map onto the CLI exit codes via
/// [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("cannot normalize a near-zero vector (norm {norm:.3e})")]
    Normalization { norm: f64 },
    #[error("{what} out of domain: {detail}")]
    Domain { what: &'static str, detail: String },
    #[error("episode exhausted: step {t} at horizon {horizon}")]
    EpisodeExhausted { t: usize, horizon: usize },
    #[error("rejection sampler gave up after {0} proposals")]
    Sampler(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("format error at byte {offset}: {detail}")]
    Format { offset: u64, detail: String },
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code: 0 success, 2 config error, 3 data error,
    /// 4 checkpoint error, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Format { .. } | Error::Io(_) => 3,
            Error::Checkpoint(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

fn shape_err(op: &'static str, detail: impl Into<String>) -> Error {
    Error::ShapeMismatch { op, detail: detail.into() }
}
