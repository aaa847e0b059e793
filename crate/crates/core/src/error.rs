//! Error type shared across the simulator.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

/// Everything that can go wrong while building or running a study.
#[derive(Debug, Error)]
pub enum SimError {
    /// Frequency aggregation or a swing step over an empty or fully
    /// tripped machine set: there is no rotating mass left to integrate.
    #[error("no inertia: {0}")]
    NoInertia(String),

    /// The state left the physically meaningful envelope (non-finite
    /// values, frequency collapse).
    #[error("simulation aborted at t = {time_s:.3} s: {reason}")]
    Aborted { time_s: f64, reason: String },

    /// A configuration field failed validation. `field` is the full
    /// dotted path into the config document.
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// A referenced input file does not exist.
    #[error("file not found: {0}")]
    MissingFile(std::path::PathBuf),

    /// The config file is not valid JSON (or a value has the wrong type).
    #[error("malformed config: {0}")]
    MalformedJson(String),

    /// The config document contains a key the schema does not define.
    #[error("unknown config key: {0}")]
    UnknownKey(String),

    #[error("unknown generator id `{0}`")]
    UnknownGenerator(String),

    #[error("unknown case id {0} (valid cases: 1-4)")]
    UnknownCase(u8),

    /// A metric could not be computed from the series it was given.
    #[error("metrics: {0}")]
    Metrics(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// Process exit code contract: 10 missing file, 11 malformed JSON,
    /// 12 unknown key, 13 out-of-range value, 20 simulation abort,
    /// 30 I/O failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::MissingFile(_) => 10,
            SimError::MalformedJson(_) => 11,
            SimError::UnknownKey(_) => 12,
            SimError::Config { .. }
            | SimError::UnknownGenerator(_)
            | SimError::UnknownCase(_)
            | SimError::InvalidInput(_) => 13,
            SimError::NoInertia(_) | SimError::Aborted { .. } | SimError::Metrics(_) => 20,
            SimError::Io(_) => 30,
        }
    }
}
