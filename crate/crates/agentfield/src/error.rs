//! Crate-wide error type.

use thiserror::Error;

/// All failure modes surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A position left the closed simulation interval where it must not.
    #[error("position {x} outside domain [{lower}, {upper}]")]
    OutsideDomain { x: f64, lower: f64, upper: f64 },

    /// Invalid scenario or experiment description.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Invalid data handed to an observable or post-processing step.
    #[error("invalid input: {0}")]
    Input(String),

    /// A linear solve or normalization broke down; the run cannot continue.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A report file does not have the layout the plot renderer expects.
    #[error("malformed report file {path}: {reason}")]
    Format { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("could not parse config: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
