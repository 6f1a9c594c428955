//! Error types split by exit code: configuration problems exit with 2, data
//! and processing problems with 3.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("path does not exist: {0}")]
    MissingPath(PathBuf),
    #[error("invalid resolution '{0}': expected WxH with both sides >= 2")]
    InvalidResolution(String),
    #[error("technique 'external' requires --desc and --ref-desc files")]
    MissingDescriptorFiles,
    #[error("--desc/--ref-desc only apply to the 'external' technique")]
    UnexpectedDescriptorFiles,
    #[error("sampling interval {0} s is below the 0.01 s minimum")]
    IntervalTooSmall(f64),
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("image not found: {0}")]
    ImageNotFound(PathBuf),
    #[error("failed to decode {path}: {source}")]
    Decode {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("dataset layout: {0}")]
    Layout(String),
    #[error("ground truth: {0}")]
    GroundTruth(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("descriptor file {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("descriptor file holds {got} vectors but the dataset has {expected} images")]
    Alignment { expected: usize, got: usize },
    #[error("power log {0} contains no samples")]
    EmptyLog(PathBuf),
    #[error("telemetry: {0}")]
    Telemetry(String),
    #[error("report: {0}")]
    Report(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Image(#[from] vpr_core::ImageError),
    #[error(transparent)]
    Hog(#[from] vpr_core::HogError),
    #[error(transparent)]
    Cohog(#[from] vpr_core::CohogError),
    #[error(transparent)]
    Matching(#[from] vpr_core::MatchingError),
    #[error(transparent)]
    Rmf(#[from] vpr_core::RmfError),
    #[error(transparent)]
    Power(#[from] vpr_core::PowerError),
}

impl DataError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
}

impl BenchError {
    /// CLI exit code: 2 for configuration errors, 3 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Data(_) => 3,
        }
    }
}
