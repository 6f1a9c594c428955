//! Benchmark harness for training-less visual place recognition.
//!
//! Wraps the algorithms in `vpr-core` with everything a benchmark run needs:
//! image decoding, dataset and descriptor file formats, process CPU/memory
//! sampling, phase timing, power-log ingestion, report emission, and the
//! `bench` command-line interface.

pub mod dataset;
pub mod descfile;
pub mod error;
pub mod imgio;
pub mod powerlog;
pub mod report;
pub mod runner;
pub mod telemetry;

pub use error::{BenchError, ConfigError, DataError};
pub use report::{BenchmarkReport, ReportFormat};
pub use runner::{run_benchmark, RmfSettings, RunConfig, TechniqueConfig};
