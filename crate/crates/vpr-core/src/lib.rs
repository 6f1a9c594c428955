#![cfg_attr(not(feature = "std"), no_std)]
//! Training-less visual place recognition primitives.
//!
//! This crate carries the algorithmic core of the VPR benchmarking toolkit:
//!
//! - [`image`] – 8-bit grayscale images, bilinear resize, per-pixel gradient
//!   fields, and patch entropy.
//! - [`hog`] – the global histogram-of-oriented-gradients descriptor and its
//!   cosine comparison.
//! - [`cohog`] – the regional, entropy-gated HOG variant and its regional
//!   matching score.
//! - [`matching`] – similarity matrices, best-match selection, and top-1
//!   accuracy against a ground truth.
//! - [`rmf`] – the real-time matched frames metric: incoming/VPR frame rates,
//!   the frame interval `G`, and the down-sampled match count.
//! - [`telemetry`] – resource/phase/power data model and the trapezoidal
//!   power-over-phase integration.
//!
//! Everything here is pure computation over owned buffers; image decoding,
//! file formats, process sampling, and the CLI live in the companion
//! `vpr-bench` crate. With `default-features = false` and the `libm` feature
//! the crate builds without the standard library (alloc is required).

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("vpr-core needs float math: enable the `std` feature (default) or `libm`");

extern crate alloc;

pub mod cohog;
pub mod hog;
pub mod image;
pub mod matching;
pub mod rmf;
pub mod telemetry;

mod math;

pub use cohog::{CohogError, CohogParams, EntropyMap, RegionalDescriptorSet};
pub use hog::{GlobalDescriptor, HogError, HogParams};
pub use image::{GradientField, GrayImage, ImageError, Rect};
pub use matching::{
    Descriptor, GroundTruth, MatchOutcome, MatchingError, Metric, SimilarityMatrix,
};
pub use rmf::{RmfError, RmfParams, RmfResult, VprRate};
pub use telemetry::{
    PhaseLabel, PhasePower, PhaseRecord, PowerError, PowerSample, PowerTrace, ResourceSample,
    ResourceSummary,
};
