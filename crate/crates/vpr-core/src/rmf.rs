//! Real-Time Matched Frames (RMF).
//!
//! A camera delivers frames at an effective incoming rate while the VPR
//! pipeline retires one query every `t_R` seconds. When retrieval is slower
//! than arrival, only every `G`-th frame can be attempted, and the matched
//! count drops from `M_q` to RMF:
//!
//! - incoming rate = `min(K * D * V, F)`
//! - VPR rate      = `floor(1 / t_R)`
//! - `G`           = `floor(max(incoming / vpr, 1))`
//! - RMF           = correct matches at index 0 and at every index with
//!   `(index + 1) % G == 0`.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Inputs of the real-time model.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RmfParams {
    /// Camera sampling rate F in frames/second.
    pub camera_fps: f64,
    /// Unit-less down-sampling constant K of the vision pipeline.
    pub downsample: f64,
    /// Frames sampled per meter of travel, D.
    pub frames_per_meter: f64,
    /// Platform speed V in meters/second.
    pub velocity_mps: f64,
    /// Retrieval time t_R in seconds per query.
    pub retrieval_time_s: f64,
}

impl RmfParams {
    pub fn validate(&self) -> Result<(), RmfError> {
        for (name, value) in [
            ("camera_fps", self.camera_fps),
            ("downsample", self.downsample),
            ("frames_per_meter", self.frames_per_meter),
            ("velocity_mps", self.velocity_mps),
            ("retrieval_time_s", self.retrieval_time_s),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(RmfError::InvalidParam { name, value });
            }
        }
        Ok(())
    }
}

/// VPR frame rate: the floored rate drives the model, the raw rate stands in
/// when flooring collapses to zero (retrieval slower than one second).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VprRate {
    pub floored: u64,
    pub raw: f64,
}

impl VprRate {
    pub fn from_retrieval_time(retrieval_time_s: f64) -> Result<Self, RmfError> {
        let floored = vpr_frame_rate(retrieval_time_s)?;
        Ok(Self {
            floored,
            raw: 1.0 / retrieval_time_s,
        })
    }
}

/// Full outcome of the real-time model over one matches list.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RmfResult {
    /// Effective camera delivery rate, frames/second.
    pub incoming_rate: f64,
    /// Floored VPR rate, frames/second.
    pub vpr_rate: u64,
    /// Frame interval G: incoming frames per attempted query.
    pub frame_interval: u64,
    /// N_q: total queries in the matches list.
    pub total_queries: u64,
    /// M_q: correct matches without the real-time constraint.
    pub matched_queries: u64,
    /// Correct matches that survive the real-time constraint.
    pub real_time_matched_frames: u64,
    /// True when the floored VPR rate was zero and the raw rate 1/t_R was
    /// used in the ratio instead.
    pub unfloored_vpr_fallback: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RmfError {
    InvalidParam {
        name: &'static str,
        value: f64,
    },
    /// Matches lists are binary; anything else is rejected.
    InvalidMatchEntry {
        index: usize,
        value: u8,
    },
}

impl fmt::Display for RmfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RmfError::InvalidParam { name, value } => {
                write!(f, "parameter {name} = {value} is out of range")
            }
            RmfError::InvalidMatchEntry { index, value } => {
                write!(f, "matches list entry {index} is {value}, expected 0 or 1")
            }
        }
    }
}

impl core::error::Error for RmfError {}

/// Effective incoming frame rate `min(K * D * V, F)`.
pub fn incoming_frame_rate(
    camera_fps: f64,
    downsample: f64,
    frames_per_meter: f64,
    velocity_mps: f64,
) -> Result<f64, RmfError> {
    for (name, value) in [
        ("camera_fps", camera_fps),
        ("downsample", downsample),
        ("frames_per_meter", frames_per_meter),
        ("velocity_mps", velocity_mps),
    ] {
        if !value.is_finite() || value <= 0.0 {
            return Err(RmfError::InvalidParam { name, value });
        }
    }
    Ok((downsample * frames_per_meter * velocity_mps).min(camera_fps))
}

/// VPR frame rate `floor(1 / t_R)` in whole frames per second.
pub fn vpr_frame_rate(retrieval_time_s: f64) -> Result<u64, RmfError> {
    if !retrieval_time_s.is_finite() || retrieval_time_s <= 0.0 {
        return Err(RmfError::InvalidParam {
            name: "retrieval_time_s",
            value: retrieval_time_s,
        });
    }
    Ok(math::floor(1.0 / retrieval_time_s) as u64)
}

/// Frame interval `G = floor(max(incoming / vpr, 1))`.
///
/// When the floored VPR rate is zero (retrieval slower than one second) the
/// raw rate `1/t_R` takes its place in the ratio so the interval stays
/// defined; the second element of the returned pair reports that fallback.
pub fn frame_interval(incoming: f64, vpr: VprRate) -> Result<(u64, bool), RmfError> {
    if !incoming.is_finite() || incoming <= 0.0 {
        return Err(RmfError::InvalidParam {
            name: "incoming_rate",
            value: incoming,
        });
    }
    let fallback = vpr.floored == 0;
    let effective = if fallback {
        vpr.raw
    } else {
        vpr.floored as f64
    };
    if !effective.is_finite() || effective <= 0.0 {
        return Err(RmfError::InvalidParam {
            name: "vpr_rate",
            value: effective,
        });
    }
    Ok((
        math::floor((incoming / effective).max(1.0)) as u64,
        fallback,
    ))
}

/// Down-samples a binary matches list by the frame interval.
///
/// Returns `(M_q, RMF)`: the unconstrained correct-match count and the
/// correct matches at the considered indices (index 0 plus every index where
/// `(index + 1) % G == 0`), each index counted at most once.
pub fn compute_rmf(matches_list: &[u8], frame_interval: u64) -> Result<(u64, u64), RmfError> {
    if frame_interval < 1 {
        return Err(RmfError::InvalidParam {
            name: "frame_interval",
            value: frame_interval as f64,
        });
    }
    let mut matched = 0u64;
    let mut real_time = 0u64;
    for (index, &element) in matches_list.iter().enumerate() {
        if element > 1 {
            return Err(RmfError::InvalidMatchEntry {
                index,
                value: element,
            });
        }
        matched += u64::from(element);
        let considered = index == 0 || (index as u64 + 1).is_multiple_of(frame_interval);
        if considered && element == 1 {
            real_time += 1;
        }
    }
    Ok((matched, real_time))
}

/// Runs the whole model: incoming rate, VPR rate, G, then RMF.
pub fn evaluate(params: &RmfParams, matches_list: &[u8]) -> Result<RmfResult, RmfError> {
    params.validate()?;
    let incoming = incoming_frame_rate(
        params.camera_fps,
        params.downsample,
        params.frames_per_meter,
        params.velocity_mps,
    )?;
    let vpr = VprRate::from_retrieval_time(params.retrieval_time_s)?;
    let (interval, fallback) = frame_interval(incoming, vpr)?;
    let (matched, real_time) = compute_rmf(matches_list, interval)?;
    Ok(RmfResult {
        incoming_rate: incoming,
        vpr_rate: vpr.floored,
        frame_interval: interval,
        total_queries: matches_list.len() as u64,
        matched_queries: matched,
        real_time_matched_frames: real_time,
        unfloored_vpr_fallback: fallback,
    })
}

/// Indices a given frame interval lets through, in order. Mostly useful for
/// inspecting a configuration by hand.
pub fn considered_indices(total: usize, frame_interval: u64) -> Vec<usize> {
    (0..total)
        .filter(|&i| i == 0 || (i as u64 + 1).is_multiple_of(frame_interval))
        .collect()
}
