//! Telemetry data model: resource samples, benchmark phases, and power
//! traces with trapezoidal energy attribution.
//!
//! The sampling and timing machinery lives in the std companion crate; this
//! module owns the types those produce and the math applied to them.

use alloc::vec::Vec;
use core::fmt;

/// One resource reading at a monotonic timestamp (seconds since run start).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResourceSample {
    pub t_s: f64,
    /// Process CPU time delta over (wall delta x logical cores), percent.
    pub cpu_pct: f64,
    /// Process resident set over total physical memory, percent.
    pub mem_pct: f64,
    /// System-wide used memory over total, percent. Reported alongside the
    /// process gauge for comparability with whole-machine numbers.
    pub system_mem_pct: f64,
}

/// Aggregate view of a resource trace.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResourceSummary {
    pub sample_count: usize,
    pub cpu_mean_pct: f64,
    pub cpu_max_pct: f64,
    pub mem_mean_pct: f64,
    pub mem_max_pct: f64,
    pub system_mem_mean_pct: f64,
    pub system_mem_max_pct: f64,
}

/// Summarizes a trace; `None` when no samples were collected.
pub fn summarize(samples: &[ResourceSample]) -> Option<ResourceSummary> {
    if samples.is_empty() {
        return None;
    }
    let n = samples.len() as f64;
    let mut summary = ResourceSummary {
        sample_count: samples.len(),
        cpu_mean_pct: 0.0,
        cpu_max_pct: 0.0,
        mem_mean_pct: 0.0,
        mem_max_pct: 0.0,
        system_mem_mean_pct: 0.0,
        system_mem_max_pct: 0.0,
    };
    for s in samples {
        summary.cpu_mean_pct += s.cpu_pct;
        summary.mem_mean_pct += s.mem_pct;
        summary.system_mem_mean_pct += s.system_mem_pct;
        summary.cpu_max_pct = summary.cpu_max_pct.max(s.cpu_pct);
        summary.mem_max_pct = summary.mem_max_pct.max(s.mem_pct);
        summary.system_mem_max_pct = summary.system_mem_max_pct.max(s.system_mem_pct);
    }
    summary.cpu_mean_pct /= n;
    summary.mem_mean_pct /= n;
    summary.system_mem_mean_pct /= n;
    Some(summary)
}

/// CPU usage percentage: process CPU seconds consumed per wall second,
/// normalized by core count so 100 means every core saturated.
pub fn cpu_pct_from(cpu_delta_s: f64, wall_delta_s: f64, logical_cores: usize) -> f64 {
    if wall_delta_s <= 0.0 || logical_cores == 0 {
        return 0.0;
    }
    (cpu_delta_s / (wall_delta_s * logical_cores as f64) * 100.0).clamp(0.0, 100.0)
}

/// Memory percentage of a byte count against a total.
pub fn mem_pct_from(bytes: u64, total_bytes: u64) -> f64 {
    if total_bytes == 0 {
        return 0.0;
    }
    (bytes as f64 / total_bytes as f64 * 100.0).clamp(0.0, 100.0)
}

/// Benchmark loop stage a phase record belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum PhaseLabel {
    /// Image loading and preprocessing.
    Load,
    /// Feature encoding of the query image.
    Encode,
    /// Descriptor matching against the reference set.
    Match,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 3] = [PhaseLabel::Load, PhaseLabel::Encode, PhaseLabel::Match];

    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::Load => "load",
            PhaseLabel::Encode => "encode",
            PhaseLabel::Match => "match",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Timed span of one benchmark stage for one query, monotonic seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseRecord {
    pub label: PhaseLabel,
    pub query_index: usize,
    pub start_s: f64,
    pub end_s: f64,
}

impl PhaseRecord {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// One power reading, seconds and milliwatts.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerSample {
    pub t_s: f64,
    pub power_mw: f64,
}

/// Power samples on the benchmark's monotonic clock.
///
/// Construction shifts the raw log timestamps by a constant clock offset
/// (the meter runs on its own clock) and validates ordering and sign.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerTrace {
    samples: Vec<PowerSample>,
    clock_offset_s: f64,
}

/// Average power and integrated energy over one phase.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhasePower {
    pub avg_watts: f64,
    pub energy_joules: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PowerError {
    EmptyLog,
    /// Sample timestamps must be non-decreasing.
    TimeTravel {
        index: usize,
    },
    NegativePower {
        index: usize,
        power_mw: f64,
    },
    /// Phase lies entirely outside the trace's time span.
    EmptyWindow,
    /// Phase end precedes its start.
    InvalidWindow {
        start_s: f64,
        end_s: f64,
    },
}

impl fmt::Display for PowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PowerError::EmptyLog => write!(f, "power log contains no samples"),
            PowerError::TimeTravel { index } => {
                write!(f, "sample {index} timestamp decreases")
            }
            PowerError::NegativePower { index, power_mw } => {
                write!(f, "sample {index} has negative power {power_mw} mW")
            }
            PowerError::EmptyWindow => write!(f, "phase does not overlap the power trace"),
            PowerError::InvalidWindow { start_s, end_s } => {
                write!(f, "phase window [{start_s}, {end_s}] is reversed")
            }
        }
    }
}

impl core::error::Error for PowerError {}

impl PowerTrace {
    /// Builds a trace from raw log samples, applying the log-to-benchmark
    /// clock offset to every timestamp.
    pub fn new(raw_samples: Vec<PowerSample>, clock_offset_s: f64) -> Result<Self, PowerError> {
        if raw_samples.is_empty() {
            return Err(PowerError::EmptyLog);
        }
        let mut samples = raw_samples;
        for (index, sample) in samples.iter_mut().enumerate() {
            if sample.power_mw < 0.0 {
                return Err(PowerError::NegativePower {
                    index,
                    power_mw: sample.power_mw,
                });
            }
            sample.t_s += clock_offset_s;
        }
        for index in 1..samples.len() {
            if samples[index].t_s < samples[index - 1].t_s {
                return Err(PowerError::TimeTravel { index });
            }
        }
        Ok(Self {
            samples,
            clock_offset_s,
        })
    }

    pub fn samples(&self) -> &[PowerSample] {
        &self.samples
    }

    pub fn clock_offset_s(&self) -> f64 {
        self.clock_offset_s
    }

    /// First and last sample timestamps.
    pub fn span(&self) -> (f64, f64) {
        (
            self.samples[0].t_s,
            self.samples[self.samples.len() - 1].t_s,
        )
    }

    /// Power at time `t`, linearly interpolated inside the sampled span and
    /// held constant beyond its ends.
    fn power_at(&self, t: f64) -> f64 {
        let samples = &self.samples;
        if t <= samples[0].t_s {
            return samples[0].power_mw;
        }
        let last = samples.len() - 1;
        if t >= samples[last].t_s {
            return samples[last].power_mw;
        }
        // partition_point: first sample with t_s > t; the match arm above
        // guarantees 1 <= idx <= last.
        let idx = samples.partition_point(|s| s.t_s <= t);
        let a = samples[idx - 1];
        let b = samples[idx];
        if b.t_s == a.t_s {
            return b.power_mw;
        }
        let frac = (t - a.t_s) / (b.t_s - a.t_s);
        a.power_mw + (b.power_mw - a.power_mw) * frac
    }
}

/// Integrates power over `[start_s, end_s]` by the trapezoid rule.
///
/// The integrand is the trace interpolated linearly between samples and held
/// constant past its first/last sample, so phases extending slightly beyond
/// the log still integrate; a window with no overlap at all is an error.
/// Average power is energy over the window length; a zero-length window
/// reports the instantaneous power and zero energy.
pub fn window_power(
    trace: &PowerTrace,
    start_s: f64,
    end_s: f64,
) -> Result<PhasePower, PowerError> {
    if end_s < start_s {
        return Err(PowerError::InvalidWindow { start_s, end_s });
    }
    let (first, last) = trace.span();
    if end_s < first || start_s > last {
        return Err(PowerError::EmptyWindow);
    }
    if end_s == start_s {
        return Ok(PhasePower {
            avg_watts: trace.power_at(start_s) / 1000.0,
            energy_joules: 0.0,
        });
    }

    // Integration nodes: window ends plus every sample strictly inside.
    let mut energy_mws = 0.0;
    let mut prev_t = start_s;
    let mut prev_p = trace.power_at(start_s);
    for sample in trace
        .samples()
        .iter()
        .filter(|s| s.t_s > start_s && s.t_s < end_s)
    {
        energy_mws += (sample.power_mw + prev_p) * 0.5 * (sample.t_s - prev_t);
        prev_t = sample.t_s;
        prev_p = sample.power_mw;
    }
    let end_p = trace.power_at(end_s);
    energy_mws += (end_p + prev_p) * 0.5 * (end_s - prev_t);

    let energy_joules = energy_mws / 1000.0;
    Ok(PhasePower {
        avg_watts: energy_joules / (end_s - start_s),
        energy_joules,
    })
}

/// [`window_power`] over a phase record's span.
pub fn phase_power(trace: &PowerTrace, phase: &PhaseRecord) -> Result<PhasePower, PowerError> {
    window_power(trace, phase.start_s, phase.end_s)
}
