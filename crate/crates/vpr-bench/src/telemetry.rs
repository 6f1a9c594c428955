//! Process resource sampling and phase timing.
//!
//! The sampler is a background thread reading `/proc/<pid>/stat`,
//! `/proc/<pid>/statm`, and `/proc/meminfo` at a fixed interval. CPU usage is
//! the process CPU-time delta over the wall delta, normalized by logical core
//! count (100 = all cores saturated); memory is the process resident set over
//! total physical memory. The first reading only primes the CPU delta and is
//! never emitted.

use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use vpr_core::telemetry::{cpu_pct_from, mem_pct_from, PhaseLabel, PhaseRecord, ResourceSample};

use crate::error::DataError;

/// Minimum supported sampling interval in seconds.
pub const MIN_SAMPLING_INTERVAL_S: f64 = 0.01;

/// Default sampling interval in seconds.
pub const DEFAULT_SAMPLING_INTERVAL_S: f64 = 0.1;

fn ticks_per_second() -> f64 {
    // SAFETY: sysconf with a valid name has no preconditions.
    let ticks = unsafe { libc::sysconf(libc::_SC_CLK_TCK) };
    if ticks > 0 {
        ticks as f64
    } else {
        100.0
    }
}

fn page_size() -> u64 {
    // SAFETY: as above.
    let size = unsafe { libc::sysconf(libc::_SC_PAGESIZE) };
    if size > 0 {
        size as u64
    } else {
        4096
    }
}

fn logical_cores() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Cumulative CPU seconds (user + system) of a process.
fn read_cpu_seconds(pid: u32) -> Result<f64, DataError> {
    let path = format!("/proc/{pid}/stat");
    let stat = std::fs::read_to_string(&path)
        .map_err(|e| DataError::Telemetry(format!("cannot read {path}: {e}")))?;
    // The comm field may contain spaces; fields resume after the last ')'.
    let tail = stat
        .rfind(')')
        .map(|i| &stat[i + 1..])
        .ok_or_else(|| DataError::Telemetry(format!("malformed {path}")))?;
    let fields: Vec<&str> = tail.split_whitespace().collect();
    // tail starts at field 3 (state); utime and stime are fields 14 and 15.
    let parse = |idx: usize| -> Result<u64, DataError> {
        fields
            .get(idx)
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| DataError::Telemetry(format!("malformed {path}")))
    };
    let utime = parse(11)?;
    let stime = parse(12)?;
    Ok((utime + stime) as f64 / ticks_per_second())
}

/// Resident set size of a process in bytes.
fn read_rss_bytes(pid: u32) -> Result<u64, DataError> {
    let path = format!("/proc/{pid}/statm");
    let statm = std::fs::read_to_string(&path)
        .map_err(|e| DataError::Telemetry(format!("cannot read {path}: {e}")))?;
    let pages: u64 = statm
        .split_whitespace()
        .nth(1)
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| DataError::Telemetry(format!("malformed {path}")))?;
    Ok(pages * page_size())
}

/// Total and available physical memory in bytes.
fn read_meminfo() -> Result<(u64, u64), DataError> {
    let text = std::fs::read_to_string("/proc/meminfo")
        .map_err(|e| DataError::Telemetry(format!("cannot read /proc/meminfo: {e}")))?;
    let mut total = None;
    let mut available = None;
    for line in text.lines() {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("MemTotal:") => total = parts.next().and_then(|v| v.parse::<u64>().ok()),
            Some("MemAvailable:") => available = parts.next().and_then(|v| v.parse::<u64>().ok()),
            _ => {}
        }
    }
    match (total, available) {
        (Some(t), Some(a)) => Ok((t * 1024, a * 1024)),
        _ => Err(DataError::Telemetry(
            "MemTotal/MemAvailable missing from /proc/meminfo".into(),
        )),
    }
}

/// Background resource sampler for one target process.
pub struct ResourceSampler {
    stop: Arc<AtomicBool>,
    handle: JoinHandle<Vec<ResourceSample>>,
}

impl ResourceSampler {
    /// Starts sampling `pid` every `interval_s` seconds on the clock that
    /// started at `epoch`. Fails if the target does not exist or the interval
    /// is below [`MIN_SAMPLING_INTERVAL_S`].
    pub fn spawn(pid: u32, interval_s: f64, epoch: Instant) -> Result<Self, DataError> {
        if interval_s < MIN_SAMPLING_INTERVAL_S {
            return Err(DataError::Telemetry(format!(
                "sampling interval {interval_s} s is below the {MIN_SAMPLING_INTERVAL_S} s minimum"
            )));
        }
        if !Path::new(&format!("/proc/{pid}")).exists() {
            return Err(DataError::Telemetry(format!("no such process: {pid}")));
        }
        // Priming read; its CPU value has no delta and is never emitted.
        let mut prev_cpu = read_cpu_seconds(pid)?;
        let mut prev_t = epoch.elapsed().as_secs_f64();

        let stop = Arc::new(AtomicBool::new(false));
        let stop_flag = Arc::clone(&stop);
        let cores = logical_cores();
        let interval = Duration::from_secs_f64(interval_s);
        let handle = std::thread::spawn(move || {
            let mut samples = Vec::new();
            while !stop_flag.load(Ordering::Relaxed) {
                std::thread::sleep(interval);
                let t_s = epoch.elapsed().as_secs_f64();
                let (cpu, rss, mem) =
                    match (read_cpu_seconds(pid), read_rss_bytes(pid), read_meminfo()) {
                        (Ok(c), Ok(r), Ok(m)) => (c, r, m),
                        // Target gone or /proc hiccup: stop with what we have.
                        _ => break,
                    };
                let (total, available) = mem;
                samples.push(ResourceSample {
                    t_s,
                    cpu_pct: cpu_pct_from(cpu - prev_cpu, t_s - prev_t, cores),
                    mem_pct: mem_pct_from(rss, total),
                    system_mem_pct: mem_pct_from(total.saturating_sub(available), total),
                });
                prev_cpu = cpu;
                prev_t = t_s;
            }
            samples
        });
        Ok(Self { stop, handle })
    }

    /// Stops the sampler and returns the ordered trace.
    pub fn stop(self) -> Vec<ResourceSample> {
        self.stop.store(true, Ordering::Relaxed);
        self.handle.join().unwrap_or_default()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PhaseProtocolError {
    #[error("phase begin while another phase is open")]
    AlreadyOpen,
    #[error("phase end without a matching begin")]
    NotOpen,
}

/// Begin/end phase timer on a monotonic clock shared with the sampler.
pub struct PhaseTimer {
    epoch: Instant,
    open: Option<(PhaseLabel, usize, f64)>,
    records: Vec<PhaseRecord>,
}

impl PhaseTimer {
    pub fn new(epoch: Instant) -> Self {
        Self {
            epoch,
            open: None,
            records: Vec::new(),
        }
    }

    /// Seconds since the run epoch.
    pub fn elapsed_s(&self) -> f64 {
        self.epoch.elapsed().as_secs_f64()
    }

    pub fn begin(
        &mut self,
        label: PhaseLabel,
        query_index: usize,
    ) -> Result<(), PhaseProtocolError> {
        if self.open.is_some() {
            return Err(PhaseProtocolError::AlreadyOpen);
        }
        self.open = Some((label, query_index, self.elapsed_s()));
        Ok(())
    }

    pub fn end(&mut self) -> Result<PhaseRecord, PhaseProtocolError> {
        let (label, query_index, start_s) = self.open.take().ok_or(PhaseProtocolError::NotOpen)?;
        let record = PhaseRecord {
            label,
            query_index,
            start_s,
            end_s: self.elapsed_s(),
        };
        self.records.push(record);
        Ok(record)
    }

    pub fn records(&self) -> &[PhaseRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<PhaseRecord> {
        self.records
    }
}
