//! Benchmark report assembly, emission, and self-consistency checks.
//!
//! JSON is the canonical lossless form: reading it back reproduces the report
//! structurally, and the stored accuracy and RMF figures can be recomputed
//! from the embedded matches list and timings. CSV is a flattened per-query
//! table for spreadsheet work.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use vpr_core::cohog::CohogParams;
use vpr_core::hog::HogParams;
use vpr_core::matching::Metric;
use vpr_core::rmf::{self, RmfParams, RmfResult};
use vpr_core::telemetry::{PhaseLabel, PhasePower, ResourceSummary};

use crate::error::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Echo of the run configuration, embedded for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub technique: String,
    pub dataset_dir: String,
    pub gt_path: String,
    pub resolution: [u32; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hog: Option<HogParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohog: Option<CohogParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub external: Option<ExternalEcho>,
    pub workers: usize,
    pub telemetry_interval_s: f64,
    pub gt_tolerance: usize,
    pub rmf: RmfConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_log: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_clock_offset_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalEcho {
    pub query_desc: String,
    pub ref_desc: String,
    pub metric: Metric,
}

/// Real-time model inputs (everything but the measured retrieval time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmfConfigEcho {
    pub camera_fps: f64,
    pub downsample: f64,
    pub frames_per_meter: f64,
    pub velocity_mps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub n_queries: usize,
    pub n_refs: usize,
}

/// Per-run timing summary. `retrieval_time_s` is the value fed to the
/// real-time model: the mean per-query processing time clamped to a
/// nanosecond floor so degenerate clocks cannot produce a zero rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub map_build_s: f64,
    pub mean_processing_time_s: f64,
    pub median_processing_time_s: f64,
    pub retrieval_time_s: f64,
}

/// One timed phase, with its share of measured power when a log was supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub label: PhaseLabel,
    pub query_index: usize,
    pub start_s: f64,
    pub end_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<PhasePower>,
}

impl PhaseEntry {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingSection {
    pub metric: Metric,
    pub gt_tolerance: usize,
    /// Correct reference index per query, echoed from the ground truth.
    pub ground_truth: Vec<usize>,
    pub best_indices: Vec<usize>,
    pub matches_list: Vec<u8>,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelPower {
    pub label: PhaseLabel,
    pub avg_watts: f64,
    pub energy_joules: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSection {
    pub log_path: String,
    pub clock_offset_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub whole_run: Option<PhasePower>,
    pub per_label: Vec<LabelPower>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub tool_version: String,
    pub started_at_unix_s: f64,
    pub finished_at_unix_s: f64,
    pub config: ConfigEcho,
    pub dataset: DatasetInfo,
    pub timing: TimingSummary,
    pub phases: Vec<PhaseEntry>,
    pub matching: MatchingSection,
    pub rmf: RmfResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resources: Option<ResourceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerSection>,
}

impl BenchmarkReport {
    /// Per-query processing time (load + encode + match) in query order.
    pub fn per_query_totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.dataset.n_queries];
        for phase in &self.phases {
            if phase.query_index < totals.len() {
                totals[phase.query_index] += phase.duration_s();
            }
        }
        totals
    }

    /// Recomputes accuracy from the embedded matches list and the full RMF
    /// result from the embedded retrieval time, then compares them to the
    /// stored values. Returns the list of discrepancies, empty when the
    /// report is self-consistent.
    pub fn consistency_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();

        let n = self.matching.matches_list.len();
        if n != self.dataset.n_queries {
            issues.push(format!(
                "matches list has {n} entries for {} queries",
                self.dataset.n_queries
            ));
        }
        let correct: u64 = self
            .matching
            .matches_list
            .iter()
            .map(|&m| u64::from(m))
            .sum();
        if n > 0 {
            let accuracy = correct as f64 / n as f64;
            if accuracy != self.matching.accuracy {
                issues.push(format!(
                    "stored accuracy {} != recomputed {accuracy}",
                    self.matching.accuracy
                ));
            }
        }

        let totals = self.per_query_totals();
        if !totals.is_empty() {
            let mean = totals.iter().sum::<f64>() / totals.len() as f64;
            if mean != self.timing.mean_processing_time_s {
                issues.push(format!(
                    "stored mean processing time {} != recomputed {mean}",
                    self.timing.mean_processing_time_s
                ));
            }
            let clamped = mean.max(crate::runner::MIN_RETRIEVAL_TIME_S);
            if clamped != self.timing.retrieval_time_s {
                issues.push(format!(
                    "stored retrieval time {} != recomputed {clamped}",
                    self.timing.retrieval_time_s
                ));
            }
        }

        let params = RmfParams {
            camera_fps: self.config.rmf.camera_fps,
            downsample: self.config.rmf.downsample,
            frames_per_meter: self.config.rmf.frames_per_meter,
            velocity_mps: self.config.rmf.velocity_mps,
            retrieval_time_s: self.timing.retrieval_time_s,
        };
        match rmf::evaluate(&params, &self.matching.matches_list) {
            Ok(recomputed) => {
                if recomputed != self.rmf {
                    issues.push(format!(
                        "stored RMF result {:?} != recomputed {recomputed:?}",
                        self.rmf
                    ));
                }
            }
            Err(e) => issues.push(format!("cannot recompute RMF: {e}")),
        }
        issues
    }
}

/// Writes a report to `path` in the chosen format.
pub fn emit_report(
    report: &BenchmarkReport,
    path: &Path,
    format: ReportFormat,
) -> Result<(), DataError> {
    let file = std::fs::File::create(path).map_err(|e| DataError::io(path, e))?;
    let mut writer = std::io::BufWriter::new(file);
    match format {
        ReportFormat::Json => write_json(&mut writer, report)?,
        ReportFormat::Csv => write_csv(&mut writer, report)?,
    }
    writer.flush().map_err(|e| DataError::io(path, e))
}

pub fn write_json<W: Write>(mut writer: W, report: &BenchmarkReport) -> Result<(), DataError> {
    serde_json::to_writer_pretty(&mut writer, report)
        .map_err(|e| DataError::Report(format!("cannot serialize report: {e}")))?;
    writer
        .write_all(b"\n")
        .map_err(|e| DataError::Report(e.to_string()))
}

pub fn read_report(path: &Path) -> Result<BenchmarkReport, DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| DataError::Report(format!("{}: {e}", path.display())))
}

/// Flattened per-query table: one row per query plus a header.
pub fn write_csv<W: Write>(mut writer: W, report: &BenchmarkReport) -> Result<(), DataError> {
    let io_err = |e: std::io::Error| DataError::Report(e.to_string());
    writeln!(
        writer,
        "query_index,load_s,encode_s,match_s,total_s,best_ref,gt_ref,matched,energy_j"
    )
    .map_err(io_err)?;

    let n = report.dataset.n_queries;
    let mut durations: Vec<BTreeMap<&'static str, f64>> = vec![BTreeMap::new(); n];
    let mut energies: Vec<Option<f64>> = vec![None; n];
    for phase in &report.phases {
        if phase.query_index >= n {
            continue;
        }
        durations[phase.query_index].insert(phase.label.as_str(), phase.duration_s());
        if let Some(p) = phase.power {
            *energies[phase.query_index].get_or_insert(0.0) += p.energy_joules;
        }
    }
    for query in 0..n {
        let get = |label: &str| durations[query].get(label).copied().unwrap_or(0.0);
        let (load, encode, matching) = (get("load"), get("encode"), get("match"));
        let energy = energies[query]
            .map(|e| format!("{e:?}"))
            .unwrap_or_default();
        writeln!(
            writer,
            "{query},{:?},{:?},{:?},{:?},{},{},{},{energy}",
            load,
            encode,
            matching,
            load + encode + matching,
            report
                .matching
                .best_indices
                .get(query)
                .copied()
                .unwrap_or(0),
            report
                .matching
                .ground_truth
                .get(query)
                .copied()
                .unwrap_or(0),
            report
                .matching
                .matches_list
                .get(query)
                .copied()
                .unwrap_or(0),
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Table-style one-run summary for terminals.
pub fn summary_text(report: &BenchmarkReport) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "technique: {}   dataset: {} ({} queries, {} references)",
        report.config.technique,
        report.dataset.name,
        report.dataset.n_queries,
        report.dataset.n_refs
    );
    let _ = writeln!(
        out,
        "resolution: {}x{}   workers: {}   tool: v{}",
        report.config.resolution[0],
        report.config.resolution[1],
        report.config.workers,
        report.tool_version
    );
    let _ = writeln!(out, "accuracy: {:.4}", report.matching.accuracy);
    let _ = writeln!(
        out,
        "processing time: mean {:.6} s, median {:.6} s (map build {:.6} s)",
        report.timing.mean_processing_time_s,
        report.timing.median_processing_time_s,
        report.timing.map_build_s
    );
    if let Some(res) = &report.resources {
        let _ = writeln!(
            out,
            "cpu: mean {:.2}%, max {:.2}%   process mem: mean {:.2}%, max {:.2}%   system mem: mean {:.2}%",
            res.cpu_mean_pct, res.cpu_max_pct, res.mem_mean_pct, res.mem_max_pct,
            res.system_mem_mean_pct
        );
    } else {
        let _ = writeln!(out, "cpu/mem: no samples collected");
    }
    let r = &report.rmf;
    let _ = writeln!(
        out,
        "rmf: incoming {} fps, vpr rate {} fps, G = {}{} -> RMF {} of M_q {} (N_q {})",
        r.incoming_rate,
        r.vpr_rate,
        r.frame_interval,
        if r.unfloored_vpr_fallback {
            " (unfloored-rate fallback)"
        } else {
            ""
        },
        r.real_time_matched_frames,
        r.matched_queries,
        r.total_queries
    );
    match &report.power {
        Some(power) => {
            if let Some(whole) = power.whole_run {
                let _ = writeln!(
                    out,
                    "power: whole run {:.3} W avg, {:.3} J",
                    whole.avg_watts, whole.energy_joules
                );
            }
            for lp in &power.per_label {
                let _ = writeln!(
                    out,
                    "power[{}]: {:.3} W avg, {:.3} J",
                    lp.label, lp.avg_watts, lp.energy_joules
                );
            }
        }
        None => {
            let _ = writeln!(out, "power: no log supplied");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_report() -> BenchmarkReport {
        let matches_list = vec![1u8, 0, 1];
        // Dyadic phase offsets/durations: per-query total is exactly 0.5 s,
        // so the self-consistency recompute reproduces the stored figures.
        let phases: Vec<PhaseEntry> = (0..3)
            .flat_map(|q| {
                [
                    (PhaseLabel::Load, 0.0, 0.125),
                    (PhaseLabel::Encode, 0.25, 0.125),
                    (PhaseLabel::Match, 0.5, 0.25),
                ]
                .into_iter()
                .map(move |(label, offset, d)| PhaseEntry {
                    label,
                    query_index: q,
                    start_s: q as f64 + offset,
                    end_s: q as f64 + offset + d,
                    power: None,
                })
            })
            .collect();
        let params = RmfParams {
            camera_fps: 50.0,
            downsample: 1.0,
            frames_per_meter: 10.0,
            velocity_mps: 2.0,
            retrieval_time_s: 0.5,
        };
        let rmf = rmf::evaluate(&params, &matches_list).unwrap();
        BenchmarkReport {
            tool_version: "0.1.0".into(),
            started_at_unix_s: 1000.0,
            finished_at_unix_s: 1010.0,
            config: ConfigEcho {
                technique: "hog".into(),
                dataset_dir: "/tmp/ds".into(),
                gt_path: "/tmp/ds/ground_truth.csv".into(),
                resolution: [64, 64],
                hog: Some(HogParams::default()),
                cohog: None,
                external: None,
                workers: 1,
                telemetry_interval_s: 0.1,
                gt_tolerance: 0,
                rmf: RmfConfigEcho {
                    camera_fps: 50.0,
                    downsample: 1.0,
                    frames_per_meter: 10.0,
                    velocity_mps: 2.0,
                },
                power_log: None,
                power_clock_offset_s: None,
            },
            dataset: DatasetInfo {
                name: "ds".into(),
                n_queries: 3,
                n_refs: 3,
            },
            timing: TimingSummary {
                map_build_s: 0.5,
                mean_processing_time_s: 0.5,
                median_processing_time_s: 0.5,
                retrieval_time_s: 0.5,
            },
            phases,
            matching: MatchingSection {
                metric: Metric::Cosine,
                gt_tolerance: 0,
                ground_truth: vec![0, 1, 2],
                best_indices: vec![0, 0, 2],
                matches_list,
                accuracy: 2.0 / 3.0,
            },
            rmf,
            resources: None,
            power: None,
        }
    }

    #[test]
    fn json_round_trip_is_structurally_identical() {
        let report = sample_report();
        let mut buf = Vec::new();
        write_json(&mut buf, &report).unwrap();
        let back: BenchmarkReport = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn sample_report_is_self_consistent() {
        assert!(sample_report().consistency_issues().is_empty());
    }

    #[test]
    fn tampered_accuracy_is_detected() {
        let mut report = sample_report();
        report.matching.accuracy = 0.99;
        assert!(!report.consistency_issues().is_empty());
    }

    #[test]
    fn tampered_rmf_is_detected() {
        let mut report = sample_report();
        report.rmf.real_time_matched_frames += 1;
        assert!(!report.consistency_issues().is_empty());
    }

    #[test]
    fn csv_has_one_row_per_query_plus_header() {
        let report = sample_report();
        let mut buf = Vec::new();
        write_csv(&mut buf, &report).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), report.dataset.n_queries + 1);
        assert!(lines[0].starts_with("query_index,"));
        // No power log: the energy column is empty, not zero.
        assert!(lines[1].ends_with(','));
    }

    #[test]
    fn summary_mentions_key_figures() {
        let text = summary_text(&sample_report());
        assert!(text.contains("accuracy: 0.6667"));
        assert!(text.contains("G = 10"));
        assert!(text.contains("no log supplied"));
    }
}
