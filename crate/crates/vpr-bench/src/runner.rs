//! Benchmark orchestration: build the reference map once, then run
//! load -> encode -> match per query with telemetry sampling throughout.

use std::path::{Path, PathBuf};
use std::time::Instant;

use vpr_core::cohog::{cohog_describe, CohogParams};
use vpr_core::hog::{hog_describe, HogParams};
use vpr_core::image::GrayImage;
use vpr_core::matching::{evaluate_matches, similarity_row, Descriptor, Metric, SimilarityMatrix};
use vpr_core::rmf::{self, RmfParams};
use vpr_core::telemetry::{phase_power, summarize, window_power, PhaseLabel};

use crate::dataset::{load_dataset, Dataset};
use crate::descfile;
use crate::error::{BenchError, ConfigError, DataError};
use crate::imgio::load_image;
use crate::report::{
    BenchmarkReport, ConfigEcho, DatasetInfo, ExternalEcho, LabelPower, MatchingSection,
    PhaseEntry, PowerSection, RmfConfigEcho, TimingSummary,
};
use crate::telemetry::{PhaseTimer, ResourceSampler, MIN_SAMPLING_INTERVAL_S};

/// Floor applied to the measured mean processing time before it enters the
/// real-time model, so a degenerate clock cannot yield a zero retrieval time.
pub const MIN_RETRIEVAL_TIME_S: f64 = 1e-9;

/// Technique to benchmark.
#[derive(Debug, Clone)]
pub enum TechniqueConfig {
    Hog(HogParams),
    Cohog(CohogParams),
    /// Precomputed global descriptors (e.g. CNN embeddings), one file per
    /// image list, both carrying the same declared metric.
    External {
        query_desc: PathBuf,
        ref_desc: PathBuf,
    },
}

impl TechniqueConfig {
    pub fn name(&self) -> &'static str {
        match self {
            TechniqueConfig::Hog(_) => "hog",
            TechniqueConfig::Cohog(_) => "cohog",
            TechniqueConfig::External { .. } => "external",
        }
    }
}

/// Real-time model settings. The defaults pair the 50 fps camera ceiling
/// with a 10 frames/meter, 2 m/s traversal (incoming rate 20 fps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmfSettings {
    pub camera_fps: f64,
    pub downsample: f64,
    pub frames_per_meter: f64,
    pub velocity_mps: f64,
}

impl Default for RmfSettings {
    fn default() -> Self {
        Self {
            camera_fps: 50.0,
            downsample: 1.0,
            frames_per_meter: 10.0,
            velocity_mps: 2.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub technique: TechniqueConfig,
    pub dataset_dir: PathBuf,
    pub gt_path: PathBuf,
    /// Working resolution images are resized to before description.
    pub resolution: (u32, u32),
    pub gt_tolerance: usize,
    pub rmf: RmfSettings,
    pub workers: usize,
    pub telemetry_interval_s: f64,
    pub power_log: Option<PathBuf>,
    pub power_clock_offset_s: f64,
}

impl RunConfig {
    pub fn new(technique: TechniqueConfig, dataset_dir: PathBuf, gt_path: PathBuf) -> Self {
        Self {
            technique,
            dataset_dir,
            gt_path,
            resolution: (512, 512),
            gt_tolerance: 0,
            rmf: RmfSettings::default(),
            workers: 1,
            telemetry_interval_s: crate::telemetry::DEFAULT_SAMPLING_INTERVAL_S,
            power_log: None,
            power_clock_offset_s: 0.0,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let must_exist = |path: &Path| -> Result<(), ConfigError> {
            if path.exists() {
                Ok(())
            } else {
                Err(ConfigError::MissingPath(path.to_path_buf()))
            }
        };
        must_exist(&self.dataset_dir)?;
        must_exist(&self.gt_path)?;
        if let Some(log) = &self.power_log {
            must_exist(log)?;
        }
        if self.workers == 0 {
            return Err(ConfigError::NoWorkers);
        }
        if self.telemetry_interval_s < MIN_SAMPLING_INTERVAL_S {
            return Err(ConfigError::IntervalTooSmall(self.telemetry_interval_s));
        }
        let (w, h) = self.resolution;
        if w < 2 || h < 2 {
            return Err(ConfigError::InvalidResolution(format!("{w}x{h}")));
        }
        for (name, value) in [
            ("fps", self.rmf.camera_fps),
            ("k", self.rmf.downsample),
            ("frames-per-meter", self.rmf.frames_per_meter),
            ("velocity", self.rmf.velocity_mps),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ConfigError::InvalidParam(format!(
                    "--{name} must be a positive number, got {value}"
                )));
            }
        }
        match &self.technique {
            TechniqueConfig::Hog(params) => {
                params
                    .validate()
                    .map_err(|e| ConfigError::InvalidParam(e.to_string()))?;
                check_hog_fit(w, h, params)?;
            }
            TechniqueConfig::Cohog(params) => {
                params
                    .validate()
                    .map_err(|e| ConfigError::InvalidParam(e.to_string()))?;
                if w % params.region_size != 0 || h % params.region_size != 0 {
                    return Err(ConfigError::InvalidParam(format!(
                        "region size {} does not tile the {w}x{h} working resolution",
                        params.region_size
                    )));
                }
                check_hog_fit(params.region_size, params.region_size, &params.hog)?;
            }
            TechniqueConfig::External {
                query_desc,
                ref_desc,
            } => {
                must_exist(query_desc)?;
                must_exist(ref_desc)?;
            }
        }
        Ok(())
    }
}

fn check_hog_fit(w: u32, h: u32, params: &HogParams) -> Result<(), ConfigError> {
    if !w.is_multiple_of(params.cell_size)
        || !h.is_multiple_of(params.cell_size)
        || w < params.block_size
        || h < params.block_size
    {
        return Err(ConfigError::InvalidParam(format!(
            "{w}x{h} pixels do not fit a {} px cell grid with {} px blocks",
            params.cell_size, params.block_size
        )));
    }
    Ok(())
}

fn unix_now() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn protocol(e: crate::telemetry::PhaseProtocolError) -> DataError {
    DataError::Telemetry(e.to_string())
}

/// Loads, resizes, and encodes reference images across `workers` threads,
/// preserving input order.
fn encode_references(
    paths: &[PathBuf],
    resolution: (u32, u32),
    workers: usize,
    encode: &(dyn Fn(&GrayImage) -> Result<Descriptor, DataError> + Sync),
) -> Result<Vec<Descriptor>, DataError> {
    let one = |path: &PathBuf| -> Result<Descriptor, DataError> {
        let img = load_image(path)?.resize(resolution.0, resolution.1)?;
        encode(&img)
    };
    if workers <= 1 || paths.len() <= 1 {
        return paths.iter().map(one).collect();
    }
    let chunk_size = paths.len().div_ceil(workers);
    let chunk_results = std::thread::scope(|scope| {
        let handles: Vec<_> = paths
            .chunks(chunk_size)
            .map(|chunk| scope.spawn(move || chunk.iter().map(one).collect::<Result<Vec<_>, _>>()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("reference encoding worker panicked"))
            .collect::<Vec<_>>()
    });
    let mut descriptors = Vec::with_capacity(paths.len());
    for chunk in chunk_results {
        descriptors.extend(chunk?);
    }
    Ok(descriptors)
}

struct ReferenceMap {
    refs: Vec<Descriptor>,
    metric: Metric,
    /// Parsed query descriptors for the external technique.
    external_queries: Option<Vec<Descriptor>>,
    external_echo: Option<ExternalEcho>,
}

fn build_reference_map(config: &RunConfig, dataset: &Dataset) -> Result<ReferenceMap, DataError> {
    match &config.technique {
        TechniqueConfig::Hog(params) => {
            let params = *params;
            let encode = move |img: &GrayImage| -> Result<Descriptor, DataError> {
                Ok(Descriptor::Global(hog_describe(img, &params)?))
            };
            Ok(ReferenceMap {
                refs: encode_references(
                    &dataset.ref_paths,
                    config.resolution,
                    config.workers,
                    &encode,
                )?,
                metric: Metric::Cosine,
                external_queries: None,
                external_echo: None,
            })
        }
        TechniqueConfig::Cohog(params) => {
            let params = *params;
            let encode = move |img: &GrayImage| -> Result<Descriptor, DataError> {
                Ok(Descriptor::Regional(cohog_describe(img, &params)?))
            };
            Ok(ReferenceMap {
                refs: encode_references(
                    &dataset.ref_paths,
                    config.resolution,
                    config.workers,
                    &encode,
                )?,
                metric: Metric::Regional,
                external_queries: None,
                external_echo: None,
            })
        }
        TechniqueConfig::External {
            query_desc,
            ref_desc,
        } => {
            let (queries, query_metric) = descfile::read_global(query_desc)?;
            let (refs, ref_metric) = descfile::read_global(ref_desc)?;
            if query_metric != ref_metric {
                return Err(DataError::Format {
                    path: ref_desc.clone(),
                    message: format!(
                        "metric '{ref_metric}' disagrees with query file's '{query_metric}'"
                    ),
                });
            }
            if queries.len() != dataset.n_queries() {
                return Err(DataError::Alignment {
                    expected: dataset.n_queries(),
                    got: queries.len(),
                });
            }
            if refs.len() != dataset.n_refs() {
                return Err(DataError::Alignment {
                    expected: dataset.n_refs(),
                    got: refs.len(),
                });
            }
            Ok(ReferenceMap {
                refs: refs.into_iter().map(Descriptor::Global).collect(),
                metric: query_metric,
                external_queries: Some(queries.into_iter().map(Descriptor::Global).collect()),
                external_echo: Some(ExternalEcho {
                    query_desc: query_desc.display().to_string(),
                    ref_desc: ref_desc.display().to_string(),
                    metric: query_metric,
                }),
            })
        }
    }
}

/// Runs one benchmark end to end and assembles the report. Any failure
/// aborts the run; partial results are never reported.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchmarkReport, BenchError> {
    config.validate()?;
    let started_at_unix_s = unix_now();
    let dataset = load_dataset(&config.dataset_dir, &config.gt_path, config.gt_tolerance)?;

    let epoch = Instant::now();
    let sampler = ResourceSampler::spawn(std::process::id(), config.telemetry_interval_s, epoch)
        .map_err(BenchError::Data)?;
    let mut timer = PhaseTimer::new(epoch);

    // Reference database is mapped once up front; map-build time is reported
    // separately and excluded from per-query processing time.
    let map_start = timer.elapsed_s();
    let reference_map = build_reference_map(config, &dataset).map_err(BenchError::Data)?;
    let map_build_s = timer.elapsed_s() - map_start;

    let run = || -> Result<(SimilarityMatrix, PhaseTimer), DataError> {
        let mut rows = Vec::with_capacity(dataset.n_queries());
        for query_index in 0..dataset.n_queries() {
            timer
                .begin(PhaseLabel::Load, query_index)
                .map_err(protocol)?;
            let image = match &config.technique {
                TechniqueConfig::Hog(_) | TechniqueConfig::Cohog(_) => Some(
                    load_image(&dataset.query_paths[query_index])?
                        .resize(config.resolution.0, config.resolution.1)?,
                ),
                TechniqueConfig::External { .. } => None,
            };
            timer.end().map_err(protocol)?;

            timer
                .begin(PhaseLabel::Encode, query_index)
                .map_err(protocol)?;
            let descriptor = match (&config.technique, &image) {
                (TechniqueConfig::Hog(params), Some(img)) => {
                    Descriptor::Global(hog_describe(img, params)?)
                }
                (TechniqueConfig::Cohog(params), Some(img)) => {
                    Descriptor::Regional(cohog_describe(img, params)?)
                }
                _ => reference_map
                    .external_queries
                    .as_ref()
                    .expect("external technique parsed query descriptors")[query_index]
                    .clone(),
            };
            timer.end().map_err(protocol)?;

            timer
                .begin(PhaseLabel::Match, query_index)
                .map_err(protocol)?;
            let row = similarity_row(&descriptor, &reference_map.refs, reference_map.metric)?;
            timer.end().map_err(protocol)?;
            rows.push(row);
        }
        let matrix = SimilarityMatrix::from_rows(rows, reference_map.metric)?;
        Ok((matrix, timer))
    };
    let result = run();
    // The sampler is stopped on both paths so the thread never outlives us.
    let samples = sampler.stop();
    let (matrix, timer) = result.map_err(BenchError::Data)?;
    let run_end_s = timer.elapsed_s();

    let outcome = evaluate_matches(&matrix, &dataset.ground_truth).map_err(DataError::Matching)?;

    let phases = timer.into_records();
    let mut totals = vec![0.0f64; dataset.n_queries()];
    for phase in &phases {
        totals[phase.query_index] += phase.duration_s();
    }
    let mean_processing_time_s = totals.iter().sum::<f64>() / totals.len() as f64;
    let mut sorted = totals.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("durations are finite"));
    let median_processing_time_s = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
    };
    let retrieval_time_s = mean_processing_time_s.max(MIN_RETRIEVAL_TIME_S);

    let rmf_result = rmf::evaluate(
        &RmfParams {
            camera_fps: config.rmf.camera_fps,
            downsample: config.rmf.downsample,
            frames_per_meter: config.rmf.frames_per_meter,
            velocity_mps: config.rmf.velocity_mps,
            retrieval_time_s,
        },
        &outcome.matches_list,
    )
    .map_err(DataError::Rmf)?;

    // Power attribution is per phase (None where the phase misses the trace),
    // per label, and whole-run.
    let trace = match &config.power_log {
        Some(path) => Some(crate::powerlog::ingest_power_log(
            path,
            config.power_clock_offset_s,
        )?),
        None => None,
    };
    let phase_entries: Vec<PhaseEntry> = phases
        .iter()
        .map(|p| PhaseEntry {
            label: p.label,
            query_index: p.query_index,
            start_s: p.start_s,
            end_s: p.end_s,
            power: trace.as_ref().and_then(|t| phase_power(t, p).ok()),
        })
        .collect();
    let power_section = trace.as_ref().map(|t| PowerSection {
        log_path: config
            .power_log
            .as_ref()
            .expect("trace implies a log path")
            .display()
            .to_string(),
        clock_offset_s: config.power_clock_offset_s,
        whole_run: window_power(t, 0.0, run_end_s).ok(),
        per_label: per_label_power(&phase_entries),
    });

    Ok(BenchmarkReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at_unix_s,
        finished_at_unix_s: unix_now(),
        config: ConfigEcho {
            technique: config.technique.name().to_string(),
            dataset_dir: config.dataset_dir.display().to_string(),
            gt_path: config.gt_path.display().to_string(),
            resolution: [config.resolution.0, config.resolution.1],
            hog: match &config.technique {
                TechniqueConfig::Hog(p) => Some(*p),
                _ => None,
            },
            cohog: match &config.technique {
                TechniqueConfig::Cohog(p) => Some(*p),
                _ => None,
            },
            external: reference_map.external_echo,
            workers: config.workers,
            telemetry_interval_s: config.telemetry_interval_s,
            gt_tolerance: config.gt_tolerance,
            rmf: RmfConfigEcho {
                camera_fps: config.rmf.camera_fps,
                downsample: config.rmf.downsample,
                frames_per_meter: config.rmf.frames_per_meter,
                velocity_mps: config.rmf.velocity_mps,
            },
            power_log: config.power_log.as_ref().map(|p| p.display().to_string()),
            power_clock_offset_s: config
                .power_log
                .as_ref()
                .map(|_| config.power_clock_offset_s),
        },
        dataset: DatasetInfo {
            name: dataset.name.clone(),
            n_queries: dataset.n_queries(),
            n_refs: dataset.n_refs(),
        },
        timing: TimingSummary {
            map_build_s,
            mean_processing_time_s,
            median_processing_time_s,
            retrieval_time_s,
        },
        phases: phase_entries,
        matching: MatchingSection {
            metric: reference_map.metric,
            gt_tolerance: config.gt_tolerance,
            ground_truth: dataset.ground_truth.mapping().to_vec(),
            best_indices: outcome.best_indices,
            matches_list: outcome.matches_list,
            accuracy: outcome.accuracy,
        },
        rmf: rmf_result,
        resources: summarize(&samples),
        power: power_section,
    })
}

fn per_label_power(entries: &[PhaseEntry]) -> Vec<LabelPower> {
    PhaseLabel::ALL
        .iter()
        .filter_map(|&label| {
            let mut energy = 0.0;
            let mut duration = 0.0;
            let mut seen = false;
            for entry in entries.iter().filter(|e| e.label == label) {
                if let Some(p) = entry.power {
                    energy += p.energy_joules;
                    duration += entry.duration_s();
                    seen = true;
                }
            }
            if !seen {
                return None;
            }
            let avg_watts = if duration > 0.0 {
                energy / duration
            } else {
                0.0
            };
            Some(LabelPower {
                label,
                avg_watts,
                energy_joules: energy,
            })
        })
        .collect()
}
