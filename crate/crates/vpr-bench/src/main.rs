//! `bench`: benchmark training-less VPR techniques and evaluate the
//! real-time matched frames metric.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vpr_bench::error::{BenchError, ConfigError, DataError};
use vpr_bench::report::{self, ReportFormat};
use vpr_bench::runner::{run_benchmark, RmfSettings, RunConfig, TechniqueConfig};
use vpr_core::cohog::CohogParams;
use vpr_core::hog::HogParams;
use vpr_core::rmf::compute_rmf;

#[derive(Parser)]
#[command(
    name = "bench",
    version,
    about = "Visual place recognition benchmark harness",
    long_about = "Runs training-less VPR descriptor pipelines (HOG, CoHOG) or precomputed \
descriptors over an image dataset, measures accuracy, timing, CPU/memory and power, and \
reports the real-time matched frames metric."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark over a dataset
    Run(Box<RunArgs>),
    /// Evaluate real-time matched frames on a saved matches list
    Rmf(RmfArgs),
    /// Inspect a saved benchmark report
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TechniqueArg {
    Hog,
    Cohog,
    External,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    /// Descriptor technique to benchmark
    #[arg(long, value_enum)]
    technique: TechniqueArg,
    /// Dataset directory containing query/ and ref/ subdirectories
    #[arg(long)]
    dataset: PathBuf,
    /// Ground truth CSV (query_index,ref_index)
    #[arg(long)]
    gt: PathBuf,
    /// Ground-truth tolerance window in frames
    #[arg(long, default_value_t = 0)]
    gt_tolerance: usize,
    /// Query descriptor file (external technique only)
    #[arg(long)]
    desc: Option<PathBuf>,
    /// Reference descriptor file (external technique only)
    #[arg(long)]
    ref_desc: Option<PathBuf>,
    /// Working resolution images are resized to, WxH
    #[arg(long, default_value = "512x512")]
    resolution: String,
    /// Camera sampling rate F in frames/second
    #[arg(long, default_value_t = 50.0)]
    fps: f64,
    /// Unit-less pipeline down-sampling constant K
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Frames sampled per meter of travel, D
    #[arg(long, default_value_t = 10.0)]
    frames_per_meter: f64,
    /// Platform speed V in meters/second
    #[arg(long, default_value_t = 2.0)]
    velocity: f64,
    /// Power meter CSV log to align with the run
    #[arg(long)]
    power_log: Option<PathBuf>,
    /// Power log clock offset in seconds (log epoch -> benchmark clock)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    power_offset: f64,
    /// Descriptor worker threads for reference map building
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Resource sampling interval in seconds
    #[arg(long, default_value_t = 0.1)]
    telemetry_interval: f64,
    /// Report output path (stdout JSON when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format for --out
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// HOG cell size in pixels
    #[arg(long, default_value_t = 8)]
    cell_size: u32,
    /// HOG block size in pixels
    #[arg(long, default_value_t = 16)]
    block_size: u32,
    /// HOG block stride in pixels
    #[arg(long, default_value_t = 8)]
    block_stride: u32,
    /// HOG orientation bins
    #[arg(long, default_value_t = 9)]
    bins: usize,
    /// CoHOG region size in pixels
    #[arg(long, default_value_t = 16)]
    region_size: u32,
    /// CoHOG entropy threshold in bits
    #[arg(long, default_value_t = 0.5)]
    entropy_threshold: f64,
}

#[derive(Args)]
struct RmfArgs {
    /// Matches list file: whitespace- or newline-separated 0/1 values
    #[arg(long)]
    matches: PathBuf,
    /// Frame interval G
    #[arg(long)]
    g: u64,
}

#[derive(Args)]
struct ReportArgs {
    /// Report JSON produced by `bench run`
    #[arg(long = "in")]
    input: PathBuf,
    /// Print the condensed table-style summary
    #[arg(long)]
    summary: bool,
}

fn parse_resolution(text: &str) -> Result<(u32, u32), ConfigError> {
    let bad = || ConfigError::InvalidResolution(text.to_string());
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: u32 = w.trim().parse().map_err(|_| bad())?;
    let h: u32 = h.trim().parse().map_err(|_| bad())?;
    if w < 2 || h < 2 {
        return Err(bad());
    }
    Ok((w, h))
}

fn run_command(args: RunArgs) -> Result<(), BenchError> {
    let hog = HogParams {
        cell_size: args.cell_size,
        block_size: args.block_size,
        block_stride: args.block_stride,
        bins: args.bins,
    };
    let technique = match args.technique {
        TechniqueArg::Hog => TechniqueConfig::Hog(hog),
        TechniqueArg::Cohog => TechniqueConfig::Cohog(CohogParams {
            region_size: args.region_size,
            entropy_threshold: args.entropy_threshold,
            hog,
        }),
        TechniqueArg::External => match (&args.desc, &args.ref_desc) {
            (Some(query_desc), Some(ref_desc)) => TechniqueConfig::External {
                query_desc: query_desc.clone(),
                ref_desc: ref_desc.clone(),
            },
            _ => return Err(ConfigError::MissingDescriptorFiles.into()),
        },
    };
    if !matches!(technique, TechniqueConfig::External { .. })
        && (args.desc.is_some() || args.ref_desc.is_some())
    {
        return Err(ConfigError::UnexpectedDescriptorFiles.into());
    }

    let config = RunConfig {
        technique,
        dataset_dir: args.dataset,
        gt_path: args.gt,
        resolution: parse_resolution(&args.resolution)?,
        gt_tolerance: args.gt_tolerance,
        rmf: RmfSettings {
            camera_fps: args.fps,
            downsample: args.k,
            frames_per_meter: args.frames_per_meter,
            velocity_mps: args.velocity,
        },
        workers: args.workers,
        telemetry_interval_s: args.telemetry_interval,
        power_log: args.power_log,
        power_clock_offset_s: args.power_offset,
    };
    let report = run_benchmark(&config)?;

    match &args.out {
        Some(path) => {
            let format = match args.format {
                FormatArg::Json => ReportFormat::Json,
                FormatArg::Csv => ReportFormat::Csv,
            };
            report::emit_report(&report, path, format)?;
            eprintln!("report written to {}", path.display());
        }
        None => {
            let stdout = std::io::stdout();
            report::write_json(stdout.lock(), &report)?;
        }
    }
    Ok(())
}

fn rmf_command(args: RmfArgs) -> Result<(), BenchError> {
    if args.g < 1 {
        return Err(ConfigError::InvalidParam("--g must be at least 1".into()).into());
    }
    let text =
        std::fs::read_to_string(&args.matches).map_err(|e| DataError::io(&args.matches, e))?;
    let mut matches_list = Vec::new();
    for token in text.split([' ', '\t', '\n', '\r', ',']) {
        if token.is_empty() {
            continue;
        }
        match token {
            "0" => matches_list.push(0u8),
            "1" => matches_list.push(1u8),
            other => {
                return Err(DataError::Format {
                    path: args.matches.clone(),
                    message: format!("matches list entry '{other}' is not 0 or 1"),
                }
                .into())
            }
        }
    }
    if matches_list.is_empty() {
        return Err(DataError::Format {
            path: args.matches.clone(),
            message: "matches list is empty".into(),
        }
        .into());
    }
    let (matched, real_time) = compute_rmf(&matches_list, args.g).map_err(DataError::Rmf)?;
    println!(
        "{}",
        serde_json::json!({
            "total_queries": matches_list.len(),
            "matched_queries": matched,
            "frame_interval": args.g,
            "real_time_matched_frames": real_time,
        })
    );
    Ok(())
}

fn report_command(args: ReportArgs) -> Result<(), BenchError> {
    let report = report::read_report(&args.input)?;
    let issues = report.consistency_issues();
    if args.summary {
        print!("{}", report::summary_text(&report));
    } else {
        let stdout = std::io::stdout();
        report::write_json(stdout.lock(), &report)?;
    }
    if !issues.is_empty() {
        for issue in &issues {
            eprintln!("inconsistent report: {issue}");
        }
        return Err(DataError::Report("report failed self-consistency checks".into()).into());
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run_command(*args),
        Command::Rmf(args) => rmf_command(args),
        Command::Report(args) => report_command(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
