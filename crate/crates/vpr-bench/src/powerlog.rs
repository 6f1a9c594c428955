//! Power meter log ingestion.
//!
//! Logs are CSV with the header `timestamp_ms,voltage_mV,current_mA,power_mW`
//! and one sample per row. Only the timestamp and power fields must be
//! populated; voltage and current are carried by meters that report them but
//! are not needed here. Timestamps are converted to seconds and shifted by
//! the configured clock offset onto the benchmark's monotonic clock.

use std::path::Path;

use vpr_core::telemetry::{PowerSample, PowerTrace};

use crate::error::DataError;

const HEADER: &str = "timestamp_ms,voltage_mV,current_mA,power_mW";

/// Parses a power log and aligns it to the benchmark clock.
pub fn ingest_power_log(path: &Path, clock_offset_s: f64) -> Result<PowerTrace, DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    parse_power_log(path, &text, clock_offset_s)
}

fn parse_power_log(path: &Path, text: &str, clock_offset_s: f64) -> Result<PowerTrace, DataError> {
    let parse_err = |line: u64, message: String| DataError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim_end_matches('\r'));
    if header != Some(HEADER) {
        return Err(parse_err(1, format!("expected header '{HEADER}'")));
    }

    let mut samples: Vec<PowerSample> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx as u64 + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let timestamp_ms: f64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad timestamp_ms '{}'", fields[0])))?;
        let power_mw: f64 = fields[3]
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad power_mW '{}'", fields[3])))?;
        if power_mw < 0.0 {
            return Err(parse_err(line_no, format!("negative power {power_mw} mW")));
        }
        let t_s = timestamp_ms / 1000.0;
        if let Some(last) = samples.last() {
            // Compare in log time: the constant offset preserves order.
            if t_s < last.t_s {
                return Err(parse_err(line_no, "timestamp decreases".into()));
            }
        }
        samples.push(PowerSample { t_s, power_mw });
    }
    if samples.is_empty() {
        return Err(DataError::EmptyLog(path.to_path_buf()));
    }
    PowerTrace::new(samples, clock_offset_s).map_err(DataError::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vpr_core::telemetry::window_power;

    fn parse(text: &str) -> Result<PowerTrace, DataError> {
        parse_power_log(Path::new("test.csv"), text, 0.0)
    }

    #[test]
    fn two_samples_average_to_midpoint() {
        let trace = parse(
            "timestamp_ms,voltage_mV,current_mA,power_mW\n0,5000,480,2400\n1000,5000,520,2600\n",
        )
        .unwrap();
        assert_eq!(trace.samples().len(), 2);
        let p = window_power(&trace, 0.0, 1.0).unwrap();
        assert!((p.avg_watts - 2.5).abs() < 1e-12);
    }

    #[test]
    fn voltage_and_current_may_be_empty() {
        let trace =
            parse("timestamp_ms,voltage_mV,current_mA,power_mW\n0,,,1500\n500,,,1500\n").unwrap();
        assert_eq!(trace.samples().len(), 2);
        assert_eq!(trace.samples()[1].t_s, 0.5);
    }

    #[test]
    fn single_sample_log_is_valid() {
        let trace = parse("timestamp_ms,voltage_mV,current_mA,power_mW\n250,,,3000\n").unwrap();
        assert_eq!(trace.samples().len(), 1);
        let p = window_power(&trace, 0.0, 2.0).unwrap();
        assert!((p.avg_watts - 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_numeric_power_reports_line() {
        let err = parse("timestamp_ms,voltage_mV,current_mA,power_mW\n0,,,2400\n1000,,,banana\n")
            .unwrap_err();
        match err {
            DataError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn decreasing_timestamps_are_rejected() {
        let err =
            parse("timestamp_ms,voltage_mV,current_mA,power_mW\n1000,,,1\n500,,,1\n").unwrap_err();
        match err {
            DataError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("decreases"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn empty_log_is_rejected() {
        let err = parse("timestamp_ms,voltage_mV,current_mA,power_mW\n").unwrap_err();
        assert!(matches!(err, DataError::EmptyLog(_)));
    }

    #[test]
    fn wrong_header_is_rejected() {
        let err = parse("time,volts,amps,watts\n0,,,1\n").unwrap_err();
        assert!(matches!(err, DataError::Parse { line: 1, .. }));
    }

    #[test]
    fn clock_offset_shifts_trace() {
        let trace = parse_power_log(
            Path::new("test.csv"),
            "timestamp_ms,voltage_mV,current_mA,power_mW\n1000,,,2000\n2000,,,2000\n",
            -1.0,
        )
        .unwrap();
        assert_eq!(trace.span(), (0.0, 1.0));
    }
}
