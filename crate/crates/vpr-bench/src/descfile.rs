//! Descriptor file formats.
//!
//! Global vectors (the interchange format for externally computed
//! descriptors, e.g. CNN embeddings):
//!
//! ```text
//! vpr-desc v1 <count> <dim> <metric>
//! v0 v1 ... v(dim-1)        # one line per image, lexicographic image order
//! ```
//!
//! `<metric>` is `cosine` or `l1` and declares how the vectors are compared
//! downstream. Regional descriptor sets use a sibling format that keeps each
//! region's rectangle:
//!
//! ```text
//! vpr-desc-regional v1 <image_count> <dim>
//! image <index> <region_count>
//! <x> <y> <w> <h> v0 ... v(dim-1)   # one line per region
//! ```

use std::fmt::Write as _;
use std::path::Path;

use vpr_core::cohog::RegionalDescriptorSet;
use vpr_core::hog::GlobalDescriptor;
use vpr_core::image::Rect;
use vpr_core::matching::Metric;

use crate::error::DataError;

const GLOBAL_MAGIC: &str = "vpr-desc";
const REGIONAL_MAGIC: &str = "vpr-desc-regional";
const VERSION: &str = "v1";

fn format_err(path: &Path, message: impl Into<String>) -> DataError {
    DataError::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> DataError {
    DataError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Writes global descriptors with their comparison metric.
pub fn write_global(
    path: &Path,
    descriptors: &[GlobalDescriptor],
    metric: Metric,
) -> Result<(), DataError> {
    if metric == Metric::Regional {
        return Err(format_err(
            path,
            "regional metric does not apply to global descriptor files",
        ));
    }
    let dim = descriptors.first().map(GlobalDescriptor::dim).unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{GLOBAL_MAGIC} {VERSION} {} {dim} {metric}",
        descriptors.len()
    );
    for desc in descriptors {
        let mut first = true;
        for v in desc.values() {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{v:?}");
            first = false;
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| DataError::io(path, e))
}

/// Reads a global descriptor file, validating its internal consistency.
pub fn read_global(path: &Path) -> Result<(Vec<GlobalDescriptor>, Metric), DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| format_err(path, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != GLOBAL_MAGIC || fields[1] != VERSION {
        return Err(format_err(
            path,
            format!("expected header '{GLOBAL_MAGIC} {VERSION} <count> <dim> <metric>'"),
        ));
    }
    let count: usize = fields[2]
        .parse()
        .map_err(|_| format_err(path, "count is not a number"))?;
    let dim: usize = fields[3]
        .parse()
        .map_err(|_| format_err(path, "dim is not a number"))?;
    let metric: Metric = fields[4]
        .parse()
        .map_err(|_| format_err(path, format!("unknown metric tag '{}'", fields[4])))?;
    if metric == Metric::Regional {
        return Err(format_err(
            path,
            "regional sets are not supported in global descriptor files",
        ));
    }

    let mut descriptors = Vec::with_capacity(count);
    for (idx, line) in lines {
        let line_no = idx as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let values = parse_floats(path, line_no, line)?;
        if values.len() != dim {
            return Err(parse_err(
                path,
                line_no,
                format!("expected {dim} values, found {}", values.len()),
            ));
        }
        descriptors.push(GlobalDescriptor::new(values));
    }
    if descriptors.len() != count {
        return Err(format_err(
            path,
            format!(
                "header declares {count} vectors but {} were found",
                descriptors.len()
            ),
        ));
    }
    Ok((descriptors, metric))
}

/// Writes regional descriptor sets with their region rectangles.
pub fn write_regional(path: &Path, sets: &[RegionalDescriptorSet]) -> Result<(), DataError> {
    let dim = sets
        .first()
        .and_then(|s| s.regions().first())
        .map(|(_, d)| d.dim())
        .unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{REGIONAL_MAGIC} {VERSION} {} {dim}", sets.len());
    for (index, set) in sets.iter().enumerate() {
        let _ = writeln!(out, "image {index} {}", set.len());
        for (rect, desc) in set.regions() {
            let _ = write!(out, "{} {} {} {}", rect.x, rect.y, rect.width, rect.height);
            for v in desc.values() {
                let _ = write!(out, " {v:?}");
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out).map_err(|e| DataError::io(path, e))
}

/// Reads regional descriptor sets written by [`write_regional`].
pub fn read_regional(path: &Path) -> Result<Vec<RegionalDescriptorSet>, DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    let mut lines = text.lines().enumerate().peekable();
    let (_, header) = lines.next().ok_or_else(|| format_err(path, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != REGIONAL_MAGIC || fields[1] != VERSION {
        return Err(format_err(
            path,
            format!("expected header '{REGIONAL_MAGIC} {VERSION} <image_count> <dim>'"),
        ));
    }
    let image_count: usize = fields[2]
        .parse()
        .map_err(|_| format_err(path, "image count is not a number"))?;
    let dim: usize = fields[3]
        .parse()
        .map_err(|_| format_err(path, "dim is not a number"))?;

    let mut sets = Vec::with_capacity(image_count);
    for expected_index in 0..image_count {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| format_err(path, "truncated file: missing image block"))?;
        let line_no = idx as u64 + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "image" {
            return Err(parse_err(
                path,
                line_no,
                "expected 'image <index> <region_count>'",
            ));
        }
        let index: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(path, line_no, "image index is not a number"))?;
        if index != expected_index {
            return Err(parse_err(
                path,
                line_no,
                format!("expected image {expected_index}, found {index}"),
            ));
        }
        let region_count: usize = fields[2]
            .parse()
            .map_err(|_| parse_err(path, line_no, "region count is not a number"))?;

        let mut regions = Vec::with_capacity(region_count);
        for _ in 0..region_count {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| format_err(path, "truncated file: missing region row"))?;
            let line_no = idx as u64 + 1;
            let mut tokens = line.split_whitespace();
            let mut coord = |name: &str| -> Result<u32, DataError> {
                tokens
                    .next()
                    .ok_or_else(|| parse_err(path, line_no, format!("missing {name}")))?
                    .parse()
                    .map_err(|_| parse_err(path, line_no, format!("{name} is not a number")))
            };
            let rect = Rect::new(coord("x")?, coord("y")?, coord("width")?, coord("height")?);
            let values: Result<Vec<f64>, DataError> = tokens
                .map(|t| {
                    t.parse()
                        .map_err(|_| parse_err(path, line_no, format!("bad value '{t}'")))
                })
                .collect();
            let values = values?;
            if values.len() != dim {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("expected {dim} values, found {}", values.len()),
                ));
            }
            regions.push((rect, GlobalDescriptor::new(values)));
        }
        sets.push(RegionalDescriptorSet::new(regions));
    }
    Ok(sets)
}

fn parse_floats(path: &Path, line_no: u64, line: &str) -> Result<Vec<f64>, DataError> {
    line.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(path, line_no, format!("bad value '{t}'")))
        })
        .collect()
}
