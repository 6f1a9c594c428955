//! Dataset directory convention and ground-truth CSV parsing.
//!
//! A dataset is a directory with `query/` and `ref/` image subdirectories
//! plus a ground-truth CSV (`query_index,ref_index` header, zero-based
//! indices, one row per query). Images are ordered by lexicographic file
//! name, which is also the order external descriptor files must follow.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use vpr_core::matching::GroundTruth;

use crate::error::DataError;

/// One loadable dataset: ordered image lists plus validated ground truth.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub query_paths: Vec<PathBuf>,
    pub ref_paths: Vec<PathBuf>,
    pub ground_truth: GroundTruth,
}

impl Dataset {
    pub fn n_queries(&self) -> usize {
        self.query_paths.len()
    }

    pub fn n_refs(&self) -> usize {
        self.ref_paths.len()
    }
}

#[derive(Debug, Deserialize)]
struct GtRow {
    query_index: usize,
    ref_index: usize,
}

/// Loads a dataset directory and its ground-truth CSV.
pub fn load_dataset(dir: &Path, gt_path: &Path, tolerance: usize) -> Result<Dataset, DataError> {
    let query_paths = list_images(&dir.join("query"))?;
    let ref_paths = list_images(&dir.join("ref"))?;
    let mapping = parse_ground_truth(gt_path, query_paths.len(), ref_paths.len())?;
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());
    Ok(Dataset {
        name,
        query_paths,
        ref_paths,
        ground_truth: GroundTruth::new(mapping, tolerance),
    })
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>, DataError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|_| DataError::Layout(format!("missing image subdirectory {}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_image(p))
        .collect();
    if paths.is_empty() {
        return Err(DataError::Layout(format!(
            "no PNG or JPEG images in {}",
            dir.display()
        )));
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(paths)
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| {
            let e = e.to_ascii_lowercase();
            e == "png" || e == "jpg" || e == "jpeg"
        })
        .unwrap_or(false)
}

fn parse_ground_truth(
    path: &Path,
    n_queries: usize,
    n_refs: usize,
) -> Result<Vec<usize>, DataError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| DataError::GroundTruth(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| DataError::GroundTruth(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != ["query_index", "ref_index"] {
        return Err(DataError::GroundTruth(format!(
            "{}: expected header 'query_index,ref_index'",
            path.display()
        )));
    }

    let mut mapping = vec![None; n_queries];
    for row in reader.deserialize() {
        let row: GtRow = row.map_err(|e| DataError::GroundTruth(e.to_string()))?;
        if row.query_index >= n_queries {
            return Err(DataError::GroundTruth(format!(
                "query index {} out of range for {} queries",
                row.query_index, n_queries
            )));
        }
        if row.ref_index >= n_refs {
            return Err(DataError::GroundTruth(format!(
                "query {} references ref index {} but only {} references exist",
                row.query_index, row.ref_index, n_refs
            )));
        }
        if mapping[row.query_index].replace(row.ref_index).is_some() {
            return Err(DataError::GroundTruth(format!(
                "duplicate entry for query index {}",
                row.query_index
            )));
        }
    }
    mapping
        .into_iter()
        .enumerate()
        .map(|(i, entry)| {
            entry.ok_or_else(|| DataError::GroundTruth(format!("no entry for query index {i}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_png(path: &Path, value: u8) {
        let mut img = image::GrayImage::new(4, 4);
        for p in img.pixels_mut() {
            p.0[0] = value;
        }
        img.save(path).unwrap();
    }

    fn scaffold(n_queries: usize, n_refs: usize, gt: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("query")).unwrap();
        fs::create_dir(dir.path().join("ref")).unwrap();
        for i in 0..n_queries {
            write_png(&dir.path().join(format!("query/q{i:02}.png")), i as u8);
        }
        for i in 0..n_refs {
            write_png(&dir.path().join(format!("ref/r{i:02}.png")), i as u8);
        }
        let gt_path = dir.path().join("ground_truth.csv");
        fs::write(&gt_path, gt).unwrap();
        (dir, gt_path)
    }

    #[test]
    fn loads_identity_dataset() {
        let (dir, gt) = scaffold(4, 4, "query_index,ref_index\n0,0\n1,1\n2,2\n3,3\n");
        let ds = load_dataset(dir.path(), &gt, 0).unwrap();
        assert_eq!(ds.n_queries(), 4);
        assert_eq!(ds.n_refs(), 4);
        assert_eq!(ds.ground_truth.mapping(), &[0, 1, 2, 3]);
        // Lexicographic order by file name.
        assert!(ds.query_paths.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn out_of_range_ref_index_is_rejected() {
        let (dir, gt) = scaffold(2, 2, "query_index,ref_index\n0,0\n1,7\n");
        let err = load_dataset(dir.path(), &gt, 0).unwrap_err();
        assert!(matches!(err, DataError::GroundTruth(_)), "{err}");
    }

    #[test]
    fn empty_query_dir_is_layout_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("query")).unwrap();
        fs::create_dir(dir.path().join("ref")).unwrap();
        write_png(&dir.path().join("ref/r0.png"), 1);
        let gt = dir.path().join("gt.csv");
        fs::write(&gt, "query_index,ref_index\n").unwrap();
        let err = load_dataset(dir.path(), &gt, 0).unwrap_err();
        assert!(matches!(err, DataError::Layout(_)));
    }

    #[test]
    fn missing_subdirectory_is_layout_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("query")).unwrap();
        write_png(&dir.path().join("query/q0.png"), 1);
        let gt = dir.path().join("gt.csv");
        fs::write(&gt, "query_index,ref_index\n0,0\n").unwrap();
        let err = load_dataset(dir.path(), &gt, 0).unwrap_err();
        assert!(matches!(err, DataError::Layout(_)));
    }

    #[test]
    fn incomplete_and_duplicate_ground_truth_are_rejected() {
        let (dir, gt) = scaffold(3, 3, "query_index,ref_index\n0,0\n1,1\n");
        assert!(load_dataset(dir.path(), &gt, 0).is_err());
        let (dir, gt) = scaffold(2, 2, "query_index,ref_index\n0,0\n0,1\n1,1\n");
        assert!(load_dataset(dir.path(), &gt, 0).is_err());
    }

    #[test]
    fn wrong_header_is_rejected() {
        let (dir, gt) = scaffold(1, 1, "q,r\n0,0\n");
        let err = load_dataset(dir.path(), &gt, 0).unwrap_err();
        assert!(err.to_string().contains("query_index"));
    }
}
