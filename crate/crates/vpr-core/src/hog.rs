//! Global histogram-of-oriented-gradients descriptor.
//!
//! Gradients are binned per cell into magnitude-weighted orientation
//! histograms, cells are grouped into overlapping blocks, and each block is
//! L2-normalized and concatenated into one flat vector. Descriptors are
//! compared with cosine similarity.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::image::GrayImage;
use crate::math;

/// HOG parameters in pixels. Block and stride must be multiples of the cell
/// size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HogParams {
    pub cell_size: u32,
    pub block_size: u32,
    pub block_stride: u32,
    pub bins: usize,
}

impl Default for HogParams {
    fn default() -> Self {
        Self {
            cell_size: 8,
            block_size: 16,
            block_stride: 8,
            bins: 9,
        }
    }
}

impl HogParams {
    pub fn validate(&self) -> Result<(), HogError> {
        if self.cell_size == 0 {
            return Err(HogError::InvalidParams("cell_size must be positive"));
        }
        if self.block_size == 0 || !self.block_size.is_multiple_of(self.cell_size) {
            return Err(HogError::InvalidParams(
                "block_size must be a positive multiple of cell_size",
            ));
        }
        if self.block_stride == 0 || !self.block_stride.is_multiple_of(self.cell_size) {
            return Err(HogError::InvalidParams(
                "block_stride must be a positive multiple of cell_size",
            ));
        }
        if self.bins < 2 {
            return Err(HogError::InvalidParams("bins must be at least 2"));
        }
        Ok(())
    }

    /// Orientation bin width in degrees.
    pub fn bin_width_deg(&self) -> f64 {
        180.0 / self.bins as f64
    }
}

/// Flat real-valued descriptor vector.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GlobalDescriptor {
    values: Vec<f64>,
}

impl GlobalDescriptor {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HogError {
    InvalidParams(&'static str),
    /// Image dimensions not aligned to the cell grid, or too small to hold a
    /// single block.
    GridMismatch {
        width: u32,
        height: u32,
        cell_size: u32,
        block_size: u32,
    },
    DimMismatch {
        left: usize,
        right: usize,
    },
}

impl fmt::Display for HogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HogError::InvalidParams(msg) => write!(f, "invalid HOG parameters: {msg}"),
            HogError::GridMismatch {
                width,
                height,
                cell_size,
                block_size,
            } => write!(
                f,
                "{width}x{height} image does not fit a cell grid of {cell_size} px with {block_size} px blocks"
            ),
            HogError::DimMismatch { left, right } => {
                write!(f, "descriptor dimensions differ: {left} vs {right}")
            }
        }
    }
}

impl core::error::Error for HogError {}

/// Grid of per-cell orientation histograms before block normalization.
///
/// Exposed so the histogram mass can be checked against raw gradient
/// magnitudes; `hog_describe` builds on this.
#[derive(Clone, Debug)]
pub struct CellHistograms {
    pub cells_x: usize,
    pub cells_y: usize,
    pub bins: usize,
    /// Row-major cells, `bins` contiguous values per cell.
    pub values: Vec<f64>,
}

/// Accumulates magnitude-weighted orientation histograms per cell.
///
/// Each pixel votes its full gradient magnitude into the bin whose center is
/// nearest its orientation (bin centers at `(i + 0.5) * bin_width`, ties to
/// the upper bin), which is exactly `floor(orientation / bin_width)`.
pub fn cell_histograms(img: &GrayImage, params: &HogParams) -> Result<CellHistograms, HogError> {
    params.validate()?;
    let grid_err = HogError::GridMismatch {
        width: img.width(),
        height: img.height(),
        cell_size: params.cell_size,
        block_size: params.block_size,
    };
    if !img.width().is_multiple_of(params.cell_size)
        || !img.height().is_multiple_of(params.cell_size)
        || img.width() < params.block_size
        || img.height() < params.block_size
    {
        return Err(grid_err);
    }
    let field = img.gradients().map_err(|_| grid_err)?;

    let cell = params.cell_size as usize;
    let cells_x = (img.width() / params.cell_size) as usize;
    let cells_y = (img.height() / params.cell_size) as usize;
    let bins = params.bins;
    let bin_width = params.bin_width_deg();

    let mut values = vec![0.0f64; cells_x * cells_y * bins];
    let w = img.width() as usize;
    for y in 0..img.height() as usize {
        let cy = y / cell;
        for x in 0..w {
            let idx = y * w + x;
            let mag = field.magnitude()[idx];
            if mag == 0.0 {
                continue;
            }
            let bin = ((field.orientation()[idx] / bin_width) as usize).min(bins - 1);
            let cx = x / cell;
            values[(cy * cells_x + cx) * bins + bin] += mag;
        }
    }
    Ok(CellHistograms {
        cells_x,
        cells_y,
        bins,
        values,
    })
}

/// Computes the global HOG descriptor of an image.
///
/// Layout: blocks row-major, cells row-major within each block, then bins.
/// Each block sub-vector is divided by `sqrt(sum_sq + 1e-12)`, so nonzero
/// blocks come out unit-norm and all-zero blocks stay zero.
pub fn hog_describe(img: &GrayImage, params: &HogParams) -> Result<GlobalDescriptor, HogError> {
    let hist = cell_histograms(img, params)?;
    let bpc = (params.block_size / params.cell_size) as usize;
    let stride = (params.block_stride / params.cell_size) as usize;
    debug_assert!(hist.cells_x >= bpc && hist.cells_y >= bpc);
    let blocks_x = (hist.cells_x - bpc) / stride + 1;
    let blocks_y = (hist.cells_y - bpc) / stride + 1;
    let bins = hist.bins;
    let block_len = bpc * bpc * bins;

    let mut values = Vec::with_capacity(blocks_x * blocks_y * block_len);
    for by in 0..blocks_y {
        for bx in 0..blocks_x {
            let start = values.len();
            for iy in 0..bpc {
                let cy = by * stride + iy;
                for ix in 0..bpc {
                    let cx = bx * stride + ix;
                    let base = (cy * hist.cells_x + cx) * bins;
                    values.extend_from_slice(&hist.values[base..base + bins]);
                }
            }
            let sum_sq: f64 = values[start..].iter().map(|v| v * v).sum();
            let denom = math::sqrt(sum_sq + 1e-12);
            for v in &mut values[start..] {
                *v /= denom;
            }
        }
    }
    Ok(GlobalDescriptor::new(values))
}

/// Cosine similarity of two descriptors in [-1, 1]; 0 when either vector is
/// all zero.
pub fn hog_compare(a: &GlobalDescriptor, b: &GlobalDescriptor) -> Result<f64, HogError> {
    if a.dim() != b.dim() {
        return Err(HogError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(cosine_raw(a.values(), b.values()))
}

/// Cosine similarity over equal-length slices (callers validate lengths).
pub(crate) fn cosine_raw(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut norm_a = 0.0;
    let mut norm_b = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    // Cauchy-Schwarz equality: collinear vectors (identical ones in
    // particular) compare to exactly +/-1 instead of 1 minus an ulp.
    if dot * dot == norm_a * norm_b {
        return if dot >= 0.0 { 1.0 } else { -1.0 };
    }
    (dot / (math::sqrt(norm_a) * math::sqrt(norm_b))).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::GrayImage;
    use approx::assert_relative_eq;

    #[test]
    fn params_validation() {
        assert!(HogParams::default().validate().is_ok());
        let bad = HogParams {
            block_size: 12,
            ..HogParams::default()
        };
        assert!(matches!(bad.validate(), Err(HogError::InvalidParams(_))));
        let bad_bins = HogParams {
            bins: 1,
            ..HogParams::default()
        };
        assert!(bad_bins.validate().is_err());
    }

    #[test]
    fn constant_image_yields_zero_descriptor_with_expected_dim() {
        let img = GrayImage::from_fn(64, 64, |_, _| 128);
        let desc = hog_describe(&img, &HogParams::default()).unwrap();
        // (64/8 - 1)^2 blocks of 2x2 cells x 9 bins.
        assert_eq!(desc.dim(), 7 * 7 * 36);
        assert!(desc.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn descriptor_dim_for_128px_image() {
        let img = GrayImage::from_fn(128, 128, |x, y| (x * y) as u8);
        let desc = hog_describe(&img, &HogParams::default()).unwrap();
        assert_eq!(desc.dim(), 15 * 15 * 36);
    }

    #[test]
    fn vertical_step_edge_masses_the_zero_degree_bin() {
        let img = GrayImage::from_fn(16, 16, |x, _| if x < 8 { 0 } else { 255 });
        let desc = hog_describe(&img, &HogParams::default()).unwrap();
        let total: f64 = desc.values().iter().sum();
        assert!(total > 0.0);
        // All gradients are horizontal (orientation 0), so only bin 0 of each
        // cell sub-histogram may be nonzero.
        for (i, &v) in desc.values().iter().enumerate() {
            if i % 9 != 0 {
                assert_eq!(v, 0.0, "bin {} unexpectedly nonzero", i % 9);
            }
        }
    }

    #[test]
    fn misaligned_image_is_rejected() {
        let img = GrayImage::from_fn(20, 16, |_, _| 0);
        assert!(matches!(
            hog_describe(&img, &HogParams::default()),
            Err(HogError::GridMismatch { .. })
        ));
        // Aligned to cells but smaller than one block.
        let small = GrayImage::from_fn(8, 8, |_, _| 0);
        assert!(matches!(
            hog_describe(&small, &HogParams::default()),
            Err(HogError::GridMismatch { .. })
        ));
    }

    #[test]
    fn nonzero_blocks_are_unit_norm() {
        let img = GrayImage::from_fn(32, 32, |x, y| ((x * 13) ^ (y * 29)) as u8);
        let desc = hog_describe(&img, &HogParams::default()).unwrap();
        for block in desc.values().chunks(36) {
            let norm: f64 = block.iter().map(|v| v * v).sum::<f64>();
            if norm > 0.0 {
                assert!((norm.sqrt() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn histogram_mass_matches_gradient_mass_per_cell() {
        let params = HogParams::default();
        let img = GrayImage::from_fn(32, 32, |x, y| ((x * 7 + y * 3) % 251) as u8);
        let hist = cell_histograms(&img, &params).unwrap();
        let field = img.gradients().unwrap();
        for cy in 0..hist.cells_y {
            for cx in 0..hist.cells_x {
                let mut mass = 0.0;
                for dy in 0..8 {
                    for dx in 0..8 {
                        mass += field.at((cx * 8 + dx) as u32, (cy * 8 + dy) as u32).0;
                    }
                }
                let base = (cy * hist.cells_x + cx) * hist.bins;
                let binned: f64 = hist.values[base..base + hist.bins].iter().sum();
                let scale = mass.max(1.0);
                assert!(
                    (binned - mass).abs() / scale < 1e-6,
                    "cell ({cx},{cy}): {binned} vs {mass}"
                );
            }
        }
    }

    #[test]
    fn compare_identical_descriptors_is_exactly_one() {
        let img = GrayImage::from_fn(32, 32, |x, y| (x + y) as u8);
        let desc = hog_describe(&img, &HogParams::default()).unwrap();
        assert_eq!(hog_compare(&desc, &desc).unwrap(), 1.0);
    }

    #[test]
    fn compare_orthogonal_unit_vectors_is_zero() {
        let a = GlobalDescriptor::new(vec![1.0, 0.0, 0.0]);
        let b = GlobalDescriptor::new(vec![0.0, 1.0, 0.0]);
        assert_eq!(hog_compare(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn compare_known_vectors() {
        let a = GlobalDescriptor::new(vec![1.0, 2.0, 2.0]);
        let b = GlobalDescriptor::new(vec![2.0, 1.0, 2.0]);
        // dot 8, norms 3 and 3.
        assert_relative_eq!(hog_compare(&a, &b).unwrap(), 8.0 / 9.0);
    }

    #[test]
    fn compare_zero_descriptor_is_zero() {
        let zero = GlobalDescriptor::new(vec![0.0; 3]);
        let other = GlobalDescriptor::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(hog_compare(&zero, &other).unwrap(), 0.0);
        assert_eq!(hog_compare(&zero, &zero).unwrap(), 0.0);
    }

    #[test]
    fn compare_rejects_dim_mismatch() {
        let a = GlobalDescriptor::new(vec![1.0, 2.0]);
        let b = GlobalDescriptor::new(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            hog_compare(&a, &b),
            Err(HogError::DimMismatch { left: 2, right: 3 })
        ));
    }
}
