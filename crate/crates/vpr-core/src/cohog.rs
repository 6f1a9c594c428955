//! Regional, entropy-gated HOG descriptor.
//!
//! The image is split into a non-overlapping grid of square regions, regions
//! whose intensity entropy clears a threshold are kept as regions of
//! interest, and each kept region is described with a HOG descriptor of its
//! own pixels. Two images are matched by pairing every query region with its
//! best-scoring reference region (cosine) and averaging those maxima, which
//! lets regions shift laterally between images without penalty.

use alloc::vec::Vec;
use core::fmt;

use crate::hog::{hog_compare, hog_describe, GlobalDescriptor, HogError, HogParams};
use crate::image::{GrayImage, Rect};

/// Regional descriptor parameters. The region grid must tile the working
/// image exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CohogParams {
    /// Side of the square, non-overlapping grid regions in pixels.
    pub region_size: u32,
    /// Minimum patch entropy in bits for a region to be kept.
    pub entropy_threshold: f64,
    /// HOG parameters applied per region.
    pub hog: HogParams,
}

impl Default for CohogParams {
    fn default() -> Self {
        Self {
            region_size: 16,
            entropy_threshold: 0.5,
            hog: HogParams::default(),
        }
    }
}

impl CohogParams {
    pub fn validate(&self) -> Result<(), CohogError> {
        if self.region_size == 0 {
            return Err(CohogError::InvalidParams("region_size must be positive"));
        }
        if !(0.0..=8.0).contains(&self.entropy_threshold) {
            return Err(CohogError::InvalidParams(
                "entropy_threshold must lie in [0, 8] bits",
            ));
        }
        self.hog.validate().map_err(CohogError::Hog)
    }
}

/// Entropy in bits per grid region, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyMap {
    cols: usize,
    rows: usize,
    region_size: u32,
    values: Vec<f64>,
}

impl EntropyMap {
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn region_size(&self) -> u32 {
        self.region_size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Pixel rectangle of the grid cell at (row, col).
    pub fn rect(&self, row: usize, col: usize) -> Rect {
        Rect::new(
            col as u32 * self.region_size,
            row as u32 * self.region_size,
            self.region_size,
            self.region_size,
        )
    }
}

/// Set of (region rectangle, descriptor) pairs retained for one image.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionalDescriptorSet {
    regions: Vec<(Rect, GlobalDescriptor)>,
}

impl RegionalDescriptorSet {
    pub fn new(regions: Vec<(Rect, GlobalDescriptor)>) -> Self {
        Self { regions }
    }

    pub fn regions(&self) -> &[(Rect, GlobalDescriptor)] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CohogError {
    InvalidParams(&'static str),
    /// Region size does not tile the image.
    GridMismatch {
        width: u32,
        height: u32,
        region_size: u32,
    },
    /// Matching requires at least one region on each side.
    EmptyDescriptorSet,
    Hog(HogError),
}

impl fmt::Display for CohogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CohogError::InvalidParams(msg) => write!(f, "invalid CoHOG parameters: {msg}"),
            CohogError::GridMismatch {
                width,
                height,
                region_size,
            } => write!(
                f,
                "region size {region_size} does not tile a {width}x{height} image"
            ),
            CohogError::EmptyDescriptorSet => write!(f, "regional descriptor set is empty"),
            CohogError::Hog(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CohogError {}

impl From<HogError> for CohogError {
    fn from(e: HogError) -> Self {
        CohogError::Hog(e)
    }
}

/// Computes per-region entropy over the non-overlapping grid.
pub fn entropy_map(img: &GrayImage, region_size: u32) -> Result<EntropyMap, CohogError> {
    if region_size == 0
        || !img.width().is_multiple_of(region_size)
        || !img.height().is_multiple_of(region_size)
        || img.width() == 0
        || img.height() == 0
    {
        return Err(CohogError::GridMismatch {
            width: img.width(),
            height: img.height(),
            region_size,
        });
    }
    let cols = (img.width() / region_size) as usize;
    let rows = (img.height() / region_size) as usize;
    let mut values = Vec::with_capacity(cols * rows);
    for row in 0..rows {
        for col in 0..cols {
            let rect = Rect::new(
                col as u32 * region_size,
                row as u32 * region_size,
                region_size,
                region_size,
            );
            // Unreachable given the divisibility check above.
            let entropy = img
                .patch_entropy(rect)
                .map_err(|_| CohogError::GridMismatch {
                    width: img.width(),
                    height: img.height(),
                    region_size,
                })?;
            values.push(entropy);
        }
    }
    Ok(EntropyMap {
        cols,
        rows,
        region_size,
        values,
    })
}

/// Selects every grid cell with entropy >= threshold; when none qualify,
/// falls back to the single highest-entropy cell (ties break to the smallest
/// row-major index). The result is therefore never empty.
pub fn select_rois(map: &EntropyMap, threshold: f64) -> Vec<Rect> {
    let mut rects = Vec::new();
    let mut best_idx = 0usize;
    let mut best_entropy = f64::NEG_INFINITY;
    for row in 0..map.rows {
        for col in 0..map.cols {
            let e = map.at(row, col);
            if e >= threshold {
                rects.push(map.rect(row, col));
            }
            if e > best_entropy {
                best_entropy = e;
                best_idx = row * map.cols + col;
            }
        }
    }
    if rects.is_empty() {
        rects.push(map.rect(best_idx / map.cols, best_idx % map.cols));
    }
    rects
}

/// Describes the entropy-selected regions of an image.
pub fn cohog_describe(
    img: &GrayImage,
    params: &CohogParams,
) -> Result<RegionalDescriptorSet, CohogError> {
    params.validate()?;
    let map = entropy_map(img, params.region_size)?;
    let rois = select_rois(&map, params.entropy_threshold);
    let mut regions = Vec::with_capacity(rois.len());
    for rect in rois {
        let patch = img.crop(rect).map_err(|_| CohogError::GridMismatch {
            width: img.width(),
            height: img.height(),
            region_size: params.region_size,
        })?;
        let descriptor = hog_describe(&patch, &params.hog)?;
        regions.push((rect, descriptor));
    }
    Ok(RegionalDescriptorSet { regions })
}

/// Regional matching score in [-1, 1]: the mean over query regions of the
/// best cosine similarity each one achieves against any reference region.
pub fn cohog_match(
    query: &RegionalDescriptorSet,
    reference: &RegionalDescriptorSet,
) -> Result<f64, CohogError> {
    if query.is_empty() || reference.is_empty() {
        return Err(CohogError::EmptyDescriptorSet);
    }
    let mut sum = 0.0;
    for (_, q) in query.regions() {
        let mut best = f64::NEG_INFINITY;
        for (_, r) in reference.regions() {
            let score = hog_compare(q, r)?;
            if score > best {
                best = score;
            }
        }
        sum += best;
    }
    Ok(sum / query.len() as f64)
}
