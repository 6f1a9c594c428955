//! Grayscale images and the shared pixel-level primitives both descriptor
//! pipelines consume: bilinear resize, central-difference gradient fields,
//! and Shannon entropy over rectangular patches.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Row-major 8-bit luminance image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

/// Axis-aligned pixel rectangle, `x`/`y` is the top-left corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, width: u32, height: u32) -> Self {
        Self {
            x,
            y,
            width,
            height,
        }
    }

    /// Number of pixels covered.
    pub fn area(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageError {
    /// Buffer length does not match width × height.
    LengthMismatch { width: u32, height: u32, len: usize },
    /// Image or target dimensions too small for the operation.
    InvalidSize { width: u32, height: u32 },
    /// Rectangle empty or not contained in the image.
    InvalidRegion { rect: Rect, width: u32, height: u32 },
}

impl fmt::Display for ImageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageError::LengthMismatch { width, height, len } => write!(
                f,
                "buffer of {len} bytes does not match {width}x{height} image"
            ),
            ImageError::InvalidSize { width, height } => {
                write!(f, "invalid image size {width}x{height}")
            }
            ImageError::InvalidRegion {
                rect,
                width,
                height,
            } => write!(
                f,
                "region {}x{}+{}+{} not contained in {width}x{height} image",
                rect.width, rect.height, rect.x, rect.y
            ),
        }
    }
}

impl core::error::Error for ImageError {}

impl GrayImage {
    /// Wraps a row-major luminance buffer.
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageError> {
        if data.len() != (width as usize) * (height as usize) {
            return Err(ImageError::LengthMismatch {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut data = Vec::with_capacity((width as usize) * (height as usize));
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[(y as usize) * (self.width as usize) + x as usize]
    }

    /// Copies the pixels under `rect` into a new image.
    pub fn crop(&self, rect: Rect) -> Result<GrayImage, ImageError> {
        self.check_region(rect)?;
        let mut data = Vec::with_capacity(rect.area() as usize);
        for y in rect.y..rect.y + rect.height {
            let row = (y as usize) * (self.width as usize);
            data.extend_from_slice(
                &self.data[row + rect.x as usize..row + (rect.x + rect.width) as usize],
            );
        }
        Ok(GrayImage {
            width: rect.width,
            height: rect.height,
            data,
        })
    }

    /// Bilinear resize to `width`×`height` using center-aligned sample
    /// coordinates. Resizing to the source dimensions reproduces the source
    /// bit for bit.
    pub fn resize(&self, width: u32, height: u32) -> Result<GrayImage, ImageError> {
        if width < 2 || height < 2 {
            return Err(ImageError::InvalidSize { width, height });
        }
        let src_w = self.width as usize;
        let src_h = self.height as usize;
        let scale_x = self.width as f64 / width as f64;
        let scale_y = self.height as f64 / height as f64;

        let mut data = Vec::with_capacity((width as usize) * (height as usize));
        for y in 0..height {
            let sy = ((y as f64 + 0.5) * scale_y - 0.5).clamp(0.0, (src_h - 1) as f64);
            let y0 = math::floor(sy) as usize;
            let y1 = (y0 + 1).min(src_h - 1);
            let ty = sy - y0 as f64;
            for x in 0..width {
                let sx = ((x as f64 + 0.5) * scale_x - 0.5).clamp(0.0, (src_w - 1) as f64);
                let x0 = math::floor(sx) as usize;
                let x1 = (x0 + 1).min(src_w - 1);
                let tx = sx - x0 as f64;

                let v00 = self.data[y0 * src_w + x0] as f64;
                let v10 = self.data[y0 * src_w + x1] as f64;
                let v01 = self.data[y1 * src_w + x0] as f64;
                let v11 = self.data[y1 * src_w + x1] as f64;
                let top = v00 * (1.0 - tx) + v10 * tx;
                let bottom = v01 * (1.0 - tx) + v11 * tx;
                let value = top * (1.0 - ty) + bottom * ty;
                data.push(math::round(value).clamp(0.0, 255.0) as u8);
            }
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    /// Per-pixel central-difference gradients with replicated borders.
    pub fn gradients(&self) -> Result<GradientField, ImageError> {
        if self.width < 2 || self.height < 2 {
            return Err(ImageError::InvalidSize {
                width: self.width,
                height: self.height,
            });
        }
        let w = self.width as usize;
        let h = self.height as usize;
        let mut magnitude = vec![0.0f64; w * h];
        let mut orientation = vec![0.0f64; w * h];
        for y in 0..h {
            let y_prev = y.saturating_sub(1);
            let y_next = (y + 1).min(h - 1);
            for x in 0..w {
                let x_prev = x.saturating_sub(1);
                let x_next = (x + 1).min(w - 1);
                let gx = self.data[y * w + x_next] as f64 - self.data[y * w + x_prev] as f64;
                let gy = self.data[y_next * w + x] as f64 - self.data[y_prev * w + x] as f64;
                let mag = math::sqrt(gx * gx + gy * gy);
                let idx = y * w + x;
                magnitude[idx] = mag;
                orientation[idx] = if mag == 0.0 {
                    0.0
                } else {
                    fold_unsigned_deg(math::atan2(gy, gx).to_degrees())
                };
            }
        }
        Ok(GradientField {
            width: self.width,
            height: self.height,
            magnitude,
            orientation,
        })
    }

    /// Shannon entropy (bits) of the 256-bin intensity histogram over `rect`.
    pub fn patch_entropy(&self, rect: Rect) -> Result<f64, ImageError> {
        self.check_region(rect)?;
        let mut counts = [0u64; 256];
        for y in rect.y..rect.y + rect.height {
            let row = (y as usize) * (self.width as usize);
            for x in rect.x..rect.x + rect.width {
                counts[self.data[row + x as usize] as usize] += 1;
            }
        }
        let total = rect.area() as f64;
        let mut entropy = 0.0;
        for &count in counts.iter() {
            if count > 0 {
                let p = count as f64 / total;
                entropy -= p * math::log2(p);
            }
        }
        // -0.0 from the single-bin case, plus any rounding dust.
        Ok(entropy.max(0.0))
    }

    fn check_region(&self, rect: Rect) -> Result<(), ImageError> {
        let oob = rect.width == 0
            || rect.height == 0
            || u64::from(rect.x) + u64::from(rect.width) > u64::from(self.width)
            || u64::from(rect.y) + u64::from(rect.height) > u64::from(self.height);
        if oob {
            return Err(ImageError::InvalidRegion {
                rect,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }
}

/// Folds a degree angle into the unsigned orientation range [0, 180).
fn fold_unsigned_deg(mut deg: f64) -> f64 {
    if deg < 0.0 {
        deg += 180.0;
    }
    if deg >= 180.0 {
        deg -= 180.0;
    }
    // atan2 output is within (-180, 180], so one fold suffices; guard the
    // boundary where rounding lands exactly on 180.
    if !(0.0..180.0).contains(&deg) {
        deg = 0.0;
    }
    deg
}

/// Per-pixel gradient magnitudes and unsigned orientations in degrees.
#[derive(Clone, Debug)]
pub struct GradientField {
    width: u32,
    height: u32,
    magnitude: Vec<f64>,
    orientation: Vec<f64>,
}

impl GradientField {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Gradient magnitude per pixel, row-major.
    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    /// Orientation per pixel in [0, 180) degrees; 0 where the magnitude is 0.
    pub fn orientation(&self) -> &[f64] {
        &self.orientation
    }

    #[inline]
    pub fn at(&self, x: u32, y: u32) -> (f64, f64) {
        let idx = (y as usize) * (self.width as usize) + x as usize;
        (self.magnitude[idx], self.orientation[idx])
    }
}

/// ITU-R BT.709 luma of an RGB pixel, rounded to the nearest integer.
pub fn luma_bt709(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.2126 * r as f64 + 0.7152 * g as f64 + 0.0722 * b as f64;
    math::round(y).clamp(0.0, 255.0) as u8
}
