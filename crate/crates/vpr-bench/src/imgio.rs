//! Image loading: PNG/JPEG decoding into the core grayscale type.

use std::io::ErrorKind;
use std::path::Path;

use image::DynamicImage;
use vpr_core::image::{luma_bt709, GrayImage};

use crate::error::DataError;

/// Loads a PNG or JPEG file as an 8-bit grayscale image.
///
/// 8-bit grayscale files are taken as-is; everything else is converted to
/// RGB8 and reduced with BT.709 luma weights rounded to the nearest integer.
pub fn load_image(path: &Path) -> Result<GrayImage, DataError> {
    let decoded = image::open(path).map_err(|e| match e {
        image::ImageError::IoError(ref io) if io.kind() == ErrorKind::NotFound => {
            DataError::ImageNotFound(path.to_path_buf())
        }
        other => DataError::Decode {
            path: path.to_path_buf(),
            source: other,
        },
    })?;
    Ok(to_gray(decoded))
}

fn to_gray(decoded: DynamicImage) -> GrayImage {
    match decoded {
        DynamicImage::ImageLuma8(luma) => {
            let (w, h) = luma.dimensions();
            GrayImage::from_raw(w, h, luma.into_raw()).expect("decoder returned a full buffer")
        }
        other => {
            let rgb = other.to_rgb8();
            let (w, h) = rgb.dimensions();
            let data = rgb
                .pixels()
                .map(|p| luma_bt709(p.0[0], p.0[1], p.0[2]))
                .collect();
            GrayImage::from_raw(w, h, data).expect("decoder returned a full buffer")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgb, RgbImage};

    fn save_rgb(dir: &Path, name: &str, w: u32, h: u32, color: [u8; 3]) -> std::path::PathBuf {
        let mut img = RgbImage::new(w, h);
        for p in img.pixels_mut() {
            *p = Rgb(color);
        }
        let path = dir.join(name);
        img.save(&path).unwrap();
        path
    }

    #[test]
    fn loads_black_and_white_pngs() {
        let dir = tempfile::tempdir().unwrap();
        let black = save_rgb(dir.path(), "black.png", 2, 2, [0, 0, 0]);
        let white = save_rgb(dir.path(), "white.png", 2, 2, [255, 255, 255]);
        assert!(load_image(&black).unwrap().data().iter().all(|&v| v == 0));
        assert!(load_image(&white).unwrap().data().iter().all(|&v| v == 255));
    }

    #[test]
    fn red_converts_by_bt709_weights() {
        let dir = tempfile::tempdir().unwrap();
        let red = save_rgb(dir.path(), "red.png", 2, 2, [255, 0, 0]);
        assert!(load_image(&red).unwrap().data().iter().all(|&v| v == 54));
    }

    #[test]
    fn grayscale_png_loads_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut img = image::GrayImage::new(3, 2);
        for (i, p) in img.pixels_mut().enumerate() {
            p.0[0] = (i * 40) as u8;
        }
        let path = dir.path().join("gray.png");
        img.save(&path).unwrap();
        let loaded = load_image(&path).unwrap();
        assert_eq!(loaded.data(), &[0, 40, 80, 120, 160, 200]);
    }

    #[test]
    fn missing_file_is_not_found() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_image(&dir.path().join("nope.png")).unwrap_err();
        assert!(matches!(err, DataError::ImageNotFound(_)));
    }

    #[test]
    fn garbage_file_is_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.png");
        std::fs::write(&path, b"definitely not a png").unwrap();
        let err = load_image(&path).unwrap_err();
        assert!(matches!(err, DataError::Decode { .. }));
    }

    #[test]
    fn jpeg_decodes_too() {
        let dir = tempfile::tempdir().unwrap();
        let path = save_rgb(dir.path(), "flat.jpg", 16, 16, [128, 128, 128]);
        let loaded = load_image(&path).unwrap();
        assert_eq!((loaded.width(), loaded.height()), (16, 16));
        // JPEG is lossy; a flat image should still come back near-flat.
        assert!(loaded.data().iter().all(|&v| (120..=136).contains(&v)));
    }
}
