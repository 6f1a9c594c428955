//! Shared fixtures for integration tests: deterministic synthetic images and
//! dataset directories.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Constant-background image with one uniformly noisy rectangle. The noise
/// block carries all the entropy, so CoHOG's region gate keeps exactly those
/// regions.
pub fn noise_block_image(
    width: u32,
    height: u32,
    block: (u32, u32, u32, u32),
    background: u8,
    seed: u64,
) -> image::GrayImage {
    let (bx, by, bw, bh) = block;
    let mut rng = StdRng::seed_from_u64(seed);
    image::GrayImage::from_fn(width, height, |x, y| {
        if x >= bx && x < bx + bw && y >= by && y < by + bh {
            image::Luma([rng.random::<u8>()])
        } else {
            image::Luma([background])
        }
    })
}

/// Writes `images` as both queries and references with an identity ground
/// truth. Returns (dataset dir, ground truth path).
pub fn write_self_match_dataset(root: &Path, images: &[image::GrayImage]) -> (PathBuf, PathBuf) {
    let dataset = root.join("dataset");
    std::fs::create_dir_all(dataset.join("query")).unwrap();
    std::fs::create_dir_all(dataset.join("ref")).unwrap();
    for (i, img) in images.iter().enumerate() {
        img.save(dataset.join(format!("query/img{i:03}.png")))
            .unwrap();
        img.save(dataset.join(format!("ref/img{i:03}.png")))
            .unwrap();
    }
    let gt_path = dataset.join("ground_truth.csv");
    let mut gt = String::from("query_index,ref_index\n");
    for i in 0..images.len() {
        gt.push_str(&format!("{i},{i}\n"));
    }
    std::fs::write(&gt_path, gt).unwrap();
    (dataset, gt_path)
}

/// Ten distinct 128x128 images: a 64x64 noise block drifting across a
/// constant background.
pub fn small_synthetic_set() -> Vec<image::GrayImage> {
    (0..10)
        .map(|i| {
            noise_block_image(
                128,
                128,
                (((i % 4) * 16) as u32, ((i / 4) * 16) as u32, 64, 64),
                (50 + i * 15) as u8,
                0xc0ffee + i as u64,
            )
        })
        .collect()
}
