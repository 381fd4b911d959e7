//! Raster rendering for the inspect stage dumps.

use ridgekit_core::corepoint::StrengthMap;
use ridgekit_core::minutiae::{MinutiaKind, MinutiaeSet};
use ridgekit_core::orientation::OrientationField;
use ridgekit_core::ridgemap::BinaryImage;
use ridgekit_core::GrayImage;

const MARK_TERMINATION: u8 = 160;
const MARK_BIFURCATION: u8 = 96;

fn put(data: &mut [u8], w: u32, h: u32, x: i64, y: i64, v: u8) {
    if x >= 0 && y >= 0 && x < w as i64 && y < h as i64 {
        data[y as usize * w as usize + x as usize] = v;
    }
}

/// Binary raster as gray: ridge black on white.
pub fn binary_to_gray(bin: &BinaryImage) -> GrayImage {
    let mut data = Vec::with_capacity(bin.width() as usize * bin.height() as usize);
    for y in 0..bin.height() as i64 {
        for x in 0..bin.width() as i64 {
            data.push(if bin.get(x, y) { 0 } else { 255 });
        }
    }
    GrayImage::from_raw(bin.width(), bin.height(), data).expect("nonzero dimensions")
}

/// Washed-out copy of the image with a dark segment per block along the
/// local ridge orientation.
pub fn orientation_overlay(img: &GrayImage, field: &OrientationField) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let mut data: Vec<u8> = img.data().iter().map(|&v| 128 + v / 2).collect();
    let bs = field.block_size() as f64;
    let len = bs - 2.0;
    for by in 0..field.rows() {
        for bx in 0..field.cols() {
            let theta = field.theta(bx, by);
            let cx = bx as f64 * bs + (bs - 1.0) / 2.0;
            let cy = by as f64 * bs + (bs - 1.0) / 2.0;
            let (dy, dx) = theta.sin_cos();
            let mut t = -len / 2.0;
            while t <= len / 2.0 {
                put(
                    &mut data,
                    w,
                    h,
                    (cx + t * dx).round() as i64,
                    (cy + t * dy).round() as i64,
                    0,
                );
                t += 0.3;
            }
        }
    }
    GrayImage::from_raw(w, h, data).expect("nonzero dimensions")
}

/// Strength map upsampled to pixel resolution, bright = high curvature.
pub fn strength_to_gray(map: &StrengthMap, width: u32, height: u32) -> GrayImage {
    let bs = map.block_size();
    let mut data = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let bx = ((x / bs) as usize).min(map.cols() - 1);
            let by = ((y / bs) as usize).min(map.rows() - 1);
            data.push((map.value(bx, by) * 255.0).round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::from_raw(width, height, data).expect("nonzero dimensions")
}

/// Skeleton with minutiae markers: crosses for terminations, square
/// outlines for bifurcations.
pub fn minutiae_overlay(skeleton: &BinaryImage, set: &MinutiaeSet) -> GrayImage {
    let base = binary_to_gray(skeleton);
    let (w, h) = (base.width(), base.height());
    let mut data = base.data().to_vec();
    for m in &set.items {
        let (x, y) = (m.x as i64, m.y as i64);
        match m.kind {
            MinutiaKind::Termination => {
                for d in -2i64..=2 {
                    put(&mut data, w, h, x + d, y, MARK_TERMINATION);
                    put(&mut data, w, h, x, y + d, MARK_TERMINATION);
                }
            }
            MinutiaKind::Bifurcation => {
                for d in -2i64..=2 {
                    put(&mut data, w, h, x + d, y - 2, MARK_BIFURCATION);
                    put(&mut data, w, h, x + d, y + 2, MARK_BIFURCATION);
                    put(&mut data, w, h, x - 2, y + d, MARK_BIFURCATION);
                    put(&mut data, w, h, x + 2, y + d, MARK_BIFURCATION);
                }
            }
        }
    }
    GrayImage::from_raw(w, h, data).expect("nonzero dimensions")
}
