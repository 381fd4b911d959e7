//! Deterministic synthetic test patterns: oriented stripes, concentric
//! rings and whorl-like prints with seeded ridge defects.
//!
//! The print generator exists for benchmarking the pipeline when no real
//! capture corpus is on disk: each finger seed fixes a ridge pattern
//! (center, period and a constellation of ridge gaps and bridges) and each
//! impression adds translation, contrast jitter and noise on top, the way
//! repeated captures of one finger differ.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::imageio::GrayImage;

/// Sinusoidal stripes whose ridges run along `angle` (radians, image
/// coordinates) with the given full period in pixels.
pub fn stripes(width: u32, height: u32, angle: f64, period: f64) -> GrayImage {
    let (sin, cos) = angle.sin_cos();
    let mut data = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let t = -(x as f64) * sin + y as f64 * cos;
            let v = 127.5 + 127.5 * (TAU * t / period).cos();
            data.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::from_raw(width, height, data).expect("nonzero dimensions")
}

/// Concentric sinusoidal rings around (cx, cy); dark circles where the
/// cosine bottoms out.
pub fn concentric_rings(width: u32, height: u32, cx: f64, cy: f64, period: f64) -> GrayImage {
    let mut data = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let r = (x as f64 - cx).hypot(y as f64 - cy);
            let v = 127.5 + 127.5 * (TAU * r / period).cos();
            data.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::from_raw(width, height, data).expect("nonzero dimensions")
}

#[derive(Clone, Copy)]
enum Defect {
    /// White disc cutting a ridge; yields two terminations.
    Gap { x: f64, y: f64, radius: f64 },
    /// Dark capsule connecting two adjacent ridges; yields two bifurcations.
    Bridge { x0: f64, y0: f64, x1: f64, y1: f64, half_width: f64 },
}

impl Defect {
    fn apply(&self, u: f64, v: f64, value: f64) -> f64 {
        match *self {
            Defect::Gap { x, y, radius } => {
                if (u - x).hypot(v - y) <= radius {
                    255.0
                } else {
                    value
                }
            }
            Defect::Bridge {
                x0,
                y0,
                x1,
                y1,
                half_width,
            } => {
                if dist_to_segment(u, v, x0, y0, x1, y1) <= half_width {
                    0.0
                } else {
                    value
                }
            }
        }
    }

    fn site(&self) -> (f64, f64) {
        match *self {
            Defect::Gap { x, y, .. } => (x, y),
            Defect::Bridge { x0, y0, x1, y1, .. } => ((x0 + x1) / 2.0, (y0 + y1) / 2.0),
        }
    }
}

fn dist_to_segment(px: f64, py: f64, x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    let dx = x1 - x0;
    let dy = y1 - y0;
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((px - x0) * dx + (py - y0) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (px - (x0 + t * dx)).hypot(py - (y0 + t * dy))
}

/// Whorl-like synthetic print.
///
/// `finger_seed` fixes the pattern (shared across impressions of that
/// finger); `impression` varies translation, brightness, contrast and noise.
pub fn synthetic_fingerprint(
    width: u32,
    height: u32,
    finger_seed: u64,
    impression: u16,
) -> GrayImage {
    let mut frng = ChaCha8Rng::seed_from_u64(finger_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let cx = width as f64 / 2.0 + frng.random_range(-15.0..15.0);
    let cy = height as f64 / 2.0 + frng.random_range(-15.0..15.0);
    let period = frng.random_range(9.5..12.0);

    // Ridge defects: on-ridge sites, kept at least two periods apart so the
    // minutiae they spawn are not pruned against each other.
    let mut defects: Vec<Defect> = Vec::new();
    let mut attempts = 0;
    while defects.len() < 30 && attempts < 400 {
        attempts += 1;
        let ring = frng.random_range(2u32..13) as f64;
        let ang = frng.random_range(0.0..TAU);
        let kind_roll: f64 = frng.random();
        let r = period * (ring + 0.5);
        let (sx, sy) = (cx + r * ang.cos(), cy + r * ang.sin());
        let candidate = if kind_roll < 0.55 {
            Defect::Gap {
                x: sx,
                y: sy,
                radius: period * 0.42,
            }
        } else {
            let r1 = period * (ring + 1.5);
            Defect::Bridge {
                x0: sx,
                y0: sy,
                x1: cx + r1 * ang.cos(),
                y1: cy + r1 * ang.sin(),
                half_width: 1.6,
            }
        };
        let (nx, ny) = candidate.site();
        let clear = defects.iter().all(|d| {
            let (ox, oy) = d.site();
            (nx - ox).hypot(ny - oy) >= 2.0 * period
        });
        if clear {
            defects.push(candidate);
        }
    }

    let mut irng = ChaCha8Rng::seed_from_u64(
        finger_seed ^ (impression as u64).wrapping_mul(0xD134_2543_DE82_EF95) ^ 0x5851_F42D,
    );
    let tx = irng.random_range(-6.0..6.0);
    let ty = irng.random_range(-6.0..6.0);
    let contrast = irng.random_range(0.92..1.08);
    let brightness = irng.random_range(-8.0..8.0);
    let noise_amp = irng.random_range(3.0..6.0);

    let mut data = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let u = x as f64 - tx;
            let v = y as f64 - ty;
            let r = (u - cx).hypot(v - cy);
            let mut value = 127.5 + 127.5 * (TAU * r / period).cos();
            for d in &defects {
                value = d.apply(u, v, value);
            }
            let noise = (irng.random::<f64>() - 0.5) * 2.0 * noise_amp;
            value = contrast * (value - 127.5) + 127.5 + brightness + noise;
            data.push(value.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::from_raw(width, height, data).expect("nonzero dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stripes_are_periodic_along_the_normal() {
        let img = stripes(64, 64, 0.0, 8.0);
        // angle 0: ridges run along +x, intensity varies with y.
        for x in 0..64 {
            assert_eq!(img.get(x, 0), img.get(x, 8));
            assert_eq!(img.get(x, 3), img.get(0, 3));
        }
    }

    #[test]
    fn rings_are_radially_symmetric() {
        let img = concentric_rings(101, 101, 50.0, 50.0, 10.0);
        assert_eq!(img.get(50 + 20, 50), img.get(50, 50 + 20));
        assert_eq!(img.get(50 - 20, 50), img.get(50, 50 - 20));
    }

    #[test]
    fn same_seed_same_impression_is_identical() {
        let a = synthetic_fingerprint(128, 128, 42, 3);
        let b = synthetic_fingerprint(128, 128, 42, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn impressions_and_fingers_differ() {
        let a = synthetic_fingerprint(128, 128, 42, 1);
        let b = synthetic_fingerprint(128, 128, 42, 2);
        let c = synthetic_fingerprint(128, 128, 43, 1);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
