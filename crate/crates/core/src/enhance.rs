//! Contrast and noise repair: histogram equalization plus an adaptive
//! local (Wiener-style) filter.

use crate::error::{Error, Result};
use crate::imageio::GrayImage;

/// Gray-level occupancy counts of an image.
#[derive(Debug, Clone)]
pub struct Histogram {
    counts: [u64; 256],
    total: u64,
}

impl Histogram {
    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Counts pixels per gray level.
pub fn histogram(img: &GrayImage) -> Histogram {
    let mut counts = [0u64; 256];
    for &v in img.data() {
        counts[v as usize] += 1;
    }
    Histogram {
        counts,
        total: img.data().len() as u64,
    }
}

/// Global histogram equalization: `out = round(255 * CDF(in))`.
pub fn equalize(img: &GrayImage) -> GrayImage {
    let hist = histogram(img);
    let total = hist.total as f64;
    let mut lut = [0u8; 256];
    let mut cum = 0u64;
    for (k, slot) in lut.iter_mut().enumerate() {
        cum += hist.counts[k];
        *slot = (255.0 * cum as f64 / total).round() as u8;
    }
    let data = img.data().iter().map(|&v| lut[v as usize]).collect();
    GrayImage::from_raw(img.width(), img.height(), data).expect("same dimensions")
}

/// Adaptive local noise filter over an odd `window` (>= 3).
///
/// Per pixel: `out = m + max(0, s - n) / max(s, n) * (in - m)` with `m`, `s`
/// the window mean and variance and `n` the global mean of the window
/// variances. Flat regions collapse to the local mean, high-variance
/// structure passes through nearly unchanged. Borders use mirror padding.
pub fn adaptive_denoise(img: &GrayImage, window: u32) -> Result<GrayImage> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::BadWindow(window));
    }
    let (w, h) = (img.width() as i64, img.height() as i64);
    let half = (window / 2) as i64;
    let n_pix = (window as f64) * (window as f64);

    let mut means = vec![0.0f64; (w * h) as usize];
    let mut vars = vec![0.0f64; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for dy in -half..=half {
                for dx in -half..=half {
                    let v = img.get_reflect(x + dx, y + dy) as f64;
                    sum += v;
                    sum_sq += v * v;
                }
            }
            let mean = sum / n_pix;
            let var = (sum_sq / n_pix - mean * mean).max(0.0);
            let i = (y * w + x) as usize;
            means[i] = mean;
            vars[i] = var;
        }
    }
    let noise = vars.iter().sum::<f64>() / vars.len() as f64;

    let mut data = Vec::with_capacity((w * h) as usize);
    for (i, &v) in img.data().iter().enumerate() {
        let denom = vars[i].max(noise);
        let gain = if denom > 0.0 {
            (vars[i] - noise).max(0.0) / denom
        } else {
            0.0
        };
        let out = means[i] + gain * (v as f64 - means[i]);
        data.push(out.round().clamp(0.0, 255.0) as u8);
    }
    Ok(GrayImage::from_raw(img.width(), img.height(), data).expect("same dimensions"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn histogram_counts_constant_image() {
        let img = GrayImage::constant(400, 400, 7).unwrap();
        let hist = histogram(&img);
        assert_eq!(hist.counts()[7], 160_000);
        assert_eq!(hist.counts().iter().filter(|&&c| c != 0).count(), 1);
        assert_eq!(hist.total(), 160_000);
    }

    #[test]
    fn histogram_two_pixel_image() {
        let img = GrayImage::from_raw(2, 1, vec![0, 255]).unwrap();
        let hist = histogram(&img);
        assert_eq!(hist.counts()[0], 1);
        assert_eq!(hist.counts()[255], 1);
        assert_eq!(hist.total(), 2);
    }

    #[test]
    fn equalize_constant_image_saturates() {
        let img = GrayImage::constant(8, 8, 42).unwrap();
        let out = equalize(&img);
        assert!(out.data().iter().all(|&v| v == 255));
    }

    #[test]
    fn equalize_two_level_remap() {
        // Hand-computed cumulative sums: CDF(10) = 0.5 -> 128, CDF(200) = 1 -> 255.
        let mut data = vec![10u8; 32];
        data.extend(vec![200u8; 32]);
        let img = GrayImage::from_raw(8, 8, data).unwrap();
        let out = equalize(&img);
        for (i, &v) in out.data().iter().enumerate() {
            if i < 32 {
                assert!(v == 127 || v == 128, "low level mapped to {v}");
            } else {
                assert_eq!(v, 255);
            }
        }
    }

    #[test]
    fn equalize_uniform_histogram_is_near_ramp() {
        // One pixel of every level: CDF remap is the ramp k -> round(255(k+1)/256).
        let data: Vec<u8> = (0..=255).collect();
        let img = GrayImage::from_raw(16, 16, data).unwrap();
        let out = equalize(&img);
        for (k, &v) in out.data().iter().enumerate() {
            // Independent CDF oracle computed directly from the definition.
            let expected = (255.0 * (k as f64 + 1.0) / 256.0).round();
            assert!((v as f64 - expected).abs() <= 0.0);
            // And the ramp itself is within one gray level.
            assert!((v as i32 - k as i32).abs() <= 1, "level {k} mapped to {v}");
        }
    }

    #[test]
    fn equalize_preserves_total() {
        let img = GrayImage::from_raw(4, 2, vec![9, 9, 30, 255, 0, 1, 2, 3]).unwrap();
        assert_eq!(
            histogram(&equalize(&img)).total(),
            histogram(&img).total()
        );
    }

    #[test]
    fn denoise_constant_is_identity() {
        let img = GrayImage::constant(12, 9, 90).unwrap();
        let out = adaptive_denoise(&img, 3).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn denoise_rejects_bad_window() {
        let img = GrayImage::constant(4, 4, 0).unwrap();
        assert!(matches!(adaptive_denoise(&img, 4), Err(Error::BadWindow(4))));
        assert!(matches!(adaptive_denoise(&img, 1), Err(Error::BadWindow(1))));
    }

    /// Window-statistics oracle: evaluates the filter formula at one pixel
    /// with independently gathered mirror-padded window samples.
    fn oracle_at(img: &GrayImage, x: i64, y: i64, window: i64) -> f64 {
        let half = window / 2;
        let collect = |cx: i64, cy: i64| -> Vec<f64> {
            let mut vals = Vec::new();
            for dy in -half..=half {
                for dx in -half..=half {
                    vals.push(img.get_reflect(cx + dx, cy + dy) as f64);
                }
            }
            vals
        };
        let stats = |vals: &[f64]| -> (f64, f64) {
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            let v = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / vals.len() as f64;
            (m, v)
        };
        let mut noise = 0.0;
        for cy in 0..img.height() as i64 {
            for cx in 0..img.width() as i64 {
                noise += stats(&collect(cx, cy)).1;
            }
        }
        noise /= (img.width() * img.height()) as f64;
        let (m, s) = stats(&collect(x, y));
        let denom = s.max(noise);
        let gain = if denom > 0.0 {
            (s - noise).max(0.0) / denom
        } else {
            0.0
        };
        m + gain * (img.get(x as u32, y as u32) as f64 - m)
    }

    #[test]
    fn denoise_shrinks_impulse() {
        let mut data = vec![60u8; 11 * 11];
        data[5 * 11 + 5] = 255;
        let img = GrayImage::from_raw(11, 11, data).unwrap();
        let out = adaptive_denoise(&img, 3).unwrap();
        let expected = oracle_at(&img, 5, 5, 3);
        assert_eq!(out.get(5, 5) as f64, expected.round());
        assert!(out.get(5, 5) < 255, "impulse not reduced");
        assert!((out.get(5, 5) as f64) < 255.0 - 1.0);
    }

    #[test]
    fn denoise_passes_high_variance_texture() {
        // A small high-contrast stripe patch on a large flat canvas: the
        // patch variance dwarfs the global noise estimate, so the gain
        // approaches one and the texture passes through nearly unchanged.
        let mut data = vec![128u8; 96 * 96];
        for y in 44..52 {
            for x in 44..52u32 {
                data[(y * 96 + x) as usize] = if x % 2 == 0 { 20 } else { 235 };
            }
        }
        let img = GrayImage::from_raw(96, 96, data).unwrap();
        let out = adaptive_denoise(&img, 3).unwrap();
        for y in 46..50 {
            for x in 46..50 {
                let expected = oracle_at(&img, x as i64, y as i64, 3).round();
                assert_eq!(out.get(x, y) as f64, expected);
                let diff = (out.get(x, y) as i32 - img.get(x, y) as i32).abs();
                assert!(diff <= 2, "stripe pixel ({x},{y}) moved by {diff}");
            }
        }
    }

    proptest! {
        #[test]
        fn equalize_is_idempotent_within_one_level(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<u8> = (0..256).map(|_| rng.random()).collect();
            let img = GrayImage::from_raw(16, 16, data).unwrap();
            let once = equalize(&img);
            let twice = equalize(&once);
            for (a, b) in once.data().iter().zip(twice.data()) {
                prop_assert!((*a as i32 - *b as i32).abs() <= 1);
            }
        }

        #[test]
        fn denoise_stays_in_input_range(seed in any::<u64>(), window in prop::sample::select(vec![3u32, 5])) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<u8> = (0..12 * 12).map(|_| rng.random_range(40..=200)).collect();
            let img = GrayImage::from_raw(12, 12, data).unwrap();
            let (lo, hi) = img.min_max();
            let out = adaptive_denoise(&img, window).unwrap();
            let (olo, ohi) = out.min_max();
            prop_assert!(olo as i32 >= lo as i32 - 1);
            prop_assert!(ohi as i32 <= hi as i32 + 1);
        }
    }
}
