//! Block-wise ridge orientation estimation from Sobel gradients.
//!
//! The image is split into non-overlapping square blocks; per-pixel Sobel
//! gradients are accumulated into second-moment sums per block, from which
//! the dominant orientation and a coherence measure follow. Ridge direction
//! is the dominant gradient direction rotated by 90 degrees. Smoothing runs
//! in the doubled-angle domain, the only averaging that respects the mod-180
//! wraparound of orientations.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::imageio::GrayImage;

/// Per-block accumulated gradient second moments.
#[derive(Debug, Clone)]
pub struct BlockGradients {
    block_size: u32,
    cols: usize,
    rows: usize,
    gxx: Vec<f64>,
    gyy: Vec<f64>,
    gxy: Vec<f64>,
}

impl BlockGradients {
    pub fn block_size(&self) -> u32 {
        self.block_size
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// (gxx, gyy, gxy) for the block at column `bx`, row `by`.
    pub fn moments(&self, bx: usize, by: usize) -> (f64, f64, f64) {
        let i = by * self.cols + bx;
        (self.gxx[i], self.gyy[i], self.gxy[i])
    }

    /// Test seam: build a field directly from per-block moments.
    pub fn from_moments(
        block_size: u32,
        cols: usize,
        rows: usize,
        gxx: Vec<f64>,
        gyy: Vec<f64>,
        gxy: Vec<f64>,
    ) -> Self {
        assert_eq!(gxx.len(), cols * rows);
        assert_eq!(gyy.len(), cols * rows);
        assert_eq!(gxy.len(), cols * rows);
        Self {
            block_size,
            cols,
            rows,
            gxx,
            gyy,
            gxy,
        }
    }
}

/// Per-block ridge angles in [0, pi) with coherence in [0, 1].
#[derive(Debug, Clone)]
pub struct OrientationField {
    block_size: u32,
    cols: usize,
    rows: usize,
    theta: Vec<f64>,
    coherence: Vec<f64>,
}

impl OrientationField {
    pub fn block_size(&self) -> u32 {
        self.block_size
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn theta(&self, bx: usize, by: usize) -> f64 {
        self.theta[by * self.cols + bx]
    }

    pub fn coherence(&self, bx: usize, by: usize) -> f64 {
        self.coherence[by * self.cols + bx]
    }

    /// Ridge angle for a pixel, replicated from its containing block.
    pub fn theta_at_pixel(&self, x: u32, y: u32) -> f64 {
        let bx = ((x / self.block_size) as usize).min(self.cols - 1);
        let by = ((y / self.block_size) as usize).min(self.rows - 1);
        self.theta(bx, by)
    }

    pub fn from_parts(
        block_size: u32,
        cols: usize,
        rows: usize,
        theta: Vec<f64>,
        coherence: Vec<f64>,
    ) -> Self {
        assert_eq!(theta.len(), cols * rows);
        assert_eq!(coherence.len(), cols * rows);
        Self {
            block_size,
            cols,
            rows,
            theta,
            coherence,
        }
    }
}

/// Accumulates Sobel gradient moments over non-overlapping blocks.
///
/// Mirror padding at the borders; partial blocks at the right and bottom
/// edges accumulate over the pixels they actually cover.
pub fn block_gradients(img: &GrayImage, block_size: u32) -> Result<BlockGradients> {
    assert!(block_size >= 3, "block size must be at least 3");
    let (w, h) = (img.width(), img.height());
    if w < block_size || h < block_size {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            block_size,
        });
    }
    let cols = w.div_ceil(block_size) as usize;
    let rows = h.div_ceil(block_size) as usize;
    let mut gxx = vec![0.0; cols * rows];
    let mut gyy = vec![0.0; cols * rows];
    let mut gxy = vec![0.0; cols * rows];

    for y in 0..h as i64 {
        let by = (y as u32 / block_size) as usize;
        for x in 0..w as i64 {
            let bx = (x as u32 / block_size) as usize;
            let p = |dx: i64, dy: i64| img.get_reflect(x + dx, y + dy) as f64;
            let gx = p(1, -1) + 2.0 * p(1, 0) + p(1, 1) - p(-1, -1) - 2.0 * p(-1, 0) - p(-1, 1);
            let gy = p(-1, 1) + 2.0 * p(0, 1) + p(1, 1) - p(-1, -1) - 2.0 * p(0, -1) - p(1, -1);
            let i = by * cols + bx;
            gxx[i] += gx * gx;
            gyy[i] += gy * gy;
            gxy[i] += gx * gy;
        }
    }
    Ok(BlockGradients {
        block_size,
        cols,
        rows,
        gxx,
        gyy,
        gxy,
    })
}

/// Converts gradient moments to ridge orientations.
///
/// The doubled gradient angle is `atan2(2*gxy, gxx - gyy)`; halving gives the
/// dominant gradient direction and adding 90 degrees gives the ridge
/// direction, folded into [0, pi). Blocks with no gradient energy get
/// theta = 0 and coherence = 0.
pub fn ridge_orientation(grads: &BlockGradients) -> OrientationField {
    let n = grads.cols * grads.rows;
    let mut theta = vec![0.0; n];
    let mut coherence = vec![0.0; n];
    for i in 0..n {
        let (gxx, gyy, gxy) = (grads.gxx[i], grads.gyy[i], grads.gxy[i]);
        let energy = gxx + gyy;
        if energy <= 0.0 {
            continue;
        }
        let gradient = 0.5 * (2.0 * gxy).atan2(gxx - gyy);
        let mut t = gradient + FRAC_PI_2;
        if t >= PI {
            t -= PI;
        }
        if t < 0.0 {
            t += PI;
        }
        theta[i] = t;
        let diff = gxx - gyy;
        coherence[i] = ((diff * diff + 4.0 * gxy * gxy).sqrt() / energy).clamp(0.0, 1.0);
    }
    OrientationField {
        block_size: grads.block_size,
        cols: grads.cols,
        rows: grads.rows,
        theta,
        coherence,
    }
}

/// Gaussian smoothing of the orientation field in doubled-angle space.
///
/// The coherence-weighted vectors (c*cos 2t, c*sin 2t) are convolved with a
/// separable Gaussian of parameter `sigma` (in blocks, kernel truncated at
/// three sigma, mirror padding) and the angle is recovered by halving the
/// resulting vector angle.
pub fn smooth_orientation(field: &OrientationField, sigma: f64) -> OrientationField {
    assert!(sigma > 0.0, "sigma must be positive");
    let (cols, rows) = (field.cols, field.rows);
    let n = cols * rows;
    let mut cos2 = vec![0.0; n];
    let mut sin2 = vec![0.0; n];
    for i in 0..n {
        cos2[i] = field.coherence[i] * (2.0 * field.theta[i]).cos();
        sin2[i] = field.coherence[i] * (2.0 * field.theta[i]).sin();
    }

    let half = (3.0 * sigma).ceil() as i64;
    let mut kernel = Vec::with_capacity((2 * half + 1) as usize);
    for d in -half..=half {
        kernel.push((-(d * d) as f64 / (2.0 * sigma * sigma)).exp());
    }
    let norm: f64 = kernel.iter().sum();
    for k in kernel.iter_mut() {
        *k /= norm;
    }

    let cos2 = convolve_separable(&cos2, cols, rows, &kernel, half);
    let sin2 = convolve_separable(&sin2, cols, rows, &kernel, half);

    let mut theta = vec![0.0; n];
    let mut coherence = vec![0.0; n];
    for i in 0..n {
        let mag = cos2[i].hypot(sin2[i]);
        if mag > 0.0 {
            let mut t = 0.5 * sin2[i].atan2(cos2[i]);
            if t < 0.0 {
                t += PI;
            }
            if t >= PI {
                t -= PI;
            }
            theta[i] = t;
            coherence[i] = mag.clamp(0.0, 1.0);
        }
    }
    OrientationField {
        block_size: field.block_size,
        cols,
        rows,
        theta,
        coherence,
    }
}

fn convolve_separable(data: &[f64], cols: usize, rows: usize, kernel: &[f64], half: i64) -> Vec<f64> {
    let reflect = |mut i: i64, n: i64| -> usize {
        if n == 1 {
            return 0;
        }
        loop {
            if i < 0 {
                i = -i;
            } else if i >= n {
                i = 2 * n - 2 - i;
            } else {
                return i as usize;
            }
        }
    };
    let mut tmp = vec![0.0; data.len()];
    for y in 0..rows {
        for x in 0..cols {
            let mut acc = 0.0;
            for (k, wk) in kernel.iter().enumerate() {
                let sx = reflect(x as i64 + k as i64 - half, cols as i64);
                acc += wk * data[y * cols + sx];
            }
            tmp[y * cols + x] = acc;
        }
    }
    let mut out = vec![0.0; data.len()];
    for y in 0..rows {
        for x in 0..cols {
            let mut acc = 0.0;
            for (k, wk) in kernel.iter().enumerate() {
                let sy = reflect(y as i64 + k as i64 - half, rows as i64);
                acc += wk * tmp[sy * cols + x];
            }
            out[y * cols + x] = acc;
        }
    }
    out
}
