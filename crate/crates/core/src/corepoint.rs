//! Singular (core) point detection and circular region-of-interest carving.
//!
//! The core is located as the peak of an orientation-curvature map: in the
//! doubled-angle domain, coherent ridge flow sums to a long vector while
//! orientations rotating around a singularity cancel out. The peak block is
//! refined to sub-block precision by a strength-weighted centroid of its
//! 3x3 neighborhood.

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::imageio::GrayImage;
use crate::orientation::{block_gradients, ridge_orientation, smooth_orientation, OrientationField};

/// Background value painted outside the region of interest.
pub const ROI_BACKGROUND: u8 = 255;

/// Detected singular point, in pixel coordinates of the working frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorePoint {
    pub x: u32,
    pub y: u32,
    /// Curvature-peak score in [0, 1].
    pub strength: f64,
}

/// Per-block curvature strength map; border blocks are zero.
#[derive(Debug, Clone)]
pub struct StrengthMap {
    block_size: u32,
    cols: usize,
    rows: usize,
    values: Vec<f64>,
}

impl StrengthMap {
    pub fn block_size(&self) -> u32 {
        self.block_size
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn value(&self, bx: usize, by: usize) -> f64 {
        self.values[by * self.cols + bx]
    }
}

/// Circular mask centered on the core, clipped to the image bounds.
#[derive(Debug, Clone)]
pub struct RoiMask {
    pub center: CorePoint,
    pub radius: u32,
    width: u32,
    height: u32,
    inside: Vec<bool>,
    /// True when the circle extends past the image border.
    pub clipped: bool,
}

impl RoiMask {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn contains(&self, x: u32, y: u32) -> bool {
        x < self.width && y < self.height && self.inside[y as usize * self.width as usize + x as usize]
    }

    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }
}

/// Curvature strength per interior block: one minus the mean resultant
/// length of the nine doubled-angle unit vectors in the 3x3 neighborhood.
pub fn curvature_strength(field: &OrientationField) -> Result<StrengthMap> {
    let (cols, rows) = (field.cols(), field.rows());
    if cols < 3 || rows < 3 {
        return Err(Error::FieldTooSmall { cols, rows });
    }
    let mut values = vec![0.0; cols * rows];
    for by in 1..rows - 1 {
        for bx in 1..cols - 1 {
            let mut c = 0.0;
            let mut s = 0.0;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let t = field.theta((bx as i64 + dx) as usize, (by as i64 + dy) as usize);
                    c += (2.0 * t).cos();
                    s += (2.0 * t).sin();
                }
            }
            values[by * cols + bx] = (1.0 - c.hypot(s) / 9.0).clamp(0.0, 1.0);
        }
    }
    Ok(StrengthMap {
        block_size: field.block_size(),
        cols,
        rows,
        values,
    })
}

/// Finds the strongest interior peak of a strength map.
///
/// Ties break toward smaller block row, then smaller column. The location is
/// refined by the strength-weighted centroid of the 3x3 block neighborhood
/// around the peak, then clamped to the image bounds. Fails with
/// `NoCoreFound` when the peak is weaker than `tau`.
pub fn find_peak(map: &StrengthMap, tau: f64, width: u32, height: u32) -> Result<CorePoint> {
    let (cols, rows) = (map.cols, map.rows);
    let mut best = (1usize, 1usize);
    let mut best_val = f64::NEG_INFINITY;
    for by in 1..rows - 1 {
        for bx in 1..cols - 1 {
            let v = map.value(bx, by);
            if v > best_val {
                best_val = v;
                best = (bx, by);
            }
        }
    }
    if !best_val.is_finite() || best_val < tau {
        return Err(Error::NoCoreFound {
            strength: best_val.max(0.0),
            threshold: tau,
        });
    }

    let bs = map.block_size as f64;
    let center = |b: usize| b as f64 * bs + (bs - 1.0) / 2.0;
    let mut wsum = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for dy in -1i64..=1 {
        for dx in -1i64..=1 {
            let bx = (best.0 as i64 + dx) as usize;
            let by = (best.1 as i64 + dy) as usize;
            if bx < cols && by < rows {
                let w = map.value(bx, by);
                wsum += w;
                cx += w * center(bx);
                cy += w * center(by);
            }
        }
    }
    let (px, py) = if wsum > 0.0 {
        (cx / wsum, cy / wsum)
    } else {
        (center(best.0), center(best.1))
    };
    Ok(CorePoint {
        x: (px.round().max(0.0) as u32).min(width - 1),
        y: (py.round().max(0.0) as u32).min(height - 1),
        strength: best_val,
    })
}

/// Runs orientation estimation, smoothing and curvature analysis on an
/// enhanced image and returns the singular point.
pub fn detect_core(img: &GrayImage, cfg: &PipelineConfig) -> Result<CorePoint> {
    let grads = block_gradients(img, cfg.block_size)?;
    let field = smooth_orientation(&ridge_orientation(&grads), cfg.smoothing_sigma);
    let strength = curvature_strength(&field)?;
    find_peak(&strength, cfg.core_threshold, img.width(), img.height())
}

/// Masks everything outside the circle of `radius` around `core` to
/// background white, and returns the mask alongside the cropped image.
pub fn extract_roi(img: &GrayImage, core: &CorePoint, radius: u32) -> Result<(GrayImage, RoiMask)> {
    if radius == 0 {
        return Err(Error::BadRadius);
    }
    let (w, h) = (img.width(), img.height());
    let (cx, cy, r) = (core.x as i64, core.y as i64, radius as i64);
    let r2 = r * r;
    let mut inside = vec![false; w as usize * h as usize];
    let mut data = Vec::with_capacity(inside.len());
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let dx = x - cx;
            let dy = y - cy;
            let hit = dx * dx + dy * dy <= r2;
            if hit {
                inside[(y * w as i64 + x) as usize] = true;
                data.push(img.get(x as u32, y as u32));
            } else {
                data.push(ROI_BACKGROUND);
            }
        }
    }
    let clipped = cx - r < 0 || cy - r < 0 || cx + r > w as i64 - 1 || cy + r > h as i64 - 1;
    let roi = GrayImage::from_raw(w, h, data)?;
    Ok((
        roi,
        RoiMask {
            center: *core,
            radius,
            width: w,
            height: h,
            inside,
            clipped,
        },
    ))
}
