//! Crossing-number minutiae extraction and spurious-minutiae pruning.
//!
//! On a one-pixel-wide skeleton the crossing number of a ridge pixel (half
//! the sum of absolute differences between consecutive 8-neighbors) is 1 at
//! a ridge ending and 3 at a bifurcation. Minutiae too close to each other
//! are artifacts of ridge breaks and are removed pairwise.

use crate::corepoint::{CorePoint, RoiMask};
use crate::error::{Error, Result};
use crate::orientation::OrientationField;
use crate::ridgemap::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinutiaKind {
    Termination,
    Bifurcation,
}

impl MinutiaKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MinutiaKind::Termination => "termination",
            MinutiaKind::Bifurcation => "bifurcation",
        }
    }
}

/// A ridge event: position, type and the local ridge orientation sampled
/// from the block containing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minutia {
    pub x: u32,
    pub y: u32,
    pub kind: MinutiaKind,
    /// Local ridge orientation in [0, pi).
    pub angle: f64,
}

/// Minutiae of one print, listed in (y, x) scan order, together with the
/// core and ROI radius they were extracted under.
#[derive(Debug, Clone)]
pub struct MinutiaeSet {
    pub items: Vec<Minutia>,
    pub core: CorePoint,
    pub radius: u32,
}

/// Crossing number of an 8-neighborhood given in circular order:
/// half the sum of absolute differences between consecutive neighbors.
#[inline]
pub fn crossing_number(neighbors: [bool; 8]) -> u8 {
    let mut sum = 0u8;
    for i in 0..8 {
        if neighbors[i] != neighbors[(i + 1) % 8] {
            sum += 1;
        }
    }
    sum / 2
}

/// Scans a thinned skeleton and collects terminations (CN = 1) and
/// bifurcations (CN = 3) inside the ROI, skipping a `margin`-wide band along
/// the mask boundary where clipped ridges masquerade as endings.
///
/// Fails with `NotThinned` if the skeleton contains a 2x2 ridge block.
pub fn extract_minutiae(
    skeleton: &BinaryImage,
    mask: &RoiMask,
    field: &OrientationField,
    margin: u32,
) -> Result<MinutiaeSet> {
    if let Some((x, y)) = skeleton.find_2x2_block() {
        return Err(Error::NotThinned { x, y });
    }
    let core = mask.center;
    let radius = mask.radius;
    let keep_r2 = if radius > margin {
        let keep = (radius - margin) as i64;
        keep * keep
    } else {
        -1
    };
    let (w, h) = (skeleton.width() as i64, skeleton.height() as i64);
    let m = margin as i64;

    let mut items = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !skeleton.get(x, y) {
                continue;
            }
            let kind = match crossing_number(skeleton.neighbors(x, y)) {
                1 => MinutiaKind::Termination,
                3 => MinutiaKind::Bifurcation,
                _ => continue,
            };
            let dx = x - core.x as i64;
            let dy = y - core.y as i64;
            if dx * dx + dy * dy > keep_r2 {
                continue;
            }
            if x < m || y < m || x + m >= w || y + m >= h {
                continue;
            }
            items.push(Minutia {
                x: x as u32,
                y: y as u32,
                kind,
                angle: field.theta_at_pixel(x as u32, y as u32),
            });
        }
    }
    Ok(MinutiaeSet {
        items,
        core,
        radius,
    })
}

/// Removes spurious minutiae: every pair (of any kinds) closer than
/// `min_distance` has both members dropped; the pass repeats until no pair
/// violates the rule.
pub fn remove_spurious(set: MinutiaeSet, min_distance: f64) -> MinutiaeSet {
    assert!(min_distance > 0.0, "prune distance must be positive");
    let mut items = set.items;
    let d2 = min_distance * min_distance;
    loop {
        let mut doomed = vec![false; items.len()];
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let dx = items[i].x as f64 - items[j].x as f64;
                let dy = items[i].y as f64 - items[j].y as f64;
                if dx * dx + dy * dy < d2 {
                    doomed[i] = true;
                    doomed[j] = true;
                }
            }
        }
        if doomed.iter().all(|&d| !d) {
            break;
        }
        let mut keep = Vec::with_capacity(items.len());
        for (m, dead) in items.into_iter().zip(&doomed) {
            if !dead {
                keep.push(m);
            }
        }
        items = keep;
    }
    MinutiaeSet { items, ..set }
}
