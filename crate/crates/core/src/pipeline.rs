//! The end-to-end processing pipeline: raster in, template out, with every
//! intermediate stage exposed for inspection.

use std::path::Path;

use crate::config::PipelineConfig;
use crate::corepoint::{curvature_strength, extract_roi, find_peak, CorePoint, RoiMask, StrengthMap};
use crate::descriptor::{build_signature, fourier_template, DescriptorParams, Template, TemplateMeta};
use crate::enhance::{adaptive_denoise, equalize};
use crate::error::Result;
use crate::imageio::{load_grayscale, resize, GrayImage};
use crate::minutiae::{extract_minutiae, remove_spurious, MinutiaeSet};
use crate::orientation::{block_gradients, ridge_orientation, smooth_orientation, OrientationField};
use crate::ridgemap::{binarize, clean, hbreak, spur, thin, BinaryImage};

/// Stages that are computable on any input, before core detection can fail.
#[derive(Debug, Clone)]
pub struct EarlyStages {
    pub resized: GrayImage,
    pub enhanced: GrayImage,
    pub field: OrientationField,
    pub strength: StrengthMap,
}

/// Stages that exist only once a core point was found.
#[derive(Debug, Clone)]
pub struct LateStages {
    pub core: CorePoint,
    pub roi: GrayImage,
    pub mask: RoiMask,
    pub binary: BinaryImage,
    pub thinned: BinaryImage,
    pub morphed: BinaryImage,
    pub minutiae: MinutiaeSet,
}

/// Resize, enhance, estimate orientation, compute the curvature map.
pub fn run_early(img: &GrayImage, cfg: &PipelineConfig) -> Result<EarlyStages> {
    let resized = resize(img, cfg.working_size, cfg.working_size)?;
    let enhanced = adaptive_denoise(&equalize(&resized), cfg.denoise_window)?;
    let grads = block_gradients(&enhanced, cfg.block_size)?;
    let field = smooth_orientation(&ridge_orientation(&grads), cfg.smoothing_sigma);
    let strength = curvature_strength(&field)?;
    Ok(EarlyStages {
        resized,
        enhanced,
        field,
        strength,
    })
}

/// Core detection through pruned minutiae.
pub fn run_late(early: &EarlyStages, cfg: &PipelineConfig) -> Result<LateStages> {
    let core = find_peak(
        &early.strength,
        cfg.core_threshold,
        early.enhanced.width(),
        early.enhanced.height(),
    )?;
    let (roi, mask) = extract_roi(&early.enhanced, &core, cfg.roi_radius)?;
    let binary = binarize(&roi, cfg.binarize_threshold);
    let thinned = thin(&binary);
    let morphed = spur(&hbreak(&clean(&thinned)), cfg.spur_iterations);
    let raw = extract_minutiae(&morphed, &mask, &early.field, cfg.boundary_margin)?;
    let minutiae = remove_spurious(raw, cfg.prune_distance);
    Ok(LateStages {
        core,
        roi,
        mask,
        binary,
        thinned,
        morphed,
        minutiae,
    })
}

/// Full pipeline on an in-memory image.
pub fn extract_template(
    img: &GrayImage,
    cfg: &PipelineConfig,
    meta: TemplateMeta,
) -> Result<Template> {
    let early = run_early(img, cfg)?;
    let late = run_late(&early, cfg)?;
    template_from_minutiae(&late.minutiae, cfg, meta)
}

/// Signature plus transform on an already-extracted minutiae set.
pub fn template_from_minutiae(
    set: &MinutiaeSet,
    cfg: &PipelineConfig,
    meta: TemplateMeta,
) -> Result<Template> {
    let sig = build_signature(set)?;
    let params = DescriptorParams {
        slots: cfg.signature_slots,
        count: cfg.descriptor_count,
        mode: cfg.descriptor_mode,
        normalize: cfg.normalize_descriptors,
    };
    fourier_template(&sig, &params, cfg.roi_radius as u16, meta)
}

/// Full pipeline on an image file.
pub fn extract_template_from_path<P: AsRef<Path>>(
    path: P,
    cfg: &PipelineConfig,
    meta: TemplateMeta,
) -> Result<Template> {
    let img = load_grayscale(path)?;
    extract_template(&img, cfg, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::synth;

    #[test]
    fn pipeline_is_deterministic() {
        let img = synth::synthetic_fingerprint(400, 400, 5, 2);
        let cfg = PipelineConfig::default();
        let meta = TemplateMeta {
            finger: 5,
            impression: 2,
        };
        let a = extract_template(&img, &cfg, meta).unwrap();
        let b = extract_template(&img, &cfg, meta).unwrap();
        let bits = |t: &Template| -> Vec<u64> { t.descriptors.iter().map(|d| d.to_bits()).collect() };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn blank_image_has_no_core() {
        let img = GrayImage::constant(400, 400, 128).unwrap();
        let cfg = PipelineConfig::default();
        let early = run_early(&img, &cfg).unwrap();
        assert!(matches!(
            run_late(&early, &cfg),
            Err(Error::NoCoreFound { .. })
        ));
    }

    #[test]
    fn synthetic_print_produces_minutiae() {
        let img = synth::synthetic_fingerprint(400, 400, 3, 1);
        let cfg = PipelineConfig::default();
        let early = run_early(&img, &cfg).unwrap();
        let late = run_late(&early, &cfg).unwrap();
        assert!(
            late.minutiae.items.len() >= 8,
            "only {} minutiae extracted",
            late.minutiae.items.len()
        );
        // All inside the ROI radius.
        for m in &late.minutiae.items {
            let dx = m.x as f64 - late.core.x as f64;
            let dy = m.y as f64 - late.core.y as f64;
            assert!(dx.hypot(dy) <= cfg.roi_radius as f64);
        }
    }

    #[test]
    fn minutiae_count_grows_with_radius() {
        let img = synth::synthetic_fingerprint(400, 400, 7, 1);
        let mut counts = Vec::new();
        for radius in [90u32, 100, 150] {
            let cfg = PipelineConfig {
                roi_radius: radius,
                ..PipelineConfig::default()
            };
            let early = run_early(&img, &cfg).unwrap();
            let late = run_late(&early, &cfg).unwrap();
            counts.push(late.minutiae.items.len());
        }
        assert!(counts[0] <= counts[1] && counts[1] <= counts[2], "{counts:?}");
    }
}
