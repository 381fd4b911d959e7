//! Pipeline configuration: defaults, validation and the flat key=value file
//! form used by the CLI.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::descriptor::DescriptorMode;
use crate::error::{Error, Result};

/// Every knob of the processing pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Square working frame the input is resized to.
    pub working_size: u32,
    /// Orientation block size in pixels.
    pub block_size: u32,
    /// Gaussian sigma (in blocks) for orientation smoothing.
    pub smoothing_sigma: f64,
    /// Minimum curvature-peak strength accepted as a core point.
    pub core_threshold: f64,
    /// ROI radius R around the core.
    pub roi_radius: u32,
    /// Gray level below which a pixel counts as ridge.
    pub binarize_threshold: u8,
    /// Endpoint-peeling iterations after thinning.
    pub spur_iterations: u32,
    /// Minimum allowed distance D between minutiae.
    pub prune_distance: f64,
    /// Signature slot count L (pad/truncate length before the transform).
    pub signature_slots: u16,
    /// Descriptor count K kept in the template.
    pub descriptor_count: u16,
    /// Verification decision threshold on template distance.
    pub match_threshold: f64,
    /// Exclusion band M inside the ROI boundary.
    pub boundary_margin: u32,
    pub descriptor_mode: DescriptorMode,
    /// Divide descriptors by the minutiae count.
    pub normalize_descriptors: bool,
    /// Adaptive denoise window (odd, >= 3).
    pub denoise_window: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            working_size: 400,
            block_size: 10,
            smoothing_sigma: 1.0,
            core_threshold: 0.3,
            roi_radius: 100,
            binarize_threshold: 160,
            spur_iterations: 8,
            prune_distance: 6.0,
            signature_slots: 128,
            descriptor_count: 80,
            match_threshold: 55.0,
            boundary_margin: 10,
            descriptor_mode: DescriptorMode::Real,
            normalize_descriptors: true,
            denoise_window: 3,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.descriptor_count > self.signature_slots {
            return Err(Error::InvalidConfig(format!(
                "descriptor_count {} exceeds signature_slots {}",
                self.descriptor_count, self.signature_slots
            )));
        }
        if self.descriptor_count == 0 {
            return Err(Error::InvalidConfig("descriptor_count must be positive".into()));
        }
        if self.roi_radius == 0 {
            return Err(Error::InvalidConfig("roi_radius must be positive".into()));
        }
        if self.prune_distance <= 0.0 {
            return Err(Error::InvalidConfig("prune_distance must be positive".into()));
        }
        if self.block_size < 3 {
            return Err(Error::InvalidConfig("block_size must be at least 3".into()));
        }
        if self.smoothing_sigma <= 0.0 {
            return Err(Error::InvalidConfig("smoothing_sigma must be positive".into()));
        }
        if self.working_size < self.block_size {
            return Err(Error::InvalidConfig(
                "working_size must cover at least one block".into(),
            ));
        }
        if self.denoise_window < 3 || self.denoise_window % 2 == 0 {
            return Err(Error::InvalidConfig(
                "denoise_window must be odd and at least 3".into(),
            ));
        }
        if self.match_threshold < 0.0 {
            return Err(Error::InvalidConfig("match_threshold must be nonnegative".into()));
        }
        Ok(())
    }

    /// Serializes to the flat `key = value` file form.
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "working_size = {}", self.working_size);
        let _ = writeln!(s, "block_size = {}", self.block_size);
        let _ = writeln!(s, "smoothing_sigma = {}", self.smoothing_sigma);
        let _ = writeln!(s, "core_threshold = {}", self.core_threshold);
        let _ = writeln!(s, "roi_radius = {}", self.roi_radius);
        let _ = writeln!(s, "binarize_threshold = {}", self.binarize_threshold);
        let _ = writeln!(s, "spur_iterations = {}", self.spur_iterations);
        let _ = writeln!(s, "prune_distance = {}", self.prune_distance);
        let _ = writeln!(s, "signature_slots = {}", self.signature_slots);
        let _ = writeln!(s, "descriptor_count = {}", self.descriptor_count);
        let _ = writeln!(s, "match_threshold = {}", self.match_threshold);
        let _ = writeln!(s, "boundary_margin = {}", self.boundary_margin);
        let _ = writeln!(s, "descriptor_mode = {}", self.descriptor_mode.as_str());
        let _ = writeln!(s, "normalize_descriptors = {}", self.normalize_descriptors);
        let _ = writeln!(s, "denoise_window = {}", self.denoise_window);
        s
    }

    /// Parses the flat `key = value` form; '#' starts a comment. Unknown
    /// keys are rejected so typos do not silently fall back to defaults.
    pub fn from_file_string(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Error::InvalidConfig(format!("line {}: bad {} '{}'", lineno + 1, what, value))
            };
            match key {
                "working_size" => cfg.working_size = value.parse().map_err(|_| bad(key))?,
                "block_size" => cfg.block_size = value.parse().map_err(|_| bad(key))?,
                "smoothing_sigma" => cfg.smoothing_sigma = value.parse().map_err(|_| bad(key))?,
                "core_threshold" => cfg.core_threshold = value.parse().map_err(|_| bad(key))?,
                "roi_radius" => cfg.roi_radius = value.parse().map_err(|_| bad(key))?,
                "binarize_threshold" => {
                    cfg.binarize_threshold = value.parse().map_err(|_| bad(key))?
                }
                "spur_iterations" => cfg.spur_iterations = value.parse().map_err(|_| bad(key))?,
                "prune_distance" => cfg.prune_distance = value.parse().map_err(|_| bad(key))?,
                "signature_slots" => cfg.signature_slots = value.parse().map_err(|_| bad(key))?,
                "descriptor_count" => {
                    cfg.descriptor_count = value.parse().map_err(|_| bad(key))?
                }
                "match_threshold" => cfg.match_threshold = value.parse().map_err(|_| bad(key))?,
                "boundary_margin" => cfg.boundary_margin = value.parse().map_err(|_| bad(key))?,
                "descriptor_mode" => cfg.descriptor_mode = value.parse()?,
                "normalize_descriptors" => {
                    cfg.normalize_descriptors = value.parse().map_err(|_| bad(key))?
                }
                "denoise_window" => cfg.denoise_window = value.parse().map_err(|_| bad(key))?,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown key '{}'",
                        lineno + 1,
                        other
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = fs::read_to_string(path.as_ref())?;
        Self::from_file_string(&text)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        fs::write(path.as_ref(), self.to_file_string())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn file_form_round_trips() {
        let mut cfg = PipelineConfig::default();
        cfg.roi_radius = 150;
        cfg.descriptor_count = 120;
        cfg.smoothing_sigma = 1.25;
        cfg.descriptor_mode = DescriptorMode::Magnitude;
        cfg.normalize_descriptors = false;
        let text = cfg.to_file_string();
        let back = PipelineConfig::from_file_string(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = PipelineConfig::from_file_string(
            "# comment\n\nroi_radius = 90 # trailing comment\n",
        )
        .unwrap();
        assert_eq!(cfg.roi_radius, 90);
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(matches!(
            PipelineConfig::from_file_string("radiu = 90\n"),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn invalid_combination_is_rejected() {
        assert!(matches!(
            PipelineConfig::from_file_string("descriptor_count = 200\nsignature_slots = 128\n"),
            Err(Error::InvalidConfig(_))
        ));
    }
}
