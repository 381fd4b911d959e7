//! Fixed-length templates from the polar complex minutiae signature.
//!
//! Each minutia becomes a complex number `z = r * e^(i*theta)` with `r` and
//! `theta` measured from the core point. The signature is canonically sorted
//! by (theta, r), zero-padded, run through a discrete Fourier transform and
//! the leading coefficients become the template. Translation of the whole
//! constellation cancels exactly; rotation about the core leaves coefficient
//! magnitudes unchanged.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::corepoint::CorePoint;
use crate::error::{Error, Result};
use crate::minutiae::{Minutia, MinutiaeSet};

/// Descriptor extraction mode: real parts of the leading DFT coefficients
/// (the default) or their magnitudes, which are invariant under rotation of
/// the minutiae about the core.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescriptorMode {
    Real,
    Magnitude,
}

impl DescriptorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DescriptorMode::Real => "real",
            DescriptorMode::Magnitude => "magnitude",
        }
    }
}

impl std::str::FromStr for DescriptorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(DescriptorMode::Real),
            "magnitude" => Ok(DescriptorMode::Magnitude),
            other => Err(Error::InvalidConfig(format!(
                "descriptor_mode must be 'real' or 'magnitude', got '{other}'"
            ))),
        }
    }
}

/// Knobs for [`fourier_template`].
#[derive(Debug, Clone, Copy)]
pub struct DescriptorParams {
    /// Signature slot count L; the signature is zero-padded (or truncated to
    /// the nearest-to-core entries) to this length before the transform.
    pub slots: u16,
    /// Number of leading coefficients K kept in the template.
    pub count: u16,
    pub mode: DescriptorMode,
    /// Divide descriptors by the minutiae count so prints with different
    /// numbers of minutiae stay comparable.
    pub normalize: bool,
}

impl Default for DescriptorParams {
    fn default() -> Self {
        Self {
            slots: 128,
            count: 80,
            mode: DescriptorMode::Real,
            normalize: true,
        }
    }
}

/// One signature entry: the complex position of a minutia relative to the
/// core, with its polar sort keys.
#[derive(Debug, Clone, Copy)]
struct SignatureEntry {
    z: Complex64,
    r: f64,
    theta: f64,
}

/// Ordered polar complex signature of a minutiae constellation.
#[derive(Debug, Clone)]
pub struct ComplexSignature {
    entries: Vec<SignatureEntry>,
}

impl ComplexSignature {
    /// Builds a signature directly from complex values; used by tests that
    /// probe transform properties without a raster pipeline. Values are
    /// sorted by (angle, magnitude) like minutiae-derived signatures.
    pub fn from_values(values: Vec<Complex64>) -> Self {
        let mut entries: Vec<SignatureEntry> = values
            .into_iter()
            .map(|z| SignatureEntry {
                z,
                r: z.norm(),
                theta: if z.norm() == 0.0 { 0.0 } else { z.arg() },
            })
            .collect();
        sort_canonical(&mut entries);
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.z).collect()
    }
}

fn sort_canonical(entries: &mut [SignatureEntry]) {
    entries.sort_by(|a, b| {
        a.theta
            .total_cmp(&b.theta)
            .then_with(|| a.r.total_cmp(&b.r))
    });
}

/// Polar coordinates of a minutia relative to the core: straight-line
/// distance and four-quadrant angle in (-pi, pi]. A minutia on the core has
/// angle 0 by convention.
pub fn to_polar(core: &CorePoint, m: &Minutia) -> (f64, f64) {
    let dx = m.x as f64 - core.x as f64;
    let dy = m.y as f64 - core.y as f64;
    let r = (dx * dx + dy * dy).sqrt();
    let theta = if r == 0.0 { 0.0 } else { dy.atan2(dx) };
    (r, theta)
}

/// Converts a minutiae set into the canonical polar complex signature,
/// sorted by (theta ascending, r ascending).
pub fn build_signature(set: &MinutiaeSet) -> Result<ComplexSignature> {
    if set.items.is_empty() {
        return Err(Error::EmptyMinutiaeSet);
    }
    let mut entries = Vec::with_capacity(set.items.len());
    for m in &set.items {
        let (r, theta) = to_polar(&set.core, m);
        let dx = m.x as f64 - set.core.x as f64;
        let dy = m.y as f64 - set.core.y as f64;
        entries.push(SignatureEntry {
            z: Complex64::new(dx, dy),
            r,
            theta,
        });
    }
    sort_canonical(&mut entries);
    Ok(ComplexSignature { entries })
}

/// Identity of a template within a database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TemplateMeta {
    pub finger: u32,
    pub impression: u16,
}

impl std::fmt::Display for TemplateMeta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_{}", self.finger, self.impression)
    }
}

/// Fixed-length Fourier descriptor vector plus its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub descriptors: Vec<f64>,
    /// Pre-padding slot count L used for the transform.
    pub signature_slots: u16,
    /// ROI radius R the minutiae were taken under.
    pub radius: u16,
    pub meta: TemplateMeta,
}

impl Template {
    pub fn descriptor_count(&self) -> u16 {
        self.descriptors.len() as u16
    }
}

/// Computes the template of a signature: pad (or truncate to the
/// nearest-to-core entries) to `slots`, transform, keep the leading `count`
/// coefficients in the configured mode.
pub fn fourier_template(
    sig: &ComplexSignature,
    params: &DescriptorParams,
    radius: u16,
    meta: TemplateMeta,
) -> Result<Template> {
    if params.count > params.slots {
        return Err(Error::BadDescriptorCount {
            count: params.count,
            slots: params.slots,
        });
    }
    let slots = params.slots as usize;
    let mut entries: Vec<SignatureEntry> = sig.entries.clone();
    if entries.len() > slots {
        // Keep the entries closest to the core; they are the most reliable.
        entries.sort_by(|a, b| a.r.total_cmp(&b.r).then_with(|| a.theta.total_cmp(&b.theta)));
        entries.truncate(slots);
        sort_canonical(&mut entries);
    }
    let used = entries.len();

    let mut buffer: Vec<Complex64> = entries.iter().map(|e| e.z).collect();
    buffer.resize(slots, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(slots).process(&mut buffer);

    let norm = if params.normalize {
        used.max(1) as f64
    } else {
        1.0
    };
    let descriptors = buffer
        .iter()
        .take(params.count as usize)
        .map(|c| match params.mode {
            DescriptorMode::Real => c.re / norm,
            DescriptorMode::Magnitude => c.norm() / norm,
        })
        .collect();
    Ok(Template {
        descriptors,
        signature_slots: params.slots,
        radius,
        meta,
    })
}

const MAGIC: &[u8; 4] = b"FPTL";
const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 20;

/// Serializes a template to its binary file form.
///
/// Layout (little-endian): magic "FPTL", version u16, K u16, L u16, R u16,
/// finger u32, impression u16, reserved u16, K f64 descriptors, CRC32 of
/// everything before it.
pub fn template_bytes(t: &Template) -> Vec<u8> {
    let k = t.descriptors.len() as u16;
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * k as usize + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&k.to_le_bytes());
    out.extend_from_slice(&t.signature_slots.to_le_bytes());
    out.extend_from_slice(&t.radius.to_le_bytes());
    out.extend_from_slice(&t.meta.finger.to_le_bytes());
    out.extend_from_slice(&t.meta.impression.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    for d in &t.descriptors {
        out.extend_from_slice(&d.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Writes a template atomically (temp file then rename).
pub fn save_template<P: AsRef<Path>>(t: &Template, path: P) -> Result<()> {
    let path = path.as_ref();
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, template_bytes(t))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Parses a template from its binary file form.
pub fn template_from_bytes(bytes: &[u8]) -> Result<Template> {
    if bytes.len() < 4 || &bytes[0..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER_LEN + 4 {
        return Err(Error::ChecksumMismatch);
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    let version = u16_at(4);
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch(version));
    }
    let k = u16_at(6) as usize;
    let expected = HEADER_LEN + 8 * k + 4;
    if bytes.len() != expected {
        return Err(Error::ChecksumMismatch);
    }
    let stored_crc = u32::from_le_bytes(bytes[expected - 4..].try_into().unwrap());
    if crc32fast::hash(&bytes[..expected - 4]) != stored_crc {
        return Err(Error::ChecksumMismatch);
    }
    let slots = u16_at(8);
    let radius = u16_at(10);
    let finger = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    let impression = u16_at(16);
    let mut descriptors = Vec::with_capacity(k);
    for i in 0..k {
        let off = HEADER_LEN + 8 * i;
        descriptors.push(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()));
    }
    Ok(Template {
        descriptors,
        signature_slots: slots,
        radius,
        meta: TemplateMeta { finger, impression },
    })
}

/// Reads a template file.
pub fn load_template<P: AsRef<Path>>(path: P) -> Result<Template> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    template_from_bytes(&bytes)
}
