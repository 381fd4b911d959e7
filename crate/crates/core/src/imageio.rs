//! Grayscale raster loading, conversion and resizing.
//!
//! Every pipeline stage that carries pixel data uses [`GrayImage`]: an
//! immutable row-major 8-bit single-channel raster. Files are read from
//! binary PGM ("P5"), PNG or TIFF; multi-channel inputs are collapsed by
//! unweighted channel mean. Debug dumps are written as binary PGM.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// 8-bit single-channel raster, row-major, values in [0, 255].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    /// Builds an image from raw row-major bytes. `data.len()` must equal
    /// `width * height` and both dimensions must be nonzero.
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        if data.len() != width as usize * height as usize {
            return Err(Error::CorruptImage(format!(
                "pixel buffer is {} bytes, expected {}",
                data.len(),
                width as usize * height as usize
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Constant-valued image.
    pub fn constant(width: u32, height: u32, value: u8) -> Result<Self> {
        Self::from_raw(width, height, vec![value; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Sample with reflected (mirror) indexing for out-of-range coordinates.
    #[inline]
    pub fn get_reflect(&self, x: i64, y: i64) -> u8 {
        let xi = reflect_index(x, self.width as i64);
        let yi = reflect_index(y, self.height as i64);
        self.data[yi as usize * self.width as usize + xi as usize]
    }

    pub fn min_max(&self) -> (u8, u8) {
        let mut lo = u8::MAX;
        let mut hi = u8::MIN;
        for &v in &self.data {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Mirror ("reflect-101") index folding: -1 maps to 1, n maps to n-2.
#[inline]
fn reflect_index(mut i: i64, n: i64) -> i64 {
    if n == 1 {
        return 0;
    }
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * n - 2 - i;
        } else {
            return i;
        }
    }
}

/// Loads a raster file (PGM/PNG/TIFF) as an 8-bit grayscale image.
///
/// Multi-channel pixels are converted by the unweighted mean of their
/// color channels; 16-bit samples are rescaled to 8 bits.
pub fn load_grayscale<P: AsRef<Path>>(path: P) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    if bytes.starts_with(b"P5") {
        return parse_pgm(&bytes);
    }
    let dynimg = image::load_from_memory(&bytes).map_err(|e| match e {
        image::ImageError::Unsupported(u) => Error::UnsupportedFormat(u.to_string()),
        other => Error::CorruptImage(other.to_string()),
    })?;
    Ok(from_dynamic(&dynimg))
}

fn from_dynamic(img: &image::DynamicImage) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    // Already single-channel 8-bit: pass pixels through untouched.
    if let image::DynamicImage::ImageLuma8(buf) = img {
        return GrayImage::from_raw(w, h, buf.as_raw().clone()).expect("decoder output");
    }
    // Everything else goes through 16-bit RGB; the 8->16 expansion is the
    // exact factor 257, so 8-bit channel means survive unchanged.
    let rgb = img.to_rgb16();
    let mut data = Vec::with_capacity(w as usize * h as usize);
    for p in rgb.pixels() {
        let mean = (p.0[0] as f64 + p.0[1] as f64 + p.0[2] as f64) / (3.0 * 257.0);
        data.push(mean.round().clamp(0.0, 255.0) as u8);
    }
    GrayImage::from_raw(w, h, data).expect("decoder output")
}

fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 2usize; // past "P5"
    let mut fields = [0u64; 3];
    for field in fields.iter_mut() {
        *field = next_pgm_token(bytes, &mut pos)?;
    }
    let (width, height, maxval) = (fields[0], fields[1], fields[2]);
    if width == 0 || height == 0 || width > u32::MAX as u64 || height > u32::MAX as u64 {
        return Err(Error::CorruptImage("bad pgm dimensions".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedFormat(format!(
            "pgm maxval {maxval}; only 8-bit graymaps are supported"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let expected = width as usize * height as usize;
    let raster = bytes
        .get(pos..pos + expected)
        .ok_or_else(|| Error::CorruptImage("pgm raster truncated".into()))?;
    GrayImage::from_raw(width as u32, height as u32, raster.to_vec())
}

fn next_pgm_token(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    // Skip whitespace and '#' comment lines.
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(_) => break,
            None => return Err(Error::CorruptImage("pgm header truncated".into())),
        }
    }
    let start = *pos;
    while let Some(b) = bytes.get(*pos) {
        if b.is_ascii_digit() {
            *pos += 1;
        } else {
            break;
        }
    }
    if *pos == start {
        return Err(Error::CorruptImage("malformed pgm header".into()));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::CorruptImage("malformed pgm header".into()))
}

/// Writes a binary PGM ("P5", maxval 255).
pub fn save_pgm<P: AsRef<Path>>(img: &GrayImage, path: P) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    fs::write(path, out)?;
    Ok(())
}

/// Bilinear resize to `w` x `h` (pixel-center aligned, clamped sampling).
///
/// Resizing to the source dimensions returns a bitwise-identical copy.
pub fn resize(img: &GrayImage, w: u32, h: u32) -> Result<GrayImage> {
    if w == 0 || h == 0 {
        return Err(Error::ZeroDimension {
            width: w,
            height: h,
        });
    }
    if w == img.width && h == img.height {
        return Ok(img.clone());
    }
    let sx = img.width as f64 / w as f64;
    let sy = img.height as f64 / h as f64;
    let max_x = img.width as f64 - 1.0;
    let max_y = img.height as f64 - 1.0;
    let mut data = Vec::with_capacity(w as usize * h as usize);
    for y in 0..h {
        let src_y = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, max_y);
        let y0 = src_y.floor() as u32;
        let y1 = (y0 + 1).min(img.height - 1);
        let fy = src_y - y0 as f64;
        for x in 0..w {
            let src_x = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, max_x);
            let x0 = src_x.floor() as u32;
            let x1 = (x0 + 1).min(img.width - 1);
            let fx = src_x - x0 as f64;
            let top = img.get(x0, y0) as f64 * (1.0 - fx) + img.get(x1, y0) as f64 * fx;
            let bot = img.get(x0, y1) as f64 * (1.0 - fx) + img.get(x1, y1) as f64 * fx;
            let v = top * (1.0 - fy) + bot * fy;
            data.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::from_raw(w, h, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn from_raw_validates_dimensions() {
        assert!(matches!(
            GrayImage::from_raw(0, 5, vec![]),
            Err(Error::ZeroDimension { .. })
        ));
        assert!(matches!(
            GrayImage::from_raw(2, 2, vec![0; 3]),
            Err(Error::CorruptImage(_))
        ));
    }

    #[test]
    fn pgm_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        let img = GrayImage::constant(5, 5, 128).unwrap();
        save_pgm(&img, &path).unwrap();
        let back = load_grayscale(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn pgm_with_comments_parses() {
        let mut bytes = b"P5\n# a comment\n3 2\n# another\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        let img = parse_pgm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert_eq!(img.get(2, 1), 6);
    }

    #[test]
    fn truncated_pgm_is_rejected() {
        let bytes = b"P5\n4 4\n255\n\x00\x01".to_vec();
        assert!(matches!(parse_pgm(&bytes), Err(Error::CorruptImage(_))));
    }

    #[test]
    fn rgb_png_converts_by_channel_mean() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.png");
        let mut buf = image::RgbImage::new(2, 1);
        buf.put_pixel(0, 0, image::Rgb([30, 60, 90]));
        buf.put_pixel(1, 0, image::Rgb([10, 10, 11]));
        buf.save(&path).unwrap();
        let img = load_grayscale(&path).unwrap();
        assert_eq!(img.get(0, 0), 60);
        assert_eq!(img.get(1, 0), 10); // 31/3 rounds to 10
    }

    #[test]
    fn missing_file_reports_not_found() {
        assert!(matches!(
            load_grayscale("/nonexistent/finger.pgm"),
            Err(Error::FileNotFound(_))
        ));
    }

    #[test]
    fn garbage_bytes_are_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.png");
        fs::write(&path, b"not an image at all").unwrap();
        assert!(load_grayscale(&path).is_err());
    }

    #[test]
    fn resize_identity_is_bitwise() {
        let img = checkerboard(7, 5);
        let out = resize(&img, 7, 5).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn resize_constant_stays_constant() {
        let img = GrayImage::constant(200, 200, 77).unwrap();
        let out = resize(&img, 400, 400).unwrap();
        assert!(out.data().iter().all(|&v| v == 77));
        assert_eq!((out.width(), out.height()), (400, 400));
    }

    #[test]
    fn resize_zero_dimension_errors() {
        let img = GrayImage::constant(4, 4, 0).unwrap();
        assert!(matches!(
            resize(&img, 0, 4),
            Err(Error::ZeroDimension { .. })
        ));
    }

    #[test]
    fn resize_checkerboard_preserves_mean() {
        let img = checkerboard(300, 300);
        let out = resize(&img, 400, 400).unwrap();
        // Independent oracle: plain summation of both rasters.
        let mean_in = img.data().iter().map(|&v| v as f64).sum::<f64>()
            / (img.width() * img.height()) as f64;
        let mean_out = out.data().iter().map(|&v| v as f64).sum::<f64>()
            / (out.width() * out.height()) as f64;
        assert!(
            (mean_in - mean_out).abs() <= 1.0,
            "mean drifted: {mean_in} vs {mean_out}"
        );
    }

    fn checkerboard(w: u32, h: u32) -> GrayImage {
        let mut data = Vec::with_capacity(w as usize * h as usize);
        for y in 0..h {
            for x in 0..w {
                data.push(if (x + y) % 2 == 0 { 230 } else { 25 });
            }
        }
        GrayImage::from_raw(w, h, data).unwrap()
    }

    proptest! {
        #[test]
        fn resize_preserves_value_range(
            w in 1u32..24, h in 1u32..24, ow in 1u32..48, oh in 1u32..48,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<u8> = (0..w * h).map(|_| rng.random()).collect();
            let img = GrayImage::from_raw(w, h, data).unwrap();
            let (lo, hi) = img.min_max();
            let out = resize(&img, ow, oh).unwrap();
            let (olo, ohi) = out.min_max();
            prop_assert!(olo >= lo && ohi <= hi);
        }

        #[test]
        fn pgm_round_trip_random(w in 1u32..16, h in 1u32..16, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<u8> = (0..w * h).map(|_| rng.random()).collect();
            let img = GrayImage::from_raw(w, h, data).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("r.pgm");
            save_pgm(&img, &path).unwrap();
            prop_assert_eq!(load_grayscale(&path).unwrap(), img);
        }
    }
}
