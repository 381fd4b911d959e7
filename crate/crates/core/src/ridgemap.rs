//! Binarization, skeletonization and the binary cleanup operators applied
//! between thinning and minutiae extraction.

use crate::imageio::GrayImage;

/// Per-pixel boolean raster; true marks a ridge pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width as usize * height as usize);
        Self {
            width,
            height,
            bits,
        }
    }

    /// Parses rows of '0'/'1' characters; handy for fixture patterns.
    pub fn from_strings(rows: &[&str]) -> Self {
        let height = rows.len() as u32;
        let width = rows[0].len() as u32;
        let mut bits = Vec::with_capacity((width * height) as usize);
        for row in rows {
            assert_eq!(row.len() as u32, width);
            for c in row.chars() {
                bits.push(c == '1');
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Out-of-bounds coordinates read as false.
    #[inline]
    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Eight neighbors in circular order starting east, counterclockwise in
    /// image coordinates: E, NE, N, NW, W, SW, S, SE.
    #[inline]
    pub fn neighbors(&self, x: i64, y: i64) -> [bool; 8] {
        [
            self.get(x + 1, y),
            self.get(x + 1, y - 1),
            self.get(x, y - 1),
            self.get(x - 1, y - 1),
            self.get(x - 1, y),
            self.get(x - 1, y + 1),
            self.get(x, y + 1),
            self.get(x + 1, y + 1),
        ]
    }

    #[inline]
    fn neighbor_count(&self, x: i64, y: i64) -> u32 {
        self.neighbors(x, y).iter().map(|&b| b as u32).sum()
    }

    /// Coordinates of the first all-true 2x2 block, if any.
    pub fn find_2x2_block(&self) -> Option<(u32, u32)> {
        for y in 0..self.height.saturating_sub(1) {
            for x in 0..self.width.saturating_sub(1) {
                let (xi, yi) = (x as i64, y as i64);
                if self.get(xi, yi)
                    && self.get(xi + 1, yi)
                    && self.get(xi, yi + 1)
                    && self.get(xi + 1, yi + 1)
                {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

/// Thresholding with dark-ridge polarity: a pixel is ridge when its
/// intensity is strictly below `threshold`. Background-masked pixels are
/// painted white upstream, so they always land on the false side.
pub fn binarize(img: &GrayImage, threshold: u8) -> BinaryImage {
    let bits = img.data().iter().map(|&v| v < threshold).collect();
    BinaryImage::from_bits(img.width(), img.height(), bits)
}

/// Zhang-Suen neighbor labels: P2..P9 clockwise from north.
#[inline]
fn zs_neighbors(b: &BinaryImage, x: i64, y: i64) -> [bool; 8] {
    [
        b.get(x, y - 1),     // P2 N
        b.get(x + 1, y - 1), // P3 NE
        b.get(x + 1, y),     // P4 E
        b.get(x + 1, y + 1), // P5 SE
        b.get(x, y + 1),     // P6 S
        b.get(x - 1, y + 1), // P7 SW
        b.get(x - 1, y),     // P8 W
        b.get(x - 1, y - 1), // P9 NW
    ]
}

/// Count of false->true transitions around the P2..P9 ring.
#[inline]
fn zs_transitions(n: &[bool; 8]) -> u32 {
    let mut count = 0;
    for i in 0..8 {
        if !n[i] && n[(i + 1) % 8] {
            count += 1;
        }
    }
    count
}

/// Iterative two-subiteration boundary peeling (Zhang-Suen) until a fixed
/// point, followed by a connectivity-safe cleanup of any residual 2x2
/// blocks so the skeleton is strictly one pixel wide.
pub fn thin(bin: &BinaryImage) -> BinaryImage {
    let mut img = bin.clone();
    let mut to_delete: Vec<(u32, u32)> = Vec::new();
    loop {
        let mut changed = false;
        for pass in 0..2 {
            to_delete.clear();
            for y in 0..img.height as i64 {
                for x in 0..img.width as i64 {
                    if !img.get(x, y) {
                        continue;
                    }
                    let n = zs_neighbors(&img, x, y);
                    let b: u32 = n.iter().map(|&v| v as u32).sum();
                    if !(2..=6).contains(&b) || zs_transitions(&n) != 1 {
                        continue;
                    }
                    let (p2, p4, p6, p8) = (n[0], n[2], n[4], n[6]);
                    let ok = if pass == 0 {
                        !(p2 && p4 && p6) && !(p4 && p6 && p8)
                    } else {
                        !(p2 && p4 && p8) && !(p2 && p6 && p8)
                    };
                    if ok {
                        to_delete.push((x as u32, y as u32));
                    }
                }
            }
            for &(x, y) in &to_delete {
                img.set(x, y, false);
            }
            changed |= !to_delete.is_empty();
        }
        if !changed {
            break;
        }
    }
    // Residual 2x2 blocks (staircase corners) are dissolved by deleting
    // pixels whose true neighbors form a single contiguous arc, which keeps
    // each component connected.
    loop {
        let mut removed = false;
        'scan: for y in 0..img.height as i64 {
            for x in 0..img.width as i64 {
                if !(img.get(x, y)
                    && img.get(x + 1, y)
                    && img.get(x, y + 1)
                    && img.get(x + 1, y + 1))
                {
                    continue;
                }
                for (px, py) in [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)] {
                    let n = zs_neighbors(&img, px, py);
                    if zs_transitions(&n) == 1 {
                        img.set(px as u32, py as u32, false);
                        removed = true;
                        break 'scan;
                    }
                }
            }
        }
        if !removed {
            break;
        }
    }
    img
}

/// Removes isolated ridge pixels (no true 8-neighbor).
pub fn clean(bin: &BinaryImage) -> BinaryImage {
    let mut out = bin.clone();
    for y in 0..bin.height as i64 {
        for x in 0..bin.width as i64 {
            if bin.get(x, y) && bin.neighbor_count(x, y) == 0 {
                out.set(x as u32, y as u32, false);
            }
        }
    }
    out
}

/// Peels endpoint pixels (exactly one true 8-neighbor) for `n` iterations.
///
/// Endpoints are marked against the image state at the start of each
/// iteration and then swept in scan order; a marked pixel whose last
/// neighbor was already swept away has become isolated and is spared, since
/// isolated pixels are clean's business.
pub fn spur(bin: &BinaryImage, n: u32) -> BinaryImage {
    let mut img = bin.clone();
    let mut marks: Vec<(u32, u32)> = Vec::new();
    for _ in 0..n {
        marks.clear();
        for y in 0..img.height as i64 {
            for x in 0..img.width as i64 {
                if img.get(x, y) && img.neighbor_count(x, y) == 1 {
                    marks.push((x as u32, y as u32));
                }
            }
        }
        if marks.is_empty() {
            break;
        }
        let mut changed = false;
        for &(x, y) in &marks {
            if img.neighbor_count(x as i64, y as i64) > 0 {
                img.set(x, y, false);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    img
}

/// Removes the center pixel of every exact H-pattern: full top and bottom
/// rows with lone center (or the 90-degree rotation). No other pixel is
/// touched.
pub fn hbreak(bin: &BinaryImage) -> BinaryImage {
    let mut out = bin.clone();
    for y in 0..bin.height as i64 {
        for x in 0..bin.width as i64 {
            if !bin.get(x, y) {
                continue;
            }
            let n = bin.get(x, y - 1);
            let s = bin.get(x, y + 1);
            let e = bin.get(x + 1, y);
            let w = bin.get(x - 1, y);
            let ne = bin.get(x + 1, y - 1);
            let nw = bin.get(x - 1, y - 1);
            let se = bin.get(x + 1, y + 1);
            let sw = bin.get(x - 1, y + 1);
            let horizontal_h = nw && n && ne && !w && !e && sw && s && se;
            let vertical_h = nw && w && sw && !n && !s && ne && e && se;
            if horizontal_h || vertical_h {
                out.set(x as u32, y as u32, false);
            }
        }
    }
    out
}

/// Labels 8-connected components; returns (label per pixel, component count).
/// Label 0 means background.
pub fn connected_components(bin: &BinaryImage) -> (Vec<u32>, u32) {
    let w = bin.width as usize;
    let h = bin.height as usize;
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !bin.get(x as i64, y as i64) || labels[y * w + x] != 0 {
                continue;
            }
            next += 1;
            stack.push((x, y));
            labels[y * w + x] = next;
            while let Some((cx, cy)) = stack.pop() {
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let nx = cx as i64 + dx;
                        let ny = cy as i64 + dy;
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let ni = ny as usize * w + nx as usize;
                        if bin.get(nx, ny) && labels[ni] == 0 {
                            labels[ni] = next;
                            stack.push((nx as usize, ny as usize));
                        }
                    }
                }
            }
        }
    }
    (labels, next)
}
