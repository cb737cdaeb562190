//! Image representation, correlation gating, difference masks and
//! foreground-object extraction.

use std::path::Path;

use crate::error::{Error, Result};

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Config("image dimensions must be >= 1".into()));
        }
        if data.len() != width * height {
            return Err(Error::Config(format!(
                "data length {} != {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: u8) {
        self.data[row * self.width + col] = v;
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Decode a raster file (PNG or the PNM family). Color input is reduced
    /// with the fixed luma weights 0.299 R + 0.587 G + 0.114 B.
    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path)?;
        Ok(match img {
            image::DynamicImage::ImageLuma8(g) => {
                let (w, h) = g.dimensions();
                GrayImage::new(w as usize, h as usize, g.into_raw())?
            }
            other => {
                let rgb = other.to_rgb8();
                let (w, h) = rgb.dimensions();
                let data = rgb
                    .pixels()
                    .map(|p| luma(p.0[0], p.0[1], p.0[2]))
                    .collect();
                GrayImage::new(w as usize, h as usize, data)?
            }
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let buf = image::GrayImage::from_raw(self.width as u32, self.height as u32, self.data.clone())
            .expect("dimensions validated at construction");
        buf.save(path)?;
        Ok(())
    }
}

/// Fixed BT.601 luma weighting, frozen for determinism across decoders.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round() as u8
}

/// Binary foreground mask, row-major, `true` = foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::Config(format!(
                "bits length {} != {}x{}",
                bits.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    /// Out-of-bounds coordinates read as background.
    #[inline]
    pub fn get_checked(&self, row: isize, col: isize) -> bool {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            false
        } else {
            self.bits[row as usize * self.width + col as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: bool) {
        self.bits[row * self.width + col] = v;
    }

    pub fn foreground_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn iter_foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (i / w, i % w))
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |r, c| if self.get(r, c) { 255 } else { 0 })
    }

    /// Read a raster as a mask: any nonzero intensity is foreground.
    pub fn load(path: &Path) -> Result<Self> {
        let g = GrayImage::load(path)?;
        Ok(Self::from_fn_gray(&g))
    }

    fn from_fn_gray(g: &GrayImage) -> Self {
        let bits = g.data().iter().map(|&v| v != 0).collect();
        Self { width: g.width(), height: g.height(), bits }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_gray().save(path)
    }
}

/// Pearson correlation coefficient of two equally sized images.
pub fn correlation(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    check_dims(a, b)?;
    let n = (a.width() * a.height()) as f64;
    let mean_a = a.data().iter().map(|&v| v as f64).sum::<f64>() / n;
    let mean_b = b.data().iter().map(|&v| v as f64).sum::<f64>() / n;
    let mut num = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.data().iter().zip(b.data()) {
        let da = x as f64 - mean_a;
        let db = y as f64 - mean_b;
        num += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::DegenerateImage);
    }
    Ok(num / (var_a.sqrt() * var_b.sqrt()))
}

/// Change gate: true iff the frame correlates with the background below
/// `r_threshold`. A constant image falls back to direct pixel comparison.
pub fn change_detected(background: &GrayImage, frame: &GrayImage, r_threshold: f64) -> Result<bool> {
    if !(-1.0 < r_threshold && r_threshold <= 1.0) {
        return Err(Error::Config(format!(
            "r_threshold {r_threshold} outside (-1, 1]"
        )));
    }
    match correlation(background, frame) {
        Ok(r) => Ok(r < r_threshold),
        Err(Error::DegenerateImage) => Ok(background.data() != frame.data()),
        Err(e) => Err(e),
    }
}

/// DIFF mask: foreground where |frame - background| exceeds the tolerance.
/// Tolerance 0 marks every non-zero difference.
pub fn diff_mask(background: &GrayImage, frame: &GrayImage, intensity_tolerance: u8) -> Result<BinaryMask> {
    check_dims(background, frame)?;
    let bits = background
        .data()
        .iter()
        .zip(frame.data())
        .map(|(&b, &f)| (f as i16 - b as i16).unsigned_abs() > intensity_tolerance as u16)
        .collect();
    BinaryMask::from_bits(background.width(), background.height(), bits)
}

fn check_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(a.width(), a.height(), b.width(), b.height()));
    }
    Ok(())
}

fn erode(mask: &BinaryMask, radius: usize) -> BinaryMask {
    square_filter(mask, radius, true)
}

fn dilate(mask: &BinaryMask, radius: usize) -> BinaryMask {
    square_filter(mask, radius, false)
}

// Square structuring element is separable: a horizontal then a vertical
// 1-D min (erode) or max (dilate) pass.
fn square_filter(mask: &BinaryMask, radius: usize, erode: bool) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let (w, h) = (mask.width(), mask.height());
    let r = radius as isize;
    let pass = |src: &BinaryMask, horizontal: bool| {
        let mut out = BinaryMask::new(w, h);
        for row in 0..h {
            for col in 0..w {
                let mut acc = erode;
                for d in -r..=r {
                    let (rr, cc) = if horizontal {
                        (row as isize, col as isize + d)
                    } else {
                        (row as isize + d, col as isize)
                    };
                    let v = src.get_checked(rr, cc);
                    if erode {
                        acc &= v;
                    } else {
                        acc |= v;
                    }
                }
                out.set(row, col, acc);
            }
        }
        out
    };
    let tmp = pass(mask, true);
    pass(&tmp, false)
}

/// Morphological opening (erode, dilate) then closing (dilate, erode) with
/// square structuring elements.
pub fn clean_mask(mask: &BinaryMask, open_radius: usize, close_radius: usize) -> BinaryMask {
    let opened = dilate(&erode(mask, open_radius), open_radius);
    erode(&dilate(&opened, close_radius), close_radius)
}

/// Per-component statistics from 8-connected labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStats {
    pub label: u32,
    pub area: usize,
    /// (min_row, min_col, max_row, max_col), inclusive.
    pub bbox: (usize, usize, usize, usize),
    pub centroid: (f64, f64),
}

impl ComponentStats {
    pub fn bbox_area(&self) -> usize {
        let (r0, c0, r1, c1) = self.bbox;
        (r1 - r0 + 1) * (c1 - c0 + 1)
    }
}

const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

fn label_components(mask: &BinaryMask) -> (Vec<u32>, Vec<ComponentStats>) {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    let mut stats = Vec::new();
    let mut next = 1u32;
    let mut stack = Vec::new();
    for row in 0..h {
        for col in 0..w {
            if !mask.get(row, col) || labels[row * w + col] != 0 {
                continue;
            }
            let label = next;
            next += 1;
            let mut area = 0usize;
            let mut bbox = (row, col, row, col);
            let mut sum = (0f64, 0f64);
            stack.push((row, col));
            labels[row * w + col] = label;
            while let Some((r, c)) = stack.pop() {
                area += 1;
                bbox.0 = bbox.0.min(r);
                bbox.1 = bbox.1.min(c);
                bbox.2 = bbox.2.max(r);
                bbox.3 = bbox.3.max(c);
                sum.0 += r as f64;
                sum.1 += c as f64;
                for (dr, dc) in NEIGHBORS_8 {
                    let (nr, nc) = (r as isize + dr, c as isize + dc);
                    if mask.get_checked(nr, nc) {
                        let idx = nr as usize * w + nc as usize;
                        if labels[idx] == 0 {
                            labels[idx] = label;
                            stack.push((nr as usize, nc as usize));
                        }
                    }
                }
            }
            stats.push(ComponentStats {
                label,
                area,
                bbox,
                centroid: (sum.0 / area as f64, sum.1 / area as f64),
            });
        }
    }
    (labels, stats)
}

/// 8-connected component labeling, components sorted by area descending
/// (ties by label, which follows raster order of discovery).
pub fn connected_components(mask: &BinaryMask) -> Vec<ComponentStats> {
    let (_, mut stats) = label_components(mask);
    stats.sort_by(|a, b| b.area.cmp(&a.area).then(a.label.cmp(&b.label)));
    stats
}

/// Keep only the largest component, or `None` if no component reaches
/// `min_area`. Also returns its stats and how many other components existed.
pub fn largest_object(mask: &BinaryMask, min_area: usize) -> Option<(BinaryMask, ComponentStats, usize)> {
    let (labels, stats) = label_components(mask);
    let best = stats
        .iter()
        .max_by(|a, b| a.area.cmp(&b.area).then(b.label.cmp(&a.label)))?
        .clone();
    if best.area < min_area {
        return None;
    }
    let bits = labels.iter().map(|&l| l == best.label).collect();
    let out = BinaryMask::from_bits(mask.width(), mask.height(), bits)
        .expect("label map matches mask dimensions");
    Some((out, best, stats.len() - 1))
}
