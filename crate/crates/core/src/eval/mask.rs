use image::{GrayImage, Luma};

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

pub const OTSU_BINS: usize = 256;

/// Binary foreground masks for every frame plus the threshold that made
/// them, on the `[0, 1]` normalised-magnitude scale.
#[derive(Clone, Debug)]
pub struct MaskSet {
    pub masks: Vec<GrayImage>,
    pub threshold: f64,
}

/// Otsu threshold of `values` (expected in `[0, 1]`) on a fixed 256-bin
/// histogram. Returns the index of the last background bin; ties go to the
/// lowest bin.
pub fn otsu_bin(values: &[f64]) -> usize {
    let mut hist = [0u64; OTSU_BINS];
    for &v in values {
        hist[bin_of(v)] += 1;
    }
    let total = values.len() as f64;
    let weighted: f64 = hist.iter().enumerate().map(|(b, &c)| b as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let (mut best, mut best_var) = (0, -1.0);
    for (b, &c) in hist.iter().enumerate().take(OTSU_BINS - 1) {
        w0 += c as f64;
        sum0 += b as f64 * c as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (weighted - sum0) / w1;
        let var = w0 * w1 * (m0 - m1).powi(2);
        if var > best_var {
            best_var = var;
            best = b;
        }
    }
    best
}

#[inline]
fn bin_of(v: f64) -> usize {
    ((v * OTSU_BINS as f64) as usize).min(OTSU_BINS - 1)
}

/// Thresholds `|S(:, j, 0)|` for all frames with one Otsu threshold fitted to
/// the whole sequence after normalising by the sequence maximum.
pub fn extract_masks(s: &Tensor3, width: u32, height: u32) -> Result<MaskSet> {
    if (width as usize) * (height as usize) != s.n1() {
        return Err(Error::param(format!("{}x{} frames do not have {} pixels", width, height, s.n1())));
    }
    let first = s.frontal(0);
    let max = first.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let blank = || (0..s.n2()).map(|_| GrayImage::new(width, height)).collect();
    if max <= 0.0 || !max.is_finite() {
        return Ok(MaskSet { masks: blank(), threshold: 1.0 });
    }
    let normalised: Vec<f64> = first.iter().map(|v| v.abs() / max).collect();
    let cut = otsu_bin(&normalised);
    let masks = normalised
        .chunks(s.n1())
        .map(|col| {
            GrayImage::from_fn(width, height, |x, y| {
                let fg = bin_of(col[(y * width + x) as usize]) > cut;
                Luma([if fg { 255 } else { 0 }])
            })
        })
        .collect();
    Ok(MaskSet { masks, threshold: (cut + 1) as f64 / OTSU_BINS as f64 })
}

pub fn extract_mask(s: &Tensor3, j: usize, width: u32, height: u32) -> Result<GrayImage> {
    if j >= s.n2() {
        return Err(Error::param(format!("frame {j} out of range (n2 = {})", s.n2())));
    }
    Ok(extract_masks(s, width, height)?.masks.swap_remove(j))
}

/// `|T(:, j, 0)|` rescaled by its sequence-wide maximum, as 8-bit images.
pub fn magnitude_images(t: &Tensor3, width: u32, height: u32) -> Vec<GrayImage> {
    let first = t.frontal(0);
    let max = first.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    first
        .chunks(t.n1())
        .map(|col| {
            GrayImage::from_fn(width, height, |x, y| {
                Luma([(col[(y * width + x) as usize].abs() * scale).round().min(255.0) as u8])
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sparse_gives_empty_masks() {
        let s = Tensor3::zeros(6, 3, 2).unwrap();
        let m = extract_masks(&s, 3, 2).unwrap();
        assert!(m.masks.iter().all(|im| im.pixels().all(|p| p[0] == 0)));
    }

    #[test]
    fn single_tube_gives_single_pixel() {
        let mut s = Tensor3::zeros(6, 3, 2).unwrap();
        s.set(4, 1, 0, -1.0);
        s.set(4, 1, 1, 1.0);
        let m = extract_masks(&s, 3, 2).unwrap();
        for (j, im) in m.masks.iter().enumerate() {
            let on: Vec<(u32, u32)> = im.enumerate_pixels().filter(|p| p.2[0] == 255).map(|p| (p.0, p.1)).collect();
            assert_eq!(on, if j == 1 { vec![(1, 1)] } else { vec![] });
        }
        assert!(m.threshold > 0.0 && m.threshold < 1.0);
    }

    #[test]
    fn otsu_splits_bimodal_data() {
        let mut v = vec![0.1; 50];
        v.extend(vec![0.8; 50]);
        let b = otsu_bin(&v);
        assert!((0.1..0.8).contains(&((b + 1) as f64 / 256.0)));
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(extract_masks(&Tensor3::zeros(6, 2, 1).unwrap(), 4, 2).is_err());
        assert!(extract_mask(&Tensor3::zeros(6, 2, 1).unwrap(), 2, 3, 2).is_err());
    }
}
