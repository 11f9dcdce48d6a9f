use image::{GrayImage, Luma, RgbImage};
use rayon::prelude::*;

use super::chroma::{log_chromaticity, LogChromaticityImage};
use super::cluster::DominantDirections;
use super::sequence::ImageSequence;
use crate::error::{Error, Result};
use crate::tensor::Tensor3;

const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// Intensity frame as a column in `[0, 1]`, row-major pixel order.
pub fn luma_column(frame: &RgbImage) -> Vec<f64> {
    frame
        .pixels()
        .map(|p| (LUMA[0] * f64::from(p[0]) + LUMA[1] * f64::from(p[1]) + LUMA[2] * f64::from(p[2])) / 255.0)
        .collect()
}

/// Projection of every pixel onto `e_perp(theta)` rescaled to `[0, 1]`
/// (constant images map to 0), row-major pixel order.
pub fn invariant_column(chroma: &LogChromaticityImage, theta_deg: f64) -> Vec<f64> {
    let mut v = chroma.project(theta_deg);
    rescale_unit(&mut v);
    v
}

pub fn invariant_representation(chroma: &LogChromaticityImage, theta_deg: f64) -> Result<GrayImage> {
    if !(0.0..180.0).contains(&theta_deg) {
        return Err(Error::param(format!("direction {theta_deg} outside [0, 180)")));
    }
    let col = invariant_column(chroma, theta_deg);
    Ok(column_to_image(&col, chroma.width(), chroma.height()))
}

/// Min-max rescale in place; a constant vector becomes all zeros.
pub fn rescale_unit(v: &mut [f64]) {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = hi - lo;
    if span > 0.0 && span.is_finite() {
        v.iter_mut().for_each(|x| *x = (*x - lo) / span);
    } else {
        v.iter_mut().for_each(|x| *x = 0.0);
    }
}

/// 8-bit image from a `[0, 1]` column (values clamped, row-major).
pub fn column_to_image(col: &[f64], width: u32, height: u32) -> GrayImage {
    GrayImage::from_fn(width, height, |x, y| {
        let v = col[(y * width + x) as usize];
        Luma([(v.clamp(0.0, 1.0) * 255.0).round() as u8])
    })
}

/// Columns of every frontal slice for one frame: luma, then one invariant
/// map per direction.
pub fn frame_columns(frame: &RgbImage, angles: &[f64]) -> Vec<Vec<f64>> {
    let mut cols = Vec::with_capacity(angles.len() + 1);
    cols.push(luma_column(frame));
    if !angles.is_empty() {
        let chroma = log_chromaticity(frame);
        cols.extend(angles.iter().map(|&a| invariant_column(&chroma, a)));
    }
    cols
}

/// Stacks intensity frames and their prior maps into a
/// `pixels x frames x (1 + directions)` tensor.
pub fn assemble_tensor(seq: &ImageSequence, dirs: &DominantDirections) -> Result<Tensor3> {
    if dirs.is_empty() {
        return Err(Error::param("at least one dominant direction is required"));
    }
    let (w, h) = (seq.width(), seq.height());
    if let Some(i) = seq.frames().iter().position(|f| f.dimensions() != (w, h)) {
        return Err(Error::param(format!("frame {i} has a different size")));
    }
    let n1 = seq.pixels();
    let n2 = seq.len();
    let n3 = dirs.len() + 1;
    let per_frame: Vec<Vec<Vec<f64>>> =
        seq.frames().par_iter().map(|f| frame_columns(f, &dirs.angles)).collect();
    let mut data = vec![0.0; n1 * n2 * n3];
    for (j, cols) in per_frame.iter().enumerate() {
        for (p, col) in cols.iter().enumerate() {
            let start = n1 * (j + n2 * p);
            data[start..start + n1].copy_from_slice(col);
        }
    }
    Tensor3::from_vec(n1, n2, n3, data)
}
