use super::chroma::LogChromaticityImage;
use crate::error::{Error, Result};

/// Point clouds whose spread is below this fraction of their overall scale
/// are treated as a single point.
const COLLAPSE_RATIO: f64 = 1e-9;
const MAX_BINS: usize = 4096;
const ORIGIN_SHIFTS: usize = 8;

/// Candidate grid `0, step, 2*step, ...` below 180 degrees.
pub fn angle_grid(step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg > 0.0 && step_deg <= 90.0) {
        return Err(Error::param(format!("angle step must be in (0, 90], got {step_deg}")));
    }
    let n = (180.0 / step_deg - 1e-9).ceil() as usize;
    Ok((0..n).map(|i| i as f64 * step_deg).collect())
}

/// Entropy-minimising projection angle on a 1 degree grid.
pub fn best_invariant_direction(chroma: &LogChromaticityImage) -> Result<f64> {
    best_invariant_direction_on(chroma, &angle_grid(1.0)?)
}

/// Grid search over `angles`; ties go to the earliest (smallest) angle.
pub fn best_invariant_direction_on(chroma: &LogChromaticityImage, angles: &[f64]) -> Result<f64> {
    let scale = cloud_scale(chroma.values());
    if scale <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateChromaticity(
            "log-chromaticity is constant (grayscale frame?)".into(),
        ));
    }
    let mut best = (f64::INFINITY, f64::NAN);
    for &theta in angles {
        let mut proj = chroma.project(theta);
        let h = projection_entropy(&mut proj, scale);
        if h < best.0 {
            best = (h, theta);
        }
    }
    Ok(best.1)
}

/// RMS distance of the points from their centroid.
fn cloud_scale(values: &[[f64; 2]]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().fold([0.0, 0.0], |a, v| [a[0] + v[0], a[1] + v[1]]);
    let mean = [mean[0] / n, mean[1] / n];
    let ss: f64 = values.iter().map(|v| (v[0] - mean[0]).powi(2) + (v[1] - mean[1]).powi(2)).sum();
    (ss / n).sqrt()
}

/// Shannon entropy (nats) of the histogram of the 5th-95th percentile range
/// of `proj`, with Scott's-rule bin width. Reorders `proj`.
pub fn projection_entropy(proj: &mut [f64], scale: f64) -> f64 {
    let n = proj.len();
    if n < 2 {
        return 0.0;
    }
    let lo_idx = ((n - 1) as f64 * 0.05).round() as usize;
    let hi_idx = ((n - 1) as f64 * 0.95).round() as usize;
    let (_, hi, _) = proj.select_nth_unstable_by(hi_idx, f64::total_cmp);
    let hi = *hi;
    let (_, lo, _) = proj[..=hi_idx].select_nth_unstable_by(lo_idx, f64::total_cmp);
    let lo = *lo;
    let kept = &proj[lo_idx..=hi_idx];

    let m = kept.len() as f64;
    let mean = kept.iter().sum::<f64>() / m;
    let sigma = (kept.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m).sqrt();
    if sigma <= COLLAPSE_RATIO * scale || hi - lo <= COLLAPSE_RATIO * scale {
        return 0.0;
    }
    let width = 3.5 * sigma * m.powf(-1.0 / 3.0);
    let bins = (((hi - lo) / width).ceil() as usize).clamp(1, MAX_BINS) + 1;
    let mut counts = vec![0usize; bins];
    let mut total = 0.0;
    // Entropy averaged over evenly shifted bin origins, which removes most of
    // the dependence on where the bin edges happen to fall.
    for shift in 0..ORIGIN_SHIFTS {
        counts.iter_mut().for_each(|c| *c = 0);
        let origin = lo - width * shift as f64 / ORIGIN_SHIFTS as f64;
        for &x in kept {
            let b = ((x - origin) / width) as usize;
            counts[b.min(bins - 1)] += 1;
        }
        total += counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / m;
                -p * p.ln()
            })
            .sum::<f64>();
    }
    total / ORIGIN_SHIFTS as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::chroma::log_chromaticity;
    use image::{Rgb, RgbImage};

    #[test]
    fn grid_has_expected_length() {
        assert_eq!(angle_grid(1.0).unwrap().len(), 180);
        assert_eq!(angle_grid(0.5).unwrap().len(), 360);
        assert_eq!(angle_grid(7.0).unwrap().last(), Some(&175.0));
        assert!(angle_grid(0.0).is_err());
    }

    #[test]
    fn gray_image_is_degenerate() {
        let img = RgbImage::from_fn(8, 8, |x, _| Rgb([x as u8 * 20; 3]));
        let err = best_invariant_direction(&log_chromaticity(&img)).unwrap_err();
        assert!(matches!(err, Error::DegenerateChromaticity(_)));
    }

    #[test]
    fn points_on_a_line_collapse_along_its_normal() {
        for alpha in [0.0, 13.0, 57.0, 90.0, 144.0, 179.0] {
            let [c, s] = crate::prior::chroma::e_perp(alpha);
            let values = (0..400)
                .map(|i| {
                    let t = (i as f64 * 0.37).sin() * 0.8;
                    [0.2 * c - t * s, 0.2 * s + t * c]
                })
                .collect();
            let chroma = LogChromaticityImage::from_values(20, 20, values).unwrap();
            assert_eq!(best_invariant_direction(&chroma).unwrap(), alpha);
        }
    }

    #[test]
    fn entropy_of_collapsed_projection_is_zero() {
        let mut p = vec![0.5; 100];
        assert_eq!(projection_entropy(&mut p, 1.0), 0.0);
        let mut spread: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        assert!(projection_entropy(&mut spread, 1.0) > 1.0);
    }
}
