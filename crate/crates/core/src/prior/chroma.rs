use image::RgbImage;

use crate::error::{Error, Result};

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const INV_SQRT6: f64 = 0.408_248_290_463_863;

/// Orthonormal basis of the plane orthogonal to `(1, 1, 1)`, one row per
/// coordinate of the 2-vector chromaticity.
pub const CHROMA_BASIS: [[f64; 3]; 2] = [
    [INV_SQRT2, -INV_SQRT2, 0.0],
    [INV_SQRT6, INV_SQRT6, -2.0 * INV_SQRT6],
];

/// Per-pixel 2-vector log-chromaticity, row-major (`y * width + x`).
#[derive(Clone, Debug, PartialEq)]
pub struct LogChromaticityImage {
    width: u32,
    height: u32,
    values: Vec<[f64; 2]>,
}

impl LogChromaticityImage {
    pub fn from_values(width: u32, height: u32, values: Vec<[f64; 2]>) -> Result<Self> {
        if values.len() != (width as usize) * (height as usize) || values.is_empty() {
            return Err(Error::param(format!(
                "{} chromaticity values do not fill a {width}x{height} image",
                values.len()
            )));
        }
        if values.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::param("chromaticity values must be finite"));
        }
        Ok(Self { width, height, values })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Scalar projection of every pixel onto `e_perp(theta_deg)`.
    pub fn project(&self, theta_deg: f64) -> Vec<f64> {
        let [c, s] = e_perp(theta_deg);
        self.values.iter().map(|v| v[0] * c + v[1] * s).collect()
    }
}

/// Unit vector at `theta_deg` degrees from the first basis axis; the
/// projection direction of the invariant image.
pub fn e_perp(theta_deg: f64) -> [f64; 2] {
    let t = theta_deg.to_radians();
    [t.cos(), t.sin()]
}

/// Log-chromaticity of one 8-bit pixel. Zero channels are lifted to 1 so the
/// logarithm stays finite; nonzero channels are used as-is, which keeps the
/// result exactly invariant to a common gain.
pub fn pixel_chromaticity(rgb: [u8; 3]) -> [f64; 2] {
    let l = rgb.map(|v| f64::from(v.max(1)).ln());
    log_rgb_to_chroma(l)
}

/// Projects a log-RGB triple onto the chromaticity plane. Subtracting the
/// mean log (the log of the geometric mean) is implicit since both basis
/// vectors are orthogonal to `(1, 1, 1)`.
pub fn log_rgb_to_chroma(l: [f64; 3]) -> [f64; 2] {
    let m = (l[0] + l[1] + l[2]) / 3.0;
    let rho = [l[0] - m, l[1] - m, l[2] - m];
    CHROMA_BASIS.map(|u| u[0] * rho[0] + u[1] * rho[1] + u[2] * rho[2])
}

/// Inverse of [`log_rgb_to_chroma`] up to the `(1, 1, 1)` component.
pub fn chroma_to_log_rgb(chi: [f64; 2]) -> [f64; 3] {
    let [u, v] = CHROMA_BASIS;
    [0, 1, 2].map(|c| chi[0] * u[c] + chi[1] * v[c])
}

pub fn log_chromaticity(frame: &RgbImage) -> LogChromaticityImage {
    let values = frame.pixels().map(|p| pixel_chromaticity(p.0)).collect();
    LogChromaticityImage { width: frame.width(), height: frame.height(), values }
}
