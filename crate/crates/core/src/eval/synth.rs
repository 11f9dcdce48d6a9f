//! Synthetic time-lapse sequences with planted foreground and illumination.
//!
//! Pixels are built in log-RGB space: a static background of flat material
//! patches (with an intensity-only texture), foreground squares of random
//! colour placed independently in every frame, a per-frame global gain and
//! smooth shadow fields. Shadows darken and move the chromaticity along a
//! fixed direction, so projecting onto the perpendicular of that direction
//! removes them.

use image::{GrayImage, Luma, Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::super::prior::{chroma_to_log_rgb, e_perp, ImageSequence};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub width: u32,
    pub height: u32,
    pub frames: usize,
    /// Side of the square background material patches, in pixels.
    pub patch: u32,
    /// Number of distinct background materials.
    pub materials: usize,
    /// Inclusive range of unlit 8-bit channel values of the background
    /// materials.
    pub albedo: (f64, f64),
    /// Same for foreground objects.
    pub object_albedo: (f64, f64),
    /// Amplitude of the static intensity texture (log units).
    pub texture: f64,
    pub objects: usize,
    /// Inclusive range of the square object side, in pixels.
    pub object_size: (u32, u32),
    /// Per-frame gain is `exp(U(-gain_spread, gain_spread))`.
    pub gain_spread: f64,
    /// Shadow blobs per frame.
    pub shadows: usize,
    /// Inclusive range of shadow blob radius as a fraction of the image side.
    pub shadow_radius: (f64, f64),
    /// Log-intensity drop at full shadow.
    pub shadow_depth: f64,
    /// Chromaticity shift at full shadow (log units along the illumination
    /// direction).
    pub shadow_tint: f64,
    /// Width of the soft shadow edge as a fraction of the radius.
    pub shadow_softness: f64,
    /// Invariant projection angles (degrees); frame `j` uses
    /// `invariant_angles[j % len]`. Illumination moves the chromaticity
    /// along the perpendicular direction.
    pub invariant_angles: Vec<f64>,
    /// Standard deviation of additive noise, in 8-bit levels.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            width: 64,
            height: 64,
            frames: 40,
            patch: 16,
            materials: 4,
            albedo: (90.0, 200.0),
            object_albedo: (20.0, 70.0),
            texture: 0.05,
            objects: 2,
            object_size: (12, 16),
            gain_spread: 0.15,
            shadows: 2,
            shadow_radius: (0.25, 0.45),
            shadow_depth: 0.5,
            shadow_tint: 0.8,
            shadow_softness: 0.5,
            invariant_angles: vec![20.0],
            noise: 0.5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticSequence {
    /// Frames with their ground-truth masks attached.
    pub sequence: ImageSequence,
    /// Per-frame log-intensity offset of the illumination (gain minus
    /// shadow), row-major.
    pub illumination: Vec<Vec<f64>>,
    /// Per-frame shadow strength in `[0, 1]`, row-major.
    pub shadow: Vec<Vec<f64>>,
    /// Invariant angle used for each frame.
    pub frame_angles: Vec<f64>,
}

impl SyntheticSequence {
    pub fn masks(&self) -> &[GrayImage] {
        self.sequence.masks().expect("synthetic sequences carry masks")
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let px = f64::from(self.width) * f64::from(self.height);
        if self.width == 0 || self.height == 0 || self.frames < 2 {
            return Err(Error::param("synthetic sequences need a non-empty frame size and >= 2 frames"));
        }
        if self.patch == 0 || self.materials == 0 {
            return Err(Error::param("need at least one material and a positive patch size"));
        }
        let (lo, hi) = self.object_size;
        if self.objects > 0 && (lo == 0 || lo > hi || hi > self.width.min(self.height)) {
            return Err(Error::param(format!("invalid object size range {lo}..={hi}")));
        }
        let fg = self.objects as f64 * f64::from(hi) * f64::from(hi);
        if fg > 0.2 * px {
            return Err(Error::param(format!(
                "up to {fg} foreground pixels exceeds 20% of the {px}-pixel frame"
            )));
        }
        let (r0, r1) = self.shadow_radius;
        if self.shadows > 0 && !(r0 > 0.0 && r0 <= r1) {
            return Err(Error::param("invalid shadow radius range"));
        }
        if self.invariant_angles.is_empty() {
            return Err(Error::param("need at least one invariant angle"));
        }
        for (a0, a1) in [self.albedo, self.object_albedo] {
            if !(a0 >= 1.0 && a0 <= a1 && a1 <= 255.0) {
                return Err(Error::param("albedo ranges must lie within 1..=255"));
            }
        }
        let finite = [self.texture, self.gain_spread, self.shadow_depth, self.shadow_tint, self.shadow_softness, self.noise];
        if finite.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::param("synthetic amplitudes must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Log-RGB colour with every channel in the albedo range.
fn random_material(rng: &mut ChaCha8Rng, albedo: (f64, f64)) -> [f64; 3] {
    [0; 3].map(|_| rng.random_range(albedo.0.ln()..=albedo.1.ln()))
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticSequence> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let n = (w * h) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let materials: Vec<[f64; 3]> = (0..spec.materials).map(|_| random_material(&mut rng, spec.albedo)).collect();
    let patches_x = w.div_ceil(spec.patch);
    let patches_y = h.div_ceil(spec.patch);
    let layout: Vec<usize> =
        (0..patches_x * patches_y).map(|_| rng.random_range(0..spec.materials)).collect();
    let phase = [rng.random_range(0.0..6.3), rng.random_range(0.0..6.3)];
    let background: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let (x, y) = ((i as u32) % w, (i as u32) / w);
            let m = materials[layout[((y / spec.patch) * patches_x + x / spec.patch) as usize]];
            let t = spec.texture * ((x as f64 * 0.71 + phase[0]).sin() * (y as f64 * 0.53 + phase[1]).cos());
            m.map(|c| c + t)
        })
        .collect();

    let noise = Normal::new(0.0, spec.noise.max(f64::MIN_POSITIVE)).expect("valid sigma");
    let side = f64::from(w.min(h));
    let mut frames = Vec::with_capacity(spec.frames);
    let mut masks = Vec::with_capacity(spec.frames);
    let mut illumination = Vec::with_capacity(spec.frames);
    let mut shadow_fields = Vec::with_capacity(spec.frames);
    let mut frame_angles = Vec::with_capacity(spec.frames);

    for j in 0..spec.frames {
        let theta = spec.invariant_angles[j % spec.invariant_angles.len()];
        frame_angles.push(theta);
        // Illumination moves chromaticity along e, perpendicular to e_perp(theta).
        let e2 = e_perp(theta + 90.0);
        let e3 = chroma_to_log_rgb(e2);

        let mut pixels = background.clone();
        let mut mask = GrayImage::new(w, h);
        for _ in 0..spec.objects {
            let s = rng.random_range(spec.object_size.0..=spec.object_size.1);
            let x0 = rng.random_range(0..=w - s);
            let y0 = rng.random_range(0..=h - s);
            let colour = random_material(&mut rng, spec.object_albedo);
            for y in y0..y0 + s {
                for x in x0..x0 + s {
                    pixels[(y * w + x) as usize] = colour;
                    mask.put_pixel(x, y, Luma([255]));
                }
            }
        }

        let gain = if spec.gain_spread > 0.0 { rng.random_range(-spec.gain_spread..spec.gain_spread) } else { 0.0 };
        let blobs: Vec<(f64, f64, f64)> = (0..spec.shadows)
            .map(|_| {
                let r = rng.random_range(spec.shadow_radius.0..=spec.shadow_radius.1) * side;
                (rng.random_range(0.0..f64::from(w)), rng.random_range(0.0..f64::from(h)), r)
            })
            .collect();
        let shadow: Vec<f64> = (0..n)
            .map(|i| {
                let (x, y) = (((i as u32) % w) as f64 + 0.5, ((i as u32) / w) as f64 + 0.5);
                let s: f64 = blobs
                    .iter()
                    .map(|&(cx, cy, r)| {
                        let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
                        let edge = (spec.shadow_softness * r).max(1e-9);
                        smoothstep((r - d) / edge + 0.5)
                    })
                    .sum();
                s.min(1.0)
            })
            .collect();

        let frame = RgbImage::from_fn(w, h, |x, y| {
            let i = (y * w + x) as usize;
            let s = shadow[i];
            let mut rgb = [0u8; 3];
            for c in 0..3 {
                let l = pixels[i][c] + gain - s * spec.shadow_depth + s * spec.shadow_tint * e3[c];
                let mut v = l.exp();
                if spec.noise > 0.0 {
                    v += noise.sample(&mut rng);
                }
                rgb[c] = v.round().clamp(0.0, 255.0) as u8;
            }
            Rgb(rgb)
        });
        illumination.push(shadow.iter().map(|s| gain - s * spec.shadow_depth).collect());
        shadow_fields.push(shadow);
        frames.push(frame);
        masks.push(mask);
    }

    let names = (0..spec.frames).map(|j| format!("frame_{j:04}")).collect();
    Ok(SyntheticSequence {
        sequence: ImageSequence::new(frames, names, Some(masks))?,
        illumination,
        shadow: shadow_fields,
        frame_angles,
    })
}

/// Cubic ramp from 0 (t <= 0) to 1 (t >= 1).
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}
