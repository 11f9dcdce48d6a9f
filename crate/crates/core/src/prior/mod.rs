//! Illumination-invariant prior maps and assembly of the input tensor.
//!
//! Every frame gets its own entropy-minimising invariant direction; the
//! directions are clustered and each well-supported cluster contributes one
//! prior slice, computed for all frames.

mod assemble;
mod chroma;
mod cluster;
mod direction;
mod sequence;

pub use assemble::{
    assemble_tensor, column_to_image, frame_columns, invariant_column, invariant_representation, luma_column,
    rescale_unit,
};
pub use chroma::{
    chroma_to_log_rgb, e_perp, log_chromaticity, log_rgb_to_chroma, pixel_chromaticity, LogChromaticityImage,
    CHROMA_BASIS,
};
pub use cluster::{
    dominant_directions, dominant_directions_with, kmeans_1d, min_support, wrap_angle, ClusterConfig,
    DominantDirections, KMeans1d,
};
pub use direction::{angle_grid, best_invariant_direction, best_invariant_direction_on, projection_entropy};
pub use sequence::{load_ground_truth, ImageSequence, GROUND_TRUTH_DIR};

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorConfig {
    /// Upper bound on the number of direction clusters.
    pub kmeans_k: usize,
    /// Fraction of frames a cluster needs to become a prior slice.
    pub support_fraction: f64,
    /// Grid step of the direction search, degrees.
    pub angle_step: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Dominant directions closer than this many degrees are merged.
    pub merge_tolerance: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        let c = ClusterConfig::default();
        Self {
            kmeans_k: c.k,
            support_fraction: c.support_fraction,
            angle_step: 1.0,
            restarts: c.restarts,
            seed: c.seed,
            merge_tolerance: c.merge_tolerance,
        }
    }
}

impl PriorConfig {
    pub fn cluster(&self) -> ClusterConfig {
        ClusterConfig {
            k: self.kmeans_k,
            support_fraction: self.support_fraction,
            restarts: self.restarts,
            seed: self.seed,
            merge_tolerance: self.merge_tolerance,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Priors {
    pub tensor: Tensor3,
    pub directions: DominantDirections,
    /// Frames whose own direction could not be estimated and were given the
    /// median of the others.
    pub degenerate_frames: Vec<usize>,
}

/// Best direction of every frame. Degenerate frames get the median of the
/// rest (with a warning); it is an error if every frame is degenerate.
pub fn per_image_directions(seq: &ImageSequence, angle_step: f64) -> Result<(Vec<f64>, Vec<usize>)> {
    let grid = angle_grid(angle_step)?;
    let raw: Vec<Result<f64>> = seq
        .frames()
        .par_iter()
        .map(|f| best_invariant_direction_on(&log_chromaticity(f), &grid))
        .collect();
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for (j, r) in raw.iter().enumerate() {
        match r {
            Ok(a) => good.push(*a),
            Err(Error::DegenerateChromaticity(_)) => bad.push(j),
            Err(e) => return Err(Error::Numerical(e.to_string())),
        }
    }
    if good.is_empty() {
        return Err(Error::DegenerateChromaticity(
            "no frame has usable chromaticity (grayscale sequence?)".into(),
        ));
    }
    let median = {
        let mut s = good.clone();
        s.sort_by(f64::total_cmp);
        s[(s.len() - 1) / 2]
    };
    for &j in &bad {
        log::warn!("frame {} ({}) has degenerate chromaticity; using median direction {median}", j, seq.names()[j]);
    }
    let angles = raw.into_iter().map(|r| r.unwrap_or(median)).collect();
    Ok((angles, bad))
}

pub fn build_priors(seq: &ImageSequence, cfg: &PriorConfig) -> Result<Priors> {
    let (angles, degenerate_frames) = per_image_directions(seq, cfg.angle_step)?;
    let directions = dominant_directions_with(&angles, &cfg.cluster())?;
    let tensor = assemble_tensor(seq, &directions)?;
    Ok(Priors { tensor, directions, degenerate_frames })
}

/// JSON sidecar describing how the prior slices were chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorSummary {
    pub names: Vec<String>,
    pub width: u32,
    pub height: u32,
    pub tensor_dims: [usize; 3],
    pub degenerate_frames: Vec<usize>,
    pub config: PriorConfig,
    #[serde(flatten)]
    pub directions: DominantDirections,
}

impl PriorSummary {
    pub fn new(seq: &ImageSequence, priors: &Priors, cfg: &PriorConfig) -> Self {
        let (n1, n2, n3) = priors.tensor.dims();
        Self {
            names: seq.names().to_vec(),
            width: seq.width(),
            height: seq.height(),
            tensor_dims: [n1, n2, n3],
            degenerate_frames: priors.degenerate_frames.clone(),
            config: *cfg,
            directions: priors.directions.clone(),
        }
    }
}

/// Writes `prior_<p>/<name>.png` for every prior slice `p >= 1`.
pub fn dump_prior_maps(dir: impl AsRef<Path>, seq: &ImageSequence, tensor: &Tensor3) -> Result<()> {
    let dir = dir.as_ref();
    for p in 1..tensor.n3() {
        let sub = dir.join(format!("prior_{p}"));
        fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
        for (j, name) in seq.names().iter().enumerate() {
            let path = sub.join(format!("{name}.png"));
            column_to_image(tensor.column(j, p), seq.width(), seq.height())
                .save(&path)
                .map_err(|source| Error::Image { path, source })?;
        }
    }
    Ok(())
}
