//! Foreground masks from the sparse component, F-measure scoring, synthetic
//! sequences and timing.

mod bench;
mod mask;
mod metrics;
mod synth;

pub use bench::{benchmark, median, n3_sweep, with_slices, write_bench_csv, BenchReport, BenchRow};
pub use mask::{extract_mask, extract_masks, magnitude_images, otsu_bin, MaskSet, OTSU_BINS};
pub use metrics::{confusion, evaluate, f_measure, Counts, EvalReport, FrameEval, Scores, UNKNOWN_LABELS};
pub use synth::{generate_synthetic, SyntheticSequence, SyntheticSpec};

use crate::error::{Error, Result};
use crate::prior::ImageSequence;
use crate::tensor::Tensor3;

/// Masks from `sparse` scored against the ground truth carried by `seq`.
pub fn score_sequence(seq: &ImageSequence, sparse: &Tensor3, seconds_per_image: f64) -> Result<(MaskSet, EvalReport)> {
    let gts = seq.masks().ok_or_else(|| Error::param("sequence has no ground-truth masks"))?;
    let masks = extract_masks(sparse, seq.width(), seq.height())?;
    let report = evaluate(seq.names(), &masks.masks, gts, masks.threshold, seconds_per_image)?;
    Ok((masks, report))
}
