use std::io::Write;

use image::GrayImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CDnet label values that are neither foreground nor background.
pub const UNKNOWN_LABELS: [u8; 2] = [85, 170];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        match self.tp + self.fp {
            0 if self.fn_ == 0 => 1.0,
            0 => 0.0,
            n => self.tp as f64 / n as f64,
        }
    }

    pub fn recall(&self) -> f64 {
        match self.tp + self.fn_ {
            0 => 1.0,
            n => self.tp as f64 / n as f64,
        }
    }

    pub fn f_measure(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn scores(&self) -> Scores {
        Scores { precision: self.precision(), recall: self.recall(), f: self.f_measure() }
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts { tp: self.tp + o.tp, fp: self.fp + o.fp, fn_: self.fn_ + o.fn_ }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// Pixel counts of `pred` (foreground where >= 128) against `gt` (foreground
/// where >= 128, ignoring [`UNKNOWN_LABELS`]).
pub fn confusion(pred: &GrayImage, gt: &GrayImage) -> Result<Counts> {
    if pred.dimensions() != gt.dimensions() {
        return Err(Error::param(format!(
            "prediction is {:?} but ground truth is {:?}",
            pred.dimensions(),
            gt.dimensions()
        )));
    }
    let mut c = Counts::default();
    for (p, g) in pred.as_raw().iter().zip(gt.as_raw()) {
        if UNKNOWN_LABELS.contains(g) {
            continue;
        }
        match (*p >= 128, *g >= 128) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(c)
}

pub fn f_measure(pred: &GrayImage, gt: &GrayImage) -> Result<Scores> {
    Ok(confusion(pred, gt)?.scores())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameEval {
    pub name: String,
    #[serde(flatten)]
    pub counts: Counts,
    #[serde(flatten)]
    pub scores: Scores,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_frame: Vec<FrameEval>,
    /// Scores of the pooled counts over all frames.
    pub aggregate: Scores,
    pub totals: Counts,
    pub threshold: f64,
    pub seconds_per_image: f64,
}

pub fn evaluate(
    names: &[String],
    preds: &[GrayImage],
    gts: &[GrayImage],
    threshold: f64,
    seconds_per_image: f64,
) -> Result<EvalReport> {
    if preds.len() != gts.len() || names.len() != preds.len() {
        return Err(Error::param(format!(
            "{} names, {} predictions, {} ground-truth masks",
            names.len(),
            preds.len(),
            gts.len()
        )));
    }
    let counts: Vec<Counts> =
        preds.par_iter().zip(gts).map(|(p, g)| confusion(p, g)).collect::<Result<_>>()?;
    let totals = counts.iter().fold(Counts::default(), |a, &c| a + c);
    let per_frame = names
        .iter()
        .zip(&counts)
        .map(|(n, c)| FrameEval { name: n.clone(), counts: *c, scores: c.scores() })
        .collect();
    Ok(EvalReport { per_frame, aggregate: totals.scores(), totals, threshold, seconds_per_image })
}

impl EvalReport {
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "frame,tp,fp,fn,precision,recall,f_measure")?;
        for f in &self.per_frame {
            writeln!(
                w,
                "{},{},{},{},{:.6},{:.6},{:.6}",
                f.name, f.counts.tp, f.counts.fp, f.counts.fn_, f.scores.precision, f.scores.recall, f.scores.f
            )?;
        }
        Ok(())
    }
}
