//! Moving-object detection in time-lapse image sequences under discontinuous
//! illumination change.
//!
//! The pipeline has two halves. [`prior`] turns an RGB sequence into a 3-way
//! tensor whose first frontal slice holds the intensity frames and whose
//! remaining slices hold illumination-invariant prior maps, one per dominant
//! log-chromaticity direction. [`solver`] then splits that tensor into a
//! low-rank background `L`, a group-sparse foreground `S` and an
//! illumination-change component `C` penalised by the squared k-support norm.
//! [`eval`] turns `S` into binary masks and scores them.

pub mod error;
pub mod eval;
pub mod prior;
pub mod prox;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
pub use prior::{DominantDirections, ImageSequence, LogChromaticityImage, PriorConfig};

pub use solver::{decompose, DecompositionResult, SolverConfig, Variant};
pub use tensor::{FourierTensor3, Tensor3};
