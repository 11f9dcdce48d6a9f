//! Inexact augmented Lagrangian solver for `D = L + S + C`.
//!
//! Minimises `||L||_TNN + lambda1 ||S||_{1,1,2} + lambda2 * penalty(C)` by
//! one proximal step per block followed by multiplier ascent and geometric
//! growth of the penalty parameter `mu`.

mod config;
mod trace;

pub use config::{SolverConfig, Variant};
pub use trace::{write_trace_csv, IterationRecord, PhaseTimings};

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::prox::{prox_group_l112, prox_ksupport_sq, prox_tnn, shrink};
use crate::tensor::{ksupport_norm_sq, norm_l1, norm_l112, Tensor3};

#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub low_rank: Tensor3,
    pub sparse: Tensor3,
    pub illumination: Tensor3,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    pub timings: PhaseTimings,
    /// Solver parameters with data-dependent defaults filled in.
    pub resolved: ResolvedParams,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResolvedParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub k: usize,
    pub rho: f64,
    pub mu0: f64,
    pub mu_max: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub variant: Variant,
}

impl DecompositionResult {
    pub fn final_residual(&self) -> f64 {
        self.trace.last().map_or(0.0, |r| r.residual)
    }

    pub fn final_t_rank(&self) -> usize {
        self.trace.last().map_or(0, |r| r.t_rank)
    }
}

/// Per-iteration t-rank of `L`, for rank-versus-iteration plots.
pub fn estimate_rank_trace(result: &DecompositionResult) -> Vec<usize> {
    result.trace.iter().map(|r| r.t_rank).collect()
}

/// Objective value of `(L, S, C)` under `params`. `nuclear` may carry a
/// precomputed tensor nuclear norm of `L`.
pub fn objective_value(
    nuclear: f64,
    sparse: &Tensor3,
    illumination: &Tensor3,
    params: &ResolvedParams,
) -> f64 {
    nuclear + params.lambda1 * norm_l112(sparse) + params.lambda2 * illumination_penalty(illumination, params)
}

fn illumination_penalty(c: &Tensor3, params: &ResolvedParams) -> f64 {
    match params.variant {
        Variant::NoC => 0.0,
        Variant::L1C => norm_l1(c),
        Variant::Tlisd => c
            .frontal_slices()
            .map(|s| ksupport_norm_sq(s, params.k).expect("k validated"))
            .sum(),
    }
}

pub fn decompose(d: &Tensor3, cfg: &SolverConfig) -> Result<DecompositionResult> {
    if !d.is_finite() {
        return Err(Error::param("input tensor contains non-finite values"));
    }
    let params = cfg.resolve(d.dims())?;
    let d_norm = d.frobenius_norm();

    let mut low_rank = Tensor3::zeros(d.n1(), d.n2(), d.n3())?;
    let mut sparse = low_rank.clone();
    let mut illumination = low_rank.clone();
    let mut dual = low_rank.clone();
    let mut mu = params.mu0;
    let mut trace = Vec::new();
    let mut timings = PhaseTimings::default();
    let mut converged = false;
    let started = Instant::now();

    for iter in 1..=params.max_iters {
        let inv_mu = 1.0 / mu;

        let t0 = Instant::now();
        let target = Tensor3::linear_combination(&[
            (1.0, d),
            (-1.0, &sparse),
            (-1.0, &illumination),
            (inv_mu, &dual),
        ]);
        let lr = prox_tnn(&target, inv_mu)?;
        low_rank = lr.tensor;
        let t1 = Instant::now();

        let target = Tensor3::linear_combination(&[
            (1.0, d),
            (-1.0, &low_rank),
            (-1.0, &illumination),
            (inv_mu, &dual),
        ]);
        sparse = prox_group_l112(&target, params.lambda1 * inv_mu)?;
        let t2 = Instant::now();

        if params.variant != Variant::NoC {
            let target = Tensor3::linear_combination(&[
                (1.0, d),
                (-1.0, &low_rank),
                (-1.0, &sparse),
                (inv_mu, &dual),
            ]);
            illumination = illumination_step(target, &params, inv_mu)?;
        }
        let t3 = Instant::now();

        let mut residual_sq = 0.0;
        for ((((y, dv), l), s), c) in dual
            .as_mut_slice()
            .iter_mut()
            .zip(d.as_slice())
            .zip(low_rank.as_slice())
            .zip(sparse.as_slice())
            .zip(illumination.as_slice())
        {
            let r = dv - l - s - c;
            residual_sq += r * r;
            *y += mu * r;
        }
        let t4 = Instant::now();
        timings.low_rank += t1 - t0;
        timings.group += t2 - t1;
        timings.illumination += t3 - t2;
        timings.dual += t4 - t3;

        let residual =
            if d_norm > 0.0 { residual_sq.sqrt() / d_norm } else { residual_sq.sqrt() };
        if !residual.is_finite() {
            return Err(Error::Numerical(format!("residual became non-finite at iteration {iter}")));
        }
        trace.push(IterationRecord {
            iter,
            residual,
            t_rank: lr.t_rank,
            objective: objective_value(lr.nuclear_norm, &sparse, &illumination, &params),
            mu,
            c_norm: illumination.frobenius_norm(),
            seconds: started.elapsed().as_secs_f64(),
        });

        if residual < params.tol {
            converged = true;
            break;
        }
        mu = (params.rho * mu).min(params.mu_max);
    }

    let iterations = trace.len();
    if !converged {
        log::warn!(
            "solver stopped after {iterations} iterations with residual {:.3e} (tol {:.1e})",
            trace.last().map_or(f64::NAN, |r| r.residual),
            params.tol
        );
    }
    timings.total = started.elapsed();
    Ok(DecompositionResult {
        low_rank,
        sparse,
        illumination,
        converged,
        iterations,
        trace,
        timings,
        resolved: params,
    })
}

fn illumination_step(mut target: Tensor3, params: &ResolvedParams, inv_mu: f64) -> Result<Tensor3> {
    let gamma = params.lambda2 * inv_mu;
    match params.variant {
        Variant::NoC => unreachable!("no illumination block"),
        Variant::L1C => {
            target.as_mut_slice().iter_mut().for_each(|x| *x = shrink(*x, gamma));
            Ok(target)
        }
        Variant::Tlisd => {
            let k = params.k;
            target
                .frontal_slices_mut()
                .collect::<Vec<_>>()
                .into_par_iter()
                .try_for_each(|slice| -> Result<()> {
                    let out = prox_ksupport_sq(slice, k, gamma)?;
                    slice.copy_from_slice(&out);
                    Ok(())
                })?;
            Ok(target)
        }
    }
}

impl PhaseTimings {
    /// Fraction of solver time spent in the FFT + SVD low-rank step.
    pub fn low_rank_share(&self) -> f64 {
        let busy = self.busy();
        if busy.is_zero() {
            0.0
        } else {
            self.low_rank.as_secs_f64() / busy.as_secs_f64()
        }
    }

    pub fn busy(&self) -> Duration {
        self.low_rank + self.group + self.illumination + self.dual
    }
}
