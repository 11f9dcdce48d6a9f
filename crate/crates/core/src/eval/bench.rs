use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{decompose, SolverConfig};
use crate::tensor::Tensor3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub repeat: usize,
    pub n3: usize,
    pub iterations: usize,
    pub seconds: f64,
    pub seconds_per_iteration: f64,
    pub seconds_per_image: f64,
    /// Fraction of solver time in the FFT + SVD step.
    pub low_rank_share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub median_per_iteration: f64,
    pub median_per_image: f64,
    pub median_low_rank_share: f64,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Runs the solver `repeats` times on `d` and reports wall-clock statistics.
pub fn benchmark(d: &Tensor3, cfg: &SolverConfig, repeats: usize) -> Result<BenchReport> {
    if repeats == 0 {
        return Err(Error::param("benchmark needs at least one repeat"));
    }
    let mut rows = Vec::with_capacity(repeats);
    for repeat in 0..repeats {
        let res = decompose(d, cfg)?;
        let seconds = res.timings.total.as_secs_f64();
        rows.push(BenchRow {
            repeat,
            n3: d.n3(),
            iterations: res.iterations,
            seconds,
            seconds_per_iteration: seconds / res.iterations.max(1) as f64,
            seconds_per_image: seconds / d.n2() as f64,
            low_rank_share: res.timings.low_rank_share(),
        });
    }
    Ok(summarise(rows))
}

fn summarise(rows: Vec<BenchRow>) -> BenchReport {
    let col = |f: fn(&BenchRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    BenchReport {
        median_per_iteration: median(&col(|r| r.seconds_per_iteration)),
        median_per_image: median(&col(|r| r.seconds_per_image)),
        median_low_rank_share: median(&col(|r| r.low_rank_share)),
        rows,
    }
}

/// Tensor with `n3` frontal slices taken cyclically from `d`.
pub fn with_slices(d: &Tensor3, n3: usize) -> Result<Tensor3> {
    let slices: Vec<Vec<f64>> = (0..n3).map(|p| d.frontal(p % d.n3()).to_vec()).collect();
    Tensor3::from_slices(d.n1(), d.n2(), &slices)
}

/// One benchmark per entry of `sizes`, each with `n3` slices built by
/// [`with_slices`].
pub fn n3_sweep(d: &Tensor3, cfg: &SolverConfig, repeats: usize, sizes: &[usize]) -> Result<Vec<BenchReport>> {
    sizes.iter().map(|&n3| benchmark(&with_slices(d, n3)?, cfg, repeats)).collect()
}

pub fn write_bench_csv(mut w: impl Write, reports: &[BenchReport]) -> std::io::Result<()> {
    writeln!(w, "repeat,n3,iterations,seconds,seconds_per_iteration,seconds_per_image,low_rank_share")?;
    for r in reports.iter().flat_map(|r| &r.rows) {
        writeln!(
            w,
            "{},{},{},{:.6},{:.6e},{:.6e},{:.4}",
            r.repeat, r.n3, r.iterations, r.seconds, r.seconds_per_iteration, r.seconds_per_image, r.low_rank_share
        )?;
    }
    Ok(())
}
