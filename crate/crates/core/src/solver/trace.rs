use std::io::Write;
use std::time::Duration;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// `||D - L - S - C||_F / ||D||_F` after the multiplier update.
    pub residual: f64,
    pub t_rank: usize,
    pub objective: f64,
    /// Penalty parameter used during this iteration.
    pub mu: f64,
    pub c_norm: f64,
    /// Wall-clock seconds since the solve started.
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseTimings {
    pub low_rank: Duration,
    pub group: Duration,
    pub illumination: Duration,
    pub dual: Duration,
    pub total: Duration,
}

/// Writes `iter,residual,t_rank,objective,mu,seconds,c_norm`. When
/// `with_timing` is false the `seconds` column is written as 0 so that
/// reruns produce identical files.
pub fn write_trace_csv(
    mut w: impl Write,
    trace: &[IterationRecord],
    with_timing: bool,
) -> std::io::Result<()> {
    writeln!(w, "iter,residual,t_rank,objective,mu,seconds,c_norm")?;
    for r in trace {
        let seconds = if with_timing { r.seconds } else { 0.0 };
        writeln!(
            w,
            "{},{:e},{},{:e},{:e},{},{:e}",
            r.iter, r.residual, r.t_rank, r.objective, r.mu, seconds, r.c_norm
        )?;
    }
    Ok(())
}
