use nalgebra::DMatrix;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::{fft_mode3, Tensor3};
use crate::error::{Error, Result};

/// Sum of the Euclidean norms of all tubes `(i, j, :)`.
pub fn norm_l112(s: &Tensor3) -> f64 {
    let (n1, n2, n3) = s.dims();
    let d = n1 * n2;
    let data = s.as_slice();
    (0..d)
        .map(|idx| (0..n3).map(|p| data[idx + d * p].powi(2)).sum::<f64>().sqrt())
        .sum()
}

pub fn norm_l1(t: &Tensor3) -> f64 {
    t.as_slice().iter().map(|x| x.abs()).sum()
}

/// Tensor nuclear norm: the mean nuclear norm of the Fourier-domain frontal
/// slices.
pub fn tensor_nuclear_norm(l: &Tensor3) -> f64 {
    let n3 = l.n3();
    let f = fft_mode3(l);
    let half = f.independent_slices();
    let total: f64 = (0..half)
        .into_par_iter()
        .map(|p| {
            let weight = if p == 0 || 2 * p == n3 { 1.0 } else { 2.0 };
            weight * singular_values(f.frontal_matrix(p)).iter().sum::<f64>()
        })
        .sum();
    total / n3 as f64
}

/// Singular values of a complex matrix. Tall or wide inputs are first
/// reduced to their square triangular factor.
pub(crate) fn singular_values(m: DMatrix<Complex64>) -> Vec<f64> {
    let m = if m.nrows() < m.ncols() { m.adjoint() } else { m };
    let m = if m.nrows() > m.ncols() { m.qr().r() } else { m };
    m.singular_values().iter().copied().collect()
}

/// Squared k-support norm of `v`.
///
/// With `z = |v|` sorted descending, the norm splits into an `l2` head over
/// the `k - r - 1` largest magnitudes and an averaged `l1` tail, where `r` is
/// the unique index in `0..k` with `z[k-r-1] > tail / (r + 1) >= z[k-r]`
/// (1-based, `z[0] = +inf`).
pub fn ksupport_norm_sq(v: &[f64], k: usize) -> Result<f64> {
    let d = v.len();
    if k == 0 || k > d {
        return Err(Error::param(format!("k-support norm needs 1 <= k <= d, got k={k}, d={d}")));
    }
    let z = sorted_magnitudes(v);
    Ok(ksupport_sq_sorted(&z, k))
}

pub fn ksupport_norm(v: &[f64], k: usize) -> Result<f64> {
    ksupport_norm_sq(v, k).map(f64::sqrt)
}

pub(crate) fn sorted_magnitudes(v: &[f64]) -> Vec<f64> {
    let mut z: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    z.sort_by(|a, b| b.total_cmp(a));
    z
}

/// `z` must be sorted descending, `1 <= k <= z.len()`.
pub(crate) fn ksupport_sq_sorted(z: &[f64], k: usize) -> f64 {
    let d = z.len();
    // suffix[i] = sum of z[i..] (0-based)
    let mut suffix = vec![0.0; d + 1];
    for i in (0..d).rev() {
        suffix[i] = suffix[i + 1] + z[i];
    }
    let head_len = |r: usize| k - r - 1;
    let violation = |r: usize| {
        let h = head_len(r);
        let mid = suffix[h] / (r + 1) as f64;
        let left = if h == 0 { f64::INFINITY } else { z[h - 1] };
        let right = z[h];
        if left > mid && mid >= right {
            0.0
        } else {
            (mid - left).max(0.0) + (right - mid).max(0.0)
        }
    };
    let r = (0..k)
        .rev()
        .find(|&r| violation(r) == 0.0)
        .unwrap_or_else(|| {
            (0..k)
                .min_by(|&a, &b| violation(a).total_cmp(&violation(b)))
                .expect("k >= 1")
        });
    let h = head_len(r);
    let head: f64 = z[..h].iter().map(|x| x * x).sum();
    head + suffix[h].powi(2) / (r + 1) as f64
}
