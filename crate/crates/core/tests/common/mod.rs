//! Reference implementations used only by tests. None of these share code
//! with the library paths they check.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use tlisd::Tensor3;

/// Squared k-support norm through its variational form
/// `min { sum w_i^2 / theta_i : 0 < theta_i <= 1, sum theta_i <= k }`,
/// solved by bisection on `theta_i = min(1, |w_i| / s)`.
pub fn ksupport_sq_variational(w: &[f64], k: usize) -> f64 {
    let a: Vec<f64> = w.iter().map(|x| x.abs()).collect();
    let nnz = a.iter().filter(|x| **x > 0.0).count();
    if nnz <= k {
        return a.iter().map(|x| x * x).sum();
    }
    let theta_sum = |s: f64| a.iter().map(|x| (x / s).min(1.0)).sum::<f64>();
    let (mut lo, mut hi) = (0.0_f64, a.iter().cloned().fold(0.0, f64::max) * 1e3 + 1.0);
    for _ in 0..400 {
        let s = 0.5 * (lo + hi);
        if theta_sum(s) > k as f64 {
            lo = s;
        } else {
            hi = s;
        }
    }
    let s = 0.5 * (lo + hi);
    a.iter().filter(|x| **x > 0.0).map(|x| x * x / (x / s).min(1.0)).sum()
}

/// Prox of `gamma * ||.||_k^2` from the same variational form: for fixed
/// `theta` the minimiser is `c_i = v_i theta_i / (theta_i + 2 gamma)`, and
/// the optimal `theta_i = clip(|v_i| s - 2 gamma, 0, 1)` with `s` chosen so
/// that `sum theta = k`.
pub fn ksupport_prox_variational(v: &[f64], k: usize, gamma: f64) -> Vec<f64> {
    let a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let theta = |s: f64| -> Vec<f64> {
        a.iter().map(|x| (x * s - 2.0 * gamma).clamp(0.0, 1.0)).collect()
    };
    let nnz = a.iter().filter(|x| **x > 0.0).count();
    let th = if nnz <= k {
        vec![1.0; v.len()]
    } else {
        let sum = |s: f64| theta(s).iter().sum::<f64>();
        let (mut lo, mut hi) = (0.0, 1.0);
        while sum(hi) < k as f64 {
            hi *= 2.0;
        }
        for _ in 0..300 {
            let s = 0.5 * (lo + hi);
            if sum(s) > k as f64 {
                hi = s;
            } else {
                lo = s;
            }
        }
        theta(0.5 * (lo + hi))
    };
    v.iter().zip(th).map(|(x, t)| x * t / (t + 2.0 * gamma)).collect()
}

pub fn ksupport_prox_objective(c: &[f64], v: &[f64], k: usize, gamma: f64) -> f64 {
    gamma * ksupport_sq_variational(c, k)
        + 0.5 * c.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
}

/// Group prox by a golden-section search over the scale of each tube.
pub fn group_prox_line_search(v: &Tensor3, tau: f64) -> Tensor3 {
    let (n1, n2, n3) = v.dims();
    let mut out = v.clone();
    for i in 0..n1 {
        for j in 0..n2 {
            let g = v.tube(i, j);
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let f = |a: f64| tau * a * norm + 0.5 * (1.0 - a).powi(2) * norm * norm;
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..200 {
                let x1 = hi - phi * (hi - lo);
                let x2 = lo + phi * (hi - lo);
                if f(x1) <= f(x2) {
                    hi = x2;
                } else {
                    lo = x1;
                }
            }
            let mut a = 0.5 * (lo + hi);
            if f(0.0) <= f(a) {
                a = 0.0;
            }
            for p in 0..n3 {
                out.set(i, j, p, a * g[p]);
            }
        }
    }
    out
}

pub fn group_objective(s: &Tensor3, v: &Tensor3, tau: f64) -> f64 {
    let (n1, n2, _) = s.dims();
    let mut norm = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            norm += s.tube(i, j).iter().map(|x| x * x).sum::<f64>().sqrt();
        }
    }
    tau * norm + 0.5 * s.sub(v).frobenius_norm().powi(2)
}

fn naive_dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n)
        .map(|f| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, xt) in x.iter().enumerate() {
                let ang = sign * 2.0 * std::f64::consts::PI * (f * t) as f64 / n as f64;
                acc += xt * Complex64::new(ang.cos(), ang.sin());
            }
            if inverse {
                acc / n as f64
            } else {
                acc
            }
        })
        .collect()
}

/// Tensor SVT by an O(n3^2) DFT along each tube and a direct complex SVD of
/// every Fourier slice, without conjugate-symmetry or QR shortcuts.
pub fn tnn_prox_naive(a: &Tensor3, tau: f64) -> (Tensor3, usize) {
    let (n1, n2, n3) = a.dims();
    let mut spec = vec![vec![Complex64::new(0.0, 0.0); n1 * n2]; n3];
    for i in 0..n1 {
        for j in 0..n2 {
            let tube: Vec<Complex64> = (0..n3).map(|p| Complex64::new(a.get(i, j, p), 0.0)).collect();
            for (p, c) in naive_dft(&tube, false).into_iter().enumerate() {
                spec[p][i + n1 * j] = c;
            }
        }
    }
    let mut rank = 0;
    for slice in spec.iter_mut() {
        let m = DMatrix::from_column_slice(n1, n2, slice);
        let svd = m.svd(true, true);
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut x = DMatrix::<Complex64>::zeros(n1, n2);
        let mut kept = 0;
        for (idx, s) in svd.singular_values.iter().enumerate() {
            if *s > tau {
                kept += 1;
                x += u.column(idx) * Complex64::new(s - tau, 0.0) * vt.row(idx);
            }
        }
        rank = rank.max(kept);
        slice.copy_from_slice(x.as_slice());
    }
    let mut out = Tensor3::zeros(n1, n2, n3).unwrap();
    for i in 0..n1 {
        for j in 0..n2 {
            let tube: Vec<Complex64> = (0..n3).map(|p| spec[p][i + n1 * j]).collect();
            for (p, c) in naive_dft(&tube, true).into_iter().enumerate() {
                out.set(i, j, p, c.re);
            }
        }
    }
    (out, rank)
}
