use nalgebra::DMatrix;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::check_weight;
use crate::error::Result;
use crate::tensor::{fft_mode3, ifft_mode3, Tensor3};

#[derive(Clone, Debug)]
pub struct ProxTnn {
    pub tensor: Tensor3,
    /// Largest number of singular values kept in any Fourier slice.
    pub t_rank: usize,
    /// Tensor nuclear norm of `tensor`, read off the thresholded spectra.
    pub nuclear_norm: f64,
}

/// Singular value thresholding of every Fourier-domain frontal slice:
/// `argmin_x tau * ||x||_TNN + 1/2 ||x - a||_F^2`.
///
/// Only the `ceil((n3+1)/2)` independent Fourier slices are factorised; the
/// others are filled in as conjugates.
pub fn prox_tnn(a: &Tensor3, tau: f64) -> Result<ProxTnn> {
    check_weight("tensor nuclear norm", tau)?;
    let n3 = a.n3();
    let mut spectrum = fft_mode3(a);
    let half = spectrum.independent_slices();

    let shrunk: Vec<(DMatrix<Complex64>, usize, f64)> = (0..half)
        .into_par_iter()
        .map(|p| svt_matrix(spectrum.frontal_matrix(p), tau))
        .collect();

    let mut t_rank = 0;
    let mut nuclear = 0.0;
    for (p, (m, rank, sum)) in shrunk.into_iter().enumerate() {
        t_rank = t_rank.max(rank);
        let weight = if p == 0 || 2 * p == n3 { 1.0 } else { 2.0 };
        nuclear += weight * sum;
        spectrum.frontal_mut(p).copy_from_slice(m.as_slice());
    }
    spectrum.mirror_conjugates();

    Ok(ProxTnn { tensor: ifft_mode3(&spectrum), t_rank, nuclear_norm: nuclear / n3 as f64 })
}

/// Soft-thresholds the singular values of `m` by `tau`. Returns the
/// reconstructed matrix, the number of surviving singular values and their
/// sum.
///
/// Tall matrices are reduced to their `R` factor first (`m = QR` implies
/// `svt(m) = Q svt(R)`), wide ones are handled through the adjoint.
pub fn svt_matrix(m: DMatrix<Complex64>, tau: f64) -> (DMatrix<Complex64>, usize, f64) {
    if m.nrows() < m.ncols() {
        let (x, rank, sum) = svt_matrix(m.adjoint(), tau);
        return (x.adjoint(), rank, sum);
    }
    if m.nrows() > m.ncols() {
        let qr = m.qr();
        let (x, rank, sum) = svt_square(qr.r(), tau);
        return (qr.q() * x, rank, sum);
    }
    svt_square(m, tau)
}

fn svt_square(m: DMatrix<Complex64>, tau: f64) -> (DMatrix<Complex64>, usize, f64) {
    let n = m.nrows();
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^H");
    let kept: Vec<(usize, f64)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > tau)
        .map(|(i, s)| (i, s - tau))
        .collect();
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for &(i, s) in &kept {
        let col = u.column(i) * Complex64::new(s, 0.0);
        out += col * v_t.row(i);
    }
    let sum = kept.iter().map(|(_, s)| s).sum();
    (out, kept.len(), sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::tensor_nuclear_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn thresholds_diagonal_slice() {
        let a = Tensor3::from_vec(2, 2, 1, vec![5.0, 0.0, 0.0, 0.5]).unwrap();
        let out = prox_tnn(&a, 1.0).unwrap();
        assert_eq!(out.t_rank, 1);
        let expected = [4.0, 0.0, 0.0, 0.0];
        for (x, e) in out.tensor.as_slice().iter().zip(expected) {
            assert!((x - e).abs() < 1e-12);
        }
        assert!((out.nuclear_norm - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_in_zero_out() {
        let out = prox_tnn(&Tensor3::zeros(4, 3, 3).unwrap(), 0.1).unwrap();
        assert_eq!(out.t_rank, 0);
        assert_eq!(out.tensor.frobenius_norm(), 0.0);
    }

    #[test]
    fn reported_nuclear_norm_matches_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = Tensor3::from_fn(7, 5, 4, |_, _, _| rng.random_range(-1.0..1.0)).unwrap();
        let out = prox_tnn(&a, 0.4).unwrap();
        let direct = tensor_nuclear_norm(&out.tensor);
        assert!((out.nuclear_norm - direct).abs() < 1e-9);
    }

    #[test]
    fn wide_and_tall_paths_agree_with_plain_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (r, c) in [(6, 3), (3, 6), (4, 4)] {
            let m = DMatrix::from_fn(r, c, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let (x, rank, _) = svt_matrix(m.clone(), 0.5);
            let svd = m.svd(true, true);
            let mut reference = DMatrix::<Complex64>::zeros(r, c);
            let mut ref_rank = 0;
            let u = svd.u.unwrap();
            let vt = svd.v_t.unwrap();
            for (i, s) in svd.singular_values.iter().enumerate() {
                if *s > 0.5 {
                    ref_rank += 1;
                    reference += u.column(i) * Complex64::new(s - 0.5, 0.0) * vt.row(i);
                }
            }
            assert_eq!(rank, ref_rank);
            assert!((x - reference).norm() < 1e-10);
        }
    }

    #[test]
    fn t_rank_non_increasing_in_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = Tensor3::from_fn(8, 6, 3, |_, _, _| rng.random_range(-1.0..1.0)).unwrap();
        let mut last = usize::MAX;
        for tau in [0.05, 0.2, 0.5, 1.0, 2.0, 5.0] {
            let out = prox_tnn(&a, tau).unwrap();
            assert!(out.t_rank <= last);
            assert!(out.nuclear_norm <= tensor_nuclear_norm(&a) + 1e-12);
            last = out.t_rank;
        }
    }
}
