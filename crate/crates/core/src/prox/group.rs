use rayon::prelude::*;

use super::check_weight;
use crate::error::Result;
use crate::tensor::Tensor3;

/// Block soft-thresholding of every tube: `g -> (1 - tau/||g||)_+ g`.
/// Solves `argmin_s tau * ||s||_{1,1,2} + 1/2 ||s - v||_F^2`.
pub fn prox_group_l112(v: &Tensor3, tau: f64) -> Result<Tensor3> {
    check_weight("group shrinkage", tau)?;
    let (n1, n2, n3) = v.dims();
    let d = n1 * n2;
    let src = v.as_slice();
    let factors: Vec<f64> = (0..d)
        .into_par_iter()
        .map(|idx| {
            let norm = (0..n3).map(|p| src[idx + d * p].powi(2)).sum::<f64>().sqrt();
            if norm > tau {
                1.0 - tau / norm
            } else {
                0.0
            }
        })
        .collect();
    let mut out = v.clone();
    for slice in out.frontal_slices_mut() {
        for (x, f) in slice.iter_mut().zip(&factors) {
            *x *= f;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrinks_single_tube() {
        let v = Tensor3::from_vec(1, 1, 2, vec![3.0, 4.0]).unwrap();
        let out = prox_group_l112(&v, 0.5).unwrap();
        assert!((out.get(0, 0, 0) - 2.7).abs() < 1e-12);
        assert!((out.get(0, 0, 1) - 3.6).abs() < 1e-12);
    }

    #[test]
    fn small_tubes_vanish() {
        let v = Tensor3::from_vec(2, 1, 2, vec![0.3, 1.0, 0.4, 1.0]).unwrap();
        let out = prox_group_l112(&v, 0.5).unwrap();
        assert_eq!(out.tube(0, 0), vec![0.0, 0.0]);
        assert!(out.tube(1, 0).iter().all(|x| *x > 0.0));
        let zero = prox_group_l112(&Tensor3::zeros(2, 2, 3).unwrap(), 1.0).unwrap();
        assert_eq!(zero.frobenius_norm(), 0.0);
    }
}
