//! Closed-form proximal operators for the three blocks of the decomposition.
//!
//! Every operator here is a pure function of its input.

mod group;
mod ksupport;
mod tnn;

pub use group::prox_group_l112;
pub use ksupport::{prox_ksupport_sq, KSupportWorkspace};
pub use tnn::{prox_tnn, svt_matrix, ProxTnn};

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// Elementwise soft-thresholding, the prox of `tau * ||x||_1`.
pub fn soft_threshold(v: &Tensor3, tau: f64) -> Result<Tensor3> {
    check_weight("soft-threshold", tau)?;
    let mut out = v.clone();
    out.as_mut_slice().iter_mut().for_each(|x| *x = shrink(*x, tau));
    Ok(out)
}

#[inline]
pub(crate) fn shrink(x: f64, tau: f64) -> f64 {
    x.signum() * (x.abs() - tau).max(0.0)
}

pub(crate) fn check_weight(what: &str, tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{what} weight must be positive and finite, got {tau}")))
    }
}
