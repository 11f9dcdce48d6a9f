//! Prox of the squared k-support norm by sorting and binary search.

use super::check_weight;
use crate::error::{Error, Result};

/// State of the breakpoint search for one k-support prox evaluation.
///
/// Indices follow the 1-based convention of the closed form: `z(1) >= z(2)
/// >= ... >= z(d)` with sentinels `z(0) = +inf` and `z(d+1) = -inf`.
#[derive(Clone, Debug)]
pub struct KSupportWorkspace {
    /// Magnitudes sorted descending (0-based storage of `z(1..=d)`).
    pub z: Vec<f64>,
    /// Permutation that sorted the input: `z[m] = |v[order[m]]|`.
    pub order: Vec<usize>,
    pub k: usize,
    /// `1 / (2 gamma)`.
    pub beta: f64,
    /// Head length is `k - r - 1`.
    pub r: usize,
    /// Last index of the shifted middle block.
    pub l: usize,
    /// `sum_{i=k-r}^{l} z(i)`.
    pub t_rl: f64,
    /// Output magnitudes in sorted order.
    pub q: Vec<f64>,
    /// `false` when no `r` passed the acceptance test and the fallback was
    /// used.
    pub accepted: bool,
    prefix: Vec<f64>,
}

impl KSupportWorkspace {
    /// Runs the breakpoint search for `argmin_c gamma * ||c||_k^2 + 1/2 ||c - v||^2`.
    pub fn solve(v: &[f64], k: usize, gamma: f64) -> Result<Self> {
        let d = v.len();
        if k == 0 || k > d {
            return Err(Error::param(format!("k-support prox needs 1 <= k <= d, got k={k}, d={d}")));
        }
        check_weight("k-support prox", gamma)?;

        let mut order: Vec<usize> = (0..d).collect();
        // Stable: equal magnitudes keep their original index order.
        order.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()));
        let z: Vec<f64> = order.iter().map(|&i| v[i].abs()).collect();
        let mut prefix = vec![0.0; d + 1];
        for i in 0..d {
            prefix[i + 1] = prefix[i] + z[i];
        }

        let mut ws = KSupportWorkspace {
            z,
            order,
            k,
            beta: 1.0 / (2.0 * gamma),
            r: 0,
            l: 0,
            t_rl: 0.0,
            q: Vec::new(),
            accepted: false,
            prefix,
        };

        let mut found = None;
        for r in (0..k).rev() {
            let l = ws.search_l(r);
            if ws.accepts(r, l) {
                found = Some((r, l));
                break;
            }
        }
        let (r, l) = match found {
            Some(rl) => {
                ws.accepted = true;
                rl
            }
            None => {
                log::warn!("k-support prox: no breakpoint passed the acceptance test, using r = 0");
                (0, ws.search_l(0))
            }
        };
        ws.r = r;
        ws.l = l;
        // Summed directly: the prefix difference loses digits for long vectors.
        ws.t_rl = ws.z[k - r - 1..l].iter().sum();
        ws.q = ws.magnitudes();
        Ok(ws)
    }

    /// Output vector in the original element order with signs restored.
    pub fn output(&self, v: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; v.len()];
        for (m, &i) in self.order.iter().enumerate() {
            w[i] = v[i].signum() * self.q[m];
        }
        w
    }

    #[inline]
    fn zi(&self, i: usize) -> f64 {
        if i == 0 {
            f64::INFINITY
        } else if i > self.z.len() {
            f64::NEG_INFINITY
        } else {
            self.z[i - 1]
        }
    }

    #[inline]
    fn t(&self, r: usize, l: usize) -> f64 {
        self.prefix[l] - self.prefix[self.k - r - 1]
    }

    #[inline]
    fn denom(&self, r: usize, l: usize) -> f64 {
        (l + r + 1 - self.k) as f64 + self.beta * (r + 1) as f64
    }

    /// Largest `l` in `k-r ..= d` with `z(l) > T(r,l) / denom(r,l)`.
    fn search_l(&self, r: usize) -> usize {
        let mut low = self.k - r;
        let mut high = self.z.len();
        if self.zi(low) == 0.0 {
            return low;
        }
        while low < high {
            let mid = (low + high).div_ceil(2);
            if self.zi(mid) > self.t(r, mid) / self.denom(r, mid) {
                low = mid;
            } else {
                high = mid - 1;
            }
        }
        low
    }

    fn accepts(&self, r: usize, l: usize) -> bool {
        let den = self.denom(r, l);
        let level = self.t(r, l) / den;
        // T(r,l) is a difference of prefix sums; allow for its rounding.
        let slack = 4.0 * f64::EPSILON * self.prefix[l] / den;
        let b1 = self.beta + 1.0;
        self.zi(self.k - r - 1) / b1 > level - slack && level + slack >= self.zi(self.k - r) / b1
    }

    fn magnitudes(&self) -> Vec<f64> {
        let (k, r, l) = (self.k, self.r, self.l);
        let shift = self.t_rl / self.denom(r, l);
        let head = self.beta / (self.beta + 1.0);
        (1..=self.z.len())
            .map(|i| {
                if i < k - r {
                    head * self.zi(i)
                } else if i <= l {
                    (self.zi(i) - shift).max(0.0)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// `argmin_c gamma * (||c||_k^sp)^2 + 1/2 ||c - v||_2^2`.
pub fn prox_ksupport_sq(v: &[f64], k: usize, gamma: f64) -> Result<Vec<f64>> {
    Ok(KSupportWorkspace::solve(v, k, gamma)?.output(v))
}
