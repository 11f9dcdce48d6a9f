use serde::{Deserialize, Serialize};

use super::ResolvedParams;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Low-rank + group-sparse + squared k-support illumination block.
    #[default]
    Tlisd,
    /// Ablation without the illumination block (`C = 0`).
    NoC,
    /// Ablation with an `l1` penalty on the illumination block.
    L1C,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tlisd" => Ok(Variant::Tlisd),
            "no-c" | "no_c" | "noc" => Ok(Variant::NoC),
            "l1-c" | "l1_c" | "l1c" => Ok(Variant::L1C),
            other => Err(Error::param(format!("unknown variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Tlisd => "tlisd",
            Variant::NoC => "no-c",
            Variant::L1C => "l1-c",
        })
    }
}

/// Solver parameters. `lambda1` and `k` default to data-dependent values
/// (`1/sqrt(max(n1, n2) * n3)` and `n1`) when left unset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub lambda1: Option<f64>,
    pub lambda2: f64,
    pub k: Option<usize>,
    pub rho: f64,
    pub mu0: f64,
    pub mu_max: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub variant: Variant,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda1: None,
            lambda2: 0.03,
            k: None,
            rho: 1.2,
            mu0: 1e-3,
            mu_max: 1e10,
            tol: 1e-5,
            max_iters: 500,
            variant: Variant::Tlisd,
        }
    }
}

pub fn default_lambda1(n1: usize, n2: usize, n3: usize) -> f64 {
    1.0 / ((n1.max(n2) * n3) as f64).sqrt()
}

impl SolverConfig {
    pub fn resolve(&self, (n1, n2, n3): (usize, usize, usize)) -> Result<ResolvedParams> {
        let lambda1 = self.lambda1.unwrap_or_else(|| default_lambda1(n1, n2, n3));
        let k = self.k.unwrap_or(n1);
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::param(format!("{name} must be positive and finite, got {x}")))
            }
        };
        positive("lambda1", lambda1)?;
        positive("lambda2", self.lambda2)?;
        positive("mu0", self.mu0)?;
        positive("mu_max", self.mu_max)?;
        positive("tol", self.tol)?;
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return Err(Error::param(format!("rho must exceed 1, got {}", self.rho)));
        }
        if self.tol >= 1.0 {
            return Err(Error::param(format!("tol must be below 1, got {}", self.tol)));
        }
        if self.mu_max < self.mu0 {
            return Err(Error::param("mu_max must be at least mu0"));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        if k == 0 || k > n1 * n2 {
            return Err(Error::param(format!(
                "k must lie in 1..={} (frontal slice size), got {k}",
                n1 * n2
            )));
        }
        Ok(ResolvedParams {
            lambda1,
            lambda2: self.lambda2,
            k,
            rho: self.rho,
            mu0: self.mu0,
            mu_max: self.mu_max,
            tol: self.tol,
            max_iters: self.max_iters,
            variant: self.variant,
        })
    }
}
