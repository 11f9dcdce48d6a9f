//! The single configuration surface. A JSON file is read first (if given)
//! and command-line flags then override individual keys.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tlisd::eval::SyntheticSpec;
use tlisd::{PriorConfig, SolverConfig, Variant};

use crate::error::{io_err, CliError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// One Otsu threshold over the whole sequence.
    #[default]
    Otsu,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub threshold: ThresholdMode,
    /// Write the prior maps as PNGs from `priors`.
    pub dump_priors: bool,
    /// Write binary masks as PNGs from `evaluate`.
    pub dump_masks: bool,
    /// Ground-truth directory; defaults to `<frames>/groundtruth`.
    pub ground_truth: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub repeats: usize,
    /// Extra runs with the tensor's slices cycled to these depths.
    pub n3_sweep: Vec<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { repeats: 3, n3_sweep: Vec::new() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub solver: SolverConfig,
    pub prior: PriorConfig,
    pub eval: EvalConfig,
    pub bench: BenchConfig,
    /// Generator settings for `synth`; defaults when absent.
    pub synthetic: Option<SyntheticSpec>,
    /// Record wall-clock timings in the artifacts. Off by default so that
    /// reruns produce identical files.
    pub timing: bool,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn input(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| CliError::Config("no input path (use --input)".into()))
    }

    pub fn output(&self) -> Result<&Path> {
        self.output.as_deref().ok_or_else(|| CliError::Config("no output path (use --output)".into()))
    }
}

/// Flags shared by every subcommand; each mirrors one config key.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// Input directory or tensor snapshot.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    #[arg(long, global = true)]
    pub lambda1: Option<f64>,
    #[arg(long, global = true)]
    pub lambda2: Option<f64>,
    /// k of the k-support norm.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    #[arg(long, global = true)]
    pub mu0: Option<f64>,
    #[arg(long, global = true)]
    pub mu_max: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    #[arg(long, global = true)]
    pub kmeans_k: Option<usize>,
    #[arg(long, global = true)]
    pub support_fraction: Option<f64>,
    #[arg(long, global = true)]
    pub angle_step: Option<f64>,
    #[arg(long, global = true)]
    pub merge_tolerance: Option<f64>,
    /// Seed for k-means restarts and synthetic generation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; falls back to TLISD_THREADS, then all cores.
    #[arg(long, global = true, env = "TLISD_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub dump_priors: bool,
    #[arg(long, global = true)]
    pub dump_masks: bool,
    #[arg(long, global = true)]
    pub ground_truth: Option<PathBuf>,
    #[arg(long, global = true)]
    pub timing: bool,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: tlisd::Error| e.to_string())
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($src:expr => $dst:expr) => {
                if let Some(v) = $src {
                    $dst = v;
                }
            };
        }
        if self.input.is_some() {
            cfg.input = self.input.clone();
        }
        if self.output.is_some() {
            cfg.output = self.output.clone();
        }
        if self.ground_truth.is_some() {
            cfg.eval.ground_truth = self.ground_truth.clone();
        }
        set!(self.variant => cfg.solver.variant);
        set!(self.lambda1.map(Some) => cfg.solver.lambda1);
        set!(self.lambda2 => cfg.solver.lambda2);
        set!(self.k.map(Some) => cfg.solver.k);
        set!(self.rho => cfg.solver.rho);
        set!(self.mu0 => cfg.solver.mu0);
        set!(self.mu_max => cfg.solver.mu_max);
        set!(self.tol => cfg.solver.tol);
        set!(self.max_iters => cfg.solver.max_iters);
        set!(self.kmeans_k => cfg.prior.kmeans_k);
        set!(self.support_fraction => cfg.prior.support_fraction);
        set!(self.angle_step => cfg.prior.angle_step);
        set!(self.merge_tolerance => cfg.prior.merge_tolerance);
        set!(self.threads.map(Some) => cfg.threads);
        if let Some(seed) = self.seed {
            cfg.prior.seed = seed;
            cfg.synthetic.get_or_insert_with(SyntheticSpec::default).seed = seed;
        }
        cfg.eval.dump_priors |= self.dump_priors;
        cfg.eval.dump_masks |= self.dump_masks;
        cfg.timing |= self.timing;
    }
}
