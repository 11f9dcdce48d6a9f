mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tlisd::eval::SyntheticSpec;

use crate::config::{Overrides, RunConfig};
use crate::error::{CliError, Result};

/// Moving-object detection in time-lapse sequences with illumination
/// changes.
#[derive(Parser)]
#[command(name = "tlisd", version)]
struct Cli {
    /// JSON run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the prior tensor from a frame directory.
    Priors,
    /// Split a tensor (or frame directory) into background, foreground and
    /// illumination parts.
    Decompose,
    /// Threshold a decomposition's foreground and score it.
    Evaluate,
    /// Write a synthetic sequence with ground-truth masks.
    Synth(SynthArgs),
    /// Time the solver.
    Bench(BenchArgs),
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    objects: Option<usize>,
    /// Object side range as `MIN,MAX` pixels.
    #[arg(long, value_parser = parse_range)]
    object_size: Option<(u32, u32)>,
    #[arg(long)]
    shadows: Option<usize>,
    #[arg(long)]
    shadow_depth: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long)]
    repeats: Option<usize>,
    /// Comma-separated slice counts to time in addition to the input's.
    #[arg(long, value_delimiter = ',')]
    n3_sweep: Option<Vec<usize>>,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected MIN,MAX")?;
    let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| e.to_string());
    Ok((parse(lo)?, parse(hi)?))
}

impl SynthArgs {
    fn apply(&self, spec: &mut SyntheticSpec) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field {
                    spec.$field = v;
                })*
            };
        }
        set!(width, height, frames, objects, object_size, shadows, shadow_depth, noise);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut cfg);
    match &cli.cmd {
        Command::Synth(args) => args.apply(cfg.synthetic.get_or_insert_with(SyntheticSpec::default)),
        Command::Bench(args) => {
            if let Some(r) = args.repeats {
                cfg.bench.repeats = r;
            }
            if let Some(s) = &args.n3_sweep {
                cfg.bench.n3_sweep = s.clone();
            }
        }
        _ => {}
    }
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.cmd {
        Command::Priors => commands::cmd_priors(&cfg),
        Command::Decompose => commands::cmd_decompose(&cfg),
        Command::Evaluate => commands::cmd_evaluate(&cfg),
        Command::Synth(_) => commands::cmd_synth(&cfg),
        Command::Bench(_) => commands::cmd_bench(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
