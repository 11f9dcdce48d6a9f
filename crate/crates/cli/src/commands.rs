use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tlisd::eval::{
    evaluate, extract_masks, generate_synthetic, magnitude_images, n3_sweep, write_bench_csv, BenchReport, Counts,
    Scores,
};
use tlisd::prior::{build_priors, dump_prior_maps, load_ground_truth, PriorSummary, GROUND_TRUTH_DIR};
use tlisd::solver::{write_trace_csv, ResolvedParams};
use tlisd::tensor::{read_snapshot, write_snapshot};
use tlisd::{decompose, ImageSequence, Tensor3, Variant};

use crate::config::RunConfig;
use crate::error::{io_err, CliError, Result};

pub const TENSOR_FILE: &str = "tensor.tls3";
pub const PRIORS_FILE: &str = "priors.json";
pub const SUMMARY_FILE: &str = "summary.json";

/// What is known about the frames behind a tensor.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct FrameMeta {
    /// Directory the frames were read from.
    frames: Option<PathBuf>,
    names: Vec<String>,
    width: u32,
    height: u32,
}

#[derive(Serialize)]
struct PriorsFile<'a> {
    frames: &'a Path,
    #[serde(flatten)]
    summary: PriorSummary,
}

#[derive(Serialize, Deserialize)]
struct DecomposeSummary {
    variant: Variant,
    converged: bool,
    iterations: usize,
    final_residual: f64,
    final_t_rank: usize,
    params: ResolvedParams,
    dims: [usize; 3],
    /// Solver wall-clock seconds; 0 unless timing is enabled.
    seconds: f64,
    #[serde(flatten)]
    meta: Option<FrameMeta>,
}

#[derive(Serialize)]
struct EvalSummary {
    frames: usize,
    aggregate: Scores,
    totals: Counts,
    threshold: f64,
    seconds_per_image: f64,
    ground_truth: PathBuf,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text)
        .map_err(|e| tlisd::Error::Format { path: path.to_path_buf(), reason: e.to_string() }.into())
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    f(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

fn save_images(dir: &Path, names: &[String], images: &[image::GrayImage]) -> Result<()> {
    create_dir(dir)?;
    for (name, img) in names.iter().zip(images) {
        let path = dir.join(format!("{name}.png"));
        img.save(&path).map_err(|source| tlisd::Error::Image { path, source })?;
    }
    Ok(())
}

fn load_sequence(dir: &Path) -> Result<ImageSequence> {
    if !dir.is_dir() {
        return Err(CliError::Io {
            path: dir.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a readable directory"),
        });
    }
    Ok(ImageSequence::load_dir(dir)?)
}

/// Runs the prior stage on a frame directory and writes its artifacts.
fn priors_into(cfg: &RunConfig, frames: &Path, out: &Path) -> Result<(Tensor3, FrameMeta)> {
    let seq = load_sequence(frames)?;
    let frames = &fs::canonicalize(frames).map_err(io_err(frames))?;
    let priors = build_priors(&seq, &cfg.prior)?;
    create_dir(out)?;
    let summary = PriorSummary::new(&seq, &priors, &cfg.prior);
    write_json(&out.join(PRIORS_FILE), &PriorsFile { frames, summary })?;
    write_snapshot(out.join(TENSOR_FILE), &priors.tensor)?;
    if cfg.eval.dump_priors {
        dump_prior_maps(out, &seq, &priors.tensor)?;
    }
    log::info!(
        "{} frames, dominant directions {:?}, tensor {:?}",
        seq.len(),
        priors.directions.angles,
        priors.tensor.dims()
    );
    let meta = FrameMeta {
        frames: Some(frames.to_path_buf()),
        names: seq.names().to_vec(),
        width: seq.width(),
        height: seq.height(),
    };
    Ok((priors.tensor, meta))
}

pub fn cmd_priors(cfg: &RunConfig) -> Result<()> {
    priors_into(cfg, cfg.input()?, cfg.output()?)?;
    Ok(())
}

/// Accepts a tensor snapshot, a directory holding one (with its
/// `priors.json`), or a frame directory, in which case the priors are built
/// and written to `out` first.
fn resolve_tensor(cfg: &RunConfig, input: &Path, out: &Path) -> Result<(Tensor3, Option<FrameMeta>)> {
    let (tensor_path, meta_path) = if input.is_file() {
        (input.to_path_buf(), input.with_file_name(PRIORS_FILE))
    } else if input.join(TENSOR_FILE).is_file() {
        (input.join(TENSOR_FILE), input.join(PRIORS_FILE))
    } else {
        let (t, meta) = priors_into(cfg, input, out)?;
        return Ok((t, Some(meta)));
    };
    let tensor = read_snapshot(&tensor_path)?;
    let meta = if meta_path.is_file() { Some(read_json::<FrameMeta>(&meta_path)?) } else { None };
    if let Some(m) = &meta {
        if (m.width as usize) * (m.height as usize) != tensor.n1() || m.names.len() != tensor.n2() {
            return Err(tlisd::Error::Format {
                path: meta_path,
                reason: format!("frame metadata does not match tensor dims {:?}", tensor.dims()),
            }
            .into());
        }
    }
    Ok((tensor, meta))
}

pub fn cmd_decompose(cfg: &RunConfig) -> Result<()> {
    let out = cfg.output()?;
    create_dir(out)?;
    let (d, meta) = resolve_tensor(cfg, cfg.input()?, out)?;
    let res = decompose(&d, &cfg.solver)?;
    if !res.converged {
        log::warn!("writing artifacts of a non-converged run (converged=false in {SUMMARY_FILE})");
    }

    write_snapshot(out.join("L.tls3"), &res.low_rank)?;
    write_snapshot(out.join("S.tls3"), &res.sparse)?;
    write_snapshot(out.join("C.tls3"), &res.illumination)?;
    let trace_path = out.join("trace.csv");
    write_with(&trace_path, |w| write_trace_csv(w, &res.trace, cfg.timing))?;
    if let Some(m) = &meta {
        save_images(&out.join("foreground"), &m.names, &magnitude_images(&res.sparse, m.width, m.height))?;
        save_images(&out.join("illumination"), &m.names, &magnitude_images(&res.illumination, m.width, m.height))?;
    }
    let (n1, n2, n3) = d.dims();
    let summary = DecomposeSummary {
        variant: res.resolved.variant,
        converged: res.converged,
        iterations: res.iterations,
        final_residual: res.final_residual(),
        final_t_rank: res.final_t_rank(),
        params: res.resolved,
        dims: [n1, n2, n3],
        seconds: if cfg.timing { res.timings.total.as_secs_f64() } else { 0.0 },
        meta,
    };
    write_json(&out.join(SUMMARY_FILE), &summary)?;
    log::info!(
        "{} after {} iterations, residual {:.2e}, t-rank {}",
        if res.converged { "converged" } else { "stopped" },
        res.iterations,
        res.final_residual(),
        res.final_t_rank()
    );
    Ok(())
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<()> {
    let input = cfg.input()?;
    let out = cfg.output.as_deref().unwrap_or(input);
    let summary: DecomposeSummary = read_json(&input.join(SUMMARY_FILE))?;
    let meta = summary.meta.ok_or_else(|| {
        CliError::Config(format!("{} has no frame names; decompose from frames or priors output", input.display()))
    })?;
    let gt_dir = match (&cfg.eval.ground_truth, &meta.frames) {
        (Some(dir), _) => dir.clone(),
        (None, Some(frames)) => frames.join(GROUND_TRUTH_DIR),
        (None, None) => return Err(CliError::Config("no ground-truth directory (use --ground-truth)".into())),
    };
    let gts = load_ground_truth(&gt_dir, &meta.names)?;
    let s = read_snapshot(input.join("S.tls3"))?;
    let masks = extract_masks(&s, meta.width, meta.height)?;
    let spi = summary.seconds / meta.names.len() as f64;
    let report = evaluate(&meta.names, &masks.masks, &gts, masks.threshold, spi)?;

    create_dir(out)?;
    let csv_path = out.join("eval_frames.csv");
    write_with(&csv_path, |w| report.write_csv(w))?;
    let eval = EvalSummary {
        frames: report.per_frame.len(),
        aggregate: report.aggregate,
        totals: report.totals,
        threshold: report.threshold,
        seconds_per_image: report.seconds_per_image,
        ground_truth: gt_dir,
    };
    write_json(&out.join("eval_summary.json"), &eval)?;
    if cfg.eval.dump_masks {
        save_images(&out.join("masks"), &meta.names, &masks.masks)?;
    }
    println!(
        "F = {:.4} (precision {:.4}, recall {:.4}) over {} frames",
        report.aggregate.f,
        report.aggregate.precision,
        report.aggregate.recall,
        report.per_frame.len()
    );
    Ok(())
}

pub fn cmd_synth(cfg: &RunConfig) -> Result<()> {
    let out = cfg.output()?;
    let spec = cfg.synthetic.clone().unwrap_or_default();
    let syn = generate_synthetic(&spec)?;
    create_dir(out)?;
    syn.sequence.save_dir(out)?;
    write_json(&out.join("synth.json"), &spec)?;
    log::info!("wrote {} frames to {}", syn.sequence.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct BenchSummary {
    n3: usize,
    median_per_iteration: f64,
    median_per_image: f64,
    median_low_rank_share: f64,
}

pub fn cmd_bench(cfg: &RunConfig) -> Result<()> {
    let out = cfg.output()?;
    create_dir(out)?;
    let (d, _) = resolve_tensor(cfg, cfg.input()?, out)?;
    let mut sizes = vec![d.n3()];
    sizes.extend(cfg.bench.n3_sweep.iter().copied().filter(|&n| n > 0));
    let reports: Vec<BenchReport> = n3_sweep(&d, &cfg.solver, cfg.bench.repeats, &sizes)?;
    write_with(&out.join("bench.csv"), |w| write_bench_csv(w, &reports))?;
    let summary: Vec<BenchSummary> = sizes
        .iter()
        .zip(&reports)
        .map(|(&n3, r)| BenchSummary {
            n3,
            median_per_iteration: r.median_per_iteration,
            median_per_image: r.median_per_image,
            median_low_rank_share: r.median_low_rank_share,
        })
        .collect();
    write_json(&out.join("bench_summary.json"), &summary)?;
    for s in &summary {
        println!("n3 = {}: {:.3e} s/iteration, {:.3e} s/image", s.n3, s.median_per_iteration, s.median_per_image);
    }
    Ok(())
}
