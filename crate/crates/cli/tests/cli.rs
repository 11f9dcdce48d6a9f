use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use image::{GrayImage, Luma};
use serde_json::Value;

fn tlisd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlisd"))
        .args(args)
        .env("TLISD_THREADS", "1")
        .output()
        .expect("failed to spawn tlisd")
}

fn ok(args: &[&str]) -> Output {
    let out = tlisd(args);
    assert!(out.status.success(), "tlisd {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "--output", p(dir)];
    args.extend_from_slice(extra);
    ok(&args);
}

const SMALL: &[&str] = &["--width", "32", "--height", "32", "--frames", "8", "--object-size", "5,7"];
const TINY: &[&str] = &["--width", "16", "--height", "16", "--frames", "3", "--objects", "1", "--object-size", "3,4"];

#[test]
fn three_frame_priors_run_quickly() {
    let tmp = tempfile::tempdir().unwrap();
    let (frames, out) = (tmp.path().join("frames"), tmp.path().join("priors"));
    synth(&frames, TINY);
    let start = Instant::now();
    ok(&["priors", "--input", p(&frames), "--output", p(&out), "--dump-priors"]);
    ok(&["decompose", "--input", p(&out), "--output", p(&tmp.path().join("dec"))]);
    assert!(start.elapsed().as_secs_f64() < 5.0, "{:?}", start.elapsed());

    let summary = json(&out.join("priors.json"));
    assert_eq!(summary["per_image_angle"].as_array().unwrap().len(), 3);
    assert!(!summary["angles"].as_array().unwrap().is_empty());
    assert!(out.join("tensor.tls3").is_file());
    assert!(out.join("prior_1").join("frame_0000.png").is_file());
}

#[test]
fn grayscale_frames_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("gray");
    fs::create_dir_all(&frames).unwrap();
    for j in 0..3u8 {
        let img = GrayImage::from_fn(16, 16, |x, y| Luma([(x * 8 + y * 4) as u8 + j]));
        img.save(frames.join(format!("g{j}.png"))).unwrap();
    }
    let out = tlisd(&["priors", "--input", p(&frames), "--output", p(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn priors_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    synth(&frames, SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["priors", "--input", p(&frames), "--output", p(&a)]);
    ok(&["priors", "--input", p(&frames), "--output", p(&b)]);
    for f in ["priors.json", "tensor.tls3"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn no_c_variant_keeps_illumination_at_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    synth(&frames, SMALL);
    let out = tmp.path().join("dec");
    ok(&["decompose", "--input", p(&frames), "--output", p(&out), "--variant", "no-c"]);
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "c_norm").unwrap();
    let mut rows = 0;
    for line in lines {
        let v: f64 = line.split(',').nth(col).unwrap().parse().unwrap();
        assert_eq!(v, 0.0);
        rows += 1;
    }
    assert!(rows > 0);
    assert_eq!(json(&out.join("summary.json"))["variant"], "no-c");
}

#[test]
fn default_synthetic_run_converges_and_scores_well() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    synth(&frames, &[]);
    let out = tmp.path().join("dec");
    ok(&["decompose", "--input", p(&frames), "--output", p(&out)]);
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["converged"], true);
    assert_eq!(summary["params"]["lambda2"], 0.03);
    assert!(out.join("foreground").join("frame_0000.png").is_file());

    ok(&["evaluate", "--input", p(&out), "--dump-masks"]);
    let eval = json(&out.join("eval_summary.json"));
    let f = eval["aggregate"]["f"].as_f64().unwrap();
    assert!(f >= 0.90, "F = {f}");
    assert!(out.join("masks").join("frame_0039.png").is_file());
    let csv = fs::read_to_string(out.join("eval_frames.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41);
}

#[test]
fn missing_ground_truth_is_reported_by_name() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    synth(&frames, SMALL);
    let out = tmp.path().join("dec");
    ok(&["decompose", "--input", p(&frames), "--output", p(&out)]);
    for name in ["frame_0002.png", "frame_0005.png"] {
        fs::remove_file(frames.join("groundtruth").join(name)).unwrap();
    }
    let res = tlisd(&["evaluate", "--input", p(&out)]);
    assert_eq!(res.status.code(), Some(3));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("frame_0002") && err.contains("frame_0005"), "{err}");
    assert!(!err.contains("frame_0003"), "{err}");
}

#[test]
fn unknown_config_keys_exit_with_usage_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    fs::write(&cfg, r#"{"solver": {"lamda2": 0.1}}"#).unwrap();
    let res = tlisd(&["--config", p(&cfg), "synth", "--output", p(&tmp.path().join("x"))]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("lamda2"));
}

#[test]
fn config_file_values_reach_the_solver() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    synth(&frames, SMALL);
    let cfg = tmp.path().join("run.json");
    fs::write(&cfg, r#"{"solver": {"lambda2": 0.05, "max_iters": 3}}"#).unwrap();
    let out = tmp.path().join("dec");
    ok(&["--config", p(&cfg), "decompose", "--input", p(&frames), "--output", p(&out), "--lambda2", "0.07"]);
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["params"]["lambda2"], 0.07);
    assert_eq!(summary["params"]["max_iters"], 3);
    assert_eq!(summary["converged"], false);
    assert_eq!(summary["iterations"], 3);
}

#[test]
fn bench_writes_one_row_per_repeat() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    synth(&frames, TINY);
    let out = tmp.path().join("bench");
    ok(&["bench", "--input", p(&frames), "--output", p(&out), "--repeats", "3"]);
    let csv = fs::read_to_string(out.join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4, "{csv}");
    assert_eq!(json(&out.join("bench_summary.json")).as_array().unwrap().len(), 1);
}

#[test]
fn invalid_parameters_exit_with_usage_code() {
    let tmp = tempfile::tempdir().unwrap();
    let frames = tmp.path().join("frames");
    synth(&frames, TINY);
    let res = tlisd(&["decompose", "--input", p(&frames), "--output", p(&tmp.path().join("d")), "--rho", "0.5"]);
    assert_eq!(res.status.code(), Some(2), "{}", String::from_utf8_lossy(&res.stderr));
}
