//! Integration tests for the `skelscan` binary: subcommand behavior,
//! exit codes, config round-trip and the in-stream error contract.

use std::path::Path;
use std::process::{Command, Output};

use skelscan_core::imaging::GrayImage;
use skelscan_core::PipelineConfig;

fn skelscan(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skelscan"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().next().expect("one line")).expect("valid JSON")
}

/// `gen humanoid` composited on a generated background, then `detect`:
/// the report reaches the definite-human category.
#[test]
fn gen_then_detect_golden() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert!(skelscan(root, &["gen", "background"]).status.success());
    assert!(skelscan(
        root,
        &["gen", "humanoid", "--height", "160", "--background", "background.png", "--at", "30", "80"],
    )
    .status
    .success());
    let out = skelscan(root, &["detect", "--background", "background.png", "--frame", "frame.png"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["category"], "AlertDefiniteHuman");
    assert_eq!(report["final_score"], 1.8);
    assert_eq!(report["changed"], true);
}

#[test]
fn diff_identical_images_is_all_black() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert!(skelscan(root, &["gen", "background"]).status.success());
    let out = skelscan(
        root,
        &["diff", "--background", "background.png", "--frame", "background.png"],
    );
    assert!(out.status.success());
    let mask = GrayImage::load(&root.join("diff.png")).unwrap();
    assert!(mask.data().iter().all(|&p| p == 0));
}

#[test]
fn unknown_flag_is_usage_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = skelscan(dir.path(), &["detect", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_input_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = skelscan(
        dir.path(),
        &["detect", "--background", "absent.png", "--frame", "absent.png"],
    );
    assert_eq!(out.status.code(), Some(2));
}

/// Writing the effective config and re-reading it reproduces identical
/// behavior.
#[test]
fn config_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert!(skelscan(root, &["gen", "background"]).status.success());
    assert!(skelscan(
        root,
        &["gen", "humanoid", "--background", "background.png", "--at", "20", "60"],
    )
    .status
    .success());
    let toml_text = toml::to_string(&PipelineConfig::default()).unwrap();
    std::fs::write(root.join("config.toml"), toml_text).unwrap();
    let plain = skelscan(root, &["detect", "--background", "background.png", "--frame", "frame.png"]);
    let configured = skelscan(
        root,
        &[
            "detect",
            "--config",
            "config.toml",
            "--background",
            "background.png",
            "--frame",
            "frame.png",
        ],
    );
    assert!(plain.status.success() && configured.status.success());
    assert_eq!(plain.stdout, configured.stdout);
}

#[test]
fn bad_config_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    std::fs::write(root.join("config.toml"), "no_such_option = 1\n").unwrap();
    let out = skelscan(root, &["--config", "config.toml", "gen", "background"]);
    assert_eq!(out.status.code(), Some(1));
}

/// A corrupt frame mid-stream yields one in-stream error record; the
/// remaining frames are still processed and the run exits cleanly.
#[test]
fn corrupt_frame_is_reported_in_stream() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert!(skelscan(root, &["gen", "background"]).status.success());
    let bg = GrayImage::load(&root.join("background.png")).unwrap();
    for i in [0usize, 2] {
        bg.save(&root.join(format!("frame_{i}.png"))).unwrap();
    }
    std::fs::write(root.join("frame_1.png"), b"not an image").unwrap();
    let out = skelscan(
        root,
        &["run", "--background", "background.png", "frame_0.png", "frame_1.png", "frame_2.png"],
    );
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1]["error"].is_string());
    assert_eq!(lines[0]["category"], "NoChange");
    assert_eq!(lines[2]["category"], "NoChange");
}

#[test]
fn non_monotone_frame_numbers_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert!(skelscan(root, &["gen", "background"]).status.success());
    let bg = GrayImage::load(&root.join("background.png")).unwrap();
    for i in [5usize, 3] {
        bg.save(&root.join(format!("frame_{i}.png"))).unwrap();
    }
    let out = skelscan(
        root,
        &["run", "--background", "background.png", "frame_5.png", "frame_3.png"],
    );
    assert_eq!(out.status.code(), Some(1));
}

/// `skeletonize` writes the pruned skeleton raster and its graph JSON.
#[test]
fn skeletonize_writes_raster_and_graph() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert!(skelscan(root, &["gen", "humanoid"]).status.success());
    let out = skelscan(root, &["skeletonize", "--mask", "figure.png"]);
    assert!(out.status.success());
    let skel = GrayImage::load(&root.join("skeleton.png")).unwrap();
    assert!(skel.data().iter().any(|&p| p > 0));
    let graph: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root.join("graph.json")).unwrap()).unwrap();
    assert!(graph["branches"].as_array().unwrap().len() >= 5);
    assert!(graph["nodes"].as_array().unwrap().len() >= 5);
}

/// Short-circuit invariant: unchanged frames never reach the skeleton
/// stage, observable through --timing diagnostics.
#[test]
fn timing_shows_short_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert!(skelscan(root, &["gen", "background"]).status.success());
    let out = skelscan(
        root,
        &["detect", "--background", "background.png", "--frame", "background.png", "--timing"],
    );
    assert!(out.status.success());
    let report = stdout_json(&out);
    let stages = report["diagnostics"]["stage_ms"].as_array().unwrap();
    let names: Vec<&str> = stages.iter().map(|s| s[0].as_str().unwrap()).collect();
    assert!(names.contains(&"change_gate"));
    assert!(!names.contains(&"skeleton"));
}
