//! CLI contract tests driving the built binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prospect"))
}

fn run_ok(cmd: &mut Command) {
    let output = cmd.output().expect("spawn prospect");
    assert!(
        output.status.success(),
        "command failed: {}\n{}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
}

fn run_err(cmd: &mut Command) -> String {
    let output = cmd.output().expect("spawn prospect");
    assert!(!output.status.success(), "command unexpectedly succeeded");
    String::from_utf8_lossy(&output.stderr).to_string()
}

fn synth_small(dir: &Path, seed: u64) {
    run_ok(bin().args([
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--universe-size",
        "1500",
        "--audience-size",
        "150",
        "--numeric-dims",
        "8",
        "--categorical-dims",
        "3",
        "--separation",
        "2.0",
        "--seed",
        &seed.to_string(),
    ]));
}

fn train_args(data: &Path, out: &Path) -> Vec<String> {
    [
        "train",
        "--data-dir",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--ratio",
        "2",
        "--encoded-size",
        "8",
        "--architecture",
        "a512",
        "--ae-epochs",
        "1",
        "--epochs",
        "2",
        "--optimizer",
        "sgd",
        "--lr",
        "0.01",
        "--momentum",
        "0.9",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[test]
fn synth_writes_expected_files_with_expected_row_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth_small(&data, 3);
    for file in [
        "schema.txt",
        "audience.csv",
        "universe.csv",
        "conversions.csv",
        "manifest.json",
    ] {
        assert!(data.join(file).exists(), "{file} missing");
    }
    let audience = std::fs::read_to_string(data.join("audience.csv")).unwrap();
    assert_eq!(audience.lines().count(), 151); // header + rows
    let universe = std::fs::read_to_string(data.join("universe.csv")).unwrap();
    assert_eq!(universe.lines().count(), 1501);
}

#[test]
fn synth_rejects_infeasible_sizes_before_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bad");
    let err = run_err(bin().args([
        "synth",
        "--out",
        out.to_str().unwrap(),
        "--universe-size",
        "100",
        "--audience-size",
        "100",
    ]));
    assert!(err.contains("audience"), "stderr: {err}");
    assert!(
        !out.exists(),
        "output directory was created despite the error"
    );
}

#[test]
fn synth_refuses_nonempty_out_dir_without_force() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth_small(&data, 1);
    let err = run_err(bin().args([
        "synth",
        "--out",
        data.to_str().unwrap(),
        "--universe-size",
        "1500",
        "--audience-size",
        "150",
    ]));
    assert!(err.contains("--force"), "stderr: {err}");
    run_ok(bin().args([
        "synth",
        "--out",
        data.to_str().unwrap(),
        "--universe-size",
        "1500",
        "--audience-size",
        "150",
        "--numeric-dims",
        "8",
        "--force",
    ]));
}

#[test]
fn train_emits_artifacts_and_seed_aggregates() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth_small(&data, 5);
    let out = tmp.path().join("run");
    let mut args = train_args(&data, &out);
    args.extend([
        "--seeds".to_string(),
        "1,2,3".to_string(),
        "--snapshot".to_string(),
    ]);
    run_ok(bin().args(&args));

    for artifact in ["manifest.json", "metrics.csv", "metrics.txt"] {
        assert!(out.join(artifact).exists());
    }
    for seed in 1..=3 {
        for artifact in [
            "ae.pknn",
            "classifier.pknn",
            "ae_loss.csv",
            "clf_loss.csv",
            "stats.txt",
            "dataset.pknn",
        ] {
            assert!(out.join(format!("seed-{seed}/{artifact}")).exists());
        }
    }
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.lines().any(|l| l.starts_with("mean,train")));
    assert!(metrics.lines().any(|l| l.starts_with("std,test")));
    let pretty = std::fs::read_to_string(out.join("metrics.txt")).unwrap();
    assert!(pretty.contains("+/-"));
}

#[test]
fn rf_model_flows_through_the_same_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth_small(&data, 9);
    let out = tmp.path().join("rf");
    run_ok(bin().args([
        "train",
        "--data-dir",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--model",
        "rf",
        "--ratio",
        "2",
        "--rf-trees",
        "20",
        "--rf-max-depth",
        "6",
    ]));
    assert!(out.join("seed-0/rf.pknn").exists());
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.lines().count() >= 3);
}

#[test]
fn config_file_applies_with_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth_small(&data, 11);

    let config = tmp.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"ratio": 3, "epochs": 1, "ae_epochs": 1, "encoded_size": 8,
           "architecture": "a512", "optimizer": "sgd", "lr": 0.01, "momentum": 0.9}"#,
    )
    .unwrap();

    // Flag --ratio 2 overrides the config file's 3; epochs come from the file.
    let out = tmp.path().join("run");
    run_ok(bin().args([
        "train",
        "--data-dir",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--ratio",
        "2",
    ]));
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(value["config"]["run"]["ratio"], 2);
    assert_eq!(value["config"]["run"]["epochs"], 1);
    assert_eq!(value["config"]["run"]["architecture"], "a512");
}

#[test]
fn sweep_emits_one_row_per_value_and_split_with_constant_positives() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth_small(&data, 13);
    let out = tmp.path().join("sweep");
    run_ok(bin().args([
        "sweep",
        "--kind",
        "ratio",
        "--values",
        "1,2,3",
        "--data-dir",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--encoded-size",
        "8",
        "--architecture",
        "a512",
        "--ae-epochs",
        "1",
        "--epochs",
        "1",
        "--optimizer",
        "sgd",
        "--lr",
        "0.01",
        "--momentum",
        "0.9",
    ]));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 6); // train + test per value
    let positives: Vec<&str> = rows.iter().map(|r| r.split(',').nth(4).unwrap()).collect();
    assert!(positives.iter().all(|&p| p == positives[0]));
}

#[test]
fn default_ratio_sweep_covers_one_through_ten() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth_small(&data, 29);
    let out = tmp.path().join("sweep");
    run_ok(bin().args([
        "sweep",
        "--kind",
        "ratio",
        "--data-dir",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--encoded-size",
        "8",
        "--architecture",
        "a512",
        "--ae-epochs",
        "1",
        "--epochs",
        "1",
        "--optimizer",
        "sgd",
        "--lr",
        "0.02",
        "--momentum",
        "0.9",
    ]));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    // Train and test rows for each of ratio 1..=10.
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn sweep_rejects_invalid_values() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth_small(&data, 17);
    let err = run_err(bin().args([
        "sweep",
        "--kind",
        "ratio",
        "--values",
        "11",
        "--data-dir",
        data.to_str().unwrap(),
        "--out",
        tmp.path().join("s").to_str().unwrap(),
    ]));
    assert!(err.contains("1..=10"), "stderr: {err}");

    let err = run_err(bin().args([
        "sweep",
        "--kind",
        "encoder-size",
        "--values",
        "48",
        "--data-dir",
        data.to_str().unwrap(),
        "--out",
        tmp.path().join("s2").to_str().unwrap(),
    ]));
    assert!(err.contains("48"), "stderr: {err}");
}

fn train_and_rank(tmp: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let data = tmp.join("data");
    synth_small(&data, 21);
    let run = tmp.join("run");
    run_ok(bin().args(train_args(&data, &run)));
    let rank = tmp.join("rank");
    run_ok(bin().args([
        "rank",
        "--model",
        run.join("seed-0/classifier.pknn").to_str().unwrap(),
        "--schema",
        data.join("schema.txt").to_str().unwrap(),
        "--stats",
        run.join("seed-0/stats.txt").to_str().unwrap(),
        "--universe",
        data.join("universe.csv").to_str().unwrap(),
        "--out",
        rank.to_str().unwrap(),
    ]));
    (data, run, rank)
}

#[test]
fn rank_covers_the_whole_universe() {
    let tmp = tempfile::tempdir().unwrap();
    let (_, _, rank) = train_and_rank(tmp.path());
    let csv = std::fs::read_to_string(rank.join("ranking.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1501); // header + one row per universe record
    let first = csv.lines().nth(1).unwrap();
    assert!(first.starts_with("1,"));
}

#[test]
fn campaign_validates_reach_and_compare_emits_table() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, run, _) = train_and_rank(tmp.path());

    let err = run_err(bin().args([
        "campaign",
        "--model",
        run.join("seed-0/classifier.pknn").to_str().unwrap(),
        "--schema",
        data.join("schema.txt").to_str().unwrap(),
        "--stats",
        run.join("seed-0/stats.txt").to_str().unwrap(),
        "--universe",
        data.join("universe.csv").to_str().unwrap(),
        "--ground-truth",
        data.join("conversions.csv").to_str().unwrap(),
        "--reach",
        "99999",
        "--out",
        tmp.path().join("c-bad").to_str().unwrap(),
    ]));
    assert!(err.contains("reach"), "stderr: {err}");

    let mut campaign_dirs = Vec::new();
    for (tag, model) in [("dl-ae", "classifier.pknn"), ("dl-ae-b", "classifier.pknn")] {
        let out = tmp.path().join(format!("camp-{tag}"));
        run_ok(bin().args([
            "campaign",
            "--model",
            run.join("seed-0").join(model).to_str().unwrap(),
            "--schema",
            data.join("schema.txt").to_str().unwrap(),
            "--stats",
            run.join("seed-0/stats.txt").to_str().unwrap(),
            "--universe",
            data.join("universe.csv").to_str().unwrap(),
            "--ground-truth",
            data.join("conversions.csv").to_str().unwrap(),
            "--reach",
            "300",
            "--method-tag",
            tag,
            "--out",
            out.to_str().unwrap(),
        ]));
        campaign_dirs.push(out);
    }

    let cmp = tmp.path().join("cmp");
    run_ok(bin().args([
        "compare",
        "--reports",
        campaign_dirs[0].join("campaign.json").to_str().unwrap(),
        campaign_dirs[1].join("campaign.json").to_str().unwrap(),
        "--out",
        cmp.to_str().unwrap(),
    ]));
    let table = std::fs::read_to_string(cmp.join("comparison.csv")).unwrap();
    assert!(table.contains("cvr_percent"));
    let pretty = std::fs::read_to_string(cmp.join("comparison.txt")).unwrap();
    assert!(pretty.contains("tie")); // identical model twice
}

#[test]
fn schema_mismatch_is_named_explicitly() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, run, _) = train_and_rank(tmp.path());

    // A schema with fewer columns than the model expects.
    let narrow = tmp.path().join("narrow.txt");
    std::fs::write(&narrow, "record_id record_id\nnumeric n0\n").unwrap();
    let narrow_universe = tmp.path().join("narrow.csv");
    std::fs::write(&narrow_universe, "record_id,n0\nU1,0.5\n").unwrap();
    let narrow_stats = tmp.path().join("narrow-stats.txt");
    std::fs::write(&narrow_stats, "0 0.0e0 1.0e0\n").unwrap();

    let err = run_err(bin().args([
        "rank",
        "--model",
        run.join("seed-0/classifier.pknn").to_str().unwrap(),
        "--schema",
        narrow.to_str().unwrap(),
        "--stats",
        narrow_stats.to_str().unwrap(),
        "--universe",
        narrow_universe.to_str().unwrap(),
        "--out",
        tmp.path().join("r2").to_str().unwrap(),
    ]));
    assert!(err.contains("schema mismatch"), "stderr: {err}");
    let _ = data;
}

#[test]
fn manifest_lists_hashed_inputs_and_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth_small(&data, 23);
    let out = tmp.path().join("run");
    run_ok(bin().args(train_args(&data, &out)));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "train");
    assert!(manifest["inputs"].as_array().unwrap().len() >= 3);
    let artifacts = manifest["artifacts"].as_array().unwrap();
    assert!(artifacts.iter().any(|a| a["path"] == "metrics.csv"));
    for artifact in artifacts {
        assert_eq!(artifact["fnv64"].as_str().unwrap().len(), 16);
    }
}
