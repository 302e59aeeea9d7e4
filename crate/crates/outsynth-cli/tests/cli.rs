//! End-to-end tests of the `outsynth` binary: exit codes, determinism
//! across worker counts, and the fit/eval equivalence through a model file.

use std::path::Path;
use std::process::{Command, Output};

const BLOBS: &str = "blobs:n_in=80,n_out=80,dim=4,sep=6,seed=5";

fn outsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_outsynth"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn write_cfg(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.cfg");
    let base = "features=raw\nae.activation=tanh\ntrain.epochs=20\ntrain.batch_size=16\n\
                alpha=1.5\nbeta=3.0\nsvm.gamma=0.5\nsvm.c=1.0\nseed=7\n";
    std::fs::write(&path, format!("{base}{extra}")).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_lists_every_command() {
    let out = outsynth(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for cmd in [
        "fit",
        "eval",
        "gridsearch",
        "ablate",
        "synth-export",
        "make-blobs",
        "inspect-model",
    ] {
        assert!(text.contains(cmd), "help is missing `{cmd}`:\n{text}");
    }
}

#[test]
fn missing_dataset_is_an_actionable_config_error() {
    let out = outsynth(&["eval"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("--dataset"), "unhelpful: {err}");
}

#[test]
fn missing_dataset_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "folds=2\n");
    let out = outsynth(&[
        "eval",
        "--config",
        &cfg,
        "--dataset",
        "csv:inliers=/nonexistent/in.csv,outliers=/nonexistent/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("/nonexistent/in.csv"), "unhelpful: {err}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "frobnicate=1\n");
    let out = outsynth(&["eval", "--config", &cfg, "--dataset", BLOBS]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("frobnicate"), "{}", stderr(&out));
}

#[test]
fn fit_then_eval_matches_the_in_process_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "folds=1\n");
    let fit_dir = dir.path().join("fit");
    let out = outsynth(&[
        "fit",
        "--config",
        &cfg,
        "--dataset",
        BLOBS,
        "--out-dir",
        fit_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let model = fit_dir.join("model.bin");
    assert!(model.exists());

    let via_model = dir.path().join("via-model");
    let out = outsynth(&[
        "eval",
        "--model",
        model.to_str().unwrap(),
        "--dataset",
        BLOBS,
        "--out-dir",
        via_model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let direct = dir.path().join("direct");
    let out = outsynth(&[
        "eval",
        "--config",
        &cfg,
        "--dataset",
        BLOBS,
        "--out-dir",
        direct.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let a = std::fs::read(via_model.join("report.csv")).unwrap();
    let b = std::fs::read(direct.join("report.csv")).unwrap();
    assert_eq!(a, b, "fit+eval and the single run must report identical metrics");
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "folds=3\n");
    let run = |workers: &str, sub: &str| -> Vec<u8> {
        let out_dir = dir.path().join(sub);
        let out = outsynth(&[
            "eval",
            "--config",
            &cfg,
            "--dataset",
            BLOBS,
            "--workers",
            workers,
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read(out_dir.join("report.csv")).unwrap()
    };
    assert_eq!(run("1", "w1"), run("8", "w8"));
}

#[test]
fn eval_model_rejects_config_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "folds=1\n");
    let fit_dir = dir.path().join("fit");
    let out = outsynth(&[
        "fit",
        "--config",
        &cfg,
        "--dataset",
        BLOBS,
        "--out-dir",
        fit_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let model = fit_dir.join("model.bin");
    let out = outsynth(&[
        "eval",
        "--model",
        model.to_str().unwrap(),
        "--dataset",
        BLOBS,
        "--seed",
        "99",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("stored in the model file"), "{}", stderr(&out));
}

#[test]
fn make_blobs_writes_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    let out = outsynth(&[
        "make-blobs",
        "--dataset",
        "blobs:n_in=30,n_out=20,dim=3,sep=5,seed=2",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let inliers = std::fs::read_to_string(dir.path().join("inliers.csv")).unwrap();
    let outliers = std::fs::read_to_string(dir.path().join("outliers.csv")).unwrap();
    assert_eq!(inliers.lines().count(), 31, "header + 30 rows");
    assert_eq!(outliers.lines().count(), 21, "header + 20 rows");
    assert!(inliers.starts_with("x_0,x_1,x_2\n"));

    // Non-blobs specs are refused: this command materializes synthetic data.
    let out = outsynth(&["make-blobs", "--dataset", "csv:inliers=a,outliers=b"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gridsearch_writes_the_cell_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "folds=2\n");
    let out = outsynth(&[
        "gridsearch",
        "--config",
        &cfg,
        "--dataset",
        BLOBS,
        "--alphas",
        "1.0,1.5",
        "--betas",
        "2.0,3.0",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let grid = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 5, "header + 4 cells:\n{grid}");
    assert!(grid.starts_with("alpha,beta,auc,f1,reason\n"));
    assert!(stdout(&out).contains("best:"), "{}", stdout(&out));
}

#[test]
fn ablate_and_synth_export_produce_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "folds=2\n");
    let out = outsynth(&[
        "ablate",
        "--config",
        &cfg,
        "--dataset",
        BLOBS,
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = std::fs::read_to_string(dir.path().join("ablation.csv")).unwrap();
    assert_eq!(table.lines().count(), 9, "header + 8 rows:\n{table}");

    let out = outsynth(&[
        "synth-export",
        "--config",
        &cfg,
        "--dataset",
        BLOBS,
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("q.csv").exists());
    assert!(dir.path().join("synth.csv").exists());
}

#[test]
fn inspect_model_reports_format_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "folds=1\n");
    let fit_dir = dir.path().join("fit");
    let out = outsynth(&[
        "fit",
        "--config",
        &cfg,
        "--dataset",
        BLOBS,
        "--out-dir",
        fit_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = outsynth(&[
        "inspect-model",
        "--model",
        fit_dir.join("model.bin").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("format: 1.0"), "{text}");
    assert!(text.contains("section QCAT"), "{text}");
    assert!(text.contains("classifier: svm"), "{text}");
    assert!(text.contains("features=raw"), "{text}");
}
