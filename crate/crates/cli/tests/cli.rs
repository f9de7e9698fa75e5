//! End-to-end checks of the binary: flag handling, exit codes, file output.

use std::path::Path;
use std::process::{Command, Output};

fn swarmnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swarmnn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn iris() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/iris.csv")
        .to_string_lossy()
        .into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn train_writes_outputs_and_respects_force() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out_flag = out_dir.to_string_lossy().into_owned();
    let args = [
        "train",
        "--dataset",
        &iris(),
        "--algorithm",
        "ppso",
        "--pop",
        "8",
        "--iters",
        "10",
        "--seeds",
        "0,1",
        "--out",
        &out_flag,
    ];

    let run = swarmnn(&args);
    assert!(run.status.success(), "stderr: {}", stderr(&run));
    let text = stdout(&run);
    assert!(text.contains("best seed"), "stdout: {text}");
    assert!(text.contains("wrote 5 files"), "stdout: {text}");
    for file in [
        "convergence_seed0.csv",
        "convergence_seed1.csv",
        "confusion_best.csv",
        "metrics.json",
        "summary.txt",
    ] {
        assert!(out_dir.join(file).exists(), "missing {file}");
    }

    // Existing outputs block a rerun unless forced.
    let blocked = swarmnn(&args);
    assert_eq!(blocked.status.code(), Some(2), "stderr: {}", stderr(&blocked));
    assert!(stderr(&blocked).contains("--force"));

    let metrics_before = std::fs::read(out_dir.join("metrics.json")).unwrap();
    let mut forced_args = args.to_vec();
    forced_args.push("--force");
    let forced = swarmnn(&forced_args);
    assert!(forced.status.success(), "stderr: {}", stderr(&forced));
    let metrics_after = std::fs::read(out_dir.join("metrics.json")).unwrap();
    assert_eq!(metrics_before, metrics_after, "rerun must be byte-identical");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("exp.conf");
    std::fs::write(
        &config_path,
        format!(
            "# tiny experiment\ndataset = {}\nalgorithm = BPSO\npop = 8\niters = 6\nseeds = 0\n",
            iris()
        ),
    )
    .unwrap();

    let run = swarmnn(&[
        "train",
        "--config",
        config_path.to_string_lossy().as_ref(),
        "--algorithm",
        "gsa",
        "--iters",
        "4",
    ]);
    assert!(run.status.success(), "stderr: {}", stderr(&run));
    let text = stdout(&run);
    assert!(text.contains("algorithm = GSA"), "stdout: {text}");
    assert!(text.contains("iters = 4"), "stdout: {text}");
    assert!(text.contains("pop = 8"), "stdout: {text}");
}

#[test]
fn missing_dataset_file_is_a_data_error() {
    let run = swarmnn(&[
        "train",
        "--dataset",
        "no/such/file.csv",
        "--algorithm",
        "ppso",
    ]);
    assert_eq!(run.status.code(), Some(3), "stderr: {}", stderr(&run));
}

#[test]
fn config_mistakes_are_config_errors() {
    let unknown_algorithm = swarmnn(&[
        "train",
        "--dataset",
        &iris(),
        "--algorithm",
        "newton",
    ]);
    assert_eq!(unknown_algorithm.status.code(), Some(2));
    assert!(stderr(&unknown_algorithm).contains("unknown algorithm"));

    let no_algorithm = swarmnn(&["train", "--dataset", &iris()]);
    assert_eq!(no_algorithm.status.code(), Some(2));

    let bad_split = swarmnn(&[
        "train",
        "--dataset",
        &iris(),
        "--algorithm",
        "ppso",
        "--split",
        "1.5",
    ]);
    assert_eq!(bad_split.status.code(), Some(2), "stderr: {}", stderr(&bad_split));

    // Unknown flags are usage errors from the parser itself.
    let bad_flag = swarmnn(&["train", "--bogus"]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn compare_lists_all_algorithms() {
    let run = swarmnn(&[
        "compare",
        "--dataset",
        &iris(),
        "--pop",
        "6",
        "--iters",
        "5",
        "--seeds",
        "0",
    ]);
    assert!(run.status.success(), "stderr: {}", stderr(&run));
    let text = stdout(&run);
    for name in ["PPSO", "BPSO", "SGPSO", "GSA", "PSOGSA"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
    assert!(text.contains('*'), "no best marker in:\n{text}");
}

#[test]
fn stability_reports_and_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out_flag = dir.path().join("maps").to_string_lossy().into_owned();
    let run = swarmnn(&[
        "stability",
        "--omega",
        "0.7",
        "--psi",
        "1.5",
        "--steps",
        "50",
        "--out",
        &out_flag,
    ]);
    assert!(run.status.success(), "stderr: {}", stderr(&run));
    let text = stdout(&run);
    assert!(text.contains("spectral radius"), "stdout: {text}");
    assert!(text.contains("stable"), "stdout: {text}");

    let trajectory = std::fs::read_to_string(Path::new(&out_flag).join("trajectory.csv")).unwrap();
    assert!(trajectory.starts_with("t,v,y\n"));
    assert_eq!(trajectory.lines().count(), 52);
    let region = std::fs::read_to_string(Path::new(&out_flag).join("region.csv")).unwrap();
    assert!(region.starts_with("omega,psi,"));
    assert!(region.lines().count() > 1000);
}

#[test]
fn stability_accepts_negative_parameters() {
    let run = swarmnn(&["stability", "--omega", "-0.2", "--psi", "3.9"]);
    assert!(run.status.success(), "stderr: {}", stderr(&run));
}
