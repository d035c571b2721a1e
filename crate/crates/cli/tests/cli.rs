//! End-to-end tests of the `proplang` binary: exit codes, file round
//! trips, and report output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_proplang")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn translate_then_decode_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let mut content = std::fs::read_to_string(fixture("statements/worked_examples.txt")).unwrap();
    content.push_str("x ^ 2 + 1 > 0\n");
    std::fs::write(&input, &content).unwrap();

    for key in ["keys/focused.key", "keys/random.key"] {
        let translated = dir.path().join("translated.txt");
        let decoded = dir.path().join("decoded.txt");
        let out = run(&[
            "translate",
            "--input",
            &path_str(&input),
            "--key",
            &path_str(&fixture(key)),
            "--output",
            &path_str(&translated),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let out = run(&[
            "translate",
            "--decode",
            "--input",
            &path_str(&translated),
            "--key",
            &path_str(&fixture(key)),
            "--output",
            &path_str(&decoded),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(
            std::fs::read(&input).unwrap(),
            std::fs::read(&decoded).unwrap(),
            "round trip through {key}"
        );
    }
}

#[test]
fn focused_translation_of_comparison_contains_doubled_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    std::fs::write(&input, "x > y\n").unwrap();
    let output = dir.path().join("out.txt");
    let out = run(&[
        "translate",
        "--input",
        &path_str(&input),
        "--key",
        &path_str(&fixture("keys/focused.key")),
        "--output",
        &path_str(&output),
    ]);
    assert!(out.status.success());
    let translated = std::fs::read_to_string(&output).unwrap();
    assert!(translated.contains(">>"), "{translated:?}");
}

#[test]
fn missing_key_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    std::fs::write(&input, "x\n").unwrap();
    let out = run(&[
        "translate",
        "--input",
        &path_str(&input),
        "--key",
        "/nonexistent/key.key",
        "--output",
        &path_str(&dir.path().join("out.txt")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unparseable_statement_exits_two_with_line_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    std::fs::write(&input, "x > 1\n(x\n").unwrap();
    let out = run(&[
        "translate",
        "--input",
        &path_str(&input),
        "--key",
        &path_str(&fixture("keys/random.key")),
        "--output",
        &path_str(&dir.path().join("out.txt")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(":2:"), "diagnostic names the line: {stderr}");
}

fn write_config(dir: &Path, train_n: usize, unseen_n: usize) -> PathBuf {
    let train = dir.join("train.jsonl");
    let unseen = dir.join("unseen.jsonl");
    std::fs::write(&train, proplang::synth::corpus_jsonl(train_n, 100, "t")).unwrap();
    std::fs::write(&unseen, proplang::synth::corpus_jsonl(unseen_n, 200, "u")).unwrap();
    let out_dir = dir.join("out");
    let config = format!(
        r#"
[paths]
training_corpus = {train:?}
unseen_corpus = {unseen:?}
key = {key:?}
inventory = {inventory:?}
output_dir = {out:?}

[build]
train_sizes = [60, 40]
seen_n = 25
unseen_n = 10
replicas = 3
seed = 7

[eval]
parallelism = 4
"#,
        train = train.display().to_string(),
        unseen = unseen.display().to_string(),
        key = fixture("keys/focused.key").display().to_string(),
        inventory = fixture("inventory/default.inv").display().to_string(),
        out = out_dir.display().to_string(),
    );
    let path = dir.join("pipeline.toml");
    std::fs::write(&path, config).unwrap();
    path
}

#[test]
fn build_eval_report_pipeline_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 80, 30);
    let out_dir = dir.path().join("out");

    let out = run(&["build", "--config", &path_str(&config)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("train-focused-default-60.jsonl").exists());
    assert!(out_dir.join("train-focused-default-40.jsonl").exists());
    let manifests = std::fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".manifest.json"))
        .count();
    assert_eq!(manifests, 12);

    let out = run(&["eval", "--config", &path_str(&config), "--mock", "oracle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let results = out_dir.join("results");
    let runs = std::fs::read_dir(&results).unwrap().count();
    assert_eq!(runs, 12);

    let out = run(&["report", "--results", &path_str(&results)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("oracle"));
    assert!(stdout.contains("100"));
    assert!(results.join("report.txt").exists());
    assert!(results.join("runs.csv").exists());
    assert!(results.join("figure1.csv").exists());
}

#[test]
fn report_csv_follows_schema() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 60, 20);
    assert!(run(&["build", "--config", &path_str(&config)]).status.success());
    assert!(run(&["eval", "--config", &path_str(&config), "--mock", "constant:true"])
        .status
        .success());
    let results = dir.path().join("out/results");
    let out = run(&[
        "report",
        "--results",
        &path_str(&results),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next(),
        Some("model_label,provenance,form,run_index,accuracy,correct,total")
    );
    // schema check: every row has exactly the seven columns, typed
    let mut rows = 0;
    for row in lines {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 7, "row {row:?}");
        assert!(["seen", "unseen"].contains(&cols[1]));
        assert!(["lean", "translated"].contains(&cols[2]));
        cols[3].parse::<u32>().unwrap();
        cols[4].parse::<f64>().unwrap();
        cols[5].parse::<f64>().unwrap();
        cols[6].parse::<usize>().unwrap();
        rows += 1;
    }
    assert_eq!(rows, 12);
}

#[test]
fn report_of_empty_results_dir_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["report", "--results", &path_str(dir.path())]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let table_lines: Vec<&str> = stdout
        .lines()
        .take_while(|l| !l.is_empty())
        .collect();
    assert_eq!(table_lines.len(), 1);
    assert!(table_lines[0].starts_with("model"));
}

#[test]
fn eval_with_chart_and_weighted_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 60, 20);
    assert!(run(&["build", "--config", &path_str(&config)]).status.success());
    assert!(run(&["eval", "--config", &path_str(&config), "--mock", "inverted"])
        .status
        .success());
    let results = dir.path().join("out/results");
    let chart = dir.path().join("chart.svg");
    let out = run(&[
        "report",
        "--results",
        &path_str(&results),
        "--weighted",
        "--chart",
        &path_str(&chart),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("query-count-weighted"));
    assert!(std::fs::read_to_string(&chart).unwrap().starts_with("<svg"));
}

#[test]
fn eval_without_test_sets_fails_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 60, 20);
    std::fs::create_dir_all(dir.path().join("out")).unwrap();
    let out = run(&["eval", "--config", &path_str(&config), "--mock", "oracle"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreachable_endpoint_exits_three_and_saves_invalid_run() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.jsonl");
    let unseen = dir.path().join("unseen.jsonl");
    std::fs::write(&train, proplang::synth::corpus_jsonl(40, 300, "t")).unwrap();
    std::fs::write(&unseen, proplang::synth::corpus_jsonl(20, 301, "u")).unwrap();
    let out_dir = dir.path().join("out");
    let config = format!(
        r#"
[paths]
training_corpus = {train:?}
unseen_corpus = {unseen:?}
key = {key:?}
output_dir = {out:?}

[build]
train_sizes = [10]
seen_n = 5
unseen_n = 5
replicas = 1
seed = 1

[eval]
endpoint = "http://127.0.0.1:9/chat"
model = "m"
max_retries = 0
backoff_ms = 1
"#,
        train = train.display().to_string(),
        unseen = unseen.display().to_string(),
        key = fixture("keys/focused.key").display().to_string(),
        out = out_dir.display().to_string(),
    );
    let config_path = dir.path().join("pipeline.toml");
    std::fs::write(&config_path, config).unwrap();

    assert!(run(&["build", "--config", &path_str(&config_path)]).status.success());
    let out = run(&["eval", "--config", &path_str(&config_path), "--model", "m"]);
    assert_eq!(out.status.code(), Some(3));
    // the aborted run is persisted, flagged invalid
    let invalid = std::fs::read_dir(out_dir.join("results"))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| std::fs::read_to_string(e.path()).unwrap())
        .filter(|text| text.contains("\"valid\": false"))
        .count();
    assert_eq!(invalid, 1);
}

#[test]
fn full_pipeline_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 80, 30);
    let out_dir = dir.path().join("out");
    let results = out_dir.join("results");

    let mut snapshots = Vec::new();
    for _ in 0..2 {
        if out_dir.exists() {
            std::fs::remove_dir_all(&out_dir).unwrap();
        }
        assert!(run(&["build", "--config", &path_str(&config)]).status.success());
        assert!(run(&["eval", "--config", &path_str(&config), "--mock", "constant:true"])
            .status
            .success());
        assert!(run(&["report", "--results", &path_str(&results)]).status.success());
        let mut files: Vec<(String, Vec<u8>)> = Vec::new();
        for base in [&out_dir, &results] {
            for entry in std::fs::read_dir(base).unwrap().filter_map(|e| e.ok()) {
                if entry.path().is_file() {
                    files.push((
                        entry.file_name().to_string_lossy().into_owned(),
                        std::fs::read(entry.path()).unwrap(),
                    ));
                }
            }
        }
        files.sort();
        snapshots.push(files);
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn unknown_mock_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 60, 20);
    assert!(run(&["build", "--config", &path_str(&config)]).status.success());
    let out = run(&["eval", "--config", &path_str(&config), "--mock", "psychic"]);
    assert_eq!(out.status.code(), Some(2));
}
