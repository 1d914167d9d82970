use std::path::Path;
use std::process::{Command, Output};

use smoothboost_harness::{Experiment, ExperimentConfig, Format, RunRecord, TieRuleArg};

fn smoothboost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothboost"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn junta_maj_summary_reports_three_quarters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("junta.json");
    let o = smoothboost(&["junta-maj", "--k", "6", "--out", arg(&out), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let record = RunRecord::read(&out).unwrap();
    assert_eq!(record.summary["best_agreement"], serde_json::json!(0.75));
    assert_eq!(record.rows(), &[vec![4.0, 0.8125], vec![6.0, 0.75]]);
}

#[test]
fn zero_trials_mean_no_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wl.csv");
    let o = smoothboost(&["weak-learn-uniform", "--trials", "0", "--out", arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let summary = RunRecord::read(&RunRecord::summary_path(&out)).unwrap();
    assert_eq!(summary.summary["status"], serde_json::json!("no data"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1, "header only: {csv}");
}

#[test]
fn same_config_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = smoothboost(&["weak-learn-uniform", "--trials", "4", "--seed", "9", "--n", "6", "--k", "9", "--out", arg(out)]);
        assert_eq!(o.status.code().map(|c| c <= 1), Some(true));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = smoothboost(&["rerun", arg(&RunRecord::summary_path(&a))]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn every_flag_is_echoed_into_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mem.json");
    let o = smoothboost(&[
        "memorize-baseline",
        "--seed",
        "77",
        "--k",
        "3",
        "--n",
        "3",
        "--m",
        "5",
        "--kappa",
        "2",
        "--trials",
        "7",
        "--delta",
        "0.2",
        "--epsilon",
        "0.05",
        "--grid",
        "16",
        "--u-override",
        "4",
        "--fix-inner",
        "--tie-rule",
        "plus",
        "--out",
        arg(&out),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let expected = ExperimentConfig {
        experiment: Experiment::MemorizeBaseline,
        seed: 77,
        k: Some(3),
        n: Some(3),
        m: Some(5),
        kappa: Some(2.0),
        trials: Some(7),
        delta: Some(0.2),
        epsilon: Some(0.05),
        grid: Some(16),
        u_override: Some(4),
        fix_inner: true,
        tie_rule: Some(TieRuleArg::Plus),
        out: Some(out.clone()),
        format: Format::Json,
    };
    let record = RunRecord::read(&out).unwrap();
    assert_eq!(record.config, expected);
    assert_eq!(record.rows().len(), 7);
    let reparsed = ExperimentConfig::from_json(&serde_json::to_string(&record.config).unwrap()).unwrap();
    assert_eq!(reparsed, expected);
}

#[test]
fn config_file_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    let out = dir.path().join("r.csv");
    std::fs::write(
        &good,
        format!("experiment = \"rounding\"\nseed = 4\ntrials = 10\nout = {:?}\n", arg(&out)),
    )
    .unwrap();
    let o = smoothboost(&["run", arg(&good)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.exists());
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "experiment = \"rounding\"\nseed = 4\nbogus = 1\n").unwrap();
    let o = smoothboost(&["run", arg(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn invalid_parameters_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("j.csv");
    let o = smoothboost(&["junta-maj", "--k", "5", "--out", arg(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("even k"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    assert_eq!(smoothboost(&["rounding", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(smoothboost(&[]).status.code(), Some(2));
}

#[test]
fn failing_threshold_exits_one() {
    let o = smoothboost(&["junta-maj"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("[FAIL]"));
}

#[test]
fn report_marks_missing_and_refuses_mixed_versions() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let o = smoothboost(&["rounding", "--trials", "20", "--out", arg(&a), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let o = smoothboost(&["report", arg(&a)]);
    let table = String::from_utf8_lossy(&o.stdout).to_string();
    assert_eq!(table.lines().count(), 13);
    assert!(table.lines().nth(4).unwrap().contains("PASS"));
    assert!(table.contains("not run"));
    assert_eq!(o.status.code(), Some(1));

    let mut other = RunRecord::read(&a).unwrap();
    other.version = "9.9.9".into();
    let b = dir.path().join("b.json");
    std::fs::write(&b, serde_json::to_vec(&other).unwrap()).unwrap();
    let o = smoothboost(&["report", arg(&a), arg(&b)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("9.9.9") && err.contains(env!("CARGO_PKG_VERSION")), "{err}");
}
