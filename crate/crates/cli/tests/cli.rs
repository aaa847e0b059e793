//! End-to-end checks of the `ffrsim` binary: flags, exit codes, file
//! contracts, and batch determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ffrsim"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// A configuration that keeps test batches quick without touching the
/// physics: same system, shorter tail.
const FAST: &str = r#"{"solver": {"duration": 12.0}}"#;

#[test]
fn version_prints_name_and_semver() {
    let out = bin().arg("version").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("ffrsim "), "got: {text}");
    let semver = text.trim().split(' ').nth(1).unwrap().to_string();
    assert_eq!(semver.split('.').count(), 3, "got: {semver}");
}

#[test]
fn run_case1_reports_zero_ffr_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["run", "--case", "1", "--out", "c1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("case 1"), "stdout: {}", stdout(&out));

    let dir = tmp.path().join("c1");
    let metrics = read(&dir.join("metrics.json"));
    let value: serde_json::Value = serde_json::from_str(&metrics).unwrap();
    assert_eq!(value["ffr_energy_mwh"], serde_json::json!(0.0));

    for file in [
        "timeseries.csv",
        "metrics.json",
        "manifest.json",
        "frequency.svg",
        "power.svg",
        "weights.svg",
        "metrics.svg",
    ] {
        assert!(dir.join(file).exists(), "missing {file}");
    }
}

#[test]
fn metrics_json_has_exactly_the_documented_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["run", "--out", "m", "--no-plots"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let value: serde_json::Value =
        serde_json::from_str(&read(&tmp.path().join("m/metrics.json"))).unwrap();
    let keys: Vec<&str> = value.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(
        keys,
        vec![
            "nadir_hz",
            "rocof_hz_per_s",
            "recovery_time_s",
            "max_power_mw",
            "ffr_energy_mwh"
        ]
    );
    let inner: Vec<&str> = value["max_power_mw"]
        .as_object()
        .unwrap()
        .keys()
        .map(|k| k.as_str())
        .collect();
    assert_eq!(inner, vec!["ev", "dc", "bess"]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = run_in(tmp.path(), &["run", "--out", dir]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    }
    for file in ["timeseries.csv", "metrics.json", "manifest.json", "frequency.svg"] {
        let a = read(&tmp.path().join("a").join(file));
        let b = read(&tmp.path().join("b").join(file));
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn csv_follows_the_column_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["run", "--out", "c", "--no-plots"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = read(&tmp.path().join("c/timeseries.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t_s,f_hz,p_ev_mw,p_ups_mw,p_it_mw,p_bess_mw,p_ffr_total_mw,\
         alpha_ev,alpha_dc,alpha_bess,soc_ev,soc_bess"
            .replace(' ', "")
    );
    let first = lines.next().unwrap();
    assert_eq!(first.split(',').count(), 12);
    for field in first.split(',') {
        field.parse::<f64>().expect("numeric fields");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    let out = run_in(dir, &["run", "--config", "does-not-exist.json"]);
    assert_eq!(out.status.code(), Some(10), "stderr: {}", stderr(&out));

    let bad = write_config(dir, "bad.json", "{");
    let out = run_in(dir, &["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(11), "stderr: {}", stderr(&out));

    let unknown = write_config(dir, "unknown.json", r#"{"solvr": {}}"#);
    let out = run_in(dir, &["run", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(12), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("solvr"));

    let range = write_config(
        dir,
        "range.json",
        r#"{"resources": {"bess": {"time_const_t_b": -1}}}"#,
    );
    let out = run_in(dir, &["run", "--config", range.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(13), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("resources.bess.time_const_t_b"));

    let out = run_in(dir, &["run", "--case", "9"]);
    assert_eq!(out.status.code(), Some(13), "stderr: {}", stderr(&out));
}

#[test]
fn no_plots_skips_figure_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["run", "--out", "lean", "--no-plots"]);
    assert_eq!(out.status.code(), Some(0));
    let entries: Vec<String> = std::fs::read_dir(tmp.path().join("lean"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .collect();
    assert!(entries.iter().all(|name| !name.ends_with(".svg")), "{entries:?}");
    let manifest = read(&tmp.path().join("lean/manifest.json"));
    assert!(!manifest.contains(".svg"));
}

#[test]
fn ffrsim_out_env_sets_the_default_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--case", "2", "--no-plots"])
        .current_dir(tmp.path())
        .env("FFRSIM_OUT", "from-env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(tmp.path().join("from-env/metrics.json").exists());
}

#[test]
fn strategy_override_is_normalized_and_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &["run", "--strategy", "bess", "--out", "s", "--no-plots"],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("bess_dominant"));
    let manifest = read(&tmp.path().join("s/manifest.json"));
    assert!(manifest.contains("\"strategy\": \"bess_dominant\""));

    let out = run_in(tmp.path(), &["run", "--strategy", "custom", "--out", "x"]);
    assert_eq!(out.status.code(), Some(13), "custom without weights must fail");

    let weights = write_config(
        tmp.path(),
        "weights.json",
        r#"{"strategy": {"kind": "custom", "fixed_weights": {"ev": 0.5, "dc": 0.25, "bess": 0.25}}}"#,
    );
    let out = run_in(
        tmp.path(),
        &[
            "run",
            "--config",
            weights.to_str().unwrap(),
            "--out",
            "w",
            "--no-plots",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let csv = read(&tmp.path().join("w/timeseries.csv"));
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
    assert!((fields[7] - 0.5).abs() < 1e-12, "alpha_ev {}", fields[7]);
    assert!((fields[8] - 0.25).abs() < 1e-12, "alpha_dc {}", fields[8]);
    assert!((fields[9] - 0.25).abs() < 1e-12, "alpha_bess {}", fields[9]);
}

#[test]
fn solver_overrides_are_validated() {
    let tmp = tempfile::tempdir().unwrap();
    // A dt that does not divide the sampling stride must be rejected.
    let out = run_in(tmp.path(), &["run", "--dt", "0.0007", "--out", "x"]);
    assert_eq!(out.status.code(), Some(13), "stderr: {}", stderr(&out));
    // A duration ending before the disturbance must be rejected.
    let out = run_in(tmp.path(), &["run", "--duration", "3", "--out", "x"]);
    assert_eq!(out.status.code(), Some(13), "stderr: {}", stderr(&out));
}

#[test]
fn batch_writes_grid_summary_and_figures() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "fast.json", FAST);
    let out = run_in(
        tmp.path(),
        &[
            "batch",
            "--config",
            config.to_str().unwrap(),
            "--out",
            "grid",
            "--jobs",
            "4",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let root = tmp.path().join("grid");
    let mut cell_dirs = 0;
    for strategy in ["adaptive", "bess_dominant", "dc_dominant", "ev_dominant"] {
        for case in 1..=4 {
            let dir = root.join(format!("{strategy}_case{case}"));
            assert!(dir.join("metrics.json").exists(), "missing {}", dir.display());
            cell_dirs += 1;
        }
    }
    assert_eq!(cell_dirs, 16);

    let summary = read(&root.join("summary.csv"));
    assert_eq!(summary.lines().count(), 17, "header + 16 rows");

    // Cases 1-3 fix their own allocation, so their rows cannot depend
    // on the strategy column.
    for case in 1..=3 {
        let rows: Vec<String> = summary
            .lines()
            .skip(1)
            .filter(|l| l.split(',').nth(1) == Some(&case.to_string()))
            .map(|l| l.splitn(3, ',').nth(2).unwrap().to_string())
            .collect();
        assert_eq!(rows.len(), 4);
        assert!(
            rows.iter().all(|r| r == &rows[0]),
            "case {case} rows differ across strategies: {rows:?}"
        );
    }

    for fig in ["fig5.svg", "fig6.svg", "fig7.svg", "fig8.svg"] {
        let body = read(&root.join(fig));
        assert!(body.starts_with("<svg"), "{fig} is not svg");
        assert!(body.trim_end().ends_with("</svg>"), "{fig} is truncated");
    }
}

#[test]
fn batch_results_do_not_depend_on_job_count() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "fast.json", FAST);
    for (dir, jobs) in [("j1", "1"), ("j8", "8")] {
        let out = run_in(
            tmp.path(),
            &[
                "batch",
                "--config",
                config.to_str().unwrap(),
                "--out",
                dir,
                "--jobs",
                jobs,
            ],
        );
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    }
    let a = read(&tmp.path().join("j1/summary.csv"));
    let b = read(&tmp.path().join("j8/summary.csv"));
    assert_eq!(a, b, "summary.csv varies with --jobs");

    let cell = "adaptive_case4/timeseries.csv";
    assert_eq!(
        read(&tmp.path().join("j1").join(cell)),
        read(&tmp.path().join("j8").join(cell)),
        "cell series varies with --jobs"
    );
}
