//! File outputs: the time-series CSV, the metrics JSON, the run
//! manifest, and the batch summary table.
//!
//! All writes are atomic (temp file + rename) so an interrupted run
//! never leaves a half-written artifact, and nothing here embeds
//! timestamps or machine identity — rerunning the same configuration
//! reproduces every output byte for byte.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::metrics::MetricsRecord;
use crate::scenario::{MatrixCell, RunResult};

/// Fixed CSV column order; part of the output contract.
pub const CSV_HEADER: &str = "t_s,f_hz,p_ev_mw,p_ups_mw,p_it_mw,p_bess_mw,\
p_ffr_total_mw,alpha_ev,alpha_dc,alpha_bess,soc_ev,soc_bess";

/// Serialize a number with 9 significant digits (scientific notation);
/// parsing the result back recovers the value at that precision.
pub fn fmt_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Write `bytes` to `path` atomically: stage into a temporary file in
/// the same directory, then rename over the destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Render the full time series as CSV text.
pub fn csv_string(result: &RunResult) -> String {
    let mut out = String::with_capacity(result.samples.len() * 200 + 128);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &result.samples {
        let fields = [
            s.t_s,
            s.f_hz,
            s.p_ev_mw,
            s.p_ups_mw,
            s.p_it_mw,
            s.p_bess_mw,
            s.p_ffr_total_mw,
            s.alpha_ev,
            s.alpha_dc,
            s.alpha_bess,
            s.soc_ev,
            s.soc_bess,
        ];
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt_sig9(*f));
        }
        out.push('\n');
    }
    out
}

/// Pretty-printed metrics JSON (exact key set fixed by `MetricsRecord`).
pub fn metrics_json(metrics: &MetricsRecord) -> String {
    let mut s = serde_json::to_string_pretty(metrics).expect("metrics are always serializable");
    s.push('\n');
    s
}

/// Batch summary table: one row per (strategy, case) cell. An empty
/// recovery field means the run never settled.
pub fn summary_csv(cells: &[MatrixCell]) -> String {
    let mut out = String::from(
        "strategy,case,nadir_hz,rocof_hz_per_s,recovery_time_s,\
max_power_ev_mw,max_power_dc_mw,max_power_bess_mw,ffr_energy_mwh\n",
    );
    for c in cells {
        let m = &c.metrics;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.strategy,
            c.case_id,
            fmt_sig9(m.nadir_hz),
            fmt_sig9(m.rocof_hz_per_s),
            m.recovery_time_s.map(fmt_sig9).unwrap_or_default(),
            fmt_sig9(m.max_power_mw.ev),
            fmt_sig9(m.max_power_mw.dc),
            fmt_sig9(m.max_power_mw.bess),
            fmt_sig9(m.ffr_energy_mwh),
        ));
    }
    out
}

/// SHA-256 of the effective configuration, hex-encoded.
pub fn config_sha256(config_bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config_bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

#[derive(Debug, Clone, Serialize)]
struct ManifestTool {
    name: &'static str,
    version: String,
}

/// Reproducibility record written next to every run: what produced the
/// outputs and from which configuration. Deliberately contains no
/// timestamps so reruns are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    tool: ManifestTool,
    config_sha256: String,
    case: u8,
    strategy: String,
    outputs: Vec<String>,
}

impl Manifest {
    pub fn new(
        tool_version: &str,
        effective_config_json: &[u8],
        case: u8,
        strategy: &str,
        outputs: Vec<String>,
    ) -> Self {
        Manifest {
            tool: ManifestTool {
                name: "ffrsim",
                version: tool_version.to_string(),
            },
            config_sha256: config_sha256(effective_config_json),
            case,
            strategy: strategy.to_string(),
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest is always serializable");
        s.push('\n');
        s
    }
}

/// Paths produced for one run.
#[derive(Debug, Clone)]
pub struct OutputBundle {
    pub dir: PathBuf,
    pub timeseries_csv: PathBuf,
    pub metrics_json: PathBuf,
    pub plots: Vec<PathBuf>,
    pub manifest_json: PathBuf,
}

/// Write the standard per-run artifact set into `dir` (created if
/// needed): timeseries.csv, metrics.json, optional SVG plots, and the
/// manifest.
pub fn write_run_outputs(
    dir: &Path,
    result: &RunResult,
    metrics: &MetricsRecord,
    effective_config_json: &[u8],
    tool_version: &str,
    with_plots: bool,
) -> Result<OutputBundle> {
    std::fs::create_dir_all(dir)?;

    let csv_path = dir.join("timeseries.csv");
    write_atomic(&csv_path, csv_string(result).as_bytes())?;

    let metrics_path = dir.join("metrics.json");
    write_atomic(&metrics_path, metrics_json(metrics).as_bytes())?;

    let mut plot_paths = Vec::new();
    let mut output_names = vec!["timeseries.csv".to_string(), "metrics.json".to_string()];
    if with_plots {
        for (name, svg) in crate::plot::run_figures(result, metrics) {
            let path = dir.join(&name);
            write_atomic(&path, svg.as_bytes())?;
            output_names.push(name);
            plot_paths.push(path);
        }
    }

    let manifest = Manifest::new(
        tool_version,
        effective_config_json,
        result.case_id,
        result.strategy.name(),
        output_names,
    );
    let manifest_path = dir.join("manifest.json");
    write_atomic(&manifest_path, manifest.to_json().as_bytes())?;

    Ok(OutputBundle {
        dir: dir.to_path_buf(),
        timeseries_csv: csv_path,
        metrics_json: metrics_path,
        plots: plot_paths,
        manifest_json: manifest_path,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
