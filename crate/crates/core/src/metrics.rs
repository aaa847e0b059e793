//! Performance metrics computed from a completed run.
//!
//! * **Nadir** — the minimum frequency over the whole series [Hz].
//! * **RoCoF** — the most negative slope of a sliding least-squares
//!   linear fit (default 500 ms window) evaluated across the first two
//!   seconds after the disturbance [Hz/s]. A windowed measure is used
//!   because support resources with tens-of-milliseconds dynamics cannot
//!   change the instantaneous post-trip derivative, yet they visibly
//!   flatten the early decline.
//! * **Recovery time** — the first instant (relative to the disturbance)
//!   from which the frequency stays within a band (default ±0.05 Hz)
//!   around its quasi-steady-state value for a full hold interval
//!   (default 1 s). The quasi-steady-state value is the mean over the
//!   final second of the run. `None` means the run never settled.
//! * **Max power** — per-resource output maxima [MW]; the data-center
//!   figure is the maximum of the combined UPS + workload contribution.
//! * **FFR energy** — trapezoidal integral of the positive part of the
//!   total FFR power [MWh].

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::scenario::RunResult;

/// Analysis windows and bands. The defaults match the documented
/// metric definitions; every value can be tuned for sensitivity
/// studies without touching the simulation itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSettings {
    /// Length of the sliding linear-fit window for RoCoF [s].
    pub rocof_window_s: f64,
    /// Span after the disturbance that RoCoF windows may start in [s].
    pub rocof_span_s: f64,
    /// Half-width of the recovery band around quasi-steady state [Hz].
    pub recovery_band_hz: f64,
    /// Time the frequency must continuously stay inside the band [s].
    pub recovery_hold_s: f64,
    /// Tail window whose mean defines quasi-steady state [s].
    pub qss_window_s: f64,
}

impl Default for MetricsSettings {
    fn default() -> Self {
        MetricsSettings {
            rocof_window_s: 0.5,
            rocof_span_s: 2.0,
            recovery_band_hz: 0.05,
            recovery_hold_s: 1.0,
            qss_window_s: 1.0,
        }
    }
}

/// Per-resource output maxima [MW].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxPower {
    pub ev: f64,
    pub dc: f64,
    pub bess: f64,
}

/// The performance record reported for every run. Field names are part
/// of the JSON output contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsRecord {
    pub nadir_hz: f64,
    pub rocof_hz_per_s: f64,
    /// `None` serializes as `null` and means "not recovered".
    pub recovery_time_s: Option<f64>,
    pub max_power_mw: MaxPower,
    pub ffr_energy_mwh: f64,
}

/// Least-squares slope of `(t, f)` pairs. At least two distinct
/// abscissae required; returns `None` otherwise.
fn ls_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let t_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let f_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, f) in points {
        num += (t - t_mean) * (f - f_mean);
        den += (t - t_mean) * (t - t_mean);
    }
    if den <= 0.0 {
        return None;
    }
    Some(num / den)
}

/// Metrics with the default analysis settings.
pub fn compute_metrics(result: &RunResult) -> Result<MetricsRecord> {
    compute_metrics_with(result, &MetricsSettings::default())
}

/// Metrics with explicit analysis settings.
pub fn compute_metrics_with(
    result: &RunResult,
    settings: &MetricsSettings,
) -> Result<MetricsRecord> {
    const EPS: f64 = 1e-9;
    let samples = &result.samples;
    if samples.len() < 2 {
        return Err(SimError::Metrics(
            "at least two samples are required".into(),
        ));
    }
    let t_end = samples.last().unwrap().t_s;
    let dist = result.disturbance_time_s;
    if t_end + EPS < dist {
        return Err(SimError::Metrics(format!(
            "series ends at {t_end} s, before the disturbance at {dist} s"
        )));
    }

    // Nadir over the full series.
    let nadir_hz = samples.iter().map(|s| s.f_hz).fold(f64::INFINITY, f64::min);

    // Windowed RoCoF: slide a linear fit across [dist, dist + span].
    if t_end + EPS < dist + settings.rocof_window_s {
        return Err(SimError::Metrics(format!(
            "series too short for a {} s RoCoF window after the disturbance",
            settings.rocof_window_s
        )));
    }
    let latest_start = (dist + settings.rocof_span_s - settings.rocof_window_s)
        .min(t_end - settings.rocof_window_s);
    let mut rocof: Option<f64> = None;
    let mut lo = 0usize;
    let mut hi = 0usize;
    for (i, s) in samples.iter().enumerate() {
        if s.t_s + EPS < dist || s.t_s > latest_start + EPS {
            continue;
        }
        lo = lo.max(i);
        let end_t = s.t_s + settings.rocof_window_s;
        if hi < lo {
            hi = lo;
        }
        while hi + 1 < samples.len() && samples[hi + 1].t_s <= end_t + EPS {
            hi += 1;
        }
        let window: Vec<(f64, f64)> = samples[lo..=hi].iter().map(|x| (x.t_s, x.f_hz)).collect();
        if let Some(slope) = ls_slope(&window) {
            rocof = Some(match rocof {
                Some(r) => r.min(slope),
                None => slope,
            });
        }
        lo += 1;
    }
    let rocof_hz_per_s = rocof.ok_or_else(|| {
        SimError::Metrics("no complete RoCoF window fits the sampled series".into())
    })?;

    // Quasi-steady state: mean over the final tail window.
    let tail_start = t_end - settings.qss_window_s;
    let tail: Vec<f64> = samples
        .iter()
        .filter(|s| s.t_s + EPS >= tail_start)
        .map(|s| s.f_hz)
        .collect();
    let f_qss = tail.iter().sum::<f64>() / tail.len() as f64;

    // Recovery: earliest post-disturbance instant from which the series
    // stays inside the band for the whole hold interval.
    let bad_times: Vec<f64> = samples
        .iter()
        .filter(|s| (s.f_hz - f_qss).abs() > settings.recovery_band_hz)
        .map(|s| s.t_s)
        .collect();
    let mut recovery_time_s = None;
    for s in samples.iter().filter(|s| s.t_s + EPS >= dist) {
        if s.t_s + settings.recovery_hold_s > t_end + EPS {
            break; // the hold window no longer fits in the series
        }
        let next_bad = bad_times.partition_point(|b| *b + EPS < s.t_s);
        let clean = match bad_times.get(next_bad) {
            None => true,
            Some(b) => *b > s.t_s + settings.recovery_hold_s + EPS,
        };
        if clean {
            recovery_time_s = Some(s.t_s - dist);
            break;
        }
    }

    // Per-channel maxima; the data center counts both channels at once.
    let mut max_ev = f64::NEG_INFINITY;
    let mut max_dc = f64::NEG_INFINITY;
    let mut max_bess = f64::NEG_INFINITY;
    for s in samples.iter() {
        max_ev = max_ev.max(s.p_ev_mw);
        max_dc = max_dc.max(s.p_ups_mw + s.p_it_mw);
        max_bess = max_bess.max(s.p_bess_mw);
    }

    // Positive-part trapezoidal energy of the aggregate FFR power.
    let mut energy_mws = 0.0;
    for pair in samples.windows(2) {
        let p0 = pair[0].p_ffr_total_mw.max(0.0);
        let p1 = pair[1].p_ffr_total_mw.max(0.0);
        energy_mws += 0.5 * (p0 + p1) * (pair[1].t_s - pair[0].t_s);
    }

    Ok(MetricsRecord {
        nadir_hz,
        rocof_hz_per_s,
        recovery_time_s,
        max_power_mw: MaxPower {
            ev: max_ev,
            dc: max_dc,
            bess: max_bess,
        },
        ffr_energy_mwh: energy_mws / 3600.0,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
