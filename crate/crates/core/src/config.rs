//! JSON configuration documents: schema, defaults, validation, and
//! conversion into runnable scenarios.
//!
//! The document is strict — unknown keys are rejected — but every field
//! has a default, so `{}` resolves to the fully calibrated reference
//! study (the 6.1 GVA ten-machine system losing its 1 GW lead unit at
//! t = 5 s, all three resources participating under the adaptive
//! strategy). Resource field names follow the published parameter
//! symbols (`droop_k_ev`, `time_const_t_b`, ...); units are fixed:
//! MW, MWh, Hz, MW/Hz, seconds.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coordinator::{custom_weights, AllocationStrategy, ParticipationWeights, StrategyKind};
use crate::error::{Result, SimError};
use crate::grid::{DisturbanceEvent, Generator, GridModel};
use crate::metrics::MetricsSettings;
use crate::resources::{BessModel, DataCenterModel, EvFleetModel};
use crate::scenario::{build_case, ResourceMask, Scenario, SolverSettings};

fn cfg_err(field: &str, reason: impl Into<String>) -> SimError {
    SimError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// Require a finite value satisfying `ok`, else a config error at `field`.
fn check(field: &str, value: f64, ok: impl Fn(f64) -> bool, what: &str) -> Result<()> {
    if !value.is_finite() || !ok(value) {
        return Err(cfg_err(field, format!("{what}, got {value}")));
    }
    Ok(())
}

fn check_soc(section: &str, init: f64, min: f64, max: f64) -> Result<()> {
    check(&format!("{section}.soc_min"), min, |v| (0.0..=1.0).contains(&v), "must lie in [0, 1]")?;
    check(&format!("{section}.soc_max"), max, |v| (0.0..=1.0).contains(&v), "must lie in [0, 1]")?;
    if min >= max {
        return Err(cfg_err(
            &format!("{section}.soc_min"),
            format!("must be below soc_max ({max}), got {min}"),
        ));
    }
    if !(min..=max).contains(&init) || !init.is_finite() {
        return Err(cfg_err(
            &format!("{section}.soc_init"),
            format!("must lie in [soc_min, soc_max] = [{min}, {max}], got {init}"),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sections
// ---------------------------------------------------------------------------

/// One synchronous machine. `id` and `rated_mva` are required; the
/// remaining governor parameters default to the calibrated values shared
/// by the reference fleet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub id: String,
    /// Rated apparent power [MVA].
    pub rated_mva: f64,
    /// Inertia constant H [s].
    #[serde(default = "default_inertia_h")]
    pub inertia_h: f64,
    /// Governor droop R [pu].
    #[serde(default = "default_droop_r")]
    pub droop_r: f64,
    /// Governor servo time constant [s].
    #[serde(default = "default_t_gov")]
    pub t_gov: f64,
    /// Mechanical headroom as a fraction of `rated_mva`.
    #[serde(default = "default_gov_limit_frac")]
    pub gov_limit_frac: f64,
    #[serde(default = "default_true")]
    pub online: bool,
}

fn default_inertia_h() -> f64 {
    10.142
}
fn default_droop_r() -> f64 {
    0.28
}
fn default_t_gov() -> f64 {
    0.8
}
fn default_gov_limit_frac() -> f64 {
    0.25
}
fn default_true() -> bool {
    true
}

impl GeneratorConfig {
    fn new(id: &str, rated_mva: f64) -> Self {
        GeneratorConfig {
            id: id.to_string(),
            rated_mva,
            inertia_h: default_inertia_h(),
            droop_r: default_droop_r(),
            t_gov: default_t_gov(),
            gov_limit_frac: default_gov_limit_frac(),
            online: true,
        }
    }

    fn to_model(&self) -> Generator {
        Generator {
            id: self.id.clone(),
            rated_mva: self.rated_mva,
            inertia_h_s: self.inertia_h,
            governor_droop_pu: self.droop_r,
            governor_time_const_s: self.t_gov,
            governor_limit_frac: self.gov_limit_frac,
            online: self.online,
        }
    }
}

/// System-level grid parameters and the machine fleet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Nominal frequency [Hz].
    pub nominal_freq: f64,
    /// Aggregate load damping D [MW/Hz].
    pub damping_d: f64,
    pub generators: Vec<GeneratorConfig>,
}

impl Default for GridSection {
    fn default() -> Self {
        let rated = [
            1000.0, 560.0, 650.0, 632.0, 508.0, 650.0, 560.0, 540.0, 700.0, 300.0,
        ];
        GridSection {
            nominal_freq: 60.0,
            damping_d: 60.0,
            generators: rated
                .iter()
                .enumerate()
                .map(|(i, s)| GeneratorConfig::new(&format!("g{}", i + 1), *s))
                .collect(),
        }
    }
}

/// Aggregated EV fleet parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvSection {
    /// Rated fleet power W_EV [MW].
    pub capacity_w_ev: f64,
    /// Droop gain k_EV [MW/Hz].
    pub droop_k_ev: f64,
    /// Aggregation/actuation delay T_EV [s].
    pub delay_t_ev: f64,
    /// Usable fleet energy E_EV [MWh].
    pub energy_e_ev: f64,
    pub soc_init: f64,
    pub soc_min: f64,
    pub soc_max: f64,
}

impl Default for EvSection {
    fn default() -> Self {
        EvSection {
            capacity_w_ev: 200.0,
            droop_k_ev: 25.0,
            delay_t_ev: 0.08,
            energy_e_ev: 100.0,
            soc_init: 0.6,
            soc_min: 0.2,
            soc_max: 0.9,
        }
    }
}

/// Data-center parameters: UPS discharge channel plus IT workload
/// curtailment channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DcSection {
    /// UPS discharge capacity W_UPS [MW].
    pub ups_capacity_w_ups: f64,
    /// UPS droop gain k_UPS [MW/Hz].
    pub ups_droop_k_ups: f64,
    /// UPS electronics delay T_UPS [s].
    pub ups_delay_t_ups: f64,
    /// Route the UPS measurement through its delay line (on by default).
    pub ups_delay_enabled: bool,
    /// Curtailable IT load W_IT [MW].
    pub workload_w_it: f64,
    /// Workload gain beta [MW/Hz].
    pub workload_gain_beta: f64,
    /// Workload actuation delay T_IT [s].
    pub it_delay_t_it: f64,
    /// Scheduled IT consumption before curtailment P_IT0 [MW].
    pub it_baseline_p0: f64,
}

impl Default for DcSection {
    fn default() -> Self {
        DcSection {
            ups_capacity_w_ups: 100.0,
            ups_droop_k_ups: 20.0,
            ups_delay_t_ups: 0.01,
            ups_delay_enabled: true,
            workload_w_it: 50.0,
            workload_gain_beta: 12.0,
            it_delay_t_it: 0.2,
            it_baseline_p0: 150.0,
        }
    }
}

/// Grid-scale battery parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BessSection {
    /// Rated converter power W_B [MW].
    pub capacity_w_b: f64,
    /// Rated energy E_BESS [MWh].
    pub energy_e_bess: f64,
    /// Droop gain k_B [MW/Hz].
    pub droop_k_b: f64,
    /// Converter time constant T_B [s].
    pub time_const_t_b: f64,
    pub soc_init: f64,
    pub soc_min: f64,
    pub soc_max: f64,
}

impl Default for BessSection {
    fn default() -> Self {
        BessSection {
            capacity_w_b: 150.0,
            energy_e_bess: 300.0,
            droop_k_b: 40.0,
            time_const_t_b: 0.04,
            soc_init: 0.5,
            soc_min: 0.1,
            soc_max: 0.9,
        }
    }
}

/// The three FFR resources.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourcesSection {
    pub ev: EvSection,
    pub dc: DcSection,
    pub bess: BessSection,
}

/// Custom participation-weight triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub ev: f64,
    pub dc: f64,
    pub bess: f64,
}

/// Coordination strategy selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategySection {
    /// One of `adaptive`, `bess_dominant`, `dc_dominant`, `ev_dominant`,
    /// `custom` (short forms `bess`/`dc`/`ev` accepted and normalized).
    pub kind: String,
    /// Required for `custom`, rejected otherwise.
    pub fixed_weights: Option<WeightsConfig>,
    /// Replaces the capacity-weighted data-center time constant [s].
    pub t_dc_override: Option<f64>,
    /// Optional aggregate droop-gain cap [MW/Hz].
    pub gain_cap: Option<f64>,
}

impl Default for StrategySection {
    fn default() -> Self {
        StrategySection {
            kind: "adaptive".into(),
            fixed_weights: None,
            t_dc_override: None,
            gain_cap: None,
        }
    }
}

/// The generation-loss event under study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DisturbanceSection {
    /// Event time [s].
    pub time: f64,
    /// Lost generation [MW].
    pub power_mw: f64,
    /// Machine whose inertia and governor disappear with the event.
    /// Defaults to the lead unit; set to `null` for a pure load step.
    pub trip_generator: Option<String>,
}

impl Default for DisturbanceSection {
    fn default() -> Self {
        DisturbanceSection {
            time: 5.0,
            power_mw: 1000.0,
            trip_generator: Some("g1".into()),
        }
    }
}

/// Integrator and sampling settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// Integration step [s].
    pub dt: f64,
    /// Simulated span [s].
    pub duration: f64,
    /// Output sampling stride [s]; whole multiple of `dt`.
    pub sample_stride: f64,
    /// Coordinator update stride [s]; whole multiple of `dt`.
    pub control_stride: f64,
    /// Horizon converting stored energy to sustainable power [s].
    pub capacity_horizon: f64,
    /// Allow over-frequency absorption (default off).
    pub bidirectional: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        SolverSection {
            dt: s.dt_s,
            duration: s.duration_s,
            sample_stride: s.sample_stride_s,
            control_stride: s.control_stride_s,
            capacity_horizon: s.capacity_horizon_s,
            bidirectional: s.bidirectional,
        }
    }
}

/// Analysis windows for the reported metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsSection {
    /// Sliding linear-fit window for RoCoF [s].
    pub rocof_window: f64,
    /// Post-event span RoCoF windows may start in [s].
    pub rocof_span: f64,
    /// Recovery band half-width around quasi-steady state [Hz].
    pub recovery_band_hz: f64,
    /// Time the frequency must hold inside the band [s].
    pub recovery_hold: f64,
    /// Tail window whose mean defines quasi-steady state [s].
    pub qss_window: f64,
}

impl Default for MetricsSection {
    fn default() -> Self {
        let m = MetricsSettings::default();
        MetricsSection {
            rocof_window: m.rocof_window_s,
            rocof_span: m.rocof_span_s,
            recovery_band_hz: m.recovery_band_hz,
            recovery_hold: m.recovery_hold_s,
            qss_window: m.qss_window_s,
        }
    }
}

// ---------------------------------------------------------------------------
// Document
// ---------------------------------------------------------------------------

/// A complete, validated study configuration. Deserializing fills every
/// omitted field with its default; `{}` is the reference study.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigDocument {
    pub grid: GridSection,
    pub resources: ResourcesSection,
    pub strategy: StrategySection,
    pub disturbance: DisturbanceSection,
    pub solver: SolverSection,
    pub metrics: MetricsSection,
}

/// Classify a serde_json error per the exit-code contract: schema
/// violations (unknown keys) are distinguished from malformed JSON and
/// type errors.
fn classify_json_error(err: &serde_json::Error) -> SimError {
    let msg = err.to_string();
    if msg.starts_with("unknown field") || msg.starts_with("unknown variant") {
        let key = msg
            .split('`')
            .nth(1)
            .unwrap_or("<unnamed>")
            .to_string();
        SimError::UnknownKey(format!("{key} ({msg})"))
    } else {
        SimError::MalformedJson(msg)
    }
}

impl ConfigDocument {
    /// Parse and validate a JSON document. Missing fields take their
    /// defaults; unknown keys, type mismatches, and out-of-range values
    /// are rejected with field-level diagnostics.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ConfigDocument =
            serde_json::from_str(text).map_err(|e| classify_json_error(&e))?;
        doc.validated()
    }

    /// Load a document from a file (exists → parse → validate).
    pub fn from_file(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(SimError::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// The document re-serialized with all defaults applied — the
    /// canonical form hashed into output manifests.
    pub fn effective_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Parsed strategy kind (accepts short forms).
    pub fn strategy_kind(&self) -> Result<StrategyKind> {
        StrategyKind::from_str(&self.strategy.kind).map_err(|_| {
            cfg_err(
                "strategy.kind",
                format!(
                    "unknown strategy `{}` (expected adaptive|bess_dominant|dc_dominant|ev_dominant|custom)",
                    self.strategy.kind
                ),
            )
        })
    }

    /// Validate every field and normalize the strategy name to its
    /// canonical form. Ends by assembling the base scenario so that
    /// engine-level invariants (stride alignment, inertia present)
    /// are enforced at parse time too.
    pub fn validated(mut self) -> Result<Self> {
        // Grid.
        check("grid.nominal_freq", self.grid.nominal_freq, |v| v > 0.0, "must be > 0")?;
        check("grid.damping_d", self.grid.damping_d, |v| v >= 0.0, "must be >= 0")?;
        if self.grid.generators.is_empty() {
            return Err(cfg_err("grid.generators", "at least one machine required"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, g) in self.grid.generators.iter().enumerate() {
            let at = |f: &str| format!("grid.generators[{i}].{f}");
            if g.id.is_empty() {
                return Err(cfg_err(&at("id"), "must be nonempty"));
            }
            if !seen.insert(g.id.clone()) {
                return Err(cfg_err(
                    "grid.generators",
                    format!("duplicate generator id `{}`", g.id),
                ));
            }
            check(&at("rated_mva"), g.rated_mva, |v| v > 0.0, "must be > 0")?;
            check(&at("inertia_h"), g.inertia_h, |v| v > 0.0, "must be > 0")?;
            check(&at("droop_r"), g.droop_r, |v| v > 0.0, "must be > 0")?;
            check(&at("t_gov"), g.t_gov, |v| v > 0.0, "must be > 0")?;
            check(
                &at("gov_limit_frac"),
                g.gov_limit_frac,
                |v| v > 0.0 && v <= 1.0,
                "must lie in (0, 1]",
            )?;
        }

        // Resources.
        let ev = &self.resources.ev;
        check("resources.ev.capacity_w_ev", ev.capacity_w_ev, |v| v >= 0.0, "must be >= 0")?;
        check("resources.ev.droop_k_ev", ev.droop_k_ev, |v| v >= 0.0, "must be >= 0")?;
        check("resources.ev.delay_t_ev", ev.delay_t_ev, |v| v >= 0.0, "must be >= 0")?;
        check("resources.ev.energy_e_ev", ev.energy_e_ev, |v| v > 0.0, "must be > 0")?;
        check_soc("resources.ev", ev.soc_init, ev.soc_min, ev.soc_max)?;

        let dc = &self.resources.dc;
        check("resources.dc.ups_capacity_w_ups", dc.ups_capacity_w_ups, |v| v >= 0.0, "must be >= 0")?;
        check("resources.dc.ups_droop_k_ups", dc.ups_droop_k_ups, |v| v >= 0.0, "must be >= 0")?;
        check("resources.dc.ups_delay_t_ups", dc.ups_delay_t_ups, |v| v >= 0.0, "must be >= 0")?;
        check("resources.dc.workload_w_it", dc.workload_w_it, |v| v >= 0.0, "must be >= 0")?;
        check("resources.dc.workload_gain_beta", dc.workload_gain_beta, |v| v >= 0.0, "must be >= 0")?;
        check("resources.dc.it_delay_t_it", dc.it_delay_t_it, |v| v >= 0.0, "must be >= 0")?;
        check("resources.dc.it_baseline_p0", dc.it_baseline_p0, |v| v >= 0.0, "must be >= 0")?;
        if dc.workload_w_it > dc.it_baseline_p0 {
            return Err(cfg_err(
                "resources.dc.workload_w_it",
                format!(
                    "curtailable load cannot exceed the baseline ({} MW), got {} MW",
                    dc.it_baseline_p0, dc.workload_w_it
                ),
            ));
        }

        let bess = &self.resources.bess;
        check("resources.bess.capacity_w_b", bess.capacity_w_b, |v| v >= 0.0, "must be >= 0")?;
        check("resources.bess.energy_e_bess", bess.energy_e_bess, |v| v > 0.0, "must be > 0")?;
        check("resources.bess.droop_k_b", bess.droop_k_b, |v| v >= 0.0, "must be >= 0")?;
        check("resources.bess.time_const_t_b", bess.time_const_t_b, |v| v > 0.0, "must be > 0")?;
        check_soc("resources.bess", bess.soc_init, bess.soc_min, bess.soc_max)?;

        // Strategy (also normalizes the kind string).
        let kind = self.strategy_kind()?;
        self.strategy.kind = kind.name().to_string();
        match (kind, &self.strategy.fixed_weights) {
            (StrategyKind::Custom, None) => {
                return Err(cfg_err(
                    "strategy.fixed_weights",
                    "required when kind = custom",
                ));
            }
            (StrategyKind::Custom, Some(w)) => {
                custom_weights(w.ev, w.dc, w.bess)?;
            }
            (_, Some(_)) => {
                return Err(cfg_err(
                    "strategy.fixed_weights",
                    format!("only valid with kind = custom (kind is `{kind}`)"),
                ));
            }
            (_, None) => {}
        }
        if let Some(t) = self.strategy.t_dc_override {
            check("strategy.t_dc_override", t, |v| v > 0.0, "must be > 0")?;
        }
        if let Some(c) = self.strategy.gain_cap {
            check("strategy.gain_cap", c, |v| v > 0.0, "must be > 0")?;
        }

        // Disturbance.
        check("disturbance.time", self.disturbance.time, |v| v >= 0.0, "must be >= 0")?;
        check("disturbance.power_mw", self.disturbance.power_mw, |v| v >= 0.0, "must be >= 0")?;
        if let Some(id) = &self.disturbance.trip_generator {
            if !self.grid.generators.iter().any(|g| &g.id == id) {
                return Err(cfg_err(
                    "disturbance.trip_generator",
                    format!("unknown generator id `{id}`"),
                ));
            }
        }

        // Solver.
        check("solver.dt", self.solver.dt, |v| v > 0.0, "must be > 0")?;
        check("solver.duration", self.solver.duration, |v| v > 0.0, "must be > 0")?;
        if self.solver.duration <= self.disturbance.time {
            return Err(cfg_err(
                "solver.duration",
                format!(
                    "must exceed the disturbance time ({} s)",
                    self.disturbance.time
                ),
            ));
        }
        check("solver.sample_stride", self.solver.sample_stride, |v| v > 0.0, "must be > 0")?;
        check("solver.control_stride", self.solver.control_stride, |v| v > 0.0, "must be > 0")?;
        check("solver.capacity_horizon", self.solver.capacity_horizon, |v| v > 0.0, "must be > 0")?;

        // Metrics.
        let m = &self.metrics;
        check("metrics.rocof_window", m.rocof_window, |v| v > 0.0, "must be > 0")?;
        if m.rocof_span < m.rocof_window {
            return Err(cfg_err(
                "metrics.rocof_span",
                format!(
                    "must be at least the window length ({} s), got {} s",
                    m.rocof_window, m.rocof_span
                ),
            ));
        }
        check("metrics.recovery_band_hz", m.recovery_band_hz, |v| v > 0.0, "must be > 0")?;
        check("metrics.recovery_hold", m.recovery_hold, |v| v >= 0.0, "must be >= 0")?;
        check("metrics.qss_window", m.qss_window, |v| v > 0.0, "must be > 0")?;

        // Engine-level structural invariants (stride alignment, inertia)
        // surface at parse time through a trial scenario assembly.
        self.base_scenario()?.validate()?;
        Ok(self)
    }

    /// Resolved allocation strategy.
    pub fn allocation(&self) -> Result<AllocationStrategy> {
        let kind = self.strategy_kind()?;
        let custom = match &self.strategy.fixed_weights {
            Some(w) => Some(ParticipationWeights {
                ev: w.ev,
                dc: w.dc,
                bess: w.bess,
            }),
            None => None,
        };
        Ok(AllocationStrategy {
            kind,
            custom,
            t_dc_override_s: self.strategy.t_dc_override,
            gain_cap_mw_per_hz: self.strategy.gain_cap,
        })
    }

    /// Metric analysis settings.
    pub fn metrics_settings(&self) -> MetricsSettings {
        MetricsSettings {
            rocof_window_s: self.metrics.rocof_window,
            rocof_span_s: self.metrics.rocof_span,
            recovery_band_hz: self.metrics.recovery_band_hz,
            recovery_hold_s: self.metrics.recovery_hold,
            qss_window_s: self.metrics.qss_window,
        }
    }

    /// The fully resourced scenario (all three resources, configured
    /// strategy) that the four study cases are derived from.
    pub fn base_scenario(&self) -> Result<Scenario> {
        let grid = GridModel {
            nominal_freq_hz: self.grid.nominal_freq,
            damping_mw_per_hz: self.grid.damping_d,
            generators: self.grid.generators.iter().map(|g| g.to_model()).collect(),
        };
        let ev = EvFleetModel {
            droop_gain_mw_per_hz: self.resources.ev.droop_k_ev,
            delay_s: self.resources.ev.delay_t_ev,
            rated_power_mw: self.resources.ev.capacity_w_ev,
            energy_mwh: self.resources.ev.energy_e_ev,
            soc: self.resources.ev.soc_init,
            soc_min: self.resources.ev.soc_min,
            soc_max: self.resources.ev.soc_max,
        };
        let dc = DataCenterModel {
            ups_gain_mw_per_hz: self.resources.dc.ups_droop_k_ups,
            ups_delay_s: self.resources.dc.ups_delay_t_ups,
            ups_delay_enabled: self.resources.dc.ups_delay_enabled,
            ups_capacity_mw: self.resources.dc.ups_capacity_w_ups,
            it_baseline_mw: self.resources.dc.it_baseline_p0,
            workload_gain_mw_per_hz: self.resources.dc.workload_gain_beta,
            it_delay_s: self.resources.dc.it_delay_t_it,
            it_flex_mw: self.resources.dc.workload_w_it,
        };
        let bess = BessModel {
            droop_gain_mw_per_hz: self.resources.bess.droop_k_b,
            time_const_s: self.resources.bess.time_const_t_b,
            rated_power_mw: self.resources.bess.capacity_w_b,
            energy_mwh: self.resources.bess.energy_e_bess,
            soc: self.resources.bess.soc_init,
            soc_min: self.resources.bess.soc_min,
            soc_max: self.resources.bess.soc_max,
            power_output_mw: 0.0,
        };
        Ok(Scenario {
            case_id: 4,
            grid,
            ev,
            dc,
            bess,
            mask: ResourceMask::ALL,
            strategy: self.allocation()?,
            disturbance: DisturbanceEvent {
                time_s: self.disturbance.time,
                power_mw: self.disturbance.power_mw,
                trip_generator: self.disturbance.trip_generator.clone(),
            },
            solver: SolverSettings {
                dt_s: self.solver.dt,
                duration_s: self.solver.duration,
                sample_stride_s: self.solver.sample_stride,
                control_stride_s: self.solver.control_stride,
                capacity_horizon_s: self.solver.capacity_horizon,
                bidirectional: self.solver.bidirectional,
            },
        })
    }

    /// Build the runnable scenario for one of the four study cases,
    /// optionally overriding the configured strategy (a `custom`
    /// override still takes its weights from `strategy.fixed_weights`).
    pub fn to_scenario(
        &self,
        case_id: u8,
        strategy_override: Option<StrategyKind>,
    ) -> Result<Scenario> {
        let mut base = self.base_scenario()?;
        if let Some(kind) = strategy_override {
            if kind == StrategyKind::Custom && base.strategy.custom.is_none() {
                return Err(cfg_err(
                    "strategy.fixed_weights",
                    "required when kind = custom",
                ));
            }
            if kind != StrategyKind::Custom {
                base.strategy.custom = None;
            }
            base.strategy.kind = kind;
        }
        build_case(case_id, &base)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
