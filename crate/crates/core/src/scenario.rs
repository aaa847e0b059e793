//! Scenario assembly and the simulation loop.
//!
//! A scenario couples the grid model, the three FFR resources, an
//! allocation strategy, and one disturbance event. The loop advances the
//! coupled state with a fixed-step RK4 integrator at `dt` (default 1 ms):
//!
//! * the frequency deviation, every governor servo, and the BESS
//!   converter lag are integrated jointly, so droop feedback stays
//!   stage-consistent;
//! * measurement delays are realized as ring buffers sampled at `dt`;
//!   inner RK4 stages read the delayed signal at their own stage time
//!   (midpoint values linearly interpolated between adjacent samples),
//!   which keeps the integrator's step-halving error far below the
//!   1e-4 reproducibility bound the test suite enforces;
//! * participation weights update on the control tick (default 10 ms)
//!   and are held between ticks, like a sampled digital coordinator;
//! * storage SOC advances once per step using the Simpson-weighted
//!   average of the per-stage channel powers (the same quadrature RK4
//!   itself uses), so SOC-vs-energy bookkeeping tracks the integrator.
//!
//! Per step, in order: disturbance/trip check, delay-line push, control
//! tick, stage-0 resource outputs (these are what gets logged), sample
//! row emission, RK4 update, SOC update, finite-state check.

use crate::coordinator::{
    dc_time_const, Allocation, AllocationStrategy, ParticipationWeights, ResourceGains,
    StrategyKind,
};
use crate::error::{Result, SimError};
use crate::grid::{DelayLine, DisturbanceEvent, GridModel};
use crate::metrics::{compute_metrics, MetricsRecord};
use crate::resources::{BessModel, DataCenterModel, EvFleetModel, ResourcePowerSample};

// ---------------------------------------------------------------------------
// Scenario description
// ---------------------------------------------------------------------------

/// Which resources participate (the case selector).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceMask {
    pub ev: bool,
    pub dc: bool,
    pub bess: bool,
}

impl ResourceMask {
    pub const NONE: ResourceMask = ResourceMask {
        ev: false,
        dc: false,
        bess: false,
    };
    pub const ALL: ResourceMask = ResourceMask {
        ev: true,
        dc: true,
        bess: true,
    };
}

/// Integrator and sampling settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Integration step [s].
    pub dt_s: f64,
    /// Simulated span [s]; rounded to a whole number of steps.
    pub duration_s: f64,
    /// Output sampling stride [s]; must be a whole multiple of `dt_s`.
    pub sample_stride_s: f64,
    /// Coordinator update stride [s]; must be a whole multiple of `dt_s`.
    pub control_stride_s: f64,
    /// Horizon used to convert stored energy into sustainable power [s].
    pub capacity_horizon_s: f64,
    /// Allow over-frequency absorption (off reproduces the studied
    /// under-frequency events only).
    pub bidirectional: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            dt_s: 1e-3,
            duration_s: 30.0,
            sample_stride_s: 0.01,
            control_stride_s: 0.01,
            capacity_horizon_s: 10.0,
            bidirectional: false,
        }
    }
}

/// A fully assembled, runnable experiment.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// 1 = no FFR, 2 = EV only, 3 = EV + data center, 4 = all resources.
    pub case_id: u8,
    pub grid: GridModel,
    pub ev: EvFleetModel,
    pub dc: DataCenterModel,
    pub bess: BessModel,
    pub mask: ResourceMask,
    pub strategy: AllocationStrategy,
    pub disturbance: DisturbanceEvent,
    pub solver: SolverSettings,
}

impl Scenario {
    /// Effective per-resource droop gains seen by the coordinator; the
    /// data center's two channels share one weight, so their gains add.
    pub fn gains(&self) -> ResourceGains {
        ResourceGains {
            ev_mw_per_hz: self.ev.droop_gain_mw_per_hz,
            dc_mw_per_hz: self.dc.ups_gain_mw_per_hz + self.dc.workload_gain_mw_per_hz,
            bess_mw_per_hz: self.bess.droop_gain_mw_per_hz,
        }
    }

    /// Characteristic response times (EV, DC, BESS) for the adaptive
    /// heuristic. The DC value blends its two channels by capacity
    /// unless explicitly overridden.
    pub fn time_constants(&self) -> Result<[f64; 3]> {
        let t_dc = match self.strategy.t_dc_override_s {
            Some(t) => t,
            None => dc_time_const(
                self.dc.ups_capacity_mw,
                self.dc.ups_delay_s,
                self.dc.it_flex_mw,
                self.dc.it_delay_s,
            )?,
        };
        Ok([self.ev.delay_s, t_dc, self.bess.time_const_s])
    }

    fn stride_steps(&self, stride_s: f64, name: &str) -> Result<usize> {
        let steps = (stride_s / self.solver.dt_s).round();
        if steps < 1.0 || !steps.is_finite() {
            return Err(SimError::Config {
                field: format!("solver.{name}"),
                reason: format!("must be at least one step of {} s", self.solver.dt_s),
            });
        }
        if (steps * self.solver.dt_s - stride_s).abs() > 1e-9 * stride_s.max(self.solver.dt_s) {
            return Err(SimError::Config {
                field: format!("solver.{name}"),
                reason: format!("must be a whole multiple of dt = {} s", self.solver.dt_s),
            });
        }
        Ok(steps as usize)
    }

    /// Structural checks shared by the library entry point and config
    /// parsing.
    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.case_id) {
            return Err(SimError::UnknownCase(self.case_id));
        }
        if self.solver.dt_s <= 0.0 || !self.solver.dt_s.is_finite() {
            return Err(SimError::Config {
                field: "solver.dt_s".into(),
                reason: "must be > 0".into(),
            });
        }
        if self.solver.duration_s <= self.disturbance.time_s {
            return Err(SimError::Config {
                field: "solver.duration_s".into(),
                reason: format!(
                    "must exceed the disturbance time ({} s)",
                    self.disturbance.time_s
                ),
            });
        }
        if self.solver.capacity_horizon_s <= 0.0 {
            return Err(SimError::Config {
                field: "solver.capacity_horizon_s".into(),
                reason: "must be > 0".into(),
            });
        }
        self.stride_steps(self.solver.sample_stride_s, "sample_stride_s")?;
        self.stride_steps(self.solver.control_stride_s, "control_stride_s")?;
        self.grid.kinetic_m()?;
        Ok(())
    }
}

/// Derive one of the four studied cases from a fully configured base
/// scenario (the base carries the case-4 strategy).
///
/// Cases 1-3 fix their own allocation, so they are strategy-independent
/// by construction: case 1 zeroes every weight, case 2 routes everything
/// to the EV fleet, and case 3 applies the adaptive rule restricted to
/// the EV + data-center pair (the masked BESS contributes zero capacity).
pub fn build_case(case_id: u8, base: &Scenario) -> Result<Scenario> {
    let mut s = base.clone();
    s.case_id = case_id;
    match case_id {
        1 => {
            s.mask = ResourceMask::NONE;
            s.strategy.kind = StrategyKind::Custom;
            s.strategy.custom = Some(ParticipationWeights::ZERO);
        }
        2 => {
            s.mask = ResourceMask {
                ev: true,
                dc: false,
                bess: false,
            };
            s.strategy.kind = StrategyKind::Custom;
            s.strategy.custom = Some(ParticipationWeights {
                ev: 1.0,
                dc: 0.0,
                bess: 0.0,
            });
        }
        3 => {
            s.mask = ResourceMask {
                ev: true,
                dc: true,
                bess: false,
            };
            s.strategy.kind = StrategyKind::Adaptive;
            s.strategy.custom = None;
        }
        4 => {
            s.mask = ResourceMask::ALL;
        }
        other => return Err(SimError::UnknownCase(other)),
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// One logged instant. Powers are the stage-0 (sample-time) values; the
/// weight columns hold the normalized participation weights in force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRow {
    pub t_s: f64,
    pub f_hz: f64,
    pub p_ev_mw: f64,
    pub p_ups_mw: f64,
    pub p_it_mw: f64,
    pub p_bess_mw: f64,
    pub p_ffr_total_mw: f64,
    pub alpha_ev: f64,
    pub alpha_dc: f64,
    pub alpha_bess: f64,
    pub soc_ev: f64,
    pub soc_bess: f64,
}

/// Full trajectory of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub case_id: u8,
    pub strategy: StrategyKind,
    pub nominal_freq_hz: f64,
    pub disturbance_time_s: f64,
    pub samples: Vec<SampleRow>,
}

impl RunResult {
    /// Participation-weight trace, one triple per sample instant.
    pub fn weights_trace(&self) -> Vec<(f64, ParticipationWeights)> {
        self.samples
            .iter()
            .map(|s| {
                (
                    s.t_s,
                    ParticipationWeights {
                        ev: s.alpha_ev,
                        dc: s.alpha_dc,
                        bess: s.alpha_bess,
                    },
                )
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Simulation loop
// ---------------------------------------------------------------------------

/// Delayed-signal values a channel sees at the three RK4 stage times
/// (step start, midpoint, step end). `None` means the channel has no
/// whole-step delay and reads the live stage deviation instead.
fn stage_taps(line: &DelayLine) -> Option<[f64; 3]> {
    let n = line.delay_steps();
    if n == 0 {
        return None;
    }
    let start = line.read_back(n);
    let end = line.read_back(n - 1);
    Some([start, 0.5 * (start + end), end])
}

struct StageContext<'a> {
    grid: &'a GridModel,
    kinetic_m: f64,
    ev: &'a EvFleetModel,
    dc: &'a DataCenterModel,
    bess: &'a BessModel,
    mask: ResourceMask,
    /// Effective (cap-rescaled) weights for (EV, DC, BESS).
    eff: (f64, f64, f64),
    horizon_s: f64,
    bidirectional: bool,
    /// Disturbance injection held constant over the step [MW].
    injection_mw: f64,
    ev_taps: Option<[f64; 3]>,
    ups_taps: Option<[f64; 3]>,
    it_taps: Option<[f64; 3]>,
}

impl StageContext<'_> {
    /// Evaluate all derivatives and channel powers at one stage.
    /// `tap_idx`: 0 = step start, 1 = midpoint, 2 = step end.
    fn eval(
        &self,
        dev_hz: f64,
        gov_mw: &[f64],
        p_bess_mw: f64,
        tap_idx: usize,
        d_gov: &mut [f64],
    ) -> (f64, f64, ResourcePowerSample) {
        let pick = |taps: &Option<[f64; 3]>| taps.map_or(dev_hz, |t| t[tap_idx]);

        let powers = ResourcePowerSample {
            ev_mw: if self.mask.ev {
                self.ev.power_mw(
                    self.eff.0,
                    pick(&self.ev_taps),
                    self.horizon_s,
                    self.bidirectional,
                )
            } else {
                0.0
            },
            ups_mw: if self.mask.dc {
                self.dc
                    .ups_power_mw(self.eff.1, pick(&self.ups_taps), self.bidirectional)
            } else {
                0.0
            },
            it_mw: if self.mask.dc {
                self.dc
                    .it_reduction_mw(self.eff.1, pick(&self.it_taps), self.bidirectional)
            } else {
                0.0
            },
            bess_mw: if self.mask.bess { p_bess_mw } else { 0.0 },
        };

        let d_dev = self.grid.stage_derivs(
            self.kinetic_m,
            dev_hz,
            gov_mw,
            self.injection_mw + powers.total_mw(),
            d_gov,
        );
        let d_bess = if self.mask.bess {
            (self.bess.target_mw(self.eff.2, dev_hz, self.bidirectional) - p_bess_mw)
                / self.bess.time_const_s
        } else {
            0.0
        };
        (d_dev, d_bess, powers)
    }
}

/// Run one scenario to completion. The scenario itself is not mutated;
/// identical inputs produce bit-identical results.
pub fn run_scenario(scenario: &Scenario) -> Result<RunResult> {
    scenario.validate()?;
    let solver = scenario.solver;
    let dt = solver.dt_s;

    let mut grid = scenario.grid.clone();
    let mut ev = scenario.ev.clone();
    let dc = scenario.dc.clone();
    let mut bess = scenario.bess.clone();
    let mask = scenario.mask;
    let gains = scenario.gains();
    let time_constants = scenario.time_constants()?;
    if scenario.bess.time_const_s <= 0.0 {
        return Err(SimError::Config {
            field: "resources.bess.t_b_s".into(),
            reason: "converter time constant must be > 0".into(),
        });
    }

    let n_steps = (solver.duration_s / dt).round() as usize;
    if n_steps == 0 {
        return Err(SimError::Config {
            field: "solver.duration_s".into(),
            reason: "must cover at least one step".into(),
        });
    }
    let sample_every = scenario.stride_steps(solver.sample_stride_s, "sample_stride_s")?;
    let control_every = scenario.stride_steps(solver.control_stride_s, "control_stride_s")?;
    let dist_step = ((scenario.disturbance.time_s / dt) - 1e-9).ceil().max(0.0) as usize;

    let mut ev_line = DelayLine::new(ev.delay_s, dt, 0.0)?;
    let mut it_line = DelayLine::new(dc.it_delay_s, dt, 0.0)?;
    let mut ups_line = if dc.ups_delay_enabled {
        Some(DelayLine::new(dc.ups_delay_s, dt, 0.0)?)
    } else {
        None
    };

    let n_gen = grid.generators.len();
    let mut state_dev = 0.0_f64;
    let mut gov = vec![0.0_f64; n_gen];
    let mut kinetic_m = grid.kinetic_m()?;
    let mut tripped = false;

    // Reused stage buffers: (d_dev, d_bess, d_gov[], powers).
    let mut k_dev = [0.0_f64; 4];
    let mut k_bess = [0.0_f64; 4];
    let mut k_gov = vec![vec![0.0_f64; n_gen]; 4];
    let mut stage_powers = [ResourcePowerSample::ZERO; 4];
    let mut gov_tmp = vec![0.0_f64; n_gen];

    let mut alloc = Allocation::new(ParticipationWeights::ZERO, gains, None)?;
    let mut samples =
        Vec::with_capacity(n_steps / sample_every + 2);

    for k in 0..=n_steps {
        let t = k as f64 * dt;

        if !tripped && k >= dist_step {
            scenario.disturbance.apply_trip(&mut grid)?;
            kinetic_m = grid.kinetic_m()?;
            tripped = true;
        }

        ev_line.push(state_dev);
        it_line.push(state_dev);
        if let Some(line) = ups_line.as_mut() {
            line.push(state_dev);
        }

        if k % control_every == 0 {
            let capacities = [
                if mask.ev {
                    ev.available_mw(solver.capacity_horizon_s)
                } else {
                    0.0
                },
                if mask.dc { dc.available_mw() } else { 0.0 },
                if mask.bess {
                    bess.available_mw(solver.capacity_horizon_s)
                } else {
                    0.0
                },
            ];
            let weights = scenario.strategy.weights(capacities, time_constants)?;
            alloc = Allocation::new(weights, gains, scenario.strategy.gain_cap_mw_per_hz)?;
        }

        let ctx = StageContext {
            grid: &grid,
            kinetic_m,
            ev: &ev,
            dc: &dc,
            bess: &bess,
            mask,
            eff: alloc.effective(),
            horizon_s: solver.capacity_horizon_s,
            bidirectional: solver.bidirectional,
            injection_mw: if tripped {
                -scenario.disturbance.power_mw
            } else {
                0.0
            },
            ev_taps: stage_taps(&ev_line),
            ups_taps: ups_line.as_ref().and_then(stage_taps),
            it_taps: stage_taps(&it_line),
        };

        // Stage 1 doubles as the logged sample-time evaluation.
        let (d0, b0, p0) = ctx.eval(state_dev, &gov, bess.power_output_mw, 0, &mut k_gov[0]);
        k_dev[0] = d0;
        k_bess[0] = b0;
        stage_powers[0] = p0;

        if k % sample_every == 0 || k == n_steps {
            samples.push(SampleRow {
                t_s: t,
                f_hz: grid.nominal_freq_hz + state_dev,
                p_ev_mw: p0.ev_mw,
                p_ups_mw: p0.ups_mw,
                p_it_mw: p0.it_mw,
                p_bess_mw: p0.bess_mw,
                p_ffr_total_mw: p0.total_mw(),
                alpha_ev: alloc.weights.ev,
                alpha_dc: alloc.weights.dc,
                alpha_bess: alloc.weights.bess,
                soc_ev: ev.soc,
                soc_bess: bess.soc,
            });
        }
        if k == n_steps {
            break;
        }

        // Remaining RK4 stages: midpoint twice, then the step end.
        for (stage, frac, tap_idx) in [(1usize, 0.5, 1usize), (2, 0.5, 1), (3, 1.0, 2)] {
            let prev = stage - 1;
            let dev_s = state_dev + frac * dt * k_dev[prev];
            let p_bess_s = bess.power_output_mw + frac * dt * k_bess[prev];
            for i in 0..n_gen {
                gov_tmp[i] = gov[i] + frac * dt * k_gov[prev][i];
            }
            let (d, b, p) = ctx.eval(dev_s, &gov_tmp, p_bess_s, tap_idx, &mut k_gov[stage]);
            k_dev[stage] = d;
            k_bess[stage] = b;
            stage_powers[stage] = p;
        }

        state_dev += dt / 6.0 * (k_dev[0] + 2.0 * k_dev[1] + 2.0 * k_dev[2] + k_dev[3]);
        for i in 0..n_gen {
            gov[i] +=
                dt / 6.0 * (k_gov[0][i] + 2.0 * k_gov[1][i] + 2.0 * k_gov[2][i] + k_gov[3][i]);
        }

        // Simpson-weighted average channel powers over the step (the
        // quadrature implied by the RK4 stages) drive the SOC updates.
        let simpson = |f: fn(&ResourcePowerSample) -> f64, s: &[ResourcePowerSample; 4]| {
            (f(&s[0]) + 2.0 * f(&s[1]) + 2.0 * f(&s[2]) + f(&s[3])) / 6.0
        };
        if mask.ev {
            ev.soc_step(simpson(|s| s.ev_mw, &stage_powers), dt)?;
        }
        if mask.bess {
            let p_new = (bess.power_output_mw
                + dt / 6.0 * (k_bess[0] + 2.0 * k_bess[1] + 2.0 * k_bess[2] + k_bess[3]))
                .clamp(-bess.rated_power_mw, bess.rated_power_mw);
            bess.power_output_mw = p_new;
            bess.soc_step(simpson(|s| s.bess_mw, &stage_powers), dt)?;
        }

        if !state_dev.is_finite() || !bess.power_output_mw.is_finite() {
            return Err(SimError::Aborted {
                time_s: t + dt,
                reason: "system state became non-finite".into(),
            });
        }
    }

    Ok(RunResult {
        case_id: scenario.case_id,
        strategy: scenario.strategy.kind,
        nominal_freq_hz: scenario.grid.nominal_freq_hz,
        disturbance_time_s: scenario.disturbance.time_s,
        samples,
    })
}

// ---------------------------------------------------------------------------
// Strategy comparison
// ---------------------------------------------------------------------------

/// Metrics for one (strategy, case) cell of the comparison matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCell {
    pub strategy: StrategyKind,
    pub case_id: u8,
    pub metrics: MetricsRecord,
}

/// Full 4x4 strategy/case comparison with the dominance findings the
/// adaptive scheme is evaluated on. Flags report what the runs actually
/// show; they are findings, not assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyMatrix {
    /// Strategy-major, then case 1..4 — a fixed, scheduler-independent
    /// order.
    pub cells: Vec<MatrixCell>,
    /// Adaptive case-4 nadir is at least every fixed strategy's.
    pub adaptive_dominates_nadir: bool,
    /// Adaptive case-4 recovery is at most every fixed strategy's.
    pub adaptive_dominates_recovery: bool,
    /// Among the three fixed strategies, EV-dominant has the deepest
    /// case-4 nadir.
    pub ev_dominant_deepest_nadir: bool,
}

impl StrategyMatrix {
    pub fn cell(&self, strategy: StrategyKind, case_id: u8) -> Option<&MatrixCell> {
        self.cells
            .iter()
            .find(|c| c.strategy == strategy && c.case_id == case_id)
    }
}

/// Scenario variant for one matrix cell.
pub fn matrix_scenario(base: &Scenario, strategy: StrategyKind, case_id: u8) -> Result<Scenario> {
    let mut cell_base = base.clone();
    cell_base.strategy = AllocationStrategy {
        kind: strategy,
        custom: None,
        t_dc_override_s: base.strategy.t_dc_override_s,
        gain_cap_mw_per_hz: base.strategy.gain_cap_mw_per_hz,
    };
    build_case(case_id, &cell_base)
}

/// Run the full 4 strategies x 4 cases grid sequentially and evaluate
/// the dominance claims on the case-4 row.
pub fn compare_strategies(base: &Scenario) -> Result<StrategyMatrix> {
    let mut cells = Vec::with_capacity(16);
    for strategy in StrategyKind::ALL {
        for case_id in 1..=4u8 {
            let scenario = matrix_scenario(base, strategy, case_id)?;
            let result = run_scenario(&scenario)?;
            let metrics = compute_metrics(&result)?;
            cells.push(MatrixCell {
                strategy,
                case_id,
                metrics,
            });
        }
    }

    let case4 = |kind: StrategyKind| {
        cells
            .iter()
            .find(|c| c.strategy == kind && c.case_id == 4)
            .expect("all 16 cells populated")
    };
    let adaptive = case4(StrategyKind::Adaptive);
    let fixed: Vec<&MatrixCell> = [
        StrategyKind::BessDominant,
        StrategyKind::DcDominant,
        StrategyKind::EvDominant,
    ]
    .iter()
    .map(|k| case4(*k))
    .collect();

    // "Not recovered" counts as infinitely slow.
    let recovery = |c: &MatrixCell| c.metrics.recovery_time_s.unwrap_or(f64::INFINITY);

    let adaptive_dominates_nadir = fixed
        .iter()
        .all(|c| adaptive.metrics.nadir_hz >= c.metrics.nadir_hz);
    let adaptive_dominates_recovery = fixed.iter().all(|c| recovery(adaptive) <= recovery(c));
    let ev_deepest = case4(StrategyKind::EvDominant).metrics.nadir_hz;
    let ev_dominant_deepest_nadir = ev_deepest < case4(StrategyKind::BessDominant).metrics.nadir_hz
        && ev_deepest < case4(StrategyKind::DcDominant).metrics.nadir_hz;

    Ok(StrategyMatrix {
        cells,
        adaptive_dominates_nadir,
        adaptive_dominates_recovery,
        ev_dominant_deepest_nadir,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
