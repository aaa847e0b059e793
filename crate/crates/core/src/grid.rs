//! Grid-side frequency dynamics.
//!
//! The system is reduced to a single centre-of-inertia (COI) bus: every
//! online machine contributes rotating mass and a governor, and the bus
//! frequency deviation follows the aggregate swing equation
//!
//! ```text
//! d(dev)/dt = (net_injection + governor_power - damping_d * dev) / M
//! ```
//!
//! with `M = sum(2 * H_i * S_i) / f_nominal` in MW·s per Hz.
//!
//! Sign conventions used everywhere in this crate:
//! * `dev` (frequency deviation) is `f - f_nominal`, negative while the
//!   system is short of generation;
//! * power is positive when it is injected toward the grid (or when load
//!   is relieved), so every support channel is >= 0 during an
//!   under-frequency event.

use crate::error::{Result, SimError};

// ---------------------------------------------------------------------------
// Machines
// ---------------------------------------------------------------------------

/// One synchronous machine (or aggregated plant) contributing inertia and
/// primary governor response.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub id: String,
    /// Rated apparent power [MVA]; also the base for the governor limit.
    pub rated_mva: f64,
    /// Inertia constant H [s] on the machine base.
    pub inertia_h_s: f64,
    /// Governor droop R [pu]: the steady-state gain is S / (R * f0) MW/Hz.
    pub governor_droop_pu: f64,
    /// Governor servo time constant [s] (first-order lag).
    pub governor_time_const_s: f64,
    /// Mechanical-power headroom as a fraction of `rated_mva`.
    pub governor_limit_frac: f64,
    /// Tripped machines drop out of every aggregate sum.
    pub online: bool,
}

impl Generator {
    /// Steady-state governor gain [MW/Hz] against frequency deviation.
    pub fn governor_gain_mw_per_hz(&self, nominal_freq_hz: f64) -> f64 {
        self.rated_mva / (self.governor_droop_pu * nominal_freq_hz)
    }

    /// Droop command toward which the governor servo lags, clamped to the
    /// mechanical headroom of the unit [MW].
    pub fn governor_command_mw(&self, nominal_freq_hz: f64, dev_hz: f64) -> f64 {
        let limit = self.governor_limit_frac * self.rated_mva;
        (-self.governor_gain_mw_per_hz(nominal_freq_hz) * dev_hz).clamp(-limit, limit)
    }
}

// ---------------------------------------------------------------------------
// Aggregate model and state
// ---------------------------------------------------------------------------

/// Static description of the grid side: nominal frequency, load damping,
/// and the machine set.
#[derive(Debug, Clone)]
pub struct GridModel {
    pub nominal_freq_hz: f64,
    /// Aggregate load-damping coefficient D [MW/Hz].
    pub damping_mw_per_hz: f64,
    pub generators: Vec<Generator>,
}

/// Integrated grid state: bus frequency deviation plus the per-machine
/// mechanical-power deviation driven by each governor.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub time_s: f64,
    /// f - f_nominal [Hz].
    pub freq_dev_hz: f64,
    /// Governor mechanical-power deviation [MW], aligned with
    /// `GridModel::generators`. Offline entries stay at zero.
    pub gov_power_mw: Vec<f64>,
}

impl GridState {
    /// Rest state (no deviation, governors at their scheduled output).
    pub fn at_rest(model: &GridModel) -> Self {
        GridState {
            time_s: 0.0,
            freq_dev_hz: 0.0,
            gov_power_mw: vec![0.0; model.generators.len()],
        }
    }

    /// Total governor mechanical-power deviation [MW].
    pub fn governor_total_mw(&self) -> f64 {
        self.gov_power_mw.iter().sum()
    }
}

impl GridModel {
    /// Total kinetic constant `M = sum(2 H_i S_i) / f0` over online
    /// machines [MW·s/Hz]. Errors when nothing is online.
    pub fn kinetic_m(&self) -> Result<f64> {
        let twice_hs: f64 = self
            .generators
            .iter()
            .filter(|g| g.online)
            .map(|g| 2.0 * g.inertia_h_s * g.rated_mva)
            .sum();
        if twice_hs <= 0.0 {
            return Err(SimError::NoInertia(
                "no online generator contributes kinetic energy".into(),
            ));
        }
        Ok(twice_hs / self.nominal_freq_hz)
    }

    /// Take one machine off line (idempotent). Its inertia and governor
    /// leave every sum from the next derivative evaluation on.
    pub fn trip(&mut self, id: &str) -> Result<()> {
        match self.generators.iter_mut().find(|g| g.id == id) {
            Some(g) => {
                g.online = false;
                Ok(())
            }
            None => Err(SimError::UnknownGenerator(id.to_string())),
        }
    }

    /// Time derivatives of the grid state at one integration stage.
    ///
    /// `external_injection_mw` carries everything that is not a governor
    /// or load-damping term (disturbance plus support-resource power).
    /// `d_gov` must be as long as the machine set; offline machines hold
    /// a zero derivative.
    pub(crate) fn stage_derivs(
        &self,
        kinetic_m: f64,
        dev_hz: f64,
        gov_power_mw: &[f64],
        external_injection_mw: f64,
        d_gov: &mut [f64],
    ) -> f64 {
        let mut gov_total = 0.0;
        for (i, gen) in self.generators.iter().enumerate() {
            if !gen.online {
                d_gov[i] = 0.0;
                continue;
            }
            let cmd = gen.governor_command_mw(self.nominal_freq_hz, dev_hz);
            d_gov[i] = (cmd - gov_power_mw[i]) / gen.governor_time_const_s;
            gov_total += gov_power_mw[i];
        }
        (external_injection_mw + gov_total - self.damping_mw_per_hz * dev_hz) / kinetic_m
    }

    /// Advance the grid state by one explicit RK4 step of length `dt_s`,
    /// holding `net_injection_mw` constant across the step. Governor
    /// states are integrated jointly with the frequency deviation so the
    /// droop feedback is stage-consistent.
    pub fn swing_step(
        &self,
        state: &mut GridState,
        net_injection_mw: f64,
        dt_s: f64,
    ) -> Result<()> {
        if dt_s <= 0.0 {
            return Err(SimError::InvalidInput("swing_step: dt must be > 0".into()));
        }
        let m = self.kinetic_m()?;
        let n = self.generators.len();
        if state.gov_power_mw.len() != n {
            return Err(SimError::InvalidInput(
                "swing_step: governor state length does not match machine set".into(),
            ));
        }

        // Stage buffers. The state vector is small (one bus plus a handful
        // of machines), so per-step allocation is acceptable here; the
        // scenario engine keeps its own preallocated loop.
        let mut k = [
            (0.0, vec![0.0; n]),
            (0.0, vec![0.0; n]),
            (0.0, vec![0.0; n]),
            (0.0, vec![0.0; n]),
        ];
        let mut dev_tmp;
        let mut gov_tmp = vec![0.0; n];

        // k1 at the step start.
        k[0].0 = self.stage_derivs(
            m,
            state.freq_dev_hz,
            &state.gov_power_mw,
            net_injection_mw,
            &mut k[0].1,
        );
        // k2, k3 at the midpoint, k4 at the end.
        for (stage, frac) in [(1usize, 0.5), (2, 0.5), (3, 1.0)] {
            let prev = stage - 1;
            dev_tmp = state.freq_dev_hz + frac * dt_s * k[prev].0;
            for i in 0..n {
                gov_tmp[i] = state.gov_power_mw[i] + frac * dt_s * k[prev].1[i];
            }
            let slot = &mut k[stage];
            slot.0 = self.stage_derivs(m, dev_tmp, &gov_tmp, net_injection_mw, &mut slot.1);
        }

        state.freq_dev_hz +=
            dt_s / 6.0 * (k[0].0 + 2.0 * k[1].0 + 2.0 * k[2].0 + k[3].0);
        for i in 0..n {
            state.gov_power_mw[i] +=
                dt_s / 6.0 * (k[0].1[i] + 2.0 * k[1].1[i] + 2.0 * k[2].1[i] + k[3].1[i]);
        }
        state.time_s += dt_s;

        if !state.freq_dev_hz.is_finite() {
            return Err(SimError::Aborted {
                time_s: state.time_s,
                reason: "frequency deviation became non-finite".into(),
            });
        }
        Ok(())
    }

    /// Instantaneous `d(dev)/dt` [Hz/s] for a given injection, useful for
    /// rate-of-change checks without integrating.
    pub fn freq_derivative(&self, state: &GridState, net_injection_mw: f64) -> Result<f64> {
        let m = self.kinetic_m()?;
        let mut scratch = vec![0.0; self.generators.len()];
        Ok(self.stage_derivs(
            m,
            state.freq_dev_hz,
            &state.gov_power_mw,
            net_injection_mw,
            &mut scratch,
        ))
    }
}

/// Inertia-weighted average frequency over a machine set: each deviation
/// is weighted by `2 H_i S_i`, so heavy machines dominate the aggregate.
/// `dev_hz` holds per-machine deviations from `nominal_freq_hz`.
pub fn coi_frequency(nominal_freq_hz: f64, generators: &[Generator], dev_hz: &[f64]) -> Result<f64> {
    if generators.len() != dev_hz.len() {
        return Err(SimError::InvalidInput(
            "coi_frequency: one deviation per generator required".into(),
        ));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (gen, dev) in generators.iter().zip(dev_hz) {
        if !gen.online {
            continue;
        }
        let w = 2.0 * gen.inertia_h_s * gen.rated_mva;
        num += w * dev;
        den += w;
    }
    if den <= 0.0 {
        return Err(SimError::NoInertia(
            "coi_frequency over an empty or fully tripped set".into(),
        ));
    }
    Ok(nominal_freq_hz + num / den)
}

// ---------------------------------------------------------------------------
// Transport delay
// ---------------------------------------------------------------------------

/// Fixed-step transport delay backed by a ring buffer.
///
/// The delay is rounded to the nearest whole number of steps `n`;
/// `read()` returns the value pushed `n` pushes ago. A freshly created
/// line returns its fill value until real samples have propagated
/// through.
#[derive(Debug, Clone)]
pub struct DelayLine {
    delay_s: f64,
    step_s: f64,
    buf: Vec<f64>,
    head: usize,
}

impl DelayLine {
    pub fn new(delay_s: f64, step_s: f64, fill: f64) -> Result<Self> {
        if step_s <= 0.0 {
            return Err(SimError::InvalidInput("DelayLine: step must be > 0".into()));
        }
        if delay_s < 0.0 {
            return Err(SimError::InvalidInput(
                "DelayLine: delay must be >= 0".into(),
            ));
        }
        let n = (delay_s / step_s).round() as usize;
        Ok(DelayLine {
            delay_s,
            step_s,
            buf: vec![fill; n + 1],
            head: 0,
        })
    }

    /// Number of whole steps the line delays by.
    pub fn delay_steps(&self) -> usize {
        self.buf.len() - 1
    }

    pub fn delay_s(&self) -> f64 {
        self.delay_s
    }

    pub fn step_s(&self) -> f64 {
        self.step_s
    }

    /// Record the value sampled at the current step.
    pub fn push(&mut self, value: f64) {
        self.head = (self.head + 1) % self.buf.len();
        self.buf[self.head] = value;
    }

    /// Value pushed `delay_steps()` pushes ago (the delayed sample).
    pub fn read(&self) -> f64 {
        self.read_back(self.delay_steps())
    }

    /// Value pushed `k` pushes ago; `k = 0` is the most recent push.
    /// `k` must not exceed `delay_steps()`.
    pub fn read_back(&self, k: usize) -> f64 {
        debug_assert!(k < self.buf.len());
        let len = self.buf.len();
        self.buf[(self.head + len - k % len) % len]
    }
}

// ---------------------------------------------------------------------------
// Disturbance
// ---------------------------------------------------------------------------

/// A step loss of generation, optionally tied to tripping one machine so
/// its inertia and governor disappear along with its output.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceEvent {
    pub time_s: f64,
    /// Lost generation [MW]; enters the power balance as `-power_mw`
    /// from `time_s` onward.
    pub power_mw: f64,
    pub trip_generator: Option<String>,
}

impl DisturbanceEvent {
    /// Contribution to the net injection at time `t_s` [MW].
    pub fn injection_mw(&self, t_s: f64) -> f64 {
        if t_s >= self.time_s {
            -self.power_mw
        } else {
            0.0
        }
    }

    pub fn is_active(&self, t_s: f64) -> bool {
        t_s >= self.time_s
    }

    /// Apply the machine trip (if any) to the model. Idempotent.
    pub fn apply_trip(&self, model: &mut GridModel) -> Result<()> {
        if let Some(id) = &self.trip_generator {
            model.trip(id)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
