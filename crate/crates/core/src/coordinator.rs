//! Participation-weight computation and command allocation.
//!
//! The coordinator splits the system droop command across the three
//! resources by a weight triple `(alpha_ev, alpha_dc, alpha_bess)` that
//! sums to one. Weights are either fixed (dominant-resource patterns, or
//! fully custom) or adaptive: each resource is weighted by its
//! capacity-to-response-time ratio,
//!
//! ```text
//! alpha_i = (W_i / T_i) / sum_j (W_j / T_j)
//! ```
//!
//! so fast, deep resources lead the response and energy-depleted ones
//! fade out as their sustainable capacity W_i(t) shrinks.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

/// Normalized participation weights. Either every entry is in `[0, 1]`
/// with the triple summing to one, or the triple is the all-zero
/// sentinel meaning "no resource has any capacity" (legal: allocation
/// then yields zero power everywhere).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticipationWeights {
    pub ev: f64,
    pub dc: f64,
    pub bess: f64,
}

impl ParticipationWeights {
    pub const ZERO: ParticipationWeights = ParticipationWeights {
        ev: 0.0,
        dc: 0.0,
        bess: 0.0,
    };

    pub fn sum(&self) -> f64 {
        self.ev + self.dc + self.bess
    }

    /// True for the no-capacity sentinel.
    pub fn is_zero(&self) -> bool {
        self.ev == 0.0 && self.dc == 0.0 && self.bess == 0.0
    }

    /// Check the normalization invariant (sentinel excepted).
    pub fn validate(&self) -> Result<()> {
        let all = [self.ev, self.dc, self.bess];
        if all.iter().any(|a| !a.is_finite() || *a < 0.0 || *a > 1.0) {
            return Err(SimError::InvalidInput(
                "participation weights must lie in [0, 1]".into(),
            ));
        }
        if self.is_zero() {
            return Ok(());
        }
        if (self.sum() - 1.0).abs() > 1e-12 {
            return Err(SimError::InvalidInput(format!(
                "participation weights sum to {} (expected 1 within 1e-12)",
                self.sum()
            )));
        }
        Ok(())
    }
}

/// Weights from the capacity/response-time heuristic.
///
/// `capacities_mw` and `time_constants_s` are ordered (EV, DC, BESS).
/// All-zero capacity returns the zero sentinel; negative capacity or a
/// non-positive time constant is a configuration error.
pub fn adaptive_weights(
    capacities_mw: [f64; 3],
    time_constants_s: [f64; 3],
) -> Result<ParticipationWeights> {
    for (i, t) in time_constants_s.iter().enumerate() {
        if !t.is_finite() || *t <= 0.0 {
            return Err(SimError::InvalidInput(format!(
                "adaptive weights: time constant {i} must be > 0 (got {t})"
            )));
        }
    }
    for (i, w) in capacities_mw.iter().enumerate() {
        if !w.is_finite() || *w < 0.0 {
            return Err(SimError::InvalidInput(format!(
                "adaptive weights: capacity {i} must be >= 0 (got {w})"
            )));
        }
    }
    let ratios = [
        capacities_mw[0] / time_constants_s[0],
        capacities_mw[1] / time_constants_s[1],
        capacities_mw[2] / time_constants_s[2],
    ];
    let total: f64 = ratios.iter().sum();
    if total <= 0.0 {
        return Ok(ParticipationWeights::ZERO);
    }
    Ok(ParticipationWeights {
        ev: ratios[0] / total,
        dc: ratios[1] / total,
        bess: ratios[2] / total,
    })
}

/// Capacity-weighted effective response time of the data center's two
/// internal channels (UPS and workload), used as T_DC by the heuristic.
pub fn dc_time_const(w_ups_mw: f64, t_ups_s: f64, w_it_mw: f64, t_it_s: f64) -> Result<f64> {
    let cap = w_ups_mw + w_it_mw;
    if cap <= 0.0 {
        return Err(SimError::InvalidInput(
            "dc_time_const: UPS + IT capacity must be > 0".into(),
        ));
    }
    Ok((w_ups_mw * t_ups_s + w_it_mw * t_it_s) / cap)
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

/// Which allocation rule drives the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Adaptive,
    BessDominant,
    DcDominant,
    EvDominant,
    Custom,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::Adaptive,
        StrategyKind::BessDominant,
        StrategyKind::DcDominant,
        StrategyKind::EvDominant,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Adaptive => "adaptive",
            StrategyKind::BessDominant => "bess_dominant",
            StrategyKind::DcDominant => "dc_dominant",
            StrategyKind::EvDominant => "ev_dominant",
            StrategyKind::Custom => "custom",
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = SimError;

    /// Accepts both the full config names and the CLI short forms.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(StrategyKind::Adaptive),
            "bess" | "bess_dominant" => Ok(StrategyKind::BessDominant),
            "dc" | "dc_dominant" => Ok(StrategyKind::DcDominant),
            "ev" | "ev_dominant" => Ok(StrategyKind::EvDominant),
            "custom" => Ok(StrategyKind::Custom),
            other => Err(SimError::InvalidInput(format!(
                "unknown strategy `{other}` (expected adaptive|bess|dc|ev|custom)"
            ))),
        }
    }
}

/// Built-in weight split for the fixed dominant-resource strategies.
/// The dominant resource takes 0.6 and the others 0.2 each; these
/// defaults are overridable through a custom strategy.
pub fn fixed_weights(kind: StrategyKind) -> Result<ParticipationWeights> {
    match kind {
        StrategyKind::BessDominant => Ok(ParticipationWeights {
            ev: 0.2,
            dc: 0.2,
            bess: 0.6,
        }),
        StrategyKind::DcDominant => Ok(ParticipationWeights {
            ev: 0.2,
            dc: 0.6,
            bess: 0.2,
        }),
        StrategyKind::EvDominant => Ok(ParticipationWeights {
            ev: 0.6,
            dc: 0.2,
            bess: 0.2,
        }),
        StrategyKind::Adaptive | StrategyKind::Custom => Err(SimError::InvalidInput(format!(
            "fixed_weights: `{kind}` has no built-in split"
        ))),
    }
}

/// Validate a user-supplied weight triple (custom strategy).
pub fn custom_weights(ev: f64, dc: f64, bess: f64) -> Result<ParticipationWeights> {
    let w = ParticipationWeights { ev, dc, bess };
    for (name, a) in [("ev", ev), ("dc", dc), ("bess", bess)] {
        if !a.is_finite() || a < 0.0 || a > 1.0 {
            return Err(SimError::Config {
                field: format!("strategy.fixed_weights.{name}"),
                reason: format!("must lie in [0, 1], got {a}"),
            });
        }
    }
    if !w.is_zero() && (w.sum() - 1.0).abs() > 1e-9 {
        return Err(SimError::Config {
            field: "strategy.fixed_weights".into(),
            reason: format!("must sum to 1 within 1e-9, got {}", w.sum()),
        });
    }
    Ok(w)
}

/// Full strategy description as configured for a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationStrategy {
    pub kind: StrategyKind,
    /// Required for `Custom`, ignored otherwise.
    pub custom: Option<ParticipationWeights>,
    /// Replaces the capacity-weighted DC blend in the heuristic.
    pub t_dc_override_s: Option<f64>,
    /// Optional cap on the aggregate droop gain; commands are rescaled
    /// proportionally when the weighted gain sum would exceed it.
    pub gain_cap_mw_per_hz: Option<f64>,
}

impl Default for AllocationStrategy {
    fn default() -> Self {
        AllocationStrategy {
            kind: StrategyKind::Adaptive,
            custom: None,
            t_dc_override_s: None,
            gain_cap_mw_per_hz: None,
        }
    }
}

impl AllocationStrategy {
    pub fn fixed(kind: StrategyKind) -> Result<Self> {
        fixed_weights(kind)?;
        Ok(AllocationStrategy {
            kind,
            ..AllocationStrategy::default()
        })
    }

    /// Weights at one control tick. Adaptive strategies consume the
    /// current sustainable capacities; fixed strategies ignore them.
    pub fn weights(
        &self,
        capacities_mw: [f64; 3],
        time_constants_s: [f64; 3],
    ) -> Result<ParticipationWeights> {
        match self.kind {
            StrategyKind::Adaptive => adaptive_weights(capacities_mw, time_constants_s),
            StrategyKind::Custom => self.custom.ok_or_else(|| SimError::Config {
                field: "strategy.fixed_weights".into(),
                reason: "custom strategy requires an explicit weight triple".into(),
            }),
            kind => fixed_weights(kind),
        }
    }
}

// ---------------------------------------------------------------------------
// Allocation
// ---------------------------------------------------------------------------

/// Per-resource droop gains, ordered (EV, DC combined, BESS) [MW/Hz].
/// The DC entry is the sum of the UPS and workload gains, since both
/// channels receive the same weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceGains {
    pub ev_mw_per_hz: f64,
    pub dc_mw_per_hz: f64,
    pub bess_mw_per_hz: f64,
}

/// A weight triple resolved against the resource gains, with the
/// optional aggregate-gain cap applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub weights: ParticipationWeights,
    /// Uncapped aggregate droop gain sum(alpha_i * k_i) [MW/Hz].
    pub aggregate_gain_mw_per_hz: f64,
    /// Common factor applied to every resource command so the effective
    /// aggregate gain respects the cap; 1.0 when no cap binds.
    pub gain_scale: f64,
}

impl Allocation {
    pub fn new(
        weights: ParticipationWeights,
        gains: ResourceGains,
        gain_cap_mw_per_hz: Option<f64>,
    ) -> Result<Self> {
        weights.validate()?;
        let aggregate = weights.ev * gains.ev_mw_per_hz
            + weights.dc * gains.dc_mw_per_hz
            + weights.bess * gains.bess_mw_per_hz;
        let gain_scale = match gain_cap_mw_per_hz {
            Some(cap) if cap <= 0.0 => {
                return Err(SimError::Config {
                    field: "strategy.gain_cap_mw_per_hz".into(),
                    reason: format!("must be > 0 when set, got {cap}"),
                });
            }
            Some(cap) if aggregate > cap => cap / aggregate,
            _ => 1.0,
        };
        Ok(Allocation {
            weights,
            aggregate_gain_mw_per_hz: aggregate,
            gain_scale,
        })
    }

    /// Effective weight each resource applies to its own droop law:
    /// the normalized weight times the common cap rescaling.
    pub fn effective(&self) -> (f64, f64, f64) {
        (
            self.weights.ev * self.gain_scale,
            self.weights.dc * self.gain_scale,
            self.weights.bess * self.gain_scale,
        )
    }

    pub fn effective_gain_mw_per_hz(&self) -> f64 {
        self.aggregate_gain_mw_per_hz * self.gain_scale
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Default capacities and time constants: EV 200 MW / 80 ms,
    /// DC 150 MW / (100*10ms + 50*200ms)/150 = 11/150 s, BESS 150 MW / 40 ms.
    fn default_inputs() -> ([f64; 3], [f64; 3]) {
        ([200.0, 150.0, 150.0], [0.08, 11.0 / 150.0, 0.04])
    }

    #[test]
    fn adaptive_matches_hand_derivation() {
        let (w, t) = default_inputs();
        let a = adaptive_weights(w, t).unwrap();
        // Ratios (2500, 22500/11, 3750) normalize to exactly
        // (22/73, 18/73, 33/73).
        assert_relative_eq!(a.ev, 22.0 / 73.0, max_relative = 1e-14);
        assert_relative_eq!(a.dc, 18.0 / 73.0, max_relative = 1e-14);
        assert_relative_eq!(a.bess, 33.0 / 73.0, max_relative = 1e-14);
        // Decimal cross-check.
        assert_relative_eq!(a.ev, 0.30137, max_relative = 1e-4);
        assert_relative_eq!(a.dc, 0.24658, max_relative = 1e-4);
        assert_relative_eq!(a.bess, 0.45205, max_relative = 1e-4);
        assert!((a.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_equal_ratios_split_evenly() {
        let a = adaptive_weights([100.0, 100.0, 100.0], [0.05, 0.05, 0.05]).unwrap();
        assert_relative_eq!(a.ev, 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(a.dc, 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(a.bess, 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_single_live_resource_takes_all() {
        let a = adaptive_weights([0.0, 0.0, 150.0], [0.08, 0.07, 0.04]).unwrap();
        assert_eq!((a.ev, a.dc, a.bess), (0.0, 0.0, 1.0));
    }

    #[test]
    fn adaptive_all_depleted_returns_sentinel() {
        let a = adaptive_weights([0.0, 0.0, 0.0], [0.08, 0.07, 0.04]).unwrap();
        assert!(a.is_zero());
        a.validate().unwrap();
    }

    #[test]
    fn adaptive_rejects_bad_inputs() {
        assert!(adaptive_weights([1.0, 1.0, 1.0], [0.0, 0.1, 0.1]).is_err());
        assert!(adaptive_weights([1.0, 1.0, 1.0], [0.1, -0.1, 0.1]).is_err());
        assert!(adaptive_weights([-1.0, 1.0, 1.0], [0.1, 0.1, 0.1]).is_err());
    }

    #[test]
    fn adaptive_scale_invariance_is_exact_for_binary_factors() {
        let (w, t) = default_inputs();
        let base = adaptive_weights(w, t).unwrap();
        for c in [2.0, 0.5, 4.0, 1024.0] {
            let scaled =
                adaptive_weights([w[0] * c, w[1] * c, w[2] * c], t).unwrap();
            assert_eq!(base, scaled);
        }
    }

    #[test]
    fn adaptive_preserves_ratio_ranking() {
        let a = adaptive_weights([120.0, 90.0, 150.0], [0.06, 0.09, 0.03]).unwrap();
        // Ratios 2000, 1000, 5000: bess > ev > dc strictly.
        assert!(a.bess > a.ev && a.ev > a.dc);
    }

    #[test]
    fn dc_time_const_blends_by_capacity() {
        let t = dc_time_const(100.0, 0.01, 50.0, 0.2).unwrap();
        assert_relative_eq!(t, 11.0 / 150.0, max_relative = 1e-14);
        assert_relative_eq!(t, 0.0733333, max_relative = 1e-5);
        assert!(dc_time_const(0.0, 0.01, 0.0, 0.2).is_err());
    }

    #[test]
    fn fixed_patterns_follow_dominance() {
        let b = fixed_weights(StrategyKind::BessDominant).unwrap();
        assert_eq!((b.ev, b.dc, b.bess), (0.2, 0.2, 0.6));
        let d = fixed_weights(StrategyKind::DcDominant).unwrap();
        assert_eq!((d.ev, d.dc, d.bess), (0.2, 0.6, 0.2));
        let e = fixed_weights(StrategyKind::EvDominant).unwrap();
        assert_eq!((e.ev, e.dc, e.bess), (0.6, 0.2, 0.2));
        assert!(fixed_weights(StrategyKind::Adaptive).is_err());
        assert!(fixed_weights(StrategyKind::Custom).is_err());
    }

    #[test]
    fn custom_weights_validation() {
        // Degenerate single-resource split is legal (reproduces the
        // EV-only case through the allocation path).
        let w = custom_weights(1.0, 0.0, 0.0).unwrap();
        assert_eq!((w.ev, w.dc, w.bess), (1.0, 0.0, 0.0));
        // Normalization violations and out-of-range entries are not.
        assert!(custom_weights(0.5, 0.5, 0.1).is_err());
        assert!(custom_weights(-0.2, 0.6, 0.6).is_err());
        assert!(custom_weights(f64::NAN, 0.5, 0.5).is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for kind in [
            StrategyKind::Adaptive,
            StrategyKind::BessDominant,
            StrategyKind::DcDominant,
            StrategyKind::EvDominant,
            StrategyKind::Custom,
        ] {
            assert_eq!(kind.name().parse::<StrategyKind>().unwrap(), kind);
        }
        // CLI short forms.
        assert_eq!("bess".parse::<StrategyKind>().unwrap(), StrategyKind::BessDominant);
        assert_eq!("dc".parse::<StrategyKind>().unwrap(), StrategyKind::DcDominant);
        assert_eq!("ev".parse::<StrategyKind>().unwrap(), StrategyKind::EvDominant);
        assert!("fastest".parse::<StrategyKind>().is_err());
    }

    fn default_gains() -> ResourceGains {
        ResourceGains {
            ev_mw_per_hz: 25.0,
            dc_mw_per_hz: 32.0,
            bess_mw_per_hz: 40.0,
        }
    }

    #[test]
    fn allocation_aggregate_gain_matches_hand_value() {
        let (w, t) = default_inputs();
        let weights = adaptive_weights(w, t).unwrap();
        let alloc = Allocation::new(weights, default_gains(), None).unwrap();
        // (22*25 + 18*32 + 33*40)/73 = 2446/73 = 33.5068...
        assert_relative_eq!(
            alloc.aggregate_gain_mw_per_hz,
            2446.0 / 73.0,
            max_relative = 1e-13
        );
        assert_eq!(alloc.gain_scale, 1.0);
    }

    #[test]
    fn gain_cap_rescales_proportionally() {
        let (w, t) = default_inputs();
        let weights = adaptive_weights(w, t).unwrap();
        // A 60 MW/Hz cap does not bind the 33.5 MW/Hz aggregate.
        let loose = Allocation::new(weights, default_gains(), Some(60.0)).unwrap();
        assert_eq!(loose.gain_scale, 1.0);

        // A 20 MW/Hz cap does.
        let tight = Allocation::new(weights, default_gains(), Some(20.0)).unwrap();
        assert!(tight.gain_scale < 1.0);
        assert_relative_eq!(
            tight.effective_gain_mw_per_hz(),
            20.0,
            max_relative = 1e-12
        );
        // Weights themselves stay normalized; only commands shrink.
        assert!((tight.weights.sum() - 1.0).abs() < 1e-12);
        let (e, d, b) = tight.effective();
        assert!(e < tight.weights.ev && d < tight.weights.dc && b < tight.weights.bess);
    }

    #[test]
    fn gain_cap_must_be_positive() {
        let weights = fixed_weights(StrategyKind::BessDominant).unwrap();
        assert!(Allocation::new(weights, default_gains(), Some(0.0)).is_err());
    }

    #[test]
    fn zero_sentinel_allocates_nothing() {
        let alloc =
            Allocation::new(ParticipationWeights::ZERO, default_gains(), Some(60.0)).unwrap();
        assert_eq!(alloc.aggregate_gain_mw_per_hz, 0.0);
        assert_eq!(alloc.effective(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn strategy_weights_dispatch() {
        let adaptive = AllocationStrategy::default();
        let (w, t) = default_inputs();
        let a = adaptive.weights(w, t).unwrap();
        assert_relative_eq!(a.bess, 33.0 / 73.0, max_relative = 1e-14);

        let fixed = AllocationStrategy::fixed(StrategyKind::EvDominant).unwrap();
        let f = fixed.weights([0.0, 0.0, 0.0], t).unwrap();
        assert_eq!((f.ev, f.dc, f.bess), (0.6, 0.2, 0.2));

        let custom = AllocationStrategy {
            kind: StrategyKind::Custom,
            custom: Some(custom_weights(0.55, 0.45, 0.0).unwrap()),
            ..AllocationStrategy::default()
        };
        let c = custom.weights(w, t).unwrap();
        assert_eq!((c.ev, c.dc, c.bess), (0.55, 0.45, 0.0));

        let missing = AllocationStrategy {
            kind: StrategyKind::Custom,
            ..AllocationStrategy::default()
        };
        assert!(missing.weights(w, t).is_err());
    }
}
