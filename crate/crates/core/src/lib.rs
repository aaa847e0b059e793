//! Deterministic simulator for power-system frequency dynamics with
//! coordinated fast frequency response (FFR) from distributed resources.
//!
//! The plant is a center-of-inertia swing model: one system frequency
//! deviation driven by the power imbalance over the aggregate rotating
//! inertia, with per-machine governor lags and load damping. After a
//! large generation loss, three resource classes inject support power:
//!
//! * an aggregated **EV fleet** (droop response behind a communication
//!   delay, limited by charger rating and a shared battery budget),
//! * a **data center** (UPS discharge plus IT workload curtailment,
//!   each with its own gain and latency),
//! * a grid-scale **BESS** (droop behind a first-order converter lag
//!   with state-of-charge tracking).
//!
//! A coordinator splits the response across resources through
//! participation weights, either fixed (dominant-resource splits or
//! custom triples) or adaptive — weights proportional to available
//! capacity divided by response time, renormalized every control tick.
//!
//! Everything integrates with a fixed-step fourth-order Runge–Kutta
//! scheme; measurement delays are exact ring-buffer taps at integer
//! step offsets. Runs are bit-reproducible: no wall-clock input, no
//! ambient randomness, stable serialization.
//!
//! Entry points:
//!
//! * [`config::ConfigDocument`] — strict JSON schema with full defaults,
//! * [`scenario::run_scenario`] — one case, one strategy, full series,
//! * [`scenario::compare_strategies`] — the 4 × 4 strategy/case matrix,
//! * [`metrics::compute_metrics`] — nadir, windowed RoCoF, recovery
//!   time, per-resource maxima, delivered FFR energy,
//! * [`output`] / [`plot`] — CSV/JSON/SVG artifacts with manifests.

pub mod config;
pub mod coordinator;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod output;
pub mod plot;
pub mod resources;
pub mod scenario;

pub use config::ConfigDocument;
pub use coordinator::{
    adaptive_weights, custom_weights, dc_time_const, fixed_weights, Allocation,
    AllocationStrategy, ParticipationWeights, ResourceGains, StrategyKind,
};
pub use error::{Result, SimError};
pub use grid::{coi_frequency, DelayLine, DisturbanceEvent, Generator, GridModel, GridState};
pub use metrics::{compute_metrics, compute_metrics_with, MaxPower, MetricsRecord, MetricsSettings};
pub use output::{write_run_outputs, Manifest, OutputBundle};
pub use resources::{BessModel, DataCenterModel, EvFleetModel, ResourcePowerSample};
pub use scenario::{
    build_case, compare_strategies, matrix_scenario, run_scenario, MatrixCell, ResourceMask,
    RunResult, SampleRow, Scenario, SolverSettings, StrategyMatrix,
};
