//! Prints the reference study: per-case metrics under the adaptive
//! strategy, then the full 4 x 4 strategy/case matrix.
//!
//! Run with `cargo run --release --example reference_study`.

use ffrsim_core::coordinator::StrategyKind;
use ffrsim_core::metrics::compute_metrics_with;
use ffrsim_core::scenario::{compare_strategies, run_scenario};
use ffrsim_core::ConfigDocument;

fn main() -> ffrsim_core::Result<()> {
    let doc = ConfigDocument::default();
    let settings = doc.metrics_settings();

    println!("case  strategy      nadir_hz   rocof_hz_s  recovery_s  e_mwh    max_ev  max_dc  max_bess");
    let mut per_case = Vec::new();
    for case in 1..=4u8 {
        let scenario = doc.to_scenario(case, None)?;
        let result = run_scenario(&scenario)?;
        let m = compute_metrics_with(&result, &settings)?;
        println!(
            "{case}     {:<12}  {:.5}   {:+.5}    {:>8}    {:.4}   {:>6.2}  {:>6.2}  {:>6.2}",
            scenario.strategy.kind.name(),
            m.nadir_hz,
            m.rocof_hz_per_s,
            m.recovery_time_s
                .map_or("none".to_string(), |r| format!("{r:.3}")),
            m.ffr_energy_mwh,
            m.max_power_mw.ev,
            m.max_power_mw.dc,
            m.max_power_mw.bess,
        );
        per_case.push(m);
    }

    let c1 = &per_case[0];
    let c4 = &per_case[3];
    println!();
    println!(
        "RoCoF reduction C4 vs C1: {:.1}%",
        100.0 * (1.0 - c4.rocof_hz_per_s.abs() / c1.rocof_hz_per_s.abs())
    );
    println!("nadir improvement C4 - C1: {:.4} Hz", c4.nadir_hz - c1.nadir_hz);

    println!();
    println!("strategy matrix (case 4 rows):");
    let base = doc.base_scenario()?;
    let matrix = compare_strategies(&base)?;
    for strategy in StrategyKind::ALL {
        let cell = matrix.cell(strategy, 4).expect("cell exists");
        let m = &cell.metrics;
        println!(
            "  {:<14} nadir {:.5}  rocof {:+.5}  recovery {:>8}  e {:.4}",
            strategy.name(),
            m.nadir_hz,
            m.rocof_hz_per_s,
            m.recovery_time_s
                .map_or("none".to_string(), |r| format!("{r:.3}")),
            m.ffr_energy_mwh,
        );
    }
    println!(
        "  adaptive_dominates_nadir={} adaptive_dominates_recovery={} ev_dominant_deepest_nadir={}",
        matrix.adaptive_dominates_nadir,
        matrix.adaptive_dominates_recovery,
        matrix.ev_dominant_deepest_nadir
    );
    Ok(())
}
