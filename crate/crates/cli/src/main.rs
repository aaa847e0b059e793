//! `ffrsim` — command-line front end for the frequency-response study
//! simulator.
//!
//! Subcommands:
//! * `run`   — one case under one strategy: CSV series, metrics JSON,
//!             SVG figures, and a manifest in the output directory.
//! * `batch` — the full 4 x 4 strategy/case matrix: one subdirectory
//!             per cell, a summary table, and comparison figures.
//! * `version` — print the tool version.
//!
//! Exit codes: 0 success, 10 missing config file, 11 malformed JSON,
//! 12 unknown config key, 13 out-of-range value, 20 simulation abort,
//! 30 I/O failure (2 is reserved by the argument parser).

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use clap::{Args, Parser, Subcommand};

use ffrsim_core::coordinator::StrategyKind;
use ffrsim_core::metrics::{compute_metrics_with, MetricsRecord};
use ffrsim_core::output::{summary_csv, write_atomic, write_run_outputs};
use ffrsim_core::plot::{strategy_frequency_figure, strategy_metrics_figure};
use ffrsim_core::scenario::{run_scenario, MatrixCell, RunResult};
use ffrsim_core::{ConfigDocument, Result, SimError};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "ffrsim",
    version,
    about = "Deterministic grid-frequency simulator with coordinated fast frequency response",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one study case under one coordination strategy.
    Run(RunArgs),
    /// Simulate the full 4 x 4 strategy/case comparison matrix.
    Batch(BatchArgs),
    /// Print the tool version.
    Version,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration (JSON). Omit for the built-in reference
    /// study; `{}` is equivalent.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (default: $FFRSIM_OUT, then ./ffrsim_out).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Study case: 1 no FFR, 2 EV only, 3 EV + data center, 4 all.
    #[arg(long, default_value_t = 4)]
    case: u8,

    /// Coordination strategy override:
    /// adaptive|bess|dc|ev|custom (default: the configured strategy).
    #[arg(long)]
    strategy: Option<String>,

    /// Integration step override [s].
    #[arg(long)]
    dt: Option<f64>,

    /// Simulated span override [s].
    #[arg(long)]
    duration: Option<f64>,

    /// Skip SVG figure rendering.
    #[arg(long)]
    no_plots: bool,
}

#[derive(Args)]
struct BatchArgs {
    /// Scenario configuration (JSON). Omit for the built-in reference
    /// study.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (default: $FFRSIM_OUT, then ./ffrsim_out).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads for the 16 cells (any value yields identical
    /// results).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Batch(args) => cmd_batch(&args),
        Command::Version => {
            println!("ffrsim {VERSION}");
            Ok(())
        }
    };
    match outcome {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

/// Load the configuration document, or the built-in defaults when no
/// path was given.
fn load_config(path: &Option<PathBuf>) -> Result<ConfigDocument> {
    match path {
        Some(p) => ConfigDocument::from_file(p),
        None => Ok(ConfigDocument::default()),
    }
}

/// Output directory precedence: --out flag, then $FFRSIM_OUT, then
/// ./ffrsim_out.
fn resolve_out(flag: &Option<PathBuf>) -> PathBuf {
    if let Some(p) = flag {
        return p.clone();
    }
    if let Ok(env) = std::env::var("FFRSIM_OUT") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from("ffrsim_out")
}

/// Fold command-line overrides into the document so the manifest hash
/// covers exactly the configuration that ran, then re-validate.
fn apply_overrides(
    mut doc: ConfigDocument,
    strategy: &Option<String>,
    dt: Option<f64>,
    duration: Option<f64>,
) -> Result<ConfigDocument> {
    if let Some(s) = strategy {
        let kind = StrategyKind::from_str(s)?;
        doc.strategy.kind = kind.name().to_string();
        if kind != StrategyKind::Custom {
            doc.strategy.fixed_weights = None;
        }
    }
    if let Some(dt) = dt {
        doc.solver.dt = dt;
    }
    if let Some(duration) = duration {
        doc.solver.duration = duration;
    }
    doc.validated()
}

fn format_summary(case: u8, strategy: StrategyKind, m: &MetricsRecord) -> String {
    format!(
        "case {case} {}: nadir {:.5} Hz, rocof {:+.5} Hz/s, recovery {}, energy {:.4} MWh",
        strategy.name(),
        m.nadir_hz,
        m.rocof_hz_per_s,
        m.recovery_time_s
            .map_or("none".to_string(), |r| format!("{r:.3} s")),
        m.ffr_energy_mwh,
    )
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let doc = apply_overrides(
        load_config(&args.config)?,
        &args.strategy,
        args.dt,
        args.duration,
    )?;
    let scenario = doc.to_scenario(args.case, None)?;
    let result = run_scenario(&scenario)?;
    let metrics = compute_metrics_with(&result, &doc.metrics_settings())?;

    let out_dir = resolve_out(&args.out);
    let bundle = write_run_outputs(
        &out_dir,
        &result,
        &metrics,
        doc.effective_json().as_bytes(),
        VERSION,
        !args.no_plots,
    )?;

    println!("{}", format_summary(args.case, scenario.strategy.kind, &metrics));
    println!("wrote {}", bundle.dir.display());
    Ok(())
}

/// One finished matrix cell: its metrics row and the sampled series the
/// comparison figures are built from.
struct CellOutcome {
    cell: MatrixCell,
    result: RunResult,
}

fn run_cell(doc: &ConfigDocument, strategy: StrategyKind, case: u8, out_root: &Path) -> Result<CellOutcome> {
    // The cell's effective document pins its own strategy so each
    // manifest hashes the configuration that actually ran.
    let mut cell_doc = doc.clone();
    cell_doc.strategy.kind = strategy.name().to_string();
    cell_doc.strategy.fixed_weights = None;
    let cell_doc = cell_doc.validated()?;

    let scenario = cell_doc.to_scenario(case, None)?;
    let result = run_scenario(&scenario)?;
    let metrics = compute_metrics_with(&result, &cell_doc.metrics_settings())?;

    let dir = out_root.join(format!("{}_case{case}", strategy.name()));
    write_run_outputs(
        &dir,
        &result,
        &metrics,
        cell_doc.effective_json().as_bytes(),
        VERSION,
        true,
    )?;

    Ok(CellOutcome {
        cell: MatrixCell {
            strategy,
            case_id: case,
            metrics,
        },
        result,
    })
}

fn cmd_batch(args: &BatchArgs) -> Result<()> {
    let doc = load_config(&args.config)?;
    let out_root = resolve_out(&args.out);
    std::fs::create_dir_all(&out_root)?;

    let grid: Vec<(StrategyKind, u8)> = StrategyKind::ALL
        .iter()
        .flat_map(|s| (1..=4u8).map(move |c| (*s, c)))
        .collect();

    // Fixed worker pool over indexed slots: each cell is a pure function
    // of the configuration, so results are identical for any job count.
    let slots: Vec<OnceLock<Result<CellOutcome>>> =
        (0..grid.len()).map(|_| OnceLock::new()).collect();
    let next = AtomicUsize::new(0);
    let workers = args.jobs.clamp(1, grid.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= grid.len() {
                    break;
                }
                let (strategy, case) = grid[i];
                let outcome = run_cell(&doc, strategy, case, &out_root);
                slots[i].set(outcome).ok().expect("slot claimed once");
            });
        }
    });

    let mut cells = Vec::new();
    let mut outcomes: Vec<Option<CellOutcome>> = Vec::new();
    let mut failures: Vec<(StrategyKind, u8, SimError)> = Vec::new();
    for (slot, (strategy, case)) in slots.into_iter().zip(&grid) {
        match slot.into_inner().expect("every slot filled") {
            Ok(outcome) => {
                cells.push(outcome.cell.clone());
                outcomes.push(Some(outcome));
            }
            Err(e) => {
                failures.push((*strategy, *case, e));
                outcomes.push(None);
            }
        }
    }

    write_atomic(&out_root.join("summary.csv"), summary_csv(&cells).as_bytes())?;

    // Comparison figures need the full grid; render them only when every
    // cell finished.
    if failures.is_empty() {
        let find = |strategy: StrategyKind, case: u8| -> &CellOutcome {
            let idx = grid
                .iter()
                .position(|(s, c)| *s == strategy && *c == case)
                .expect("cell in grid");
            outcomes[idx].as_ref().expect("cell finished")
        };

        let case4_runs: Vec<(String, &RunResult)> = StrategyKind::ALL
            .iter()
            .map(|s| (s.name().to_string(), &find(*s, 4).result))
            .collect();
        let baseline = &find(StrategyKind::Adaptive, 1).result;
        let fig5 = strategy_frequency_figure(&case4_runs, Some(baseline));

        let adaptive4 = find(StrategyKind::Adaptive, 4);
        let fig6 = ffrsim_core::plot::power_figure(&adaptive4.result);
        let fig7 = ffrsim_core::plot::weights_figure(&adaptive4.result);

        let case4_cells: Vec<(String, MetricsRecord)> = StrategyKind::ALL
            .iter()
            .map(|s| (s.name().to_string(), find(*s, 4).cell.metrics))
            .collect();
        let fig8 = strategy_metrics_figure(&case4_cells);

        for (name, svg) in [
            ("fig5.svg", fig5),
            ("fig6.svg", fig6),
            ("fig7.svg", fig7),
            ("fig8.svg", fig8),
        ] {
            write_atomic(&out_root.join(name), svg.as_bytes())?;
        }
    }

    for cell in &cells {
        println!("{}", format_summary(cell.case_id, cell.strategy, &cell.metrics));
    }
    println!(
        "wrote {} of {} cells to {}",
        cells.len(),
        grid.len(),
        out_root.display()
    );

    if !failures.is_empty() {
        for (strategy, case, e) in &failures {
            eprintln!("cell {}_case{case} failed: {e}", strategy.name());
        }
        return Err(failures.remove(0).2);
    }
    Ok(())
}
