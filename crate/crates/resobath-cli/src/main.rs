//! `resobath` — scenario runner for two-level-emitter field dynamics.
//!
//! Subcommands:
//! * `run <config>`: execute every scenario, write per-scenario CSV series
//!   and a `summary.toml` into the output directory,
//! * `validate <config>`: parse and check all invariants without solving,
//! * `compare <config>`: run with every scenario forced to `model = "both"`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical error.

mod config;
mod output;
mod runner;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use config::{parse_config, Model, Scenario};
use output::{write_csv, write_summary, Summary, SummaryMetadata};
use resobath_core::evolution::MASTER_EQUATION_SIGN;
use resobath_core::TimeGrid;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "resobath", version, about = "two-level emitter vs bosonic field: resonant exchange and pure dephasing, side by side")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run all scenarios in a config file.
    Run(RunArgs),
    /// Parse a config and check every invariant without running solvers.
    Validate { config: PathBuf },
    /// Run with every scenario forced to model = "both".
    Compare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Directory for CSV series and summary.toml.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads for sweep points (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Replace every grid's step with this value (n_steps = t_max / h).
    #[arg(long)]
    step_override: Option<f64>,
}

fn load_scenarios(path: &Path) -> Result<Vec<Scenario>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn apply_step_override(scenarios: &mut [Scenario], step: f64) -> Result<(), CliError> {
    if !step.is_finite() || step <= 0.0 {
        return Err(CliError::Config("--step-override must be positive".into()));
    }
    for s in scenarios {
        let n = ((s.grid.t_max() / step).round() as usize).max(2);
        s.grid = TimeGrid::new(s.grid.t_max(), n)
            .map_err(|e| CliError::Config(format!("--step-override: {e}")))?;
    }
    Ok(())
}

fn force_both(scenarios: &mut [Scenario]) {
    for s in scenarios {
        s.model = Model::Both;
        s.field = None;
    }
}

fn execute(args: &RunArgs, force: bool) -> Result<(), CliError> {
    let mut scenarios = load_scenarios(&args.config)?;
    if let Some(step) = args.step_override {
        apply_step_override(&mut scenarios, step)?;
    }
    if force {
        force_both(&mut scenarios);
    }

    let run_all = || -> Vec<Result<runner::ScenarioResult, CliError>> {
        scenarios.par_iter().map(runner::run_scenario).collect()
    };
    // results come back in scenario order regardless of worker count, and
    // the first error in declaration order is the one reported
    let outcomes = match args.threads {
        None => run_all(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?
            .install(run_all),
    };
    let mut results = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        results.push(outcome?);
    }

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out_dir.display())))?;

    let mut records = Vec::with_capacity(results.len());
    for (scenario, result) in scenarios.iter().zip(results) {
        if scenario.outputs.timeseries {
            for (stem, rows) in &result.series {
                let path = args.out_dir.join(format!("{stem}.csv"));
                write_csv(&path, rows)
                    .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
            }
        }
        if scenario.outputs.summary {
            records.push(result.record);
        }
    }
    runner::flag_sweep_extrema(&mut records);

    let summary = Summary {
        metadata: SummaryMetadata {
            tool: format!("resobath {}", env!("CARGO_PKG_VERSION")),
            master_equation_sign: MASTER_EQUATION_SIGN,
            gamma_convention: "gamma_t = Re(udot/u), negative during decay; \
                               gamma_fit = -d ln|u|/dt, positive during decay",
        },
        record: records,
    };
    let path = args.out_dir.join("summary.toml");
    write_summary(&path, &summary)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    Ok(())
}

fn real_main() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => execute(&args, false),
        Command::Validate { config } => {
            load_scenarios(&config)?;
            Ok(())
        }
        Command::Compare(args) => execute(&args, true),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
