//! `decohere`: kernels, evolutions, scenarios, invariant checks and sweeps
//! for coarse-grained intrinsic decoherence.
//!
//! Exit codes: 0 success, 1 numeric or i/o failure, 2 invalid input,
//! 3 invariant violation, 4 model mismatch.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_axis, parse_param, CommandKind, Format, RunConfig, SweepSpec, ValuesSpec};
use error::{invalid, CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "decohere", version, about = "Coarse-grained intrinsic decoherence toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    tau1: Option<f64>,
    #[arg(long, global = true)]
    tau2: Option<f64>,
    /// Output times: `a,b,c` or `start:stop:count`.
    #[arg(long = "times", visible_alias = "t", global = true, allow_hyphen_values = true)]
    times: Option<String>,
    /// Read times in units of tau2.
    #[arg(long, global = true)]
    grid_units: bool,
    /// unitary, closed_form, finite_difference, second_order, milburn, quadrature or monte_carlo.
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    spectrum: Option<PathBuf>,
    #[arg(long, global = true)]
    rho0: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Where to write the JSON summary in CSV mode (default: stderr).
    #[arg(long, global = true)]
    summary: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Scenario or reduction parameter, `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", global = true)]
    params: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Effective-time density on a grid, with its moments.
    Kernel,
    /// Evolve a density matrix from files.
    Evolve,
    /// Run one of the scenarios: osc, cat, rabi, epr.
    Scenario { name: Option<String> },
    /// Invariant suite on random instances and optional fixtures.
    Check {
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Cartesian parameter sweep, one CSV row per cell.
    Sweep {
        /// `name=a,b,c` or `name=start:stop:count`; repeatable, first axis varies slowest.
        #[arg(long = "axis", value_name = "NAME=VALUES")]
        axes: Vec<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        reduction: Option<String>,
        /// Permit more than a million cells.
        #[arg(long)]
        allow_large: bool,
    },
}

fn flag_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig {
        tau1: cli.tau1,
        tau2: cli.tau2,
        times: cli.times.clone().map(ValuesSpec::Range),
        grid_units: cli.grid_units.then_some(true),
        method: cli.method.clone(),
        spectrum: cli.spectrum.clone(),
        rho0: cli.rho0.clone(),
        seed: cli.seed,
        samples: cli.samples,
        tol: cli.tol,
        out: cli.out.clone(),
        summary: cli.summary.clone(),
        format: cli.format,
        workers: cli.workers,
        ..Default::default()
    };
    for p in &cli.params {
        let (k, v) = parse_param(p)?;
        cfg.params.insert(k, v);
    }
    match &cli.command {
        None => {}
        Some(Command::Kernel) => cfg.command = Some(CommandKind::Kernel),
        Some(Command::Evolve) => cfg.command = Some(CommandKind::Evolve),
        Some(Command::Scenario { name }) => {
            cfg.command = Some(CommandKind::Scenario);
            cfg.scenario = name.clone();
        }
        Some(Command::Check { instances }) => {
            cfg.command = Some(CommandKind::Check);
            cfg.instances = *instances;
        }
        Some(Command::Sweep { .. }) => cfg.command = Some(CommandKind::Sweep),
    }
    Ok(cfg)
}

/// Sweep flags refine the spec from the config file rather than replacing it.
fn merge_sweep(cli: &Cli, cfg: &mut RunConfig) -> CliResult<()> {
    let Some(Command::Sweep { axes, target, reduction, allow_large }) = &cli.command else { return Ok(()) };
    if axes.is_empty() && target.is_none() && reduction.is_none() && !allow_large {
        return Ok(());
    }
    let mut spec = cfg.sweep.take().unwrap_or(SweepSpec {
        target: String::new(),
        reduction: String::new(),
        axes: Vec::new(),
        allow_large: false,
    });
    if !axes.is_empty() {
        spec.axes = axes.iter().map(|a| parse_axis(a)).collect::<CliResult<_>>()?;
    }
    if let Some(t) = target {
        spec.target = t.clone();
    }
    if let Some(r) = reduction {
        spec.reduction = r.clone();
    }
    spec.allow_large |= *allow_large;
    if spec.target.is_empty() || spec.reduction.is_empty() {
        return Err(invalid("sweep needs --target and --reduction"));
    }
    cfg.sweep = Some(spec);
    Ok(())
}

fn dispatch(cfg: &RunConfig) -> CliResult<output::Report> {
    match cfg.command {
        Some(CommandKind::Kernel) => commands::kernel::run(cfg),
        Some(CommandKind::Evolve) => commands::evolve::run(cfg),
        Some(CommandKind::Scenario) => commands::scenario::run(cfg),
        Some(CommandKind::Check) => commands::check::run(cfg),
        Some(CommandKind::Sweep) => commands::sweep::run(cfg),
        None => Err(invalid("no command given: use kernel, evolve, scenario, check or sweep")),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut cfg = base.overlay(flag_config(cli)?);
    merge_sweep(cli, &mut cfg)?;

    let report = match cfg.workers {
        Some(0) => return Err(invalid("--workers must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Failure(format!("thread pool: {e}")))?
            .install(|| dispatch(&cfg))?,
        None => dispatch(&cfg)?,
    };
    output::emit(&report, cfg.format(), cfg.out.as_deref(), cfg.summary.as_deref())?;
    match report.violation {
        Some(msg) => Err(CliError::Invariant(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
