use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use cachee_core::experiments::{self, SweepOutput, SweepParam, SweepSpec};
use cachee_core::grid::parse_grid;
use cachee_core::scenario::{load_config, preset, Scenario};
use clap::{Args, Parser, Subcommand};

/// Energy efficiency of cache-enabled multi-antenna small-cell networks.
#[derive(Parser, Debug)]
#[command(name = "cachee", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Base preset, e.g. `pico`, `macro`, `pico+dram+fiber`.
    #[arg(long, global = true, default_value = "pico")]
    preset: String,
    /// Config file applied on top of the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo drops.
    #[arg(long, global = true)]
    drops: Option<u64>,
    /// Simulator worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file; stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form throughput, power and EE.
    Analyze,
    /// Closed-form optimal cache size and transmit power.
    Optimize,
    /// Monte-Carlo estimates.
    Simulate,
    /// Parameter sweep, either a named figure or a custom grid.
    Sweep(SweepArgs),
    /// Simulator-versus-model and optimizer-versus-oracle checks.
    Validate,
    /// Caching-benefit condition for the six hardware cases.
    Table1,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Figure to reproduce (fig1, fig2a, fig2b, fig3a, fig3b, fig4a, fig4b, fig5).
    #[arg(long, conflicts_with_all = ["param", "grid"])]
    figure: Option<String>,
    /// Add Monte-Carlo columns to figures that have them.
    #[arg(long, requires = "figure")]
    sim: bool,
    /// Swept parameter, e.g. `eta` or `backhaul_capacity_mbps`.
    #[arg(long, requires = "grid")]
    param: Option<String>,
    /// `log:LO:HI:N`, `lin:LO:HI:N` or a comma list.
    #[arg(long, requires = "param")]
    grid: Option<String>,
    /// Comma list of `analytic`, `single_user`, `sim`.
    #[arg(long, default_value = "analytic", value_delimiter = ',')]
    outputs: Vec<String>,
}

enum Failure {
    Usage(anyhow::Error),
    Validation,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn scenario(c: &Common) -> anyhow::Result<Scenario> {
    let mut s = preset(&c.preset)?;
    if let Some(path) = &c.config {
        s = load_config(path, &s).with_context(|| format!("loading {}", path.display()))?;
    }
    if let Some(seed) = c.seed {
        s.sim.seed = seed;
    }
    if let Some(drops) = c.drops {
        anyhow::ensure!(drops > 0, "--drops must be positive");
        s.sim.drops = drops;
    }
    if c.workers.is_some() {
        anyhow::ensure!(c.workers != Some(0), "--workers must be positive");
        s.sim.workers = c.workers;
    }
    Ok(s)
}

fn emit(c: &Common, text: &str) -> anyhow::Result<()> {
    match &c.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let s = scenario(&cli.common)?;
    let csv = match &cli.command {
        Command::Analyze => experiments::analyze(&s, &experiments::phi_for(&s).map_err(anyhow::Error::from)?),
        Command::Optimize => experiments::optimize(&s, &experiments::phi_for(&s).map_err(anyhow::Error::from)?),
        Command::Simulate => experiments::simulate_report(&s),
        Command::Table1 => experiments::phi_for(&preset("pico").map_err(anyhow::Error::from)?).and_then(|p| experiments::table1(&p)),
        Command::Validate => {
            let phi = experiments::phi_for(&s).map_err(anyhow::Error::from)?;
            let report = experiments::run_validate(&s, &phi).map_err(anyhow::Error::from)?;
            emit(&cli.common, &report.to_csv(&s).render())?;
            for c in &report.checks {
                eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return if report.passed() { Ok(()) } else { Err(Failure::Validation) };
        }
        Command::Sweep(a) => {
            let phi = experiments::phi_for(&s).map_err(anyhow::Error::from)?;
            match (&a.figure, &a.param, &a.grid) {
                (Some(fig), _, _) => experiments::figure(fig, &s, &phi, a.sim),
                (None, Some(param), Some(grid)) => {
                    let spec = SweepSpec {
                        param: param.parse::<SweepParam>().map_err(anyhow::Error::from)?,
                        grid: parse_grid(grid).map_err(anyhow::Error::from)?,
                        outputs: a
                            .outputs
                            .iter()
                            .map(|o| o.parse::<SweepOutput>())
                            .collect::<cachee_core::Result<_>>()
                            .map_err(anyhow::Error::from)?,
                    };
                    experiments::run_sweep(&spec, &s, &phi)
                }
                _ => return Err(Failure::Usage(anyhow::anyhow!("sweep needs --figure or --param with --grid"))),
            }
        }
    };
    let csv = csv.map_err(anyhow::Error::from)?;
    emit(&cli.common, &csv.render())?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
