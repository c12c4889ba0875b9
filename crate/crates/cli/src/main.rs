//! `subharmonic`: closed-form, simulated and sampled-data stability analysis of
//! PWM buck converters from a flat configuration file.

mod commands;
mod config;
mod csv;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use subharmonic_core::{Error, SolveFor};

use config::ConfigError;

#[derive(Parser)]
#[command(name = "subharmonic", version, about = "Subharmonic-oscillation analysis of PWM buck converters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form 𝓛, verdict, and optionally a critical parameter value.
    Critical(Common),
    /// 𝓛 along a one-parameter sweep.
    Lplot(Common),
    /// Kernel surface over (D, p); `--sweep` may be given for D and for p.
    Contour(Common),
    /// Estimated and exact instability window of the compensator pole.
    Window(Common),
    /// Switched time-domain simulation with periodicity classification.
    Simulate(Common),
    /// Sampled-data poles at the operating point or along a sweep.
    Poles(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `var:start:stop:n[:log]`, var one of D, p, v_s, k_p.
    #[arg(long)]
    sweep: Vec<String>,
    /// Parameter to solve `𝓛 = 1` for: v_s, k_p, m_a or D.
    #[arg(long, value_parser = parse_solve_for)]
    solve_for: Option<SolveFor>,
    /// Simulated switching cycles.
    #[arg(long)]
    cycles: Option<usize>,
    /// Harmonics in the series cross-check.
    #[arg(long)]
    terms: Option<usize>,
}

fn parse_solve_for(s: &str) -> Result<SolveFor, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidInput(_) | Error::MissingParameter(_) => 2,
                Error::Divergence { .. } => 4,
                _ => 3,
            };
        }
    }
    1
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SUBHARMONIC_THREADS") {
        let n: usize = match v.trim().parse() {
            Ok(n) if n > 0 => n,
            _ => return Err(ConfigError(format!("SUBHARMONIC_THREADS=`{v}` is not a positive integer")).into()),
        };
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Critical(c) => commands::critical(c),
        Command::Lplot(c) => commands::lplot_cmd(c),
        Command::Contour(c) => commands::contour(c),
        Command::Window(c) => commands::window(c),
        Command::Simulate(c) => commands::simulate_cmd(c),
        Command::Poles(c) => commands::poles_cmd(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
