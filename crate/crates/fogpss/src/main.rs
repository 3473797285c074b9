use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fogpss::cli::commands::{
    cmd_check_stability, cmd_reproduce, cmd_simulate, cmd_solve_fde, ReproduceTarget,
    SimulateOverrides,
};

#[derive(Parser)]
#[command(
    name = "fogpss",
    version,
    about = "Fractional-order practical tracking control toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Fig5,
    Fig6,
    Fig7,
    Pss,
    Order,
}

impl From<Target> for ReproduceTarget {
    fn from(t: Target) -> Self {
        match t {
            Target::Fig5 => ReproduceTarget::Fig5,
            Target::Fig6 => ReproduceTarget::Fig6,
            Target::Fig7 => ReproduceTarget::Fig7,
            Target::Pss => ReproduceTarget::Pss,
            Target::Order => ReproduceTarget::Order,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured closed-loop experiment; emit trace CSV, SVG plots,
    /// and a text summary
    Simulate {
        /// Experiment configuration file
        #[arg(long)]
        config: PathBuf,
        /// Output directory for artifacts
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the configured step [s]
        #[arg(long)]
        step: Option<f64>,
        /// Override the configured horizon [s]
        #[arg(long)]
        horizon: Option<f64>,
        /// Negate the control before actuation (sensitivity runs)
        #[arg(long)]
        negate_u: bool,
    },
    /// Solve D^alpha x = lambda x and compare against the series reference
    SolveFde {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long)]
        x0: f64,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalue-argument stability test for D^alpha x = A x
    CheckStability {
        /// Matrix literal, e.g. "[[0,1],[-1,0]]"
        matrix: String,
        /// Commensurate order in (0, 1]
        alpha: f64,
    },
    /// Run a named bundled experiment and print per-criterion verdicts
    Reproduce {
        #[arg(value_enum)]
        target: Target,
        /// Output directory for artifacts (optional)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            config,
            out,
            step,
            horizon,
            negate_u,
        } => {
            let overrides = SimulateOverrides {
                step,
                horizon,
                negate_u,
            };
            match cmd_simulate(&config, &out, &overrides) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::SolveFde {
            alpha,
            lambda,
            x0,
            horizon,
            steps,
            out,
        } => match cmd_solve_fde(alpha, lambda, x0, horizon, steps, out.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Command::CheckStability { matrix, alpha } => {
            match cmd_check_stability(&matrix, alpha) {
                Ok(verdict) if verdict.stable => ExitCode::SUCCESS,
                Ok(_) => ExitCode::from(2),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Reproduce { target, out } => {
            match cmd_reproduce(target.into(), out.as_deref()) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => {
                    eprintln!("one or more criteria failed");
                    ExitCode::FAILURE
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
