use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stimemit::outstate::Sector;
use stimemit_cli::output::{sink, write_amplitudes, write_lifetime, write_sweep};
use stimemit_cli::run::{run_amplitudes, run_lifetime, run_sweep, AmplitudeSpec};
use stimemit_cli::spec::{EmitterArg, Format, MethodArg, PulseArg, SweepSpec};
use stimemit_cli::verify::{run_verify_with, VerifyOptions};
use stimemit_cli::{configure_workers, CliError, Result};

/// Two-photon scattering statistics of an excited emitter in a waveguide.
#[derive(Parser)]
#[command(name = "stimemit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outcome probabilities over a log-spaced alpha grid.
    Sweep(SweepArgs),
    /// Integrated emitter excitation over a log-spaced alpha grid.
    Lifetime(SweepArgs),
    /// Two-photon out-state amplitudes on a grid.
    Amplitudes(AmplitudeArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "atom")]
    emitter: EmitterArg,
    #[arg(long, value_enum, default_value = "exponential")]
    pulse: PulseArg,
    /// Sample file for `--pulse custom`.
    #[arg(long)]
    pulse_file: Option<PathBuf>,
    /// A single alpha; overrides the grid flags.
    #[arg(long, conflicts_with_all = ["alpha_min", "alpha_max", "alpha_steps"])]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1e-2)]
    alpha_min: f64,
    #[arg(long, default_value_t = 1e2)]
    alpha_max: f64,
    #[arg(long, default_value_t = 201)]
    alpha_steps: usize,
    /// Fraction of the decay into the waveguide.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, value_enum, default_value = "analytic")]
    method: MethodArg,
    #[command(flatten)]
    output: OutputArgs,
    /// Oracle time step in units of 1/Gamma.
    #[arg(long)]
    dx: Option<f64>,
    /// Oracle simulation length in units of 1/Gamma.
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorArg {
    Ee,
    Eo,
}

#[derive(Args)]
struct AmplitudeArgs {
    #[arg(long, value_enum, default_value = "ee")]
    sector: SectorArg,
    #[arg(long, value_enum, default_value = "exponential")]
    pulse: PulseArg,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Half-width of the sampling window; defaults to 10 / min(1, alpha).
    #[arg(long)]
    extent: Option<f64>,
    /// Samples per axis.
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated criterion numbers to run.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<usize>>,
    /// Tolerance handed to the out-state quadrature.
    #[arg(long, default_value_t = 1e-8)]
    quadrature_tol: f64,
}

impl SweepArgs {
    fn into_spec(self) -> SweepSpec {
        let (alpha_min, alpha_max, alpha_steps) = match self.alpha {
            Some(a) => (a, a, 1),
            None => (self.alpha_min, self.alpha_max, self.alpha_steps),
        };
        SweepSpec {
            emitter: self.emitter,
            pulse: self.pulse,
            pulse_file: self.pulse_file,
            alpha_min,
            alpha_max,
            alpha_steps,
            beta: self.beta,
            method: self.method,
            out: self.output.out,
            format: self.output.format,
            dx: self.dx,
            horizon: self.horizon,
        }
    }
}

fn execute(command: Command) -> Result<()> {
    configure_workers()?;
    match command {
        Command::Sweep(args) => {
            let spec = args.into_spec();
            let rows = run_sweep(&spec)?;
            write_sweep(sink(spec.out.as_deref())?, &rows, spec.format)
        }
        Command::Lifetime(args) => {
            let spec = args.into_spec();
            let rows = run_lifetime(&spec)?;
            write_lifetime(sink(spec.out.as_deref())?, &rows, spec.format)
        }
        Command::Amplitudes(args) => {
            if args.points < 2 {
                return Err(CliError::InvalidSpec("--points must be at least 2".into()));
            }
            let spec = AmplitudeSpec {
                sector: match args.sector {
                    SectorArg::Ee => Sector::EE,
                    SectorArg::Eo => Sector::EO,
                },
                alpha: args.alpha,
                beta: args.beta,
                omega: 0.0,
                extent: args.extent,
                points: args.points,
            };
            let grid = run_amplitudes(&spec, args.pulse)?;
            write_amplitudes(sink(args.output.out.as_deref())?, &grid, args.output.format)
        }
        Command::Verify(args) => {
            if !(args.quadrature_tol > 0.0) {
                return Err(CliError::InvalidSpec("--quadrature-tol must be positive".into()));
            }
            let opts = VerifyOptions {
                only: args.only,
                quadrature_tol: args.quadrature_tol,
            };
            let report = run_verify_with(&opts, |o| println!("{o}"));
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::AcceptanceFailed(report.failed()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
