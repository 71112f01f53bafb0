//! `varcaputo`: evaluate variable-order Caputo derivatives, run convergence
//! studies and solve the fractional PDE examples. All output is CSV.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use varcaputo::pde::DEFAULT_T0;
use varcaputo::Kind;

use commands::{PdeConfig, PdeProblem, PointConfig};
use config::{default_tol, parse_kind, uniform_times, FunctionSpec, OrderSpec, SideArg};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "varcaputo",
    version,
    about = "Variable-order Caputo derivatives and fractional PDEs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Oracle, expansion, observed error and certified bound at given t
    Eval {
        #[command(flatten)]
        point: PointArgs,
        /// Truncation order N of the expansion
        #[arg(long = "N", default_value_t = 6)]
        big_n: usize,
    },
    /// Expansion error against the exact value for several N
    Convergence {
        #[command(flatten)]
        point: PointArgs,
        /// Truncation orders, one column pair each
        #[arg(long, value_delimiter = ',', default_value = "2,4,6")]
        ns: Vec<usize>,
    },
    /// Variable- against constant-order derivatives of t² and (1−t)², six panels
    Figures {
        #[arg(long, default_value = "fig1-alpha", allow_hyphen_values = true)]
        order: OrderSpec,
        #[command(flatten)]
        grid: TimeArgs,
        #[arg(long, default_value_t = default_tol())]
        tol: f64,
        /// Directory for one CSV per panel; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time-fractional diffusion with a manufactured solution t² sin 2πx
    PdeDiffusion(PdeArgs),
    /// Linear Burgers equation with exact solution x² + t²
    PdeBurgers(PdeArgs),
}

#[derive(Debug, Args)]
struct TimeArgs {
    /// Evaluation points (comma separated); overrides --points
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    /// Number of uniform points on [0, 1]
    #[arg(long, default_value_t = 101)]
    points: usize,
}

impl TimeArgs {
    fn times(&self) -> Result<Vec<f64>, CliError> {
        if self.t.is_empty() {
            uniform_times(self.points)
        } else {
            Ok(self.t.clone())
        }
    }
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Operator type: 1, 2 or 3
    #[arg(long, value_parser = parse_kind, default_value = "3")]
    kind: Kind,
    #[arg(long, value_enum, default_value = "left")]
    side: SideArg,
    /// paper-alpha, paper-beta, fig1-alpha, or `c1,c0` for α(t) = c1·t + c0
    #[arg(long, default_value = "paper-alpha", allow_hyphen_values = true)]
    order: OrderSpec,
    /// t2, one-minus-t2, power:<g> (t^g) or power-right:<g> ((1−t)^g)
    #[arg(long, default_value = "t2")]
    function: FunctionSpec,
    /// Number of integer-order derivatives kept in the expansion
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[command(flatten)]
    grid: TimeArgs,
    /// Absolute quadrature tolerance
    #[arg(long, default_value_t = default_tol())]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl PointArgs {
    fn config(&self) -> Result<PointConfig, CliError> {
        Ok(PointConfig {
            kind: self.kind,
            side: self.side.into(),
            order: self.order.clone(),
            function: self.function,
            n: self.n,
            tol: self.tol,
            times: self.grid.times()?,
        })
    }
}

#[derive(Debug, Args)]
struct PdeArgs {
    #[arg(long, default_value = "paper-alpha", allow_hyphen_values = true)]
    order: OrderSpec,
    /// Truncation order N of the expansion
    #[arg(long = "N", default_value_t = 6)]
    big_n: usize,
    /// Spatial intervals
    #[arg(long, default_value_t = 20)]
    mx: usize,
    /// Output time intervals on [t0, 1]
    #[arg(long, default_value_t = 200)]
    mt: usize,
    /// Start time
    #[arg(long, default_value_t = DEFAULT_T0)]
    t0: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl PdeArgs {
    fn config(&self) -> PdeConfig {
        PdeConfig {
            order: self.order.clone(),
            big_n: self.big_n,
            mx: self.mx,
            mt: self.mt,
            t0: self.t0,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval { point, big_n } => {
            commands::eval(&point.config()?, big_n)?.emit(point.out.as_deref())
        }
        Command::Convergence { point, ns } => {
            commands::convergence(&point.config()?, &ns)?.emit(point.out.as_deref())
        }
        Command::Figures {
            order,
            grid,
            tol,
            out,
        } => {
            let panels = commands::figures(&order, &grid.times()?, tol)?;
            for path in commands::emit_panels(&panels, out.as_deref())? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::PdeDiffusion(args) => {
            commands::pde(PdeProblem::Diffusion, &args.config())?.emit(args.out.as_deref())
        }
        Command::PdeBurgers(args) => {
            commands::pde(PdeProblem::Burgers, &args.config())?.emit(args.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on malformed arguments
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("varcaputo: {e}");
            e.exit_code()
        }
    }
}
