use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use heatrobin::commands;
use heatrobin::CliError;
use heatrobin_core::RobinKind;

#[derive(Parser)]
#[command(name = "heatrobin", version, about = "Semi-analytic heat equation solver with Robin boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write the solution grid and report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve, then check residuals and the finite-difference comparison.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Where the report is written.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Tabulate eigenvalues of the Robin problem.
    Eigen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        l: f64,
        #[arg(short = 'n', default_value_t = 10)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Nr,
    Dr,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { config, out } => commands::solve(&config, &out),
        Command::Verify { config, out } => commands::verify(&config, &out),
        Command::Eigen { kind, k, nu, l, n } => {
            let kind = match kind {
                KindArg::Nr => RobinKind::NeumannRobin,
                KindArg::Dr => RobinKind::DirichletRobin,
            };
            commands::eigen(kind, k, nu, l, n)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("heatrobin: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
