use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use proxstorm::harness::{cmd_run, cmd_sweep, cmd_verify, Overrides};

#[derive(Parser)]
#[command(name = "proxstorm", version, about = "Stochastic proximal trust-region experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment per seed and write traces and a report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use seeds 0..N instead of the configured list.
        #[arg(long)]
        seeds: Option<u64>,
    },
    /// Run the property suites.
    Verify {
        #[arg(long)]
        suite: Option<String>,
    },
    /// Measure T_eps across thresholds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.03,0.01")]
        eps: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seeds: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out, seeds } => cmd_run(&config, &Overrides { out, seeds }),
        Command::Verify { suite } => cmd_verify(suite.as_deref()),
        Command::Sweep { config, eps, out, seeds } => cmd_sweep(&config, &eps, &Overrides { out, seeds }),
    };
    ExitCode::from(code as u8)
}
