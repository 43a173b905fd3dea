use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use layerlab::experiments::{self, ExperimentKind};

#[derive(Parser)]
#[command(name = "layerlab", version, about = "Layer potentials for constant-coefficient elliptic operators in the plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the `output` key of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available experiments.
    List,
    /// Run the built-in acceptance suite.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for k in ExperimentKind::ALL {
                println!("{:<18} {}", k.name(), k.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, out } => {
            let report = experiments::load_config(&config).and_then(|cfg| experiments::run_to_dir(&cfg, out.as_deref()));
            match report {
                Ok(r) => {
                    print!("{}", r.summary());
                    if r.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Selftest { out } => {
            let outcomes = experiments::selftest(out.as_deref());
            for o in &outcomes {
                println!("{}", o.line());
            }
            if outcomes.iter().all(|o| o.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
