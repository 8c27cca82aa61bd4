//! Scenario runner for the Lindblad evolution-speed library.

mod config;
mod run;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Scenario;
use crate::run::Failure;

const OUTPUT_DIR_ENV: &str = "LINDBLAD_SPEED_OUTPUT_DIR";

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

#[derive(Parser)]
#[command(name = "lindblad-speed", version, about = "Evolution speed of open quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSV files.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory; overrides LINDBLAD_SPEED_OUTPUT_DIR and
        /// `output.dir`.
        #[arg(long, value_name = "DIR")]
        output_dir: Option<PathBuf>,
    },
    /// Check a scenario without running it and list every problem.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML).
    config: PathBuf,
    /// Override a key, e.g. `--set model.gamma=0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn load(args: &ScenarioArgs, output_dir: Option<PathBuf>) -> Result<Scenario, ExitCode> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", args.config.display());
        ExitCode::from(EXIT_CONFIG)
    })?;
    config::load(&text, &args.overrides, output_dir).map_err(|diags| {
        let name = args.config.display();
        for d in &diags {
            eprintln!("{name}: {d}");
        }
        eprintln!("{} problem{} found", diags.len(), if diags.len() == 1 { "" } else { "s" });
        ExitCode::from(EXIT_CONFIG)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { scenario } => match load(&scenario, None) {
            Ok(s) => {
                println!("valid ({} run{})", s.runs.len(), if s.runs.len() == 1 { "" } else { "s" });
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run { scenario, output_dir } => {
            let output_dir = output_dir.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from));
            let s = match load(&scenario, output_dir) {
                Ok(s) => s,
                Err(code) => return code,
            };
            match run::execute(&s) {
                Ok(report) => {
                    for f in &report.files {
                        println!("{}", f.display());
                    }
                    for v in &report.violations {
                        eprintln!("error: {v}");
                    }
                    if report.violations.is_empty() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_NUMERICAL)
                    }
                }
                Err(Failure::Numerical(msg)) => {
                    eprintln!("error: numerical failure: {msg}");
                    ExitCode::from(EXIT_NUMERICAL)
                }
                Err(Failure::Io(msg)) => {
                    eprintln!("error: cannot write output: {msg}");
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        }
    }
}
