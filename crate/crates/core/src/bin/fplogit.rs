use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fplogit::cli::{run_fit, run_monthly, validate_config};

#[derive(Parser)]
#[command(name = "fplogit", version, about = "Functional principal component logit regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model described by a JSON config and write report files.
    Fit { config: PathBuf },
    /// Convert a daily curve CSV (365 columns) into monthly means.
    Monthly { input: PathBuf, output: PathBuf },
    /// Check a config file without fitting.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit { config } => run_fit(&config).map(|out| {
            println!("{}", out.summary);
            println!("report written to {}", out.report_path.display());
        }),
        Command::Monthly { input, output } => run_monthly(&input, &output),
        Command::Validate { config } => validate_config(&config).map(|_| println!("{}: ok", config.display())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
