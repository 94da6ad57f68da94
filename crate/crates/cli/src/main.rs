//! `bornsim`: reproduces the model's figures as CSV/JSON data with gnuplot
//! scripts.
//!
//! Exit status is 0 on success, 2 for invalid flags or configuration, and 1
//! when a scenario fails.

mod commands;
mod config;
mod output;

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use commands::Failure;
use config::{Command, FileConfig, Flags, RunConfig};

#[derive(Parser)]
#[command(
    name = "bornsim",
    version,
    about = "Threshold-detection model figures as data"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.flags.config {
        Some(path) => match fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|t| FileConfig::from_json(&t))
        {
            Ok(f) => f,
            Err(e) => return usage_error(&format!("config {}: {e}", path.display())),
        },
        None => FileConfig::default(),
    };
    let cfg = match RunConfig::resolve(cli.command, cli.flags, file) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    let start = Instant::now();
    let out = match commands::run(&cfg) {
        Ok(o) => o,
        Err(Failure::Usage(e)) => return usage_error(&e),
        Err(Failure::Scenario(e)) => {
            eprintln!("error: {}: {e}", cfg.command.name());
            return ExitCode::from(1);
        }
    };
    match output::write_all(&cfg, &out, start.elapsed().as_secs_f64()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: writing to {}: {e}", cfg.out_dir.display());
            ExitCode::from(1)
        }
    }
}
