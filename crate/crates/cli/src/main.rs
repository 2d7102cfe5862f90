//! `excursion`: command-line front end for excursion-core.
//!
//! Exit codes: 0 ok, 1 acceptance failed, 2 configuration error,
//! 3 censor budget exceeded, 4 synthesis failure.

mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use commands::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

/// Applies `EXCURSION_THREADS` as a cap on the worker pool.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("EXCURSION_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("EXCURSION_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("EXCURSION_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}
