use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mwave_cli::cli::Cli;
use mwave_cli::{run, CliError, EXIT_TOLERANCE};

fn init_threads() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("MWAVE_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|_| CliError::Usage(format!("MWAVE_THREADS: `{raw}` is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("MWAVE_THREADS: {e}")))?;
    }
    Ok(())
}

fn main_inner() -> Result<bool, CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    init_threads()?;
    let cfg = cli.into_config()?;
    let output = cfg.path("output").map(|p| p.to_path_buf());
    let report = run(&cfg)?;
    let text = report.render(&cfg)?;
    match output {
        Some(path) => std::fs::write(&path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("mwave: tolerance check failed");
            ExitCode::from(EXIT_TOLERANCE as u8)
        }
        Err(e) => {
            eprintln!("mwave: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
