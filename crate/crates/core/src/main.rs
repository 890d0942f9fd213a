use clap::Parser;
use lumer_core::cli::{run, Cli};
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("lumer: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.text),
        None => std::io::stdout().lock().write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("lumer: {e}");
        return ExitCode::from(2);
    }
    if outcome.failed {
        eprintln!("lumer: a theorem-backed bound failed its tolerance");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
