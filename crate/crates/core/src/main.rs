use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fourier_distill::cli::{self, RunConfig, EXIT_IO, EXIT_PRECISION};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let report = match cli::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cli::exit_code(&e) as u8);
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let written = match &cfg.out {
        Some(path) => {
            std::fs::write(path, &report.text).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => std::io::stdout()
            .write_all(report.text.as_bytes())
            .map_err(|e| format!("stdout: {e}")),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_IO as u8);
    }
    if report.precision_warning {
        eprintln!("warning: truncated spectral mass is not negligible against the target error");
        if cfg.strict {
            return ExitCode::from(EXIT_PRECISION as u8);
        }
    }
    ExitCode::SUCCESS
}
