mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::{CliError, EXIT_USAGE};

fn run(cli: &Cli) -> Result<i32, CliError> {
    let outcome = match &cli.command {
        Command::Integrate(a) => commands::integrate(a)?,
        Command::Hardy(a) => commands::hardy(a)?,
        Command::Reproduce(a) => commands::reproduce_cmd(a)?,
        Command::Fuzz(a) => commands::fuzz(a)?,
        Command::Refine(a) => commands::refine(a)?,
    };
    let rendered = output::render(&outcome.report, outcome.config, cli.format)?;
    match &cli.output {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a panic
            let _ = stdout.write_all(rendered.as_bytes());
        }
    }
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
