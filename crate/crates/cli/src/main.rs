use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use wrflow_cli::args::{Cli, Command};
use wrflow_cli::ensemble::write_rows;
use wrflow_cli::{cmd_compare, cmd_ensemble, cmd_flow, cmd_short, emit_report, exit, CliError, Outcome};

fn finish(outcome: Outcome, out: Option<&std::path::Path>) -> Result<i32, CliError> {
    match out {
        Some(path) => emit_report(&outcome.report, path)?,
        None => print!("{}", outcome.report.to_text()),
    }
    for line in &outcome.diagnostics {
        eprintln!("wrflow: {line}");
    }
    Ok(outcome.exit_code)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Flow(a) => finish(cmd_flow(&a)?, a.out.as_deref()),
        Command::Compare(a) => finish(cmd_compare(&a)?, a.out.as_deref()),
        Command::Short(a) => finish(cmd_short(&a)?, a.out.as_deref()),
        Command::Ensemble(a) => {
            let rows = cmd_ensemble(&a)?;
            let written = match &a.out {
                Some(path) => {
                    let file = File::create(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                    write_rows(&rows, BufWriter::new(file))
                }
                None => write_rows(&rows, io::stdout().lock()),
            };
            written.map_err(|e| CliError::Validation(format!("writing rows: {e}")))?;
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INPUT as u8 } else { exit::OK as u8 });
        }
    };
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("wrflow: {e}");
        e.exit_code()
    });
    let _ = io::stdout().flush();
    ExitCode::from(code as u8)
}
