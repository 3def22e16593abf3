use std::process::ExitCode;

use clap::Parser;
use qpl_cli::{execute, write_output, Args, CliError, Limits};

fn run() -> Result<Option<String>, CliError> {
    let args = Args::parse();
    let limits = Limits::from_env()?;
    let cfg = args.resolve()?;
    let output = execute(&cfg, limits)?;
    write_output(&cfg, &output.text)?;
    Ok(output.failure)
}

fn main() -> ExitCode {
    match run() {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("qpl: check failed: {failure}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qpl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
