use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use maxcomplex_cli::args::Cli;
use maxcomplex_cli::cache::Cache;
use maxcomplex_cli::commands::run;
use maxcomplex_cli::exit::{exit_code, OK, USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out, Cache::from_env());
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
