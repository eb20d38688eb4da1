//! `ostrowski`: evaluate, classify and reconstruct absolute values on Z and Q
//! from the command line.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = commands::run(&cli);
    let mut out = std::io::stdout().lock();
    match result {
        Ok(output) => {
            let _ = writeln!(out, "{}", output.text);
            ExitCode::from(if output.ok { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", args::usage());
            ExitCode::from(2)
        }
        Err(Failure::Error { text }) => {
            let _ = writeln!(out, "{text}");
            ExitCode::from(1)
        }
    }
}
