use std::process::ExitCode;

use bonnet_cli::{run, Cli, EXIT_USAGE};
use bonnet_core::exec;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("BONNET_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                exec::init_threads(n);
            }
            _ => {
                eprintln!("error: BONNET_THREADS must be a positive integer, got '{v}'");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
    }
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            for line in &outcome.stderr {
                eprintln!("{line}");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
