use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use turnpoint_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => {
            let _ = lock.flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
