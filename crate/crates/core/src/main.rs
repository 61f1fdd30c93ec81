use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use hankel_wavelet::cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let outcome = run(&config, &mut lock);
    let _ = lock.flush();
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hankel-wavelet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
