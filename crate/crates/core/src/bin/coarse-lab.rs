use std::process::ExitCode;

use clap::Parser;
use coarse_lab::cli::{exit_code, run, write_outputs, Cli};

fn main() -> ExitCode {
    if let Some(n) = std::env::var("COARSE_LAB_THREADS").ok().and_then(|v| v.parse().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = Cli::parse()
        .into_config()
        .and_then(|cfg| run(&cfg).and_then(|out| write_outputs(&cfg.common, &out).map(|()| out.status)));
    match result {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
