use std::process::ExitCode;

use clap::Parser;
use qldpc_bp_cli::{parse_spec, run, threads_from_env, Args, CliError};

fn real_main() -> Result<(), CliError> {
    let args = Args::parse();
    let spec = parse_spec(&args)?;
    if let Some(threads) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let summary = run(&spec)?;
    if let Some(report) = summary.threshold {
        match report.estimate {
            Some(est) => eprintln!("threshold ~ {:.4} (spread {:.4})", est.threshold, est.spread),
            None => eprintln!("threshold: {}", report.status),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
