//! Command-line driver: loads matrix sets, runs bounds, ensembles and
//! examples, and writes `{"meta", "report"}` JSON or CSV.

pub mod config;
pub mod error;
pub mod input;
pub mod output;
pub mod run;

use std::fs::File;
use std::io::BufWriter;
use std::time::Instant;

pub use config::{Cli, RunConfig};
pub use error::{CliError, Status};
pub use input::{load_matrix_set, parse_matrix_set};
pub use run::{execute, Emission};

/// Runs a validated configuration and writes its output.
pub fn run_and_emit(cfg: &RunConfig, argv: &[String]) -> error::Result<Status> {
    let start = Instant::now();
    let emission = with_threads(cfg.threads, || execute(cfg))??;
    let meta = output::meta(cfg, argv, start.elapsed().as_millis());
    match &cfg.out {
        Some(path) => output::emit(cfg, &emission, meta, BufWriter::new(File::create(path)?))?,
        None => output::emit(cfg, &emission, meta, std::io::stdout().lock())?,
    }
    Ok(emission.status)
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> error::Result<T> {
    if threads <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {threads} threads: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(_threads: usize, f: impl FnOnce() -> T + Send) -> error::Result<T> {
    Ok(f())
}
