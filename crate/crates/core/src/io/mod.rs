//! Run configuration, reports and output files.
//!
//! A run is described by a JSON [`RunConfig`]; [`execute`] performs it and
//! [`emit_outputs`] writes `report.json`, `trace.csv` and `grid.csv`.
//! Outputs contain no timings, so equal configs give byte-identical files.

mod config;
mod report;
mod run;

pub use config::{parse_config, Command, ProbeConfig, RunConfig};
pub use report::*;
pub use run::{emit_outputs, execute, GridRow, RunOutput};

use crate::{Error, Result};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "HYPDISK_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    if threads == 0 {
        return Err(Error::Config(format!("{THREADS_ENV} must be positive")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}
