//! Command-line front end of `stimemit`: sweeps, lifetime curves,
//! amplitude dumps and the acceptance suite.

pub mod error;
pub mod output;
pub mod pulse_file;
pub mod run;
pub mod spec;
pub mod verify;

pub use error::{CliError, Result};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "STIMEMIT_WORKERS";

/// Sizes the global worker pool from [`WORKERS_ENV`]; unset means one
/// worker per available core.
pub fn configure_workers() -> Result<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::InvalidSpec(format!("{WORKERS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::InvalidSpec(format!("cannot size the worker pool: {e}")))
}
