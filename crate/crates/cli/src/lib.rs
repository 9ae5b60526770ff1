//! Library side of the `spt-sim` binary: argument handling, validation,
//! command dispatch and artifact output.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::time::Instant;

use clap::Parser;

use config::{has_errors, validate, RunConfig};
use output::{write_atomic, write_manifest, Manifest, MANIFEST_VERSION};

pub const EXIT_OK: i32 = 0;
/// Invalid input, unreadable config or unwritable output.
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

/// Worker-pool bound read at start-up.
pub const THREADS_ENV: &str = "SPT_SIM_THREADS";

fn configure_threads() -> Result<usize, String> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(rayon::current_num_threads())
}

fn load_config(cli: &args::Cli) -> Result<RunConfig, String> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RunConfig::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    config.merge(&cli.to_config());
    Ok(config)
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let threads = match configure_threads() {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let diagnostics = validate(&config);
    for d in &diagnostics {
        eprintln!("{d}");
    }
    if has_errors(&diagnostics) {
        return EXIT_INVALID;
    }
    if cli.validate_only {
        return EXIT_OK;
    }
    let resolved = config.resolved();
    let artifact = match commands::execute(&resolved) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_numeric() { EXIT_NUMERIC } else { EXIT_INVALID };
        }
    };
    let Some(path) = &resolved.output else {
        return match std::io::stdout().write_all(artifact.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: writing stdout: {e}");
                EXIT_INVALID
            }
        };
    };
    let manifest = Manifest {
        manifest_version: MANIFEST_VERSION,
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: &resolved,
        artifact: path.clone(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        threads,
    };
    let written = write_atomic(path, artifact.as_bytes()).and_then(|()| write_manifest(path, &manifest));
    match written {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: writing {}: {e}", path.display());
            EXIT_INVALID
        }
    }
}
