//! Configuration, experiment runs and file output for the `sfwm` binary.
//!
//! ```no_run
//! use sfwm_cli::config::ExperimentConfig;
//! use sfwm_cli::emit::{emit, Format};
//! use sfwm_cli::{run, Command};
//!
//! let config = ExperimentConfig::reference();
//! let report = run(Command::Fig2b, &config, 256)?;
//! emit(&report, Format::Both, std::path::Path::new("out"))?;
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod config;
pub mod emit;
pub mod experiments;
pub mod report;

use config::{ConfigError, ExperimentConfig};
use report::RunReport;
use sfwm_core::spectral::DEFAULT_GRID_POINTS;

/// Overrides the grid resolution unless `--grid` is given.
pub const GRID_ENV: &str = "SFWM_GRID_N";

const MIN_GRID_POINTS: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] sfwm_core::Error),
    #[error("{name}: {message}")]
    Invalid { name: String, message: String },
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 1 for bad input, 2 for a numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Model(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Chirp,
    G2,
    Fig2a,
    Fig2b,
    Fig4,
    HomScan,
    JsaDump,
}

/// Grid points per axis: `flag`, else `SFWM_GRID_N`, else `[grid] points`,
/// else the library default.
pub fn grid_points(flag: Option<usize>, config: &ExperimentConfig) -> Result<usize, RunError> {
    let from_env = match std::env::var(GRID_ENV) {
        Ok(text) => Some(text.trim().parse::<usize>().map_err(|e| RunError::Invalid {
            name: GRID_ENV.into(),
            message: format!("'{text}' is not a point count: {e}"),
        })?),
        Err(_) => None,
    };
    let points = flag.or(from_env).or(config.grid.points).unwrap_or(DEFAULT_GRID_POINTS);
    if points < MIN_GRID_POINTS {
        return Err(RunError::Invalid {
            name: "grid".into(),
            message: format!("need at least {MIN_GRID_POINTS} points, got {points}"),
        });
    }
    Ok(points)
}

pub fn run(command: Command, config: &ExperimentConfig, points: usize) -> Result<RunReport, RunError> {
    use experiments::*;
    match command {
        Command::Chirp => run_chirp(config),
        Command::G2 => run_g2(config, points),
        Command::Fig2a => run_fig2a(config, &config.smf.lengths_km),
        Command::Fig2b => {
            let chirps = Setup::new(config)?.fig2_chirps();
            run_fig2b(config, &chirps, points)
        }
        Command::Fig4 => run_fig4(config, points),
        Command::HomScan => run_hom_scan(config),
        Command::JsaDump => run_jsa_dump(config, points),
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
struct Guide;
