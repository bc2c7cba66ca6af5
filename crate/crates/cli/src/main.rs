use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sfwm_cli::config::{load_config, ExperimentConfig};
use sfwm_cli::emit::{emit, Format};
use sfwm_cli::{grid_points, run, Command, RunError};

/// Chirp, coherence and two-photon interference of four-wave-mixing photon
/// pairs in fiber.
#[derive(Parser)]
#[command(name = "sfwm", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment configuration; the bundled preset when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Grid points per detuning axis (overrides SFWM_GRID_N and the config).
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Both)]
    format: OutputFormat,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Pump chirp and pulse duration along the standard-fiber lengths.
    Chirp,
    /// Bunching of the filtered signal beam, optionally swept.
    G2,
    /// Pump chirp versus standard-fiber length.
    Fig2a,
    /// Bunching versus pump chirp, closed form against quadrature.
    Fig2b,
    /// Interference curves of every configured case, analytic and numerical.
    Fig4,
    /// Analytic interference curves only.
    HomScan,
    /// Writes the joint spectral amplitude to jsa.txt.
    JsaDump,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutputFormat {
    Csv,
    Svg,
    Both,
}

fn execute(cli: &Cli) -> Result<(), RunError> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::reference(),
    };
    let command = match cli.command {
        Cmd::Chirp => Command::Chirp,
        Cmd::G2 => Command::G2,
        Cmd::Fig2a => Command::Fig2a,
        Cmd::Fig2b => Command::Fig2b,
        Cmd::Fig4 => Command::Fig4,
        Cmd::HomScan => Command::HomScan,
        Cmd::JsaDump => Command::JsaDump,
    };
    let points = grid_points(cli.grid, &config)?;
    let report = run(command, &config, points)?;
    let format = match cli.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Svg => Format::Svg,
        OutputFormat::Both => Format::Both,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for path in emit(&report, format, &cli.out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors are validation errors; clap's own code 2 means numerical
    // failure here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
