//! `qlab` command-line front end.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod files;
pub mod report;

use commands::{Transform, WernerMode};
use error::{CliError, CliResult};
use report::Format;

#[derive(Debug, Parser)]
#[command(name = "qlab", version, about = "Analyze density operators, experimental arrangements and powers graphs")]
pub struct Cli {
    /// Overrides every tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for sampling commands
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with a [tolerances] table
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Purity, entropy, spectrum, intensities and separability of a state
    Analyze { file: PathBuf },
    /// Change one screen's detectors or refactor the screens
    Transform {
        file: PathBuf,
        /// Screen index (0-based)
        #[arg(long, requires = "basis", conflicts_with = "refactor")]
        screen: Option<usize>,
        /// computational, hadamard or fourier
        #[arg(long, requires = "screen")]
        basis: Option<String>,
        /// New screen sizes, e.g. 2,3
        #[arg(long, value_delimiter = ',', required_unless_present = "screen")]
        refactor: Option<Vec<usize>>,
        /// Where to write the transformed state file
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
    /// Commutation graph, Born valuation and its axioms
    Powers {
        file: PathBuf,
        projectors: PathBuf,
        /// Replace a node's potentia, LABEL=VALUE
        #[arg(long = "override", value_name = "LABEL=VALUE")]
        overrides: Vec<String>,
    },
    /// Classify Werner states p|φ₊⟩⟨φ₊| + (1−p)I/4
    Werner {
        #[arg(long, conflicts_with = "scan", required_unless_present = "scan")]
        p: Option<f64>,
        /// FROM,TO,STEPS
        #[arg(long)]
        scan: Option<String>,
    },
    /// Entanglement witness from the partial transpose
    Witness {
        file: PathBuf,
        /// Random product states used to check the witness
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// CHSH analysis of a two-qubit state
    Bell { file: PathBuf },
    /// Measure one screen and leave the others untouched
    Instrument {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        party: usize,
        #[arg(long, default_value = "computational")]
        basis: String,
    },
}

fn write(path: &std::path::Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

/// Runs one command and returns the rendered report; files named by
/// `--out` and `--state-out` are written here.
pub fn run(cli: Cli) -> CliResult<String> {
    let tol = config::resolve(cli.config.as_deref(), cli.tol)?;
    let report = match &cli.command {
        Command::Analyze { file } => commands::analyze(file, &tol)?,
        Command::Transform {
            file,
            screen,
            basis,
            refactor,
            state_out,
        } => {
            let t = match (screen, basis, refactor) {
                (Some(s), Some(b), None) => Transform::Detectors { screen: *s, basis: b.clone() },
                (None, None, Some(dims)) => Transform::Refactor(dims.clone()),
                _ => return Err(CliError::parse("give either --screen with --basis, or --refactor")),
            };
            let outcome = commands::transform(file, &t, &tol)?;
            if let Some(path) = state_out {
                write(path, &outcome.state)?;
            }
            outcome.report
        }
        Command::Powers {
            file,
            projectors,
            overrides,
        } => commands::powers(file, projectors, overrides, &tol)?,
        Command::Werner { p, scan } => {
            let mode = match (p, scan) {
                (Some(p), None) => WernerMode::Single(*p),
                (None, Some(s)) => commands::parse_scan(s)?,
                _ => return Err(CliError::parse("give either --p or --scan")),
            };
            commands::werner(mode, &tol)?
        }
        Command::Witness { file, samples } => commands::witness(file, *samples, cli.seed, &tol)?,
        Command::Bell { file } => commands::bell(file, &tol)?,
        Command::Instrument { file, party, basis } => commands::instrument(file, *party, basis, &tol)?,
    };
    let text = report.render(cli.format);
    if let Some(path) = &cli.out {
        write(path, &text)?;
        return Ok(String::new());
    }
    Ok(text)
}
