//! Command-line front end: TOML run documents in, CSV tables out.

mod commands;
mod document;
mod error;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use document::RunDocument;
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;
use tubescatter::optics::ModeKind;
use tubescatter::scenarios::CascadeKind;

#[derive(Parser)]
#[command(
    name = "tubescatter",
    version,
    about = "Scattered-light statistics for bound molecule complexes in parallel 1D tubes",
    long_about = "Computes the photon rate scattered into the diffraction minimum by \
                  ensembles of bound complexes in parallel 1D tubes, in closed form and \
                  by seeded Monte Carlo. Photon rates are reported in units of the \
                  squared coupling prefactor |C|^2; add a [coupling] section to a run \
                  document for an absolute column."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form intensity table for the ensemble in a run document
    Intensity {
        /// Run document (TOML)
        document: PathBuf,
        /// Write CSV here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
        /// Significant digits (default 12)
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Plateau scan over a dissociation cascade, optionally Monte Carlo sampled
    Scan {
        /// Run document (TOML)
        document: PathBuf,
        /// Points per stage segment, at least 2 (endpoints land on the stages)
        #[arg(long)]
        points_per_stage: Option<usize>,
        /// Monte Carlo sample budget; adds mc columns even without [montecarlo]
        #[arg(long)]
        samples: Option<u64>,
        /// Monte Carlo master seed (overrides document and TUBESCATTER_SEED)
        #[arg(long)]
        seed: Option<u64>,
        /// Write CSV here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
        /// Significant digits (default 12)
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Tube spacings that put the detector at a diffraction minimum
    #[command(long_about = "Solves for spacing/wavelength ratios that cancel the mean \
                            amplitude of two tubes with population ratio alpha, with tube A \
                            held at a probe antinode. Principal solutions in [0, 1) are \
                            reported; add whole wavelengths for larger spacings.")]
    Minimum {
        /// Population ratio mean_A/mean_B, as a decimal or `p/q`
        #[arg(long)]
        alpha: String,
        /// Probe mode
        #[arg(long, value_enum)]
        probe: ProbeArg,
        /// Write CSV here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Angular intensity pattern for the ensemble in a run document
    Pattern {
        /// Run document (TOML)
        document: PathBuf,
        /// Write CSV here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
        /// Significant digits (default 12)
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Print a built-in cascade as an editable run document
    ExportCascade {
        /// Built-in cascade
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Mean number of initial complexes in the beam
        #[arg(long)]
        n: f64,
        /// Write TOML here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProbeArg {
    Standing,
    Traveling,
}

impl From<ProbeArg> for ModeKind {
    fn from(p: ProbeArg) -> Self {
        match p {
            ProbeArg::Standing => ModeKind::StandingWave,
            ProbeArg::Traveling => ModeKind::TravelingWave,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Dimer11,
    Trimer12,
    Tetramer13,
    Tetramer22,
}

impl From<KindArg> for CascadeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Dimer11 => CascadeKind::Dimer11,
            KindArg::Trimer12 => CascadeKind::Trimer12,
            KindArg::Tetramer13 => CascadeKind::Tetramer13,
            KindArg::Tetramer22 => CascadeKind::Tetramer22,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Intensity {
            document,
            output,
            precision,
        } => {
            let doc = RunDocument::load(&document)?;
            commands::cmd_intensity(&doc, output, precision)
        }
        Command::Scan {
            document,
            points_per_stage,
            samples,
            seed,
            output,
            precision,
        } => {
            let doc = RunDocument::load(&document)?;
            commands::cmd_scan(&doc, points_per_stage, samples, seed, output, precision)
        }
        Command::Minimum {
            alpha,
            probe,
            output,
        } => commands::cmd_minimum(&alpha, probe.into(), output),
        Command::Pattern {
            document,
            output,
            precision,
        } => {
            let doc = RunDocument::load(&document)?;
            commands::cmd_pattern(&doc, output, precision)
        }
        Command::ExportCascade { kind, n, output } => {
            commands::cmd_export_cascade(kind.into(), n, output)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
