use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dualphase::GridSize;

use crate::config::{parse_size, Cutoff, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "dualphase",
    version,
    about = "Double-phase hologram encoding with SLM pixel crosstalk"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Settings shared by every command. Flags override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Plain-text `key = value` settings file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// SLM pixels per multiplex cell side.
    #[arg(long, global = true)]
    pub cell: Option<usize>,
    /// Crosstalk ratio (border area / cell area).
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Sub-pixels per SLM pixel side.
    #[arg(long, global = true)]
    pub upsample: Option<usize>,
    /// Iris radius in cycles per SLM pixel, or `auto`.
    #[arg(long, global = true)]
    pub cutoff: Option<Cutoff>,
    /// Blazed carrier period in pixels (0 disables it).
    #[arg(long, global = true)]
    pub blazed_period: Option<usize>,
    /// Number of β samples across [0, π].
    #[arg(long, global = true)]
    pub betas: Option<usize>,
    /// Seed for synthetic test images.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid size as WIDTHxHEIGHT.
    #[arg(long, global = true, value_parser = parse_size, value_name = "WxH")]
    pub size: Option<GridSize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    pub fn flags(&self) -> Settings {
        Settings {
            size: self.size,
            cell: self.cell,
            eta: self.eta,
            upsample: self.upsample,
            cutoff: self.cutoff,
            blazed_period: self.blazed_period,
            betas: self.betas,
            seed: self.seed,
            out: self.out.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the flat-amplitude β sweep and write it as CSV.
    Sweep,
    /// Fit the crosstalk ratio to a measured sweep CSV.
    Calibrate {
        /// CSV with columns beta_rad,irradiance_norm.
        #[arg(long, value_name = "CSV")]
        measured: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        search_min: f64,
        #[arg(long, default_value_t = dualphase::metrics::FIT_ETA_LIMIT)]
        search_max: f64,
    },
    /// Encode amplitude/phase images into an 8-bit phase bitmap.
    Encode {
        /// Amplitude PGM (white = A_max); uniform A_max if omitted.
        #[arg(long, value_name = "PGM")]
        amplitude: Option<PathBuf>,
        /// Phase PGM (black = −π, white = π); zero phase if omitted.
        #[arg(long, value_name = "PGM")]
        phase: Option<PathBuf>,
        /// Carve the double-period reference grating.
        #[arg(long)]
        m3: bool,
    },
    /// Encode, filter and retrieve a field by four-step phase shifting.
    Retrieve {
        #[arg(long, value_name = "PGM")]
        amplitude: Option<PathBuf>,
        #[arg(long, value_name = "PGM")]
        phase: Option<PathBuf>,
    },
    /// Reproduce one of the canned experiments.
    Repro {
        #[arg(value_enum)]
        figure: Figure,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Flat-amplitude sweeps for 1-, 4- and 10-pixel cells plus the ideal curve.
    Fig3,
    /// Amplitude-only image through 1-, 4- and 10-pixel cells.
    Fig4,
    /// Complex image retrieved with 1-, 2- and 5-pixel cells.
    Fig5,
}
