//! Command-line driver: argument parsing, configuration and data export.

pub mod commands;
pub mod config;
pub mod format;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Result;
use crate::greens::StateTag;
use crate::spectral::SpectralSource;
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "hubbard-gf",
    version,
    about = "Exact and UCC Green's functions of a small Hubbard ring"
)]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Series file format: csv | json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Time window of the propagation.
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    /// Time step.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Lorentzian broadening.
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Channel labels such as k1_up, r0-2_dn or local (repeatable, comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub channel: Vec<String>,
    /// Parameter override, e.g. u=0 or theta3=0.1 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print parameters, band energies and sector dimensions.
    Info,
    /// Diagonalize the ground sector and report the named amplitudes.
    Groundstate,
    /// Prepare the UCC state and compare it with the exact ground state.
    Ucc,
    /// Time-domain retarded Green's functions.
    Greens {
        #[arg(long, default_value = "exact")]
        state: String,
    },
    /// Frequency-domain Green's functions.
    Spectral {
        /// transformed | lehmann | noninteracting
        #[arg(long, default_value = "lehmann")]
        source: String,
        /// State for the transformed source: exact | ucc.
        #[arg(long, default_value = "exact")]
        state: String,
    },
    /// Dyson self-energy of the momentum channels.
    Selfenergy {
        /// lehmann | transformed
        #[arg(long, default_value = "lehmann")]
        source: String,
        #[arg(long, default_value = "exact")]
        state: String,
    },
    /// Difference metrics between two series files.
    Compare { a: PathBuf, b: PathBuf },
}

impl Cli {
    /// Config file (or defaults) with the command-line overrides applied.
    pub fn resolve_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        for s in &self.set {
            cfg.set(s)?;
        }
        if let Some(v) = self.tmax {
            cfg.grid.t_max = v;
        }
        if let Some(v) = self.dt {
            cfg.grid.dt = v;
        }
        if let Some(v) = self.eta {
            cfg.spectral.eta = v;
        }
        if !self.channel.is_empty() {
            cfg.channels = self.channel.clone();
        }
        if let Some(dir) = &self.out {
            cfg.output.dir = dir.clone();
        }
        if let Some(f) = &self.format {
            cfg.output.format = f.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    if let Command::Compare { a, b } = &cli.command {
        return commands::cmd_compare(a, b, out).map(|_| ());
    }
    let cfg = cli.resolve_config()?;
    match &cli.command {
        Command::Info => commands::cmd_info(&cfg, out),
        Command::Groundstate => commands::cmd_groundstate(&cfg, out).map(|_| ()),
        Command::Ucc => commands::cmd_ucc(&cfg, out).map(|_| ()),
        Command::Greens { state } => commands::cmd_greens(&cfg, state.parse()?, out).map(|_| ()),
        Command::Spectral { source, state } => {
            let source: SpectralSource = source.parse()?;
            let tag: StateTag = state.parse()?;
            commands::cmd_spectral(&cfg, source, tag, out).map(|_| ())
        }
        Command::Selfenergy { source, state } => {
            let source: SpectralSource = source.parse()?;
            let tag: StateTag = state.parse()?;
            commands::cmd_selfenergy(&cfg, source, tag, out).map(|_| ())
        }
        Command::Compare { .. } => unreachable!("handled above"),
    }
}
