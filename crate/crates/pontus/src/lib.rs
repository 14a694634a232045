//! Command-line front end for `pontus-core`: config files, CSV/JSON output
//! and parallel sweeps.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
//! failures.

use std::path::PathBuf;

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

use cli::{Cli, Command};
use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] pontus_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_configuration() => 3,
            _ => 2,
        }
    }
}

/// Resolves the config (file, then flags), runs the command and writes
/// its outputs.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = file.merge(cli.command.flag_config());
    log::debug!("running {} with\n{}", cli.command.name(), cfg.to_toml());
    let artifacts = match &cli.command {
        Command::Spectrum(_) => commands::spectrum(&cfg)?,
        Command::Simulate(_) => commands::simulate(&cfg)?,
        Command::Compare(_) => commands::compare(&cfg)?,
        Command::PhaseDiagram(_) => commands::phase_diagram(&cfg)?,
    };
    for a in &artifacts {
        output::emit(a.path.as_deref(), &a.contents)?;
    }
    Ok(())
}
