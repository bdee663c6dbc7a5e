//! Command-line driver: synthetic data, preprocessing, training,
//! prediction and threshold sweeps, configured by a flat key-value file.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod config;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl From<fuzzy_effort::Error> for CliError {
    fn from(e: fuzzy_effort::Error) -> Self {
        use fuzzy_effort::{Error, InductionError};
        match e {
            Error::Induction(InductionError::InvalidConfig(m)) => CliError::Config(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<fuzzy_effort::DatasetError> for CliError {
    fn from(e: fuzzy_effort::DatasetError) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "fuzzy-effort", version, about = "Fuzzy ID3 software effort estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

/// Flags override the matching config keys.
#[derive(Debug, Default, clap::Args)]
pub struct Flags {
    /// Flat `key = value` config file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output file.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Inference mode: `set` or `exemplar`.
    #[arg(long, global = true, value_name = "MODE")]
    pub mode: Option<String>,
    /// Fuzziness control threshold.
    #[arg(long, global = true, value_name = "X")]
    pub threshold: Option<f64>,
    /// Number of effort classes.
    #[arg(long, global = true, value_name = "K")]
    pub classes: Option<usize>,
    /// Input project CSV.
    #[arg(long, global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Model file written by `train`.
    #[arg(long, global = true, value_name = "PATH")]
    pub tree: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Generate a synthetic project CSV.
    Synth,
    /// Filter and impute a project CSV.
    Preprocess,
    /// Grow a tree on a project CSV and write the model file.
    Train,
    /// Estimate effort for every project in a CSV.
    Predict,
    /// Score one threshold and class count on a held-out split.
    Evaluate,
    /// Score every configured threshold and class count.
    Sweep,
}

impl Flags {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let set = |cfg: &mut RunConfig, key: &str, value: String| {
            cfg.set(key, &value).map_err(|e| CliError::Config(format!("--{e}")))
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = &self.mode {
            set(&mut cfg, "mode", v.clone())?;
        }
        if let Some(v) = self.threshold {
            cfg.growth.fuzziness_threshold = v;
        }
        if let Some(v) = self.classes {
            cfg.growth.effort_classes = v;
        }
        if let Some(v) = &self.input {
            cfg.input = Some(v.clone());
        }
        if let Some(v) = &self.tree {
            cfg.tree = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.flags.resolve()?;
    let mut stdout = std::io::stdout().lock();
    let out: &mut dyn std::io::Write = &mut stdout;
    match cli.command {
        Command::Synth => commands::synth(&cfg, out),
        Command::Preprocess => commands::preprocess(&cfg, out),
        Command::Train => commands::train(&cfg, out),
        Command::Predict => commands::predict(&cfg, out),
        Command::Evaluate => commands::evaluate(&cfg, out),
        Command::Sweep => commands::sweep(&cfg, out),
    }
}

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
