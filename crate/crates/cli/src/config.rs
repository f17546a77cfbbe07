//! Flags and the optional TOML config they override.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::Failure;

#[derive(Parser, Debug)]
#[command(name = "snewton", version, about = "Stationary states and linear stability of the Schrödinger-Newton equations")]
pub struct Cli {
    /// TOML file with `key = value` defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory holding cached states and reports.
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute states 0..=n-max, write spectrum.csv and loglog.csv.
    States(StatesArgs),
    /// Perturbation spectrum of one state.
    Stability(StabilityArgs),
    /// Track one eigenvalue while varying N or L.
    Sweep(SweepArgs),
    /// Compare max Re λ with the growth bound, from cached stability reports.
    Bounds(BoundsArgs),
    /// Convert a nondimensional time to seconds.
    Convert(ConvertArgs),
}

#[derive(Args, Debug)]
pub struct StatesArgs {
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
}

#[derive(Args, Debug)]
pub struct StabilityArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Chebyshev degree.
    #[arg(long = "N")]
    pub nodes: Option<usize>,
    /// Domain length; defaults to a state-dependent value.
    #[arg(long = "L")]
    pub length: Option<f64>,
    /// full, reduced or both.
    #[arg(long)]
    pub solver: Option<String>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Swept parameter, N or L.
    #[arg(long)]
    pub param: Option<String>,
    /// Comma-separated parameter values (at least 3).
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    /// Degree held fixed in an L sweep.
    #[arg(long = "N")]
    pub nodes: Option<usize>,
    /// Length held fixed in an N sweep.
    #[arg(long = "L")]
    pub length: Option<f64>,
    /// k for the k-th imaginary pair, or max-real.
    #[arg(long)]
    pub track: Option<String>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    #[arg(long = "G")]
    pub g: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Nondimensional time.
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    #[serde(rename = "N")]
    pub nodes: Option<usize>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub solver: Option<String>,
    pub param: Option<String>,
    pub values: Option<Vec<f64>>,
    pub track: Option<String>,
    #[serde(rename = "G")]
    pub g: Option<f64>,
    pub m: Option<f64>,
    pub hbar: Option<f64>,
    pub t: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
    }
}
