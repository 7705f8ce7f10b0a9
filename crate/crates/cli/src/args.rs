use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Spin-flip reflection from a barrier and spin-orbit splitting in an
/// asymmetric well. Energies in eV, lengths in cm, wave vectors in cm⁻¹;
/// every number accepts scientific notation (e.g. 5e9).
#[derive(Debug, Parser)]
#[command(name = "spinflip", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,

    /// JSON file whose keys match the long flag names; flags given on the
    /// command line override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Common {
    /// Output format [default: table, csv for sweep and verify]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write results here instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wave vectors, angles, amplitudes and fluxes at a vertical step
    Reflect(ReflectArgs),
    /// Ground state and spin-orbit splitting of an asymmetric well
    Well(WellCmd),
    /// Evaluate reflect or well over a uniform grid of one parameter
    Sweep(SweepArgs),
    /// Compare the step amplitudes with direct integration over sloped barriers
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReflectArgs {
    /// Total kinetic energy E (eV); give this or --kz
    #[arg(long, allow_hyphen_values = true)]
    pub energy_ev: Option<f64>,
    /// Incident normal wave vector (cm⁻¹); E is derived from it
    #[arg(long, allow_hyphen_values = true)]
    pub kz: Option<f64>,
    /// Wave vector along the barrier (cm⁻¹)
    #[arg(long, allow_hyphen_values = true)]
    pub kx: Option<f64>,
    /// Barrier height (eV)
    #[arg(long, allow_hyphen_values = true)]
    pub vb: Option<f64>,
    /// Spin-orbit energy Δ (eV); wins over --slope-width
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Slope width a (cm) used to derive Δ from |kx|, vb and a
    #[arg(long, allow_hyphen_values = true)]
    pub slope_width: Option<f64>,
    /// Use m = m₀ kinematics and matching
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub nonrelativistic: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WellArgs {
    /// Well width a (cm)
    #[arg(long, allow_hyphen_values = true)]
    pub width: Option<f64>,
    /// Left barrier offset (eV)
    #[arg(long, allow_hyphen_values = true)]
    pub vl: Option<f64>,
    /// Right barrier offset (eV)
    #[arg(long, allow_hyphen_values = true)]
    pub vr: Option<f64>,
    /// In-plane wave vector k⊥ (cm⁻¹)
    #[arg(long, allow_hyphen_values = true)]
    pub kperp: Option<f64>,
    /// Runge–Kutta steps across the well (even)
    #[arg(long)]
    pub rk_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WellCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub well: WellArgs,
    /// Also write Ψ(z) as two-column text to this file
    #[arg(long, value_name = "FILE")]
    pub wavefunction: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    Kx,
    Kz,
    EnergyEv,
    Vb,
    Delta,
    Kperp,
    Width,
    Vl,
    Vr,
}

impl SweepParam {
    pub fn is_well(self) -> bool {
        matches!(self, Self::Kperp | Self::Width | Self::Vl | Self::Vr)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    /// Parameter to vary; well parameters sweep the well, others the reflection
    #[arg(long, value_enum)]
    pub param: Option<SweepParam>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Grid points including both ends (≥ 2)
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub reflect: ReflectArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub well: WellArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub reflect: ReflectArgs,
    /// Decreasing slope widths (cm), comma separated [default: 1e-9,1e-10,1e-11,1e-12]
    #[arg(long, value_delimiter = ',')]
    pub widths: Option<Vec<f64>>,
    /// Largest deviation allowed at the narrowest width
    #[arg(long)]
    pub tolerance: Option<f64>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

pub fn load_config(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let value: Value =
        serde_json::from_str(&text).with_context(|| format!("config {} is not valid JSON", path.display()))?;
    anyhow::ensure!(value.is_object(), "config {} must hold a JSON object", path.display());
    Ok(value)
}

/// Overlays the flags given on the command line onto the config values.
/// Keys the target type does not know are ignored, so one file can serve
/// several commands.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Value>) -> Result<T> {
    let Some(Value::Object(base)) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let mut merged = base.clone();
    if let Value::Object(given) = serde_json::to_value(flags)? {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).context("config values have the wrong type")
}
