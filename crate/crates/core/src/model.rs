//! Input descriptions shared by the scattering and bound-state solvers.

use serde::{Deserialize, Serialize};

use crate::constants::klein_guard;
use crate::error::{Error, Result};

/// Effective-spin label of a state: `EffUp` is (1, 1)/√2 with energy E₀ + Δ,
/// `EffDown` is (1, −1)/√2 with energy E₀ − Δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinChannel {
    EffUp,
    EffDown,
}

/// Incoming electron. `ky` is zero by choice of axes and is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElectronState {
    pub energy: f64,
    pub kx: f64,
    pub spin_channel: SpinChannel,
}

impl ElectronState {
    pub fn new(energy: f64, kx: f64, spin_channel: SpinChannel) -> Result<Self> {
        if energy.is_nan() || energy <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "electron energy must be positive, got {energy} eV"
            )));
        }
        if !kx.is_finite() {
            return Err(Error::InvalidInput("kx must be finite".into()));
        }
        Ok(Self { energy, kx, spin_channel })
    }
}

/// Barrier of height `vb`; a vertical step when `slope_width` is `None`,
/// otherwise a linear ramp of that width centred on z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierSpec {
    pub vb: f64,
    pub slope_width: Option<f64>,
}

impl BarrierSpec {
    pub fn new(vb: f64, slope_width: Option<f64>) -> Result<Self> {
        if !vb.is_finite() || vb <= 0.0 {
            return Err(Error::InvalidInput(format!("barrier height must be positive, got {vb} eV")));
        }
        if let Some(a) = slope_width {
            if !a.is_finite() || a <= 0.0 {
                return Err(Error::InvalidInput(format!("slope width must be positive, got {a} cm")));
            }
        }
        Ok(Self { vb, slope_width })
    }

    pub fn check_energy(&self, energy: f64) -> Result<()> {
        klein_guard(energy, self.vb)
    }
}

/// Square well of width `width` centred on z = 0 with barrier offsets
/// `v_left` (z < −a/2) and `v_right` (z > a/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellSpec {
    pub width: f64,
    pub v_left: f64,
    pub v_right: f64,
}

impl WellSpec {
    pub fn new(width: f64, v_left: f64, v_right: f64) -> Result<Self> {
        for (name, v) in [("width", width), ("left offset", v_left), ("right offset", v_right)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidInput(format!("well {name} must be positive, got {v}")));
            }
        }
        Ok(Self { width, v_left, v_right })
    }

    pub fn is_asymmetric(&self) -> bool {
        self.v_left != self.v_right
    }

    pub fn lower_barrier(&self) -> f64 {
        self.v_left.min(self.v_right)
    }
}
