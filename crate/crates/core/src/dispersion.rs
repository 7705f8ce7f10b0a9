//! z-wave-vectors of the four scattering channels and the inverse
//! energy ↔ wave-vector map, relativistic and nonrelativistic.
//!
//! Channel squared wave vectors, with E_ch = E ∓ Δ and V = 0 (left) or V_b (barrier):
//!
//! ```text
//! relativistic:     (ħc)²·k² = (E_ch − V)(E − V + 2m₀c²) − (ħc·kx)²
//! nonrelativistic:  (ħc)²·k² = (E_ch − V)·2m₀c²         − (ħc·kx)²
//! ```
//!
//! A negative k² is stored as +i·sqrt(−k²) so that e^{ikz} decays for z > 0.

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::{klein_guard, HBAR_C_SQ, REST_ENERGY, TWICE_REST_ENERGY};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Propagating,
    Evanescent,
}

impl WaveKind {
    pub fn of(k: Complex64) -> Self {
        if k.im == 0.0 {
            WaveKind::Propagating
        } else {
            WaveKind::Evanescent
        }
    }
}

/// The four channel wave vectors in cm⁻¹: `kz`, `kz_prime` on the free side
/// (effective spin up / down), `qz`, `qz_prime` inside the barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveVectorSet {
    pub kz: Complex64,
    pub kz_prime: Complex64,
    pub qz: Complex64,
    pub qz_prime: Complex64,
}

impl WaveVectorSet {
    pub fn kinds(&self) -> [WaveKind; 4] {
        self.as_array().map(WaveKind::of)
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.kz, self.kz_prime, self.qz, self.qz_prime]
    }
}

/// Maps a squared wave vector to its root on the decaying branch.
pub fn branch_root(k_sq: f64) -> Complex64 {
    if k_sq >= 0.0 {
        Complex64::new(k_sq.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-k_sq).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kinematics {
    Relativistic,
    Nonrelativistic,
}

fn channel_k_sq(kin: Kinematics, energy: f64, channel_energy: f64, potential: f64, kx: f64) -> f64 {
    let mass_factor = match kin {
        Kinematics::Relativistic => energy - potential + TWICE_REST_ENERGY,
        Kinematics::Nonrelativistic => TWICE_REST_ENERGY,
    };
    ((channel_energy - potential) * mass_factor) / HBAR_C_SQ - kx * kx
}

fn wave_vectors(kin: Kinematics, energy: f64, delta: f64, kx: f64, vb: f64) -> Result<WaveVectorSet> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidInput(format!("spin-orbit energy must be >= 0, got {delta}")));
    }
    klein_guard(energy, vb)?;
    let kz_sq = channel_k_sq(kin, energy, energy - delta, 0.0, kx);
    if kz_sq <= 0.0 {
        return Err(Error::EvanescentIncident { kz_sq });
    }
    Ok(WaveVectorSet {
        kz: branch_root(kz_sq),
        kz_prime: branch_root(channel_k_sq(kin, energy, energy + delta, 0.0, kx)),
        qz: branch_root(channel_k_sq(kin, energy, energy - delta, vb, kx)),
        qz_prime: branch_root(channel_k_sq(kin, energy, energy + delta, vb, kx)),
    })
}

/// Relativistic channel wave vectors at total kinetic energy `energy` (eV).
pub fn wave_vectors_rel(energy: f64, delta: f64, kx: f64, vb: f64) -> Result<WaveVectorSet> {
    wave_vectors(Kinematics::Relativistic, energy, delta, kx, vb)
}

/// Nonrelativistic (m = m₀) channel wave vectors.
pub fn wave_vectors_nonrel(energy: f64, delta: f64, kx: f64, vb: f64) -> Result<WaveVectorSet> {
    wave_vectors(Kinematics::Nonrelativistic, energy, delta, kx, vb)
}

/// Energy of the effective-spin-up state with wave vector (kx, kz): the
/// positive root of (E − Δ)(E + 2m₀c²) = (ħc)²(kx² + kz²).
pub fn energy_from_k_rel(kx: f64, kz: f64, delta: f64) -> f64 {
    let b = TWICE_REST_ENERGY - delta;
    let c = TWICE_REST_ENERGY * delta + HBAR_C_SQ * (kx * kx + kz * kz);
    // E = 2c / (b + sqrt(b² + 4c)) avoids cancellation for small E
    2.0 * c / (b + (b * b + 4.0 * c).sqrt())
}

/// Nonrelativistic counterpart: E = ħ²k²/2m₀ + Δ.
pub fn energy_from_k_nonrel(kx: f64, kz: f64, delta: f64) -> f64 {
    HBAR_C_SQ * (kx * kx + kz * kz) / TWICE_REST_ENERGY + delta
}

/// k′z² − kz² = 4m₀Δ/ħ² in cm⁻².
pub fn nonrel_channel_split(delta: f64) -> f64 {
    4.0 * REST_ENERGY * delta / HBAR_C_SQ
}

/// Angles with the barrier normal, in degrees, for the spin-conserving
/// (`kz`) and spin-flip (`kz_prime`) reflected beams.
pub fn reflection_angles(kx: f64, kz: Complex64, kz_prime: Complex64) -> Result<(f64, f64)> {
    let real_positive = |k: Complex64, name: &str| {
        if k.im == 0.0 && k.re > 0.0 {
            Ok(k.re)
        } else {
            Err(Error::NotPropagating(format!("{name} = {k}")))
        }
    };
    let kz = real_positive(kz, "kz")?;
    let kzp = real_positive(kz_prime, "kz'")?;
    // arccot(kz/kx) = arctan(kx/kz) for kz > 0
    Ok(((kx / kz).atan().to_degrees(), (kx / kzp).atan().to_degrees()))
}
