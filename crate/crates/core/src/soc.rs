//! Spin-orbit energy of a sloped barrier and the effective-spin basis.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::constants::{HBAR_C_SQ, REST_ENERGY};
use crate::error::{Error, Result};

/// Linear ramp from 0 to `vb` over `width`, centred on z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopedBarrier {
    pub vb: f64,
    pub width: f64,
}

impl SlopedBarrier {
    pub fn new(vb: f64, width: f64) -> Result<Self> {
        if !vb.is_finite() || vb <= 0.0 {
            return Err(Error::InvalidInput(format!("barrier height must be positive, got {vb} eV")));
        }
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::InvalidInput(format!("slope width must be positive, got {width} cm")));
        }
        Ok(Self { vb, width })
    }

    /// ∂V/∂z in eV/cm.
    pub fn field_strength(&self) -> f64 {
        self.vb / self.width
    }

    pub fn potential(&self, z: f64) -> f64 {
        let half = 0.5 * self.width;
        if z <= -half {
            0.0
        } else if z >= half {
            self.vb
        } else {
            self.vb * (z + half) / self.width
        }
    }

    pub fn spin_orbit_energy(&self, kx: f64) -> f64 {
        barrier_soe(kx, self.vb, self.width)
    }
}

/// Δ = ħ²/(4m₀²c²)·kx·V_b/a, the spin-orbit matrix element over the ramp
/// taken without the z-overlap reduction.
pub fn barrier_soe(kx: f64, vb: f64, a: f64) -> f64 {
    debug_assert!(a > 0.0);
    HBAR_C_SQ / (4.0 * REST_ENERGY * REST_ENERGY) * kx * (vb / a)
}

/// Two-component spinor (upper = spin up along z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spinor {
    pub upper: Complex64,
    pub lower: Complex64,
}

impl Spinor {
    pub const fn new(upper: Complex64, lower: Complex64) -> Self {
        Self { upper, lower }
    }

    pub fn real(upper: f64, lower: f64) -> Self {
        Self::new(Complex64::new(upper, 0.0), Complex64::new(lower, 0.0))
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.upper.conj() * other.upper + self.lower.conj() * other.lower
    }

    pub fn norm_sqr(&self) -> f64 {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }

    pub fn sigma_x(&self) -> Spinor {
        Spinor::new(self.lower, self.upper)
    }

    pub fn scale(&self, s: Complex64) -> Spinor {
        Spinor::new(self.upper * s, self.lower * s)
    }

    pub fn add(&self, other: &Spinor) -> Spinor {
        Spinor::new(self.upper + other.upper, self.lower + other.lower)
    }
}

/// A normalized state a·Φ↑ + b·Φ↓ and its projection onto the effective spins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinorBasis {
    pub a: Complex64,
    pub b: Complex64,
}

impl SpinorBasis {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::InvalidInput("mixing coefficients must not both vanish".into()));
        }
        Ok(Self { a: a / n, b: b / n })
    }

    pub fn spinor(&self) -> Spinor {
        Spinor::new(self.a, self.b)
    }

    /// Amplitudes along (Φ¹, Φ²).
    pub fn effective_components(&self) -> (Complex64, Complex64) {
        let (up, down) = effective_spin_states();
        let s = self.spinor();
        (up.inner(&s), down.inner(&s))
    }
}

/// Φ¹ = (1, 1)/√2 and Φ² = (1, −1)/√2.
pub fn effective_spin_states() -> (Spinor, Spinor) {
    (
        Spinor::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        Spinor::real(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    )
}

/// Degenerate-perturbation energies E₀ ± Δ.
pub fn perturbed_energies(e0: f64, delta: f64) -> (f64, f64) {
    (e0 + delta, e0 - delta)
}
