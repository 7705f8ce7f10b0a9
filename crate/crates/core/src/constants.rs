//! Physical constants and the position-dependent relativistic mass.
//!
//! Energies are in eV and exclude the rest energy, lengths in cm, wave
//! vectors in cm⁻¹. ħ and c only ever appear through [`HBAR_C`] and
//! [`REST_ENERGY`].

use serde::Serialize;

use crate::error::{Error, Result};

/// Electron rest energy m₀c² in eV.
pub const REST_ENERGY: f64 = 510_998.95;

/// ħc in eV·cm.
pub const HBAR_C: f64 = 1.973_269_804e-5;

/// 2m₀c², the scale that sets the Klein threshold and the mass correction.
pub const TWICE_REST_ENERGY: f64 = 2.0 * REST_ENERGY;

/// (ħc)² in eV²·cm².
pub(crate) const HBAR_C_SQ: f64 = HBAR_C * HBAR_C;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub rest_energy: f64,
    pub hbar_c: f64,
}

impl PhysicalConstants {
    pub const STANDARD: PhysicalConstants = PhysicalConstants {
        rest_energy: REST_ENERGY,
        hbar_c: HBAR_C,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// m(z)c² = m₀c²·(1 + (E − V)/2m₀c²), the energy equivalent of the
/// position-dependent mass at kinetic energy `energy` and potential `potential`.
pub fn relativistic_mass_energy(energy: f64, potential: f64) -> Result<f64> {
    let difference = energy - potential;
    if difference <= -TWICE_REST_ENERGY {
        return Err(Error::NonpositiveMass { difference });
    }
    Ok(mass_energy_unchecked(energy, potential))
}

#[inline]
pub(crate) fn mass_energy_unchecked(energy: f64, potential: f64) -> f64 {
    REST_ENERGY + 0.5 * (energy - potential)
}

/// Fails with [`Error::KleinRegime`] unless `vb < 2m₀c² + energy`.
pub fn klein_guard(energy: f64, vb: f64) -> Result<()> {
    let limit = TWICE_REST_ENERGY + energy;
    if vb < limit {
        Ok(())
    } else {
        Err(Error::KleinRegime { vb, limit })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rest_mass_at_zero_kinetic_energy() {
        assert_eq!(relativistic_mass_energy(0.0, 0.0).unwrap(), 510_998.95);
    }

    #[test]
    fn doubles_at_twice_rest_energy() {
        let m = relativistic_mass_energy(TWICE_REST_ENERGY, 0.0).unwrap();
        assert_eq!(m, 1_021_997.9);
    }

    #[test]
    fn well_interface_value() {
        let expected = 510_998.95 * (1.0 + (120.0 - 10_000.0) / 1_021_997.9);
        let m = relativistic_mass_energy(120.0, 1e4).unwrap();
        assert!((m - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn klein_regime_mass_is_rejected() {
        assert!(matches!(
            relativistic_mass_energy(0.0, TWICE_REST_ENERGY),
            Err(Error::NonpositiveMass { .. })
        ));
        assert!(relativistic_mass_energy(0.0, TWICE_REST_ENERGY * 0.999).is_ok());
    }

    #[test]
    fn klein_guard_boundary() {
        assert!(klein_guard(100.0, TWICE_REST_ENERGY + 99.0).is_ok());
        assert!(klein_guard(100.0, TWICE_REST_ENERGY + 100.0).is_err());
    }

    proptest! {
        #[test]
        fn mass_equals_rest_mass_when_energy_equals_potential(e in -1e5f64..1e6) {
            prop_assert_eq!(relativistic_mass_energy(e, e).unwrap(), REST_ENERGY);
        }

        #[test]
        fn mass_shift_is_linear_in_energy_minus_potential(
            d1 in -5e5f64..5e5, d2 in -5e5f64..5e5, t in 0.0f64..1.0,
        ) {
            // three collinear points in (E - V)
            let d3 = d1 + t * (d2 - d1);
            let m = |d: f64| relativistic_mass_energy(d, 0.0).unwrap() - REST_ENERGY;
            let interp = m(d1) + t * (m(d2) - m(d1));
            prop_assert!((m(d3) - interp).abs() <= 1e-9 * (1.0 + m(d1).abs() + m(d2).abs()));
        }
    }
}
