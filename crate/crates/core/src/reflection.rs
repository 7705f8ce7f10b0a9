//! Step-barrier matching: closed-form reflection/transmission amplitudes for
//! both effective-spin channels, wavefunction reconstruction, boundary
//! residual checks and beam/flux reporting.
//!
//! Boundary conditions at z = 0 for the upper (u) and lower (d) components:
//!
//! ```text
//! u(0⁻) = u(0⁺)                 d(0⁻) = d(0⁺)
//! u'(0⁻) = M u'(0⁺) + iS d(0)   d'(0⁻) = M d'(0⁺) − iS u(0)
//! ```
//!
//! with M = E_E/E_V and S = kx·V_b/E_V, where E_E = E + 2m₀c² and
//! E_V = E − V_b + 2m₀c².

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::{klein_guard, TWICE_REST_ENERGY};
use crate::dispersion::{reflection_angles, wave_vectors_nonrel, wave_vectors_rel, WaveVectorSet};
use crate::error::Result;
use crate::model::SpinChannel;
use crate::soc::Spinor;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchingParams {
    /// M = m(0⁻)/m(0⁺)
    pub mass_ratio: f64,
    /// S in cm⁻¹
    pub coupling: f64,
    pub e_e: f64,
    pub e_v: f64,
}

impl MatchingParams {
    /// Nonrelativistic matching: M ≡ 1 and S = kx·V_b/2m₀c² (both E_E and
    /// E_V replaced by 2m₀c²).
    pub fn nonrelativistic(kx: f64, vb: f64) -> Self {
        Self {
            mass_ratio: 1.0,
            coupling: kx * vb / TWICE_REST_ENERGY,
            e_e: TWICE_REST_ENERGY,
            e_v: TWICE_REST_ENERGY,
        }
    }
}

pub fn matching_params(energy: f64, kx: f64, vb: f64) -> Result<MatchingParams> {
    klein_guard(energy, vb)?;
    let e_e = energy + TWICE_REST_ENERGY;
    let e_v = energy - vb + TWICE_REST_ENERGY;
    Ok(MatchingParams {
        mass_ratio: e_e / e_v,
        coupling: kx * vb / e_v,
        e_e,
        e_v,
    })
}

/// Amplitudes for incidence in effective spin up (R, R′, T, T′) and
/// effective spin down (P, P′, F, F′). Primed amplitudes belong to the
/// opposite effective spin from the incident one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeSet {
    pub r: Complex64,
    pub r_prime: Complex64,
    pub t: Complex64,
    pub t_prime: Complex64,
    pub p: Complex64,
    pub p_prime: Complex64,
    pub f: Complex64,
    pub f_prime: Complex64,
}

impl AmplitudeSet {
    /// Builds the full set from the spin-up incidence amplitudes, filling the
    /// spin-down set as P = R, P′ = −R′, F = T, F′ = −T′.
    pub fn from_spin_up(r: Complex64, r_prime: Complex64, t: Complex64, t_prime: Complex64) -> Self {
        Self { r, r_prime, t, t_prime, p: r, p_prime: -r_prime, f: t, f_prime: -t_prime }
    }

    /// R, R′, T, T′ in that order.
    pub fn spin_up(&self) -> [Complex64; 4] {
        [self.r, self.r_prime, self.t, self.t_prime]
    }

    /// |R′|/|R|
    pub fn flip_ratio(&self) -> f64 {
        self.r_prime.norm() / self.r.norm()
    }
}

/// Closed-form solution of the matching conditions for the given channel
/// wave vectors and step parameters.
pub fn closed_form_amplitudes(wv: &WaveVectorSet, params: &MatchingParams) -> AmplitudeSet {
    let m = params.mass_ratio;
    let s = params.coupling;
    let s2 = Complex64::new(s * s, 0.0);
    let flip_sum = wv.kz_prime + wv.qz_prime * m;
    let denom = (wv.kz + wv.qz * m) * flip_sum + s2;
    let r = ((wv.kz - wv.qz * m) * flip_sum - s2) / denom;
    let r_prime = wv.kz * (-2.0 * s) / denom;
    let t = wv.kz * 2.0 * flip_sum / denom;
    AmplitudeSet::from_spin_up(r, r_prime, t, r_prime)
}

/// Everything known about one scattering configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepSolution {
    pub energy: f64,
    pub delta: f64,
    pub kx: f64,
    pub vb: f64,
    pub waves: WaveVectorSet,
    pub params: MatchingParams,
    pub amplitudes: AmplitudeSet,
}

impl StepSolution {
    pub fn relativistic(energy: f64, delta: f64, kx: f64, vb: f64) -> Result<Self> {
        let waves = wave_vectors_rel(energy, delta, kx, vb)?;
        let params = matching_params(energy, kx, vb)?;
        let amplitudes = closed_form_amplitudes(&waves, &params);
        Ok(Self { energy, delta, kx, vb, waves, params, amplitudes })
    }

    pub fn nonrelativistic(energy: f64, delta: f64, kx: f64, vb: f64) -> Result<Self> {
        let waves = wave_vectors_nonrel(energy, delta, kx, vb)?;
        let params = MatchingParams::nonrelativistic(kx, vb);
        let amplitudes = closed_form_amplitudes(&waves, &params);
        Ok(Self { energy, delta, kx, vb, waves, params, amplitudes })
    }

    pub fn residuals(&self) -> BoundaryResiduals {
        boundary_residuals(&self.amplitudes, &self.waves, &self.params)
    }

    pub fn beam_report(&self) -> Result<BeamReport> {
        BeamReport::from_solution(self)
    }
}

pub fn amplitudes_rel(energy: f64, delta: f64, kx: f64, vb: f64) -> Result<AmplitudeSet> {
    StepSolution::relativistic(energy, delta, kx, vb).map(|s| s.amplitudes)
}

pub fn amplitudes_nonrel(energy: f64, delta: f64, kx: f64, vb: f64) -> Result<AmplitudeSet> {
    StepSolution::nonrelativistic(energy, delta, kx, vb).map(|s| s.amplitudes)
}

/// Ψ¹ (or Ψ² for `EffDown`) at (x, z) with unit normalization constant.
pub fn reconstruct_wavefunction(
    amps: &AmplitudeSet,
    wv: &WaveVectorSet,
    kx: f64,
    channel: SpinChannel,
    x: f64,
    z: f64,
) -> Spinor {
    let plane = |k: Complex64, sign: f64| (I * k * (sign * z)).exp();
    let same = Spinor::real(1.0, 1.0);
    let flip = Spinor::real(1.0, -1.0);
    // (incident k, other k, incident barrier q, other barrier q, spinors, amplitudes)
    let (k_in, k_out, q_in, q_out, s_in, s_out, refl, refl_x, trans, trans_x) = match channel {
        SpinChannel::EffUp => (
            wv.kz, wv.kz_prime, wv.qz, wv.qz_prime, same, flip,
            amps.r, amps.r_prime, amps.t, amps.t_prime,
        ),
        SpinChannel::EffDown => (
            wv.kz_prime, wv.kz, wv.qz_prime, wv.qz, flip, same,
            amps.p, amps.p_prime, amps.f, amps.f_prime,
        ),
    };
    let psi = if z <= 0.0 {
        s_in.scale(plane(k_in, 1.0) + refl * plane(k_in, -1.0))
            .add(&s_out.scale(refl_x * plane(k_out, -1.0)))
    } else {
        s_in.scale(trans * plane(q_in, 1.0)).add(&s_out.scale(trans_x * plane(q_out, 1.0)))
    };
    psi.scale((I * kx * x).exp())
}

/// Defects of the four matching conditions for Ψ¹. Continuity residuals are
/// absolute (the incident amplitude is 1); derivative residuals are divided
/// by |kz| + |k′z| + M|qz| + M|q′z| + |S|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryResiduals {
    pub continuity_upper: f64,
    pub continuity_lower: f64,
    pub derivative_upper: f64,
    pub derivative_lower: f64,
}

impl BoundaryResiduals {
    pub fn max(&self) -> f64 {
        self.continuity_upper
            .max(self.continuity_lower)
            .max(self.derivative_upper)
            .max(self.derivative_lower)
    }
}

pub fn boundary_residuals(amps: &AmplitudeSet, wv: &WaveVectorSet, params: &MatchingParams) -> BoundaryResiduals {
    let one = Complex64::new(1.0, 0.0);
    let (r, rp, t, tp) = (amps.r, amps.r_prime, amps.t, amps.t_prime);
    let m = params.mass_ratio;
    let s = params.coupling;

    let up_left = one + r + rp;
    let low_left = one + r - rp;
    let up_right = t + tp;
    let low_right = t - tp;

    let dup_left = I * wv.kz * (one - r) - I * wv.kz_prime * rp;
    let dlow_left = I * wv.kz * (one - r) + I * wv.kz_prime * rp;
    let dup_right = I * wv.qz * t + I * wv.qz_prime * tp;
    let dlow_right = I * wv.qz * t - I * wv.qz_prime * tp;

    let scale = wv.kz.norm() + wv.kz_prime.norm() + m * (wv.qz.norm() + wv.qz_prime.norm()) + s.abs();
    BoundaryResiduals {
        continuity_upper: (up_left - up_right).norm(),
        continuity_lower: (low_left - low_right).norm(),
        derivative_upper: (dup_left - dup_right * m - I * s * low_right).norm() / scale,
        derivative_lower: (dlow_left - dlow_right * m + I * s * up_right).norm() / scale,
    }
}

/// Angles and flux fractions of the two reflected beams and the transmitted
/// wave for effective-spin-up incidence. Fractions are ratios of the
/// probability current Im(ψ*·(1/m)ψ′) to the incident current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamReport {
    pub alpha: f64,
    pub alpha_prime: f64,
    pub refl_conserving_fraction: f64,
    pub refl_flip_fraction: f64,
    pub transmitted_fraction: f64,
    pub flux_imbalance: f64,
}

impl BeamReport {
    fn from_solution(sol: &StepSolution) -> Result<Self> {
        let wv = &sol.waves;
        let a = &sol.amplitudes;
        let (alpha, alpha_prime) = reflection_angles(sol.kx, wv.kz, wv.kz_prime)?;
        let kz = wv.kz.re;
        let refl_conserving_fraction = a.r.norm_sqr();
        let refl_flip_fraction = a.r_prime.norm_sqr() * wv.kz_prime.re / kz;
        // evanescent channels have zero real part and carry no current
        let transmitted_fraction = sol.params.mass_ratio
            * (a.t.norm_sqr() * wv.qz.re + a.t_prime.norm_sqr() * wv.qz_prime.re)
            / kz;
        let flux_imbalance =
            (1.0 - refl_conserving_fraction - refl_flip_fraction - transmitted_fraction).abs();
        Ok(Self {
            alpha,
            alpha_prime,
            refl_conserving_fraction,
            refl_flip_fraction,
            transmitted_fraction,
            flux_imbalance,
        })
    }
}

pub fn beam_report(energy: f64, delta: f64, kx: f64, vb: f64) -> Result<BeamReport> {
    StepSolution::relativistic(energy, delta, kx, vb)?.beam_report()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::energy_from_k_rel;
    use crate::soc::barrier_soe;
    use proptest::prelude::*;

    fn reference_point() -> StepSolution {
        let delta = barrier_soe(1e10, 6e4, 1e-9);
        let e = energy_from_k_rel(1e10, 5e9, delta);
        StepSolution::relativistic(e, delta, 1e10, 6e4).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm()
    }

    #[test]
    fn reference_point_amplitudes() {
        // 40-digit evaluation of the closed forms at the same inputs
        let sol = reference_point();
        let a = sol.amplitudes;
        assert!(close(a.r, Complex64::new(-0.719_554_556_969_914, -0.693_618_401_933_185), 1e-12));
        assert!(close(a.r_prime, Complex64::new(0.023_734_473_096_806, 0.023_336_005_531_879), 1e-11));
        assert!(close(a.t, Complex64::new(0.280_445_443_030_086, -0.693_618_401_933_185), 1e-12));
        assert!((a.flip_ratio() - 0.037).abs() / 0.037 < 0.10);
        assert!((a.flip_ratio() - 0.033_303_948_429_257).abs() < 1e-12);
    }

    #[test]
    fn reference_matching_params() {
        let p = matching_params(45_805.497_740_696_5, 1e10, 6e4).unwrap();
        assert!((p.coupling - 5.871e8).abs() / 5.871e8 < 0.02);
        assert!((p.coupling - 595_354_214.269_455_6).abs() < 1e-3);
        let p = matching_params(4.58e4, 1e10, 6e4).unwrap();
        assert!((p.mass_ratio - 1.059_535_746_204_67).abs() < 1e-12);
        assert_eq!(matching_params(4.58e4, 0.0, 6e4).unwrap().coupling, 0.0);
        assert!(matching_params(10.0, 0.0, TWICE_REST_ENERGY + 10.0).is_err());
    }

    #[test]
    fn normal_incidence_is_textbook_step() {
        let sol = StepSolution::relativistic(2e4, 0.0, 0.0, 6e4).unwrap();
        let (wv, m) = (sol.waves, sol.params.mass_ratio);
        let expected = (wv.kz - wv.qz * m) / (wv.kz + wv.qz * m);
        assert!(close(sol.amplitudes.r, expected, 1e-14));
        assert_eq!(sol.amplitudes.r_prime, Complex64::default());
        assert!((sol.amplitudes.r.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nonrel_total_reflection_below_step() {
        let a = amplitudes_nonrel(100.0, 0.0, 0.0, 200.0).unwrap();
        assert!((a.r.norm() - 1.0).abs() < 1e-14);
        assert_eq!(a.r_prime, Complex64::default());
    }

    #[test]
    fn nonrel_deviation_at_low_energy() {
        // frozen 40-digit deviations |rel - nonrel| / |rel| for R, R', T
        let r = amplitudes_rel(100.0, 0.01, 1e7, 200.0).unwrap();
        let n = amplitudes_nonrel(100.0, 0.01, 1e7, 200.0).unwrap();
        let dev = |a: Complex64, b: Complex64| (a - b).norm() / a.norm();
        for (got, want) in [
            (dev(r.r, n.r), 9.784_753_139e-5),
            (dev(r.r_prime, n.r_prime), 1.094_235_037e-4),
            (dev(r.t, n.t), 6.920_868_644e-5),
        ] {
            assert!((got - want).abs() < 1e-3 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn nonrel_reduction_is_first_order_in_energy_scale() {
        // shrinking every energy by 10 (wave vectors by √10) shrinks the gap ~10x
        let gap = |s: f64| {
            let r = amplitudes_rel(100.0 * s, 0.01 * s, 1e7 * s.sqrt(), 200.0 * s).unwrap();
            let n = amplitudes_nonrel(100.0 * s, 0.01 * s, 1e7 * s.sqrt(), 200.0 * s).unwrap();
            (r.r - n.r).norm() / r.r.norm()
        };
        let ratio = gap(1.0) / gap(0.1);
        assert!((ratio - 10.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn residuals_vanish_for_closed_forms() {
        assert!(reference_point().residuals().max() < 1e-12);
        let n = StepSolution::nonrelativistic(100.0, 0.01, 1e7, 200.0).unwrap();
        assert!(n.residuals().max() < 1e-12);
    }

    #[test]
    fn residual_sensitivity_to_perturbed_r() {
        let sol = reference_point();
        let mut amps = sol.amplitudes;
        amps.r += Complex64::new(0.01, 0.0);
        let res = boundary_residuals(&amps, &sol.waves, &sol.params);
        assert!((res.continuity_upper - 0.01).abs() < 1e-12);
        assert!((res.continuity_lower - 0.01).abs() < 1e-12);
    }

    #[test]
    fn wavefunction_continuous_at_step() {
        let sol = reference_point();
        for ch in [SpinChannel::EffUp, SpinChannel::EffDown] {
            let left = reconstruct_wavefunction(&sol.amplitudes, &sol.waves, sol.kx, ch, 0.0, 0.0);
            let right = reconstruct_wavefunction(&sol.amplitudes, &sol.waves, sol.kx, ch, 0.0, 1e-300);
            assert!((left.upper - right.upper).norm() <= 1e-12 * left.upper.norm().max(1.0));
            assert!((left.lower - right.lower).norm() <= 1e-12 * left.lower.norm().max(1.0));
        }
    }

    #[test]
    fn decoupled_wavefunction_is_single_channel() {
        let sol = StepSolution::relativistic(2e4, 0.0, 0.0, 6e4).unwrap();
        let z = -3e-10;
        let psi = reconstruct_wavefunction(&sol.amplitudes, &sol.waves, 0.0, SpinChannel::EffUp, 0.0, z);
        let k = sol.waves.kz;
        let expected = (I * k * z).exp() + sol.amplitudes.r * (-I * k * z).exp();
        assert!((psi.upper - expected).norm() < 1e-14);
        assert_eq!(psi.upper, psi.lower);
    }

    #[test]
    fn wavefunction_decays_inside_barrier() {
        let sol = reference_point();
        let a = &sol.amplitudes;
        let at = |z| reconstruct_wavefunction(a, &sol.waves, sol.kx, SpinChannel::EffUp, 0.0, z).norm_sqr().sqrt();
        let (q, qp) = (sol.waves.qz.im, sol.waves.qz_prime.im);
        // the spin-flip tail decays at |q'z| < |qz|, so the slowest rate bounds both
        assert!(at(3.0 / qp) < (-3.0f64).exp() * at(0.0));
        assert!(at(3.0 / q) < (-3.0 * qp / q).exp() * at(0.0));
    }

    #[test]
    fn reference_beam_report() {
        let b = reference_point().beam_report().unwrap();
        assert!((b.alpha - b.alpha_prime - 0.53).abs() < 0.1);
        assert!((b.alpha - 63.434_948_822_922).abs() < 1e-9);
        assert!((b.alpha_prime - 62.882_058_908_283).abs() < 1e-9);
        assert!((b.refl_flip_fraction - 0.001_134_752_043_484).abs() < 1e-12);
        assert_eq!(b.transmitted_fraction, 0.0);
        assert!(b.flux_imbalance < 1e-12);
    }

    #[test]
    fn no_flip_beam_at_normal_incidence() {
        let b = beam_report(2e4, 0.0, 0.0, 6e4).unwrap();
        assert_eq!(b.refl_flip_fraction, 0.0);
    }

    #[test]
    fn above_barrier_flux_balance() {
        let b = beam_report(8e4, 0.0, 0.0, 6e4).unwrap();
        assert!(b.transmitted_fraction > 0.0);
        assert!(b.flux_imbalance < 1e-12, "{}", b.flux_imbalance);
    }

    fn valid_point() -> impl Strategy<Value = (f64, f64, f64, f64)> {
        (1e2f64..1e5, 0.0f64..0.05, -0.95f64..0.95, 0.5f64..3.0).prop_map(|(e, dfrac, kfrac, vfrac)| {
            let delta = dfrac * e;
            let kmax = ((e - delta) * (e + TWICE_REST_ENERGY)).sqrt() / crate::constants::HBAR_C;
            (e, delta, kfrac * kmax, vfrac * e)
        })
    }

    proptest! {
        #[test]
        fn exact_relations((e, delta, kx, vb) in valid_point()) {
            let a = amplitudes_rel(e, delta, kx, vb).unwrap();
            prop_assert_eq!(a.t_prime, a.r_prime);
            prop_assert_eq!(a.p, a.r);
            prop_assert_eq!(a.p_prime, -a.r_prime);
            prop_assert_eq!(a.f, a.t);
            prop_assert_eq!(a.f_prime, -a.t_prime);
        }

        #[test]
        fn residuals_small((e, delta, kx, vb) in valid_point()) {
            let sol = StepSolution::relativistic(e, delta, kx, vb).unwrap();
            prop_assert!(sol.residuals().max() < 1e-12);
        }

        #[test]
        fn flip_amplitude_odd_in_kx((e, delta, kx, vb) in valid_point()) {
            let plus = amplitudes_rel(e, delta, kx, vb).unwrap();
            let minus = amplitudes_rel(e, delta, -kx, vb).unwrap();
            prop_assert!((plus.r_prime + minus.r_prime).norm() <= 1e-14 * (1.0 + plus.r_prime.norm()));
            prop_assert!((plus.r - minus.r).norm() <= 1e-14);
        }

        #[test]
        fn evanescent_flux_balance(e in 1e2f64..1e5, kfrac in 0.0f64..0.9, over in 1.05f64..5.0, dfrac in 0.0f64..1e-3) {
            let delta = dfrac * e;
            let kx = kfrac * ((e - delta) * (e + TWICE_REST_ENERGY)).sqrt() / crate::constants::HBAR_C;
            let b = beam_report(e, delta, kx, (e + delta) * over).unwrap();
            prop_assert_eq!(b.transmitted_fraction, 0.0);
            prop_assert!((b.refl_conserving_fraction + b.refl_flip_fraction - 1.0).abs() < 1e-3);
            prop_assert!(b.flux_imbalance < 1e-3);
        }
    }

    #[test]
    fn flip_amplitude_linear_as_kx_vanishes() {
        let r1 = amplitudes_rel(2e4, 0.0, 1e3, 6e4).unwrap().r_prime;
        let r2 = amplitudes_rel(2e4, 0.0, 2e3, 6e4).unwrap().r_prime;
        assert!((r2 / r1 - 2.0).norm() < 1e-9);
    }
}
