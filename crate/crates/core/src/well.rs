//! Ground state of an asymmetric square well with energy-dependent mass
//! and its spin-orbit splitting.
//!
//! Inside each region the envelope obeys
//!
//! ```text
//! −(ħ²/2) d/dz (1/m) dΨ/dz + (ħ²k⊥²/2m + V) Ψ = E Ψ,   m = m₀(1 + (E − V)/2m₀c²)
//! ```
//!
//! integrated as the first-order system (Ψ, Π = Ψ′/m) so that the interface
//! conditions (Ψ and Π continuous) are automatic.

use std::io::{self, Write};

use serde::Serialize;

use crate::constants::{mass_energy_unchecked, relativistic_mass_energy, HBAR_C_SQ, REST_ENERGY};
use crate::error::{Error, Result};
use crate::model::WellSpec;
use crate::ode;
use crate::roots::{bisect, scan_first_bracket, Bracket};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// RK4 steps across the well
    pub steps: usize,
    pub scan_points: usize,
    /// absolute tolerance on e0 (eV)
    pub energy_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { steps: 2000, scan_points: 400, energy_tol: 1e-10, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStateResult {
    /// Eigenvalue including transverse kinetic energy (eV).
    pub e0: f64,
    pub k_perp: f64,
    /// Nodes across the well, z from −a/2 to a/2 (cm).
    pub grid: Vec<f64>,
    /// Normalized Ψ on `grid` (cm^-1/2).
    pub psi: Vec<f64>,
    pub psi_sq_left_iface: f64,
    pub psi_sq_right_iface: f64,
    pub kappa_left: f64,
    pub kappa_right: f64,
    /// Mass energies mc² at E = e0 in the left barrier, well and right barrier.
    pub mass_left: f64,
    pub mass_well: f64,
    pub mass_right: f64,
    /// |Δ| from the interface form (eV).
    pub delta: f64,
    pub iterations: usize,
    /// Normalized matching defect at z = a/2.
    pub residual: f64,
    /// Relative jump of (1/m)Ψ′ across z = a/2.
    pub bdd_jump: f64,
    /// Sign changes of Ψ inside the well (0 for the ground state).
    pub nodes: usize,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
}

impl BoundStateResult {
    /// ∫|Ψ|² dz: Simpson inside, exponential tails outside.
    pub fn norm(&self) -> f64 {
        let h = self.grid[1] - self.grid[0];
        simpson(&self.psi.iter().map(|p| p * p).collect::<Vec<_>>(), h)
            + self.psi_sq_left_iface / (2.0 * self.kappa_left)
            + self.psi_sq_right_iface / (2.0 * self.kappa_right)
    }

    /// Two-column text dump (z in cm, Ψ in cm^-1/2) including `tail_points`
    /// samples of each exponential tail over three decay lengths.
    pub fn write_wavefunction<W: Write>(&self, mut out: W, tail_points: usize) -> io::Result<()> {
        writeln!(out, "# e0_ev {:.12e}", self.e0)?;
        writeln!(out, "# k_perp_cm-1 {:.12e}", self.k_perp)?;
        writeln!(out, "# z_cm psi_cm-1/2")?;
        let (zl, zr) = (self.grid[0], *self.grid.last().unwrap());
        let (pl, pr) = (self.psi[0], *self.psi.last().unwrap());
        for i in (1..=tail_points).rev() {
            let d = 3.0 / self.kappa_left * i as f64 / tail_points as f64;
            writeln!(out, "{:.12e} {:.12e}", zl - d, pl * (-self.kappa_left * d).exp())?;
        }
        for (z, p) in self.grid.iter().zip(&self.psi) {
            writeln!(out, "{z:.12e} {p:.12e}")?;
        }
        for i in 1..=tail_points {
            let d = 3.0 / self.kappa_right * i as f64 / tail_points as f64;
            writeln!(out, "{:.12e} {:.12e}", zr + d, pr * (-self.kappa_right * d).exp())?;
        }
        Ok(())
    }
}

fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let mut s = f[0] + f[n];
    for (i, v) in f.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

/// κ² = k⊥² + 2m(V − E)/ħ² in a barrier of height `v`.
fn kappa_sq(e: f64, v: f64, k_perp: f64) -> f64 {
    k_perp * k_perp + 2.0 * mass_energy_unchecked(e, v) * (v - e) / HBAR_C_SQ
}

/// Relativistic transverse kinetic energy, the height above a barrier top
/// where κ² reaches zero.
pub fn transverse_floor(k_perp: f64) -> f64 {
    let hk = k_perp * crate::constants::HBAR_C;
    (REST_ENERGY * REST_ENERGY + hk * hk).sqrt() - REST_ENERGY
}

struct Shot {
    grid: Vec<f64>,
    psi: Vec<f64>,
    pi_end: f64,
    kappa_left: f64,
    kappa_right: f64,
    mass_left: f64,
    mass_well: f64,
    mass_right: f64,
}

impl Shot {
    fn mismatch(&self) -> f64 {
        let psi = *self.psi.last().unwrap();
        let lhs = self.mass_right * self.pi_end + self.kappa_right * psi;
        let scale = (self.kappa_right * psi).hypot(self.mass_right * self.pi_end);
        lhs / scale
    }
}

/// Starts on the decaying left tail at −a/2 and integrates to a/2.
fn shoot(well: &WellSpec, k_perp: f64, e: f64, steps: usize, keep: bool) -> Shot {
    let half = 0.5 * well.width;
    let mass_left = mass_energy_unchecked(e, well.v_left);
    let mass_right = mass_energy_unchecked(e, well.v_right);
    let mass_well = mass_energy_unchecked(e, 0.0);
    let kappa_left = kappa_sq(e, well.v_left, k_perp).max(0.0).sqrt();
    let kappa_right = kappa_sq(e, well.v_right, k_perp).max(0.0).sqrt();
    let g = k_perp * k_perp / mass_well - 2.0 * e / HBAR_C_SQ;
    let rhs = |_z: f64, y: &[f64; 2]| [mass_well * y[1], g * y[0]];
    let cap = if keep { steps + 1 } else { 0 };
    let (mut grid, mut psi) = (Vec::with_capacity(cap), Vec::with_capacity(cap));
    let end = ode::integrate(rhs, -half, half, steps, [1.0, kappa_left / mass_left], |z, y| {
        if keep {
            grid.push(z);
            psi.push(y[0]);
        }
    });
    if !keep {
        psi.push(end[0]);
    }
    Shot { grid, psi, pi_end: end[1], kappa_left, kappa_right, mass_left, mass_well, mass_right }
}

pub fn solve_bound_state(well: &WellSpec, k_perp: f64) -> Result<BoundStateResult> {
    solve_bound_state_with(well, k_perp, &SolverOptions::default())
}

pub fn solve_bound_state_with(well: &WellSpec, k_perp: f64, opts: &SolverOptions) -> Result<BoundStateResult> {
    if !k_perp.is_finite() || k_perp < 0.0 {
        return Err(Error::InvalidInput(format!("k_perp must be non-negative, got {k_perp}")));
    }
    if opts.steps < 2 || !opts.steps.is_multiple_of(2) || opts.scan_points < 2 {
        return Err(Error::InvalidInput("steps must be even and ≥ 2, scan points ≥ 2".into()));
    }
    let floor = transverse_floor(k_perp);
    let hi = 0.999 * well.lower_barrier() + floor;
    let lo = 1e-9 * hi;
    relativistic_mass_energy(lo, well.v_left.max(well.v_right))?;

    let f = |e: f64| shoot(well, k_perp, e, opts.steps, false).mismatch();
    let bracket: Bracket = scan_first_bracket(f, lo, hi, opts.scan_points).ok_or(Error::NoBoundState)?;
    let root = bisect(f, bracket, opts.energy_tol, opts.max_iterations)?;

    let shot = shoot(well, k_perp, root.x, opts.steps, true);
    let residual = shot.mismatch().abs();
    let mut result = BoundStateResult {
        e0: root.x,
        k_perp,
        grid: shot.grid.clone(),
        psi: shot.psi.clone(),
        psi_sq_left_iface: 0.0,
        psi_sq_right_iface: 0.0,
        kappa_left: shot.kappa_left,
        kappa_right: shot.kappa_right,
        mass_left: shot.mass_left,
        mass_well: shot.mass_well,
        mass_right: shot.mass_right,
        delta: 0.0,
        iterations: root.iterations,
        residual,
        bdd_jump: 0.0,
        nodes: 0,
        bracket_lo: bracket.lo,
        bracket_hi: bracket.hi,
    };
    result.psi_sq_left_iface = result.psi[0] * result.psi[0];
    result.psi_sq_right_iface = result.psi.last().unwrap().powi(2);
    let scale = result.norm().sqrt().recip();
    result.psi.iter_mut().for_each(|p| *p *= scale);
    result.psi_sq_left_iface = result.psi[0] * result.psi[0];
    result.psi_sq_right_iface = result.psi.last().unwrap().powi(2);

    let psi_end = *shot.psi.last().unwrap();
    let tail_pi = -shot.kappa_right / shot.mass_right * psi_end;
    result.bdd_jump = (shot.pi_end - tail_pi).abs() / tail_pi.abs();
    result.nodes = result.psi.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    result.delta = well_soe(&result, k_perp);
    Ok(result)
}

/// |Δ| = k⊥(ħ²/2)·{|Ψ(−a/2)|²[1/m_in − 1/m_l] + |Ψ(a/2)|²[1/m_r − 1/m_in]}
pub fn well_soe(result: &BoundStateResult, k_perp: f64) -> f64 {
    let left = result.psi_sq_left_iface * (1.0 / result.mass_well - 1.0 / result.mass_left);
    let right = result.psi_sq_right_iface * (1.0 / result.mass_right - 1.0 / result.mass_well);
    (0.5 * k_perp * HBAR_C_SQ * (left + right)).abs()
}

/// k⊥(ħ²/2)·∫|Ψ|² d(1/m) as a Stieltjes sum over the whole profile, with the
/// step interfaces carried as coincident nodes holding the one-sided masses.
pub fn soe_integral_form(result: &BoundStateResult, k_perp: f64) -> f64 {
    let n = result.psi.len();
    let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(n + 2);
    nodes.push((result.psi_sq_left_iface, 1.0 / result.mass_left));
    nodes.extend(result.psi.iter().map(|p| (p * p, 1.0 / result.mass_well)));
    nodes.push((result.psi_sq_right_iface, 1.0 / result.mass_right));
    let integral: f64 = nodes
        .windows(2)
        .map(|w| 0.5 * (w[0].0 + w[1].0) * (w[1].1 - w[0].1))
        .sum();
    (0.5 * k_perp * HBAR_C_SQ * integral).abs()
}
