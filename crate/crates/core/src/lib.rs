//! Spin-conserving and spin-flip reflection of relativistic electrons from a
//! one-dimensional barrier, and the spin-orbit splitting of the ground state
//! of an asymmetric quantum well.
//!
//! Units throughout: energies in eV, lengths in cm, wave vectors in cm⁻¹.

pub mod constants;
pub mod dispersion;
pub mod error;
pub mod model;
pub mod ode;
pub mod reflection;
pub mod roots;
pub mod soc;
pub mod verify;
pub mod well;

pub use constants::{PhysicalConstants, HBAR_C, REST_ENERGY};
pub use dispersion::{
    energy_from_k_nonrel, energy_from_k_rel, reflection_angles, wave_vectors_nonrel, wave_vectors_rel,
    WaveKind, WaveVectorSet,
};
pub use error::{Error, Result};
pub use model::{BarrierSpec, ElectronState, SpinChannel, WellSpec};
pub use reflection::{
    amplitudes_nonrel, amplitudes_rel, beam_report, boundary_residuals, matching_params,
    reconstruct_wavefunction, AmplitudeSet, BeamReport, BoundaryResiduals, MatchingParams, StepSolution,
};
pub use soc::{barrier_soe, SlopedBarrier, Spinor};
pub use verify::{integrate_coupled, slope_convergence_sweep, OracleResult, SweepRow};
pub use well::{soe_integral_form, solve_bound_state, well_soe, BoundStateResult, SolverOptions};
