use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// E − V ≤ −2m₀c²: the position-dependent mass is no longer positive.
    #[error("nonpositive relativistic mass: E - V = {difference} eV")]
    NonpositiveMass { difference: f64 },

    #[error("Klein regime: barrier height {vb} eV is not below 2m0c^2 + E = {limit} eV")]
    KleinRegime { vb: f64, limit: f64 },

    #[error("no propagating incident wave: kz^2 = {kz_sq:e} cm^-2")]
    EvanescentIncident { kz_sq: f64 },

    #[error("wave vector is not real and positive: {0}")]
    NotPropagating(String),

    #[error("no bound state below the lower barrier")]
    NoBoundState,

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("integration step too coarse: {phase_per_step:.3} rad per step exceeds {limit:.3}")]
    StiffFailure { phase_per_step: f64, limit: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
