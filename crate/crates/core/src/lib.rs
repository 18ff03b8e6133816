//! Exact dissipation and decoherence dynamics of a single bosonic mode
//! coupled to a structured reservoir.
//!
//! The library is organized around the reservoir spectral density J(ω). From
//! it everything else follows:
//!
//! - [`spectral`] — spectral density models, thermal occupation, and the
//!   reservoir correlation kernels g(τ) and g̃(τ).
//! - [`greenfn`] — the retarded Green function u(t) of the mode (a Volterra
//!   integro-differential equation) and the noise integral v(t).
//! - [`laplace`] — frequency-domain analysis: self-energy, level shift,
//!   bound poles and residues, the spectral reconstruction of u(t), and
//!   weak-coupling limits.
//! - [`master`] — time-local master-equation coefficients derived from
//!   (u, v), a truncated Fock-space propagator, and a Wigner transform of the
//!   density matrix (used as an independent cross-check of the closed forms).
//! - [`wigner`] — closed-form phase-space dynamics of coherent-state
//!   superpositions: the Gaussian propagating kernel, cat-state Wigner
//!   functions, fringe visibility, and frame rendering.
//! - [`cli`] — scenario files and the deterministic command-line front end.
//!
//! Frequencies and times are dimensionless; the spectral width scale of the
//! reservoir sets the unit. ħ = k_B = 1 throughout.

pub mod cli;
pub mod greenfn;
pub mod laplace;
pub mod master;
pub mod quad;
pub mod spectral;
pub mod wigner;

use num_complex::Complex64;

/// Errors reported by the solvers and evaluators.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The self-energy was requested exactly on its branch cut.
    #[error(
        "self-energy evaluated on the branch cut at s = {s}; \
         use the real-axis limits (level shift and spectral density) instead"
    )]
    BranchCut { s: Complex64 },

    /// The time-domain solution left the physical region |u| <= 1.
    #[error("solver instability: |u| = {norm} at step {step} (t = {t})")]
    SolverInstability { step: usize, t: f64, norm: f64 },

    /// An internal consistency check failed (e.g. an imaginary residue that
    /// should vanish identically).
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge near x = {worst}: residual error {err:.3e}")]
    Quadrature { worst: f64, err: f64 },

    /// The Fock-space truncation is too small for the requested state.
    #[error("Fock truncation too small: {0}")]
    Truncation(String),

    /// The master-equation coefficients are singular inside the requested
    /// propagation window.
    #[error("coefficients singular at t = {t} (step {step}): |u| < {threshold}")]
    SingularWindow { step: usize, t: f64, threshold: f64 },

    /// A scenario file could not be parsed or failed validation.
    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable kind tag, used by the CLI error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::BranchCut { .. } => "branch_cut",
            Error::SolverInstability { .. } => "solver_instability",
            Error::Consistency(_) => "consistency",
            Error::Quadrature { .. } => "quadrature",
            Error::Truncation(_) => "truncation",
            Error::SingularWindow { .. } => "singular_window",
            Error::Scenario(_) => "scenario",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
