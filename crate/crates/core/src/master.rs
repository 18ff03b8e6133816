//! Time-local master equation and its Fock-space oracle.
//!
//! The reduced state of the mode obeys an exact time-local master equation
//! whose coefficients follow from the Green function u(t) and the noise
//! integral v(t):
//!
//! ```text
//! ω'(t) = -Im[u̇/u]        (dressed frequency)
//! γ(t)  = -Re[u̇/u]        (dissipation rate; negative during backflow)
//! γ̃(t)  = v̇ + 2 v γ       (noise/heating rate)
//! ```
//!
//! ρ̇ = -iω'[a†a, ρ] + γ(2aρa† - a†aρ - ρa†a) + γ̃(aρa† + a†ρa - a†aρ - ρaa†).
//!
//! The coefficients blow up at zeros of u; samples with |u| below
//! [`SINGULAR_U_THRESHOLD`] are flagged and the propagator refuses windows
//! containing them. The Fock-basis propagator here exists to cross-check the
//! closed-form phase-space results through an entirely different pipeline:
//! numerically-derived coefficients, RK4 in a truncated number basis, and a
//! displaced-parity Wigner transform.

use num_complex::Complex64;

use crate::greenfn::{
    udot, vdot, EvolutionProblem, FluctuationTrajectory, GreenTrajectory, TimeGrid,
};
use crate::spectral::KernelTable;
use crate::{Error, Result};

/// Coefficient samples with |u| below this are flagged singular.
pub const SINGULAR_U_THRESHOLD: f64 = 0.05;

/// Hermiticity residual allowed by [`FockDensityMatrix::check_physical`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace-preservation residual allowed by the physicality check.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalue floor allowed by the physicality check.
pub const EIGENVALUE_FLOOR: f64 = -1e-8;

/// Master-equation coefficients sampled on the solver grid.
#[derive(Debug, Clone)]
pub struct CoefficientTrajectory {
    pub grid: TimeGrid,
    pub omega_prime: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_tilde: Vec<f64>,
    /// True where |u| < [`SINGULAR_U_THRESHOLD`]: the time-local form is
    /// unreliable there and the values are kept only for inspection.
    pub singular: Vec<bool>,
}

impl CoefficientTrajectory {
    /// First singular sample at or before index `k`, if any.
    pub fn first_singular_upto(&self, k: usize) -> Option<usize> {
        self.singular[..=k.min(self.singular.len() - 1)]
            .iter()
            .position(|&s| s)
    }
}

/// Derive ω'(t), γ(t), γ̃(t) from solved trajectories.
///
/// u̇ and v̇ come from the equations of motion evaluated on the stored
/// samples (not from finite differences), so the coefficients carry the
/// solver's own accuracy.
pub fn coefficients(
    problem: &EvolutionProblem,
    kernels: &KernelTable,
    usol: &GreenTrajectory,
    vsol: &FluctuationTrajectory,
) -> Result<CoefficientTrajectory> {
    let grid = problem.grid;
    if usol.grid != grid || vsol.grid != grid {
        return Err(Error::Domain(
            "coefficient derivation needs u and v on the problem grid".into(),
        ));
    }
    let n = grid.n;
    let mut omega_prime = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut gamma_tilde = Vec::with_capacity(n);
    let mut singular = Vec::with_capacity(n);
    for k in 0..n {
        let u = usol.u[k];
        let flag = u.norm() < SINGULAR_U_THRESHOLD;
        singular.push(flag);
        if u.norm() == 0.0 {
            // Exact zero: the ratio is undefined; store placeholders on a
            // sample that is flagged anyway.
            omega_prime.push(0.0);
            gamma.push(0.0);
            gamma_tilde.push(vdot(kernels, usol, k));
            continue;
        }
        let ratio = udot(problem, kernels, usol, k) / u;
        let om = -ratio.im;
        let ga = -ratio.re;
        omega_prime.push(om);
        gamma.push(ga);
        gamma_tilde.push(vdot(kernels, usol, k) + 2.0 * vsol.v[k] * ga);
    }
    Ok(CoefficientTrajectory {
        grid,
        omega_prime,
        gamma,
        gamma_tilde,
        singular,
    })
}

/// Density matrix in the truncated number basis {|0⟩, ..., |dim-1⟩},
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl FockDensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        self.data[m * self.dim + n]
    }

    /// Population of level n.
    pub fn occupation(&self, n: usize) -> f64 {
        self.element(n, n).re
    }

    /// ρ = |ψ⟩⟨ψ| from state amplitudes, normalized.
    pub fn from_pure(amps: &[Complex64]) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 {
            return Err(Error::Domain("empty state vector".into()));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::Domain("state vector has zero norm".into()));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for m in 0..dim {
            for n in 0..dim {
                data[m * dim + n] = amps[m] * amps[n].conj() / norm_sq;
            }
        }
        Ok(FockDensityMatrix { dim, data })
    }

    /// The number state |n⟩.
    pub fn fock_state(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::Truncation(format!(
                "|{n}⟩ does not fit in a dimension-{dim} basis"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[n] = Complex64::new(1.0, 0.0);
        Self::from_pure(&amps)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|m| self.element(m, m)).sum()
    }

    /// max |ρ_mn - ρ_nm*|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in 0..self.dim {
            for n in 0..=m {
                worst = worst.max((self.element(m, n) - self.element(n, m).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue, via the real symmetric embedding
    /// [[Re ρ, -Im ρ], [Im ρ, Re ρ]] whose spectrum is that of ρ doubled.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim;
        let mut m = nalgebra::DMatrix::<f64>::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.element(i, j);
                m[(i, j)] = z.re;
                m[(i + d, j + d)] = z.re;
                m[(i, j + d)] = -z.im;
                m[(i + d, j)] = z.im;
            }
        }
        let eig = m.symmetric_eigen();
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Tr[ρ a†a].
    pub fn mean_number(&self) -> f64 {
        (0..self.dim).map(|m| m as f64 * self.occupation(m)).sum()
    }

    /// Verify the physicality invariants: Hermitian, unit trace, positive
    /// semidefinite (within the module tolerances).
    pub fn check_physical(&self) -> Result<()> {
        let herm = self.hermiticity_residual();
        if herm > HERMITICITY_TOL {
            return Err(Error::Consistency(format!(
                "density matrix not Hermitian: residual {herm:.3e}"
            )));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Consistency(format!(
                "density matrix trace drifted to {tr}"
            )));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::Consistency(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(())
    }

    fn symmetrize(&mut self) {
        for m in 0..self.dim {
            for n in 0..m {
                let avg = 0.5 * (self.element(m, n) + self.element(n, m).conj());
                self.data[m * self.dim + n] = avg;
                self.data[n * self.dim + m] = avg.conj();
            }
            let d = m * self.dim + m;
            self.data[d] = Complex64::new(self.data[d].re, 0.0);
        }
    }
}

/// Fock amplitudes ⟨n|β⟩ of the coherent state |β⟩ in a truncated basis.
pub fn coherent_amplitudes(beta: Complex64, dim: usize) -> Vec<Complex64> {
    let mut amps = Vec::with_capacity(dim);
    let mut term = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    amps.push(term);
    for n in 1..dim {
        term *= beta / (n as f64).sqrt();
        amps.push(term);
    }
    amps
}

/// Fock amplitudes of an unnormalized superposition Σ_m c_m |β_m⟩.
pub fn superposition_amplitudes(terms: &[(Complex64, Complex64)], dim: usize) -> Vec<Complex64> {
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for &(c, beta) in terms {
        for (a, coh) in amps.iter_mut().zip(coherent_amplitudes(beta, dim)) {
            *a += c * coh;
        }
    }
    amps
}

/// Apply the master-equation generator once.
///
/// Operator products are index arithmetic on the truncated basis; the
/// truncated weight of ρaa† (zero in the top level, where a† leaves the
/// basis) makes the generator exactly trace-free at any dimension.
fn apply_generator(
    dim: usize,
    rho: &[Complex64],
    omega_prime: f64,
    gamma: f64,
    gamma_tilde: f64,
    out: &mut [Complex64],
) {
    let idx = |m: usize, n: usize| m * dim + n;
    for m in 0..dim {
        for n in 0..dim {
            let r = rho[idx(m, n)];
            // -iω'[a†a, ρ]
            let mut acc = Complex64::new(0.0, -omega_prime * (m as f64 - n as f64)) * r;
            // Shared lowering term (aρa†)_{mn} = √((m+1)(n+1)) ρ_{m+1,n+1}.
            let lower = if m + 1 < dim && n + 1 < dim {
                (((m + 1) * (n + 1)) as f64).sqrt() * rho[idx(m + 1, n + 1)]
            } else {
                Complex64::new(0.0, 0.0)
            };
            // γ (2aρa† - a†aρ - ρa†a)
            acc += gamma * (2.0 * lower - ((m + n) as f64) * r);
            if gamma_tilde != 0.0 {
                // (a†ρa)_{mn} = √(mn) ρ_{m-1,n-1}
                let raise = if m >= 1 && n >= 1 {
                    ((m * n) as f64).sqrt() * rho[idx(m - 1, n - 1)]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                // Truncated (ρ a a†) weight: n+1 except in the top level.
                let w_n = if n + 1 < dim { (n + 1) as f64 } else { 0.0 };
                acc += gamma_tilde * (lower + raise - (m as f64) * r - w_n * r);
            }
            out[idx(m, n)] = acc;
        }
    }
}

/// Propagate an initial state through the master equation, returning the
/// density matrix at each requested grid index (ascending).
///
/// RK4 over each grid step with linearly interpolated coefficients; the state
/// is re-Hermitized after each step (the generator preserves Hermiticity, so
/// this only removes rounding drift). Refuses windows containing singular
/// coefficient samples, and initial states that do not fit the truncation
/// (visible population within five levels of the top).
pub fn propagate_fock(
    coeffs: &CoefficientTrajectory,
    rho0: &FockDensityMatrix,
    snapshots: &[usize],
) -> Result<Vec<FockDensityMatrix>> {
    let n = coeffs.grid.n;
    let Some(&last) = snapshots.last() else {
        return Ok(Vec::new());
    };
    if !snapshots.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain("snapshot indices must ascend".into()));
    }
    if last >= n {
        return Err(Error::Domain(format!(
            "snapshot index {last} beyond the coefficient grid ({n} samples)"
        )));
    }
    if let Some(k) = coeffs.first_singular_upto(last) {
        return Err(Error::SingularWindow {
            step: k,
            t: coeffs.grid.time(k),
            threshold: SINGULAR_U_THRESHOLD,
        });
    }
    let dim = rho0.dim;
    let guard = dim.saturating_sub(5);
    let top: f64 = (guard..dim).map(|m| rho0.occupation(m)).sum();
    if top > 1e-8 {
        return Err(Error::Truncation(format!(
            "initial state holds population {top:.3e} in the top five levels; \
             enlarge the basis"
        )));
    }

    let dt = coeffs.grid.dt;
    let mut rho = rho0.clone();
    let mut out = Vec::with_capacity(snapshots.len());
    let mut next = 0;
    if snapshots[0] == 0 {
        out.push(rho.clone());
        next = 1;
    }
    let size = dim * dim;
    let mut k1 = vec![Complex64::new(0.0, 0.0); size];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut stage = k1.clone();

    for k in 0..last {
        let (om0, ga0, gt0) = (coeffs.omega_prime[k], coeffs.gamma[k], coeffs.gamma_tilde[k]);
        let (om1, ga1, gt1) = (
            coeffs.omega_prime[k + 1],
            coeffs.gamma[k + 1],
            coeffs.gamma_tilde[k + 1],
        );
        let (omh, gah, gth) = (
            0.5 * (om0 + om1),
            0.5 * (ga0 + ga1),
            0.5 * (gt0 + gt1),
        );

        apply_generator(dim, &rho.data, om0, ga0, gt0, &mut k1);
        for i in 0..size {
            stage[i] = rho.data[i] + 0.5 * dt * k1[i];
        }
        apply_generator(dim, &stage, omh, gah, gth, &mut k2);
        for i in 0..size {
            stage[i] = rho.data[i] + 0.5 * dt * k2[i];
        }
        apply_generator(dim, &stage, omh, gah, gth, &mut k3);
        for i in 0..size {
            stage[i] = rho.data[i] + dt * k3[i];
        }
        apply_generator(dim, &stage, om1, ga1, gt1, &mut k4);
        for i in 0..size {
            rho.data[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        rho.symmetrize();

        if next < snapshots.len() && snapshots[next] == k + 1 {
            out.push(rho.clone());
            next += 1;
        }
    }
    Ok(out)
}

/// Wigner function of a Fock-basis density matrix at the phase-space point z:
/// W(z) = (2/π) Σ_n (-1)^n ⟨n| D†(z) ρ D(z) |n⟩.
///
/// The displacement matrix columns follow the stable recurrence
/// D_{m,0} = e^{-|z|²/2} z^m/√(m!),
/// D_{m,n+1} = [√m D_{m-1,n} - z̄ D_{m,n}] / √(n+1),
/// whose entries are bounded by unitarity (no large intermediates).
pub fn wigner_from_density(rho: &FockDensityMatrix, z: Complex64) -> f64 {
    let dim = rho.dim;
    let mut col: Vec<Complex64> = coherent_amplitudes(z, dim);
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    let mut acc = 0.0;
    let mut sign = 1.0;
    for n in 0..dim {
        // ⟨n|D†ρD|n⟩ = col† ρ col with col = D[:, n].
        let mut quad = Complex64::new(0.0, 0.0);
        for m in 0..dim {
            let mut row = Complex64::new(0.0, 0.0);
            for mp in 0..dim {
                row += rho.element(m, mp) * col[mp];
            }
            quad += col[m].conj() * row;
        }
        acc += sign * quad.re;
        sign = -sign;
        if n + 1 < dim {
            for m in 0..dim {
                let from_below = if m >= 1 {
                    (m as f64).sqrt() * col[m - 1]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                next[m] = (from_below - z.conj() * col[m]) / ((n + 1) as f64).sqrt();
            }
            std::mem::swap(&mut col, &mut next);
        }
    }
    acc * 2.0 / std::f64::consts::PI
}
