//! Time-domain dynamics of the mode: the retarded Green function u(t) and
//! the noise integral v(t).
//!
//! u obeys the Volterra integro-differential equation
//!
//! ```text
//! u̇(t) + i ω_c u(t) + ∫₀ᵗ g(t-τ) u(τ) dτ = 0,    u(0) = 1,
//! ```
//!
//! discretized with a trapezoidal memory integral and a one-step Heun
//! predictor–corrector (second order overall). The stiff carrier e^{-iω_c t}
//! is removed exactly by integrating the substituted variable
//! w(t) = e^{+iω_c t} u(t), whose memory kernel is g(τ) e^{+iω_c τ}; this is
//! the same scheme applied to an identical equation, with error constants set
//! by the band width rather than by ω_c.
//!
//! v is the double memory integral
//!
//! ```text
//! v(t) = ∫₀ᵗ dτ₁ ∫₀ᵗ dτ₂ · u*(τ₁) g̃(τ₁-τ₂) u(τ₂),
//! ```
//!
//! evaluated by a trapezoidal double sum updated incrementally: growing the
//! grid by one sample adds an L-shaped boundary strip, O(n) per step and
//! O(n²) overall. The sum is assembled in complex arithmetic and its
//! imaginary part — zero for a Hermitian g̃ — is a consistency residual that
//! is checked and then discarded.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{BathSpec, KernelTable, SpectralModel};
use crate::{Error, Result};

/// |u| may not exceed 1 + this before the solver refuses to continue.
const DIVERGENCE_TOL: f64 = 1e-3;
/// The reconstructed v must be real to this absolute residual.
const V_IMAG_TOL: f64 = 1e-8;

/// Uniform time grid t_k = k·dt, k = 0..n (n samples including t = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Origin of the grid; the dynamics always start at 0.
    pub t0: f64,
    /// Step, > 0.
    pub dt: f64,
    /// Number of samples, >= 1 (n = 1 is just the initial condition).
    pub n: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("grid step must be > 0, got {dt}")));
        }
        if n < 1 {
            return Err(Error::Domain("grid needs at least one sample".into()));
        }
        Ok(TimeGrid { t0: 0.0, dt, n })
    }

    /// Grid covering [0, horizon] with the given step (horizon rounded to the
    /// nearest whole step).
    pub fn from_horizon(dt: f64, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon must be > 0, got {horizon}")));
        }
        let steps = (horizon / dt).round() as usize;
        TimeGrid::new(dt, steps.max(1) + 1)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn last_time(&self) -> f64 {
        self.time(self.n - 1)
    }

    /// Index of the grid sample closest to t.
    pub fn nearest_index(&self, t: f64) -> usize {
        ((t / self.dt).round() as isize).clamp(0, self.n as isize - 1) as usize
    }
}

/// The mode coupled to a reservoir: everything the time-domain solvers need.
#[derive(Debug, Clone)]
pub struct EvolutionProblem {
    pub model: SpectralModel,
    pub bath: BathSpec,
    /// Bare mode frequency ω_c.
    pub omega_c: f64,
    pub grid: TimeGrid,
}

impl EvolutionProblem {
    pub fn new(model: SpectralModel, bath: BathSpec, omega_c: f64, grid: TimeGrid) -> Result<Self> {
        if !omega_c.is_finite() {
            return Err(Error::Domain(format!("mode frequency must be finite, got {omega_c}")));
        }
        Ok(EvolutionProblem {
            model,
            bath,
            omega_c,
            grid,
        })
    }

    /// Tabulate the correlation kernels on this problem's grid.
    pub fn kernel_table(&self) -> Result<KernelTable> {
        KernelTable::build(&self.model, &self.bath, self.grid.dt, self.grid.n)
    }
}

/// Solution samples of the Green function, u[k] = u(k·dt), u[0] = 1.
#[derive(Debug, Clone)]
pub struct GreenTrajectory {
    pub grid: TimeGrid,
    pub u: Vec<Complex64>,
}

impl GreenTrajectory {
    pub fn abs(&self, k: usize) -> f64 {
        self.u[k].norm()
    }
}

/// Solution samples of the noise integral, v[k] = v(k·dt) >= 0, v[0] = 0.
#[derive(Debug, Clone)]
pub struct FluctuationTrajectory {
    pub grid: TimeGrid,
    pub v: Vec<f64>,
}

fn check_kernels(grid: &TimeGrid, kernels: &KernelTable) -> Result<()> {
    if kernels.dt() != grid.dt {
        return Err(Error::Domain(format!(
            "kernel table step {} does not match grid step {}",
            kernels.dt(),
            grid.dt
        )));
    }
    if kernels.len() < grid.n {
        return Err(Error::Domain(format!(
            "kernel table covers {} lags but the grid has {} samples",
            kernels.len(),
            grid.n
        )));
    }
    Ok(())
}

/// Solve for u(t) on the problem's grid.
pub fn solve_u(problem: &EvolutionProblem, kernels: &KernelTable) -> Result<GreenTrajectory> {
    let grid = problem.grid;
    check_kernels(&grid, kernels)?;
    let n = grid.n;
    let dt = grid.dt;

    // Kernel of the carrier-free variable w(t) = e^{+iω_c t} u(t).
    let rot: Vec<Complex64> = (0..n)
        .map(|k| kernels.g(k) * Complex64::from_polar(1.0, problem.omega_c * grid.time(k)))
        .collect();

    let mut w = vec![Complex64::new(0.0, 0.0); n];
    w[0] = Complex64::new(1.0, 0.0);

    // Trapezoidal memory integral at t_k with the final sample replaced:
    // M(k, last) = dt·(½ g_k w_0 + Σ_{j=1}^{k-1} g_{k-j} w_j + ½ g_0 last).
    let memory = |k: usize, hist: &[Complex64], last: Complex64| -> Complex64 {
        if k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = 0.5 * (rot[k] * hist[0] + rot[0] * last);
        for j in 1..k {
            acc += rot[k - j] * hist[j];
        }
        acc * dt
    };

    for k in 0..n - 1 {
        let fk = -memory(k, &w, w[k]);
        let predictor = w[k] + dt * fk;
        let fp = -memory(k + 1, &w, predictor);
        let next = w[k] + 0.5 * dt * (fk + fp);
        let norm = next.norm();
        if norm > 1.0 + DIVERGENCE_TOL {
            return Err(Error::SolverInstability {
                step: k + 1,
                t: grid.time(k + 1),
                norm,
            });
        }
        w[k + 1] = next;
    }

    let u = (0..n)
        .map(|k| w[k] * Complex64::from_polar(1.0, -problem.omega_c * grid.time(k)))
        .collect();
    Ok(GreenTrajectory { grid, u })
}

/// Solve for v(t) on the grid of an existing u trajectory.
pub fn solve_v(
    problem: &EvolutionProblem,
    kernels: &KernelTable,
    sol: &GreenTrajectory,
) -> Result<FluctuationTrajectory> {
    let grid = problem.grid;
    check_kernels(&grid, kernels)?;
    if sol.grid != grid {
        return Err(Error::Domain("u trajectory grid does not match the problem grid".into()));
    }
    let n = grid.n;
    let dt = grid.dt;
    let mut v = vec![0.0; n];
    if !kernels.has_thermal() || n < 2 {
        // Vacuum bath: v ≡ 0 exactly.
        return Ok(FluctuationTrajectory { grid, v });
    }

    let u = &sol.u;
    let q = |i: usize, j: usize| u[i].conj() * kernels.gtilde_diff(i, j) * u[j];
    let dt2 = dt * dt;

    // Trapezoid-weighted double sum T_k over [0..k]²; the complex value is
    // carried so the imaginary residual stays observable.
    let mut t_acc = 0.25 * (q(0, 0) + q(0, 1) + q(1, 0) + q(1, 1));
    v[1] = store_v(t_acc * dt2, 1, &grid)?;

    // Trapezoid coefficient on the grid [0..m]: ½ at both ends, 1 inside.
    let coeff = |idx: usize, m: usize| if idx == 0 || idx == m { 0.5 } else { 1.0 };

    for k in 2..n {
        let m = k - 1;
        // Promote index m from boundary to interior weight...
        let mut row = Complex64::new(0.0, 0.0); // Σ_j c_j q(m, j)
        let mut col = Complex64::new(0.0, 0.0); // Σ_i c_i q(i, m)
        for j in 0..=m {
            let c = coeff(j, m);
            row += c * q(m, j);
            col += c * q(j, m);
        }
        t_acc += 0.5 * (row + col) + 0.25 * q(m, m);
        // ...then append the k-th row, column, and corner at boundary weight.
        let mut new_row = Complex64::new(0.0, 0.0); // Σ_j ĉ_j q(k, j)
        let mut new_col = Complex64::new(0.0, 0.0); // Σ_i ĉ_i q(i, k)
        for j in 0..=m {
            let c = if j == 0 { 0.5 } else { 1.0 };
            new_row += c * q(k, j);
            new_col += c * q(j, k);
        }
        t_acc += 0.5 * (new_row + new_col) + 0.25 * q(k, k);
        v[k] = store_v(t_acc * dt2, k, &grid)?;
    }

    Ok(FluctuationTrajectory { grid, v })
}

fn store_v(value: Complex64, k: usize, grid: &TimeGrid) -> Result<f64> {
    if value.im.abs() > V_IMAG_TOL {
        return Err(Error::Consistency(format!(
            "v({}) has imaginary residue {:.3e} (kernel not Hermitian?)",
            grid.time(k),
            value.im
        )));
    }
    Ok(value.re)
}

/// u̇(t_k) from the equation of motion evaluated on the stored samples:
/// u̇ = -i ω_c u(t_k) - ∫₀^{t_k} g(t_k - τ) u(τ) dτ (trapezoidal).
pub fn udot(
    problem: &EvolutionProblem,
    kernels: &KernelTable,
    sol: &GreenTrajectory,
    k: usize,
) -> Complex64 {
    let u = &sol.u;
    let mut mem = Complex64::new(0.0, 0.0);
    if k >= 1 {
        mem = 0.5 * (kernels.g(k) * u[0] + kernels.g(0) * u[k]);
        for j in 1..k {
            mem += kernels.g(k - j) * u[j];
        }
        mem *= problem.grid.dt;
    }
    -Complex64::i() * problem.omega_c * u[k] - mem
}

/// v̇(t_k) from the boundary-derivative identity
/// v̇ = 2 Re[ u*(t_k) ∫₀^{t_k} g̃(t_k - τ) u(τ) dτ ] (trapezoidal).
pub fn vdot(kernels: &KernelTable, sol: &GreenTrajectory, k: usize) -> f64 {
    if k == 0 || !kernels.has_thermal() {
        return 0.0;
    }
    let u = &sol.u;
    let mut mem = 0.5 * (kernels.gtilde(k) * u[0] + kernels.gtilde(0) * u[k]);
    for j in 1..k {
        mem += kernels.gtilde(k - j) * u[j];
    }
    mem *= sol.grid.dt;
    2.0 * (u[k].conj() * mem).re
}
