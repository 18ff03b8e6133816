//! C ABI for the nonmarkov library.
//!
//! Conventions:
//!
//! - Every fallible call returns an [`NmStatus`]; results are written through
//!   out-pointers only when the status is `NM_STATUS_OK`.
//! - Handles (`NmModel`, `NmSolution`) are opaque; create them with the
//!   `*_new`/solver calls and release them with the matching `*_free`. A
//!   null handle argument yields `NM_STATUS_NULL_POINTER`, never a crash.
//! - Strings returned by the library are NUL-terminated, UTF-8, and owned by
//!   the caller; release them with [`nm_string_free`].
//! - Panics never unwind across the boundary; they surface as
//!   `NM_STATUS_PANIC`.

use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use nonmarkov::greenfn::{solve_u, solve_v, EvolutionProblem, TimeGrid};
use nonmarkov::laplace::critical_coupling;
use nonmarkov::spectral::{BathSpec, SpectralModel};
use nonmarkov::wigner::{fringe_visibility, thermal_wigner};
use nonmarkov::Error;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmStatus {
    Ok = 0,
    /// A parameter lies outside the domain of the operation.
    Domain = 1,
    /// The self-energy was evaluated exactly on its branch cut.
    BranchCut = 2,
    /// The time-domain solution left the physical region.
    SolverInstability = 3,
    /// An internal consistency check failed.
    Consistency = 4,
    /// Adaptive quadrature did not converge.
    Quadrature = 5,
    /// A Fock-space truncation was too small.
    Truncation = 6,
    /// Master-equation coefficients are singular in the window.
    SingularWindow = 7,
    /// A scenario failed to parse or validate.
    Scenario = 8,
    /// An I/O operation failed.
    Io = 9,
    /// A required pointer argument was null.
    NullPointer = 10,
    /// A panic was caught at the boundary.
    Panic = 11,
}

fn status_of(e: &Error) -> NmStatus {
    match e {
        Error::Domain(_) => NmStatus::Domain,
        Error::BranchCut { .. } => NmStatus::BranchCut,
        Error::SolverInstability { .. } => NmStatus::SolverInstability,
        Error::Consistency(_) => NmStatus::Consistency,
        Error::Quadrature { .. } => NmStatus::Quadrature,
        Error::Truncation(_) => NmStatus::Truncation,
        Error::SingularWindow { .. } => NmStatus::SingularWindow,
        Error::Scenario(_) => NmStatus::Scenario,
        Error::Io(_) => NmStatus::Io,
    }
}

/// Run a fallible body under a panic guard, writing its value through `out`.
fn guarded<T, F>(out: *mut T, body: F) -> NmStatus
where
    F: FnOnce() -> Result<T, Error>,
{
    if out.is_null() {
        return NmStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(value)) => {
            // SAFETY: `out` was checked non-null; the caller guarantees it
            // points to writable storage for T (see each function's contract).
            unsafe { out.write(value) };
            NmStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => NmStatus::Panic,
    }
}

/// An opaque reservoir spectral-density model.
pub struct NmModel {
    inner: SpectralModel,
}

/// An opaque solved trajectory: u(t) and v(t) on a uniform grid.
pub struct NmSolution {
    grid: TimeGrid,
    u: Vec<Complex64>,
    v: Vec<f64>,
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn nm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Create a finite-band waveguide reservoir model J(ω) = η²√(4ξ₀² − (ω−ω₀)²).
///
/// # Safety
/// `out` must point to writable storage for one `NmModel*`. On `NM_STATUS_OK`
/// the caller owns the handle and must release it with [`nm_model_free`].
#[no_mangle]
pub unsafe extern "C" fn nm_model_waveguide_new(
    eta: f64,
    omega0: f64,
    xi0: f64,
    out: *mut *mut NmModel,
) -> NmStatus {
    guarded(out, || {
        let inner = SpectralModel::waveguide(eta, omega0, xi0)?;
        Ok(Box::into_raw(Box::new(NmModel { inner })))
    })
}

/// Create an ohmic-family reservoir model with exponential cutoff.
///
/// # Safety
/// `out` must point to writable storage for one `NmModel*`. On `NM_STATUS_OK`
/// the caller owns the handle and must release it with [`nm_model_free`].
#[no_mangle]
pub unsafe extern "C" fn nm_model_ohmic_new(
    kappa: f64,
    omega_cut: f64,
    exponent: f64,
    out: *mut *mut NmModel,
) -> NmStatus {
    guarded(out, || {
        let inner = SpectralModel::ohmic_family(kappa, omega_cut, exponent)?;
        Ok(Box::into_raw(Box::new(NmModel { inner })))
    })
}

/// Release a model handle. A null pointer is a no-op.
///
/// # Safety
/// `model` must be a handle from a `nm_model_*_new` call that has not been
/// freed already.
#[no_mangle]
pub unsafe extern "C" fn nm_model_free(model: *mut NmModel) {
    if !model.is_null() {
        // SAFETY: per the contract, `model` came from Box::into_raw and is
        // freed at most once.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Solve the Green function u(t) and noise integral v(t) for a mode of
/// frequency `omega_c` coupled to the reservoir at temperature `theta`
/// (θ = 0 is the vacuum), on a uniform grid of step `dt` out to `horizon`.
///
/// # Safety
/// `model` must be a live model handle; `out` must point to writable storage
/// for one `NmSolution*`. On `NM_STATUS_OK` the caller owns the solution and
/// must release it with [`nm_solution_free`].
#[no_mangle]
pub unsafe extern "C" fn nm_solve_green(
    model: *const NmModel,
    omega_c: f64,
    theta: f64,
    dt: f64,
    horizon: f64,
    out: *mut *mut NmSolution,
) -> NmStatus {
    if model.is_null() {
        return NmStatus::NullPointer;
    }
    // SAFETY: non-null, and the contract requires a live handle.
    let model = unsafe { &*model };
    guarded(out, || {
        let bath = BathSpec::new(theta)?;
        let grid = TimeGrid::from_horizon(dt, horizon)?;
        let problem = EvolutionProblem::new(model.inner.clone(), bath, omega_c, grid)?;
        let kernels = problem.kernel_table()?;
        let usol = solve_u(&problem, &kernels)?;
        let vsol = solve_v(&problem, &kernels, &usol)?;
        Ok(Box::into_raw(Box::new(NmSolution {
            grid,
            u: usol.u,
            v: vsol.v,
        })))
    })
}

/// Number of samples in a solution; 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn nm_solution_len(sol: *const NmSolution) -> usize {
    if sol.is_null() {
        return 0;
    }
    // SAFETY: non-null, and the contract requires a live handle.
    unsafe { &*sol }.u.len()
}

/// Grid step of a solution; 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn nm_solution_dt(sol: *const NmSolution) -> f64 {
    if sol.is_null() {
        return 0.0;
    }
    // SAFETY: non-null, and the contract requires a live handle.
    unsafe { &*sol }.grid.dt
}

/// Read sample `k` of a solution: u(t_k) into (`u_re`, `u_im`) and v(t_k)
/// into `v`. `NM_STATUS_DOMAIN` if `k` is out of range.
///
/// # Safety
/// `sol` must be a live solution handle; `u_re`, `u_im`, and `v` must each
/// point to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn nm_solution_sample(
    sol: *const NmSolution,
    k: usize,
    u_re: *mut f64,
    u_im: *mut f64,
    v: *mut f64,
) -> NmStatus {
    if sol.is_null() || u_re.is_null() || u_im.is_null() || v.is_null() {
        return NmStatus::NullPointer;
    }
    // SAFETY: non-null, and the contract requires a live handle.
    let sol = unsafe { &*sol };
    if k >= sol.u.len() {
        return NmStatus::Domain;
    }
    // SAFETY: all out-pointers were checked non-null and point to doubles.
    unsafe {
        u_re.write(sol.u[k].re);
        u_im.write(sol.u[k].im);
        v.write(sol.v[k]);
    }
    NmStatus::Ok
}

/// Release a solution handle. A null pointer is a no-op.
///
/// # Safety
/// `sol` must be a handle from [`nm_solve_green`] that has not been freed
/// already.
#[no_mangle]
pub unsafe extern "C" fn nm_solution_free(sol: *mut NmSolution) {
    if !sol.is_null() {
        // SAFETY: per the contract, `sol` came from Box::into_raw and is
        // freed at most once.
        drop(unsafe { Box::from_raw(sol) });
    }
}

/// Bound-pole analysis of the mode as a JSON report (band, bound poles with
/// residues, critical coupling where defined, continuum weight, sum-rule
/// residual).
///
/// # Safety
/// `model` must be a live model handle; `out` must point to writable storage
/// for one `char*`. On `NM_STATUS_OK` the caller owns the string and must
/// release it with [`nm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nm_pole_report_json(
    model: *const NmModel,
    omega_c: f64,
    out: *mut *mut c_char,
) -> NmStatus {
    if model.is_null() {
        return NmStatus::NullPointer;
    }
    // SAFETY: non-null, and the contract requires a live handle.
    let model = unsafe { &*model };
    guarded(out, || {
        let value = nonmarkov::cli::pole_report_json(&model.inner, omega_c)?;
        let text = serde_json::to_string_pretty(&value)
            .map_err(|e| Error::Consistency(format!("JSON serialization failed: {e}")))?;
        let cstr = CString::new(text)
            .map_err(|e| Error::Consistency(format!("JSON contained NUL: {e}")))?;
        Ok(cstr.into_raw())
    })
}

/// Fringe visibility F = exp{-2|α|²(1 - |u|²/(1 + 2v))} of an evolved cat
/// state with amplitude α at Green function u and noise v.
///
/// # Safety
/// `out` must point to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn nm_fringe_visibility(
    alpha_re: f64,
    alpha_im: f64,
    u_re: f64,
    u_im: f64,
    v: f64,
    out: *mut f64,
) -> NmStatus {
    guarded(out, || {
        fringe_visibility(
            Complex64::new(alpha_re, alpha_im),
            Complex64::new(u_re, u_im),
            v,
        )
    })
}

/// Thermal-state Wigner function (2/π)(1 + 2n̄)⁻¹ e^{-2|z|²/(1+2n̄)} at
/// z = z_re + i·z_im.
///
/// # Safety
/// `out` must point to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn nm_thermal_wigner(
    z_re: f64,
    z_im: f64,
    nbar: f64,
    out: *mut f64,
) -> NmStatus {
    guarded(out, || thermal_wigner(Complex64::new(z_re, z_im), nbar))
}

/// Critical waveguide coupling η_c = √(2 - |ω_c - ω₀|/ξ₀) below which no
/// bound poles exist. `NM_STATUS_DOMAIN` if the mode is outside the band.
///
/// # Safety
/// `out` must point to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn nm_critical_coupling(
    omega_c: f64,
    omega0: f64,
    xi0: f64,
    out: *mut f64,
) -> NmStatus {
    guarded(out, || critical_coupling(omega_c, omega0, xi0))
}

/// Release a string returned by this library. A null pointer is a no-op.
///
/// # Safety
/// `s` must be a string from this library that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn nm_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: per the contract, `s` came from CString::into_raw and is
        // freed at most once.
        drop(unsafe { CString::from_raw(s) });
    }
}
