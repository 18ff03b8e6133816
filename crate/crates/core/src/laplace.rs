//! Frequency-domain analysis of the mode Green function.
//!
//! The Laplace transform of u is ũ(s) = [s + iω_c - i Σ(s)]⁻¹ with the
//! self-energy
//!
//! ```text
//! Σ(s) = ∫ dω/2π · J(ω) / (i s - ω),
//! ```
//!
//! analytic off the cut s = -iω, ω ∈ supp J, and vanishing at large |s|.
//! Approaching the cut from the right half-plane, Σ(-iω + 0⁺) = Δ(ω) - i J(ω)/2,
//! where Δ is the principal-value level shift
//!
//! ```text
//! Δ(ω) = P∫ dω'/2π · J(ω') / (ω - ω').
//! ```
//!
//! Real poles of ũ on the first sheet sit outside the band and obey
//! Ω - ω_c = Δ(Ω); each contributes a non-decaying term Z e^{-iΩt} to u with
//! residue Z = [1 - Δ'(Ω)]⁻¹. The rest of u is a band integral over the
//! continuum spectral function
//!
//! ```text
//! ρ_c(ω) = J(ω) / [ (ω - ω_c - Δ(ω))² + (J(ω)/2)² ],
//! ```
//!
//! so that u(t) = Σ_j Z_j e^{-iΩ_j t} + ∫ dω/2π · ρ_c(ω) e^{-iωt}, with the
//! sum rule Σ_j Z_j + ∫ dω/2π · ρ_c(ω) = u(0) = 1. This reconstruction is an
//! independent cross-check of the time-domain Volterra solution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::greenfn::{GreenTrajectory, TimeGrid};
use crate::quad::{self, QuadConfig};
use crate::spectral::SpectralModel;
use crate::{Error, Result};

/// A pole this close to a band edge (in units of the band quarter-width) is
/// flagged marginal and excluded from reconstruction.
const MARGINAL_EDGE_TOL: f64 = 1e-9;
/// Bisection tolerance for pole locations, in band quarter-widths.
const POLE_TOL: f64 = 1e-12;

/// One real first-sheet pole of ũ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPole {
    /// Pole frequency Ω.
    pub omega: f64,
    /// Residue Z ∈ (0, 1).
    pub residue: f64,
    /// True when the pole sits within tolerance of a band edge; such poles
    /// are reported but not used for reconstruction.
    pub marginal: bool,
}

/// Pole structure of the mode: the complete frequency-domain summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleReport {
    /// Bound poles in ascending frequency order.
    pub bound_poles: Vec<BoundPole>,
    /// Support of the spectral density.
    pub band: (f64, f64),
    /// Threshold coupling for bound-pole formation (waveguide model with the
    /// mode inside the band; absent otherwise).
    pub critical_coupling: Option<f64>,
    /// ∫ dω/2π · ρ_c(ω): the spectral weight left in the band.
    pub continuum_weight: f64,
}

impl PoleReport {
    /// Σ Z_j + continuum weight - 1; zero in exact arithmetic.
    pub fn sum_rule_residual(&self) -> f64 {
        let z: f64 = self.bound_poles.iter().map(|p| p.residue).sum();
        z + self.continuum_weight - 1.0
    }
}

fn tight() -> QuadConfig {
    QuadConfig::with_tol(1e-12, 1e-14)
}

/// Characteristic frequency scale of the model (the waveguide quarter-width
/// ξ₀; an equivalent measure for the other models).
fn freq_scale(model: &SpectralModel) -> f64 {
    match model {
        SpectralModel::Waveguide { xi0, .. } => *xi0,
        SpectralModel::OhmicFamily { omega_cut, .. } => *omega_cut,
        SpectralModel::Tabulated { samples } => {
            0.25 * (samples[samples.len() - 1].0 - samples[0].0).max(f64::MIN_POSITIVE)
        }
    }
}

/// Upper integration limit standing in for an unbounded support.
fn support_upper(model: &SpectralModel) -> f64 {
    let (_, hi) = model.support();
    if hi.is_finite() {
        hi
    } else {
        *model
            .quad_breaks()
            .last()
            .expect("quadrature breaks are non-empty")
    }
}

/// Self-energy Σ(s) off the branch cut.
///
/// The waveguide model has the closed form
/// Σ(s) = (i/2) η² [ w - √(4ξ₀² + w²) ],  w = s + iω₀,
/// with the square root branch fixed by Σ → 0 as |s| → ∞ (computed as
/// w·√(1 + 4ξ₀²/w²) with the principal root, analytic off the cut). Other
/// models integrate the defining formula.
pub fn self_energy(model: &SpectralModel, s: Complex64) -> Result<Complex64> {
    if model.is_null() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lo, hi) = model.support();
    if s.re == 0.0 && -s.im > lo && -s.im < hi {
        return Err(Error::BranchCut { s });
    }
    match model {
        SpectralModel::Waveguide { eta, omega0, xi0 } => {
            let w = s + Complex64::i() * *omega0;
            let ratio = 4.0 * xi0 * xi0 / (w * w);
            let root = w * (Complex64::new(1.0, 0.0) + ratio).sqrt();
            Ok(Complex64::i() * 0.5 * eta * eta * (w - root))
        }
        _ => {
            let v = model.integrate_against(
                |omega| ((Complex64::i() * s) - omega).inv(),
                &tight(),
            )?;
            Ok(v / (2.0 * std::f64::consts::PI))
        }
    }
}

/// Principal-value level shift Δ(ω). Outside the support this is an ordinary
/// integral; inside, the singular window is folded about the pole.
pub fn level_shift(model: &SpectralModel, omega: f64) -> Result<f64> {
    if model.is_null() {
        return Ok(0.0);
    }
    let (lo, hi) = model.support();
    if omega <= lo || omega >= hi {
        let v = model.integrate_against(
            |w| Complex64::new(1.0 / (omega - w), 0.0),
            &tight(),
        )?;
        Ok(v.re / (2.0 * std::f64::consts::PI))
    } else {
        let hi_q = support_upper(model);
        quad::pv_cauchy(
            |w| model.density(w) / (2.0 * std::f64::consts::PI),
            omega,
            lo,
            hi_q,
            &tight(),
        )
    }
}

/// Level shift outside the band as used by the pole search: closed form for
/// the waveguide, quadrature otherwise.
///
/// The closed form is not an optimization. Probes of the pole condition sit
/// as close as 10⁻¹² ξ₀ to a band edge, where the quadrature integrand has a
/// boundary layer of width √(distance) riding on a denominator of the same
/// size as the roundoff of the node map — the sampled values are then noisy
/// at a relative 10⁻³ and no refinement converges. The closed form, with the
/// discriminant factored as (|x| - 2ξ₀)(|x| + 2ξ₀), is exact there.
fn shift_outside(model: &SpectralModel, omega: f64) -> Result<f64> {
    match model {
        SpectralModel::Waveguide { eta, omega0, xi0 } => {
            let x = omega - omega0;
            let gap = x.abs() - 2.0 * xi0;
            if gap < 0.0 {
                return Err(Error::Domain(format!(
                    "exterior level shift requested inside the band at ω = {omega}"
                )));
            }
            let root = (gap * (x.abs() + 2.0 * xi0)).sqrt();
            Ok(0.5 * eta * eta * x.signum() * (x.abs() - root))
        }
        _ => level_shift(model, omega),
    }
}

/// Δ'(Ω) outside the band: analytic for the waveguide, central difference
/// otherwise.
fn level_shift_slope(model: &SpectralModel, omega: f64) -> Result<f64> {
    match model {
        SpectralModel::Waveguide { eta, omega0, xi0 } => {
            let x = omega - omega0;
            let rad = x * x - 4.0 * xi0 * xi0;
            if rad <= 0.0 {
                return Err(Error::Domain(format!(
                    "level-shift slope requested inside the band at ω = {omega}"
                )));
            }
            Ok(0.5 * eta * eta * (1.0 - x.abs() / rad.sqrt()))
        }
        _ => {
            let h = 1e-6 * freq_scale(model);
            let up = level_shift(model, omega + h)?;
            let down = level_shift(model, omega - h)?;
            Ok((up - down) / (2.0 * h))
        }
    }
}

/// Residue Z = [1 - Δ'(Ω)]⁻¹ of a pole at Ω (must lie outside the band).
pub fn residue_at(model: &SpectralModel, omega_pole: f64) -> Result<f64> {
    let z = 1.0 / (1.0 - level_shift_slope(model, omega_pole)?);
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Consistency(format!(
            "residue {z} at Ω = {omega_pole} outside (0, 1)"
        )));
    }
    Ok(z)
}

/// Waveguide threshold coupling η_c = √(2 - |ω_c - ω₀|/ξ₀) above which both
/// bound poles exist. The mode must lie inside the band.
pub fn critical_coupling(omega_c: f64, omega0: f64, xi0: f64) -> Result<f64> {
    let detuning = (omega_c - omega0).abs() / xi0;
    if detuning > 2.0 {
        return Err(Error::Domain(format!(
            "critical coupling defined for |ω_c - ω₀| <= 2ξ₀; detuning is {detuning} ξ₀"
        )));
    }
    Ok((2.0 - detuning).sqrt())
}

/// Find the real first-sheet poles of ũ outside the band.
///
/// On each exterior interval f(Ω) = Ω - ω_c - Δ(Ω) is strictly increasing
/// (Δ' < 0 there), so a sign check at the near-edge probe decides existence
/// and bisection locates the root.
pub fn find_bound_poles(model: &SpectralModel, omega_c: f64) -> Result<PoleReport> {
    let band = {
        let (lo, hi) = model.support();
        (lo, hi)
    };
    let crit = match model {
        SpectralModel::Waveguide { omega0, xi0, .. } if (omega_c - omega0).abs() <= 2.0 * xi0 => {
            Some(critical_coupling(omega_c, *omega0, *xi0)?)
        }
        _ => None,
    };

    if model.is_null() {
        // Decoupled mode: the free propagator pole carries all the weight.
        return Ok(PoleReport {
            bound_poles: vec![BoundPole {
                omega: omega_c,
                residue: 1.0,
                marginal: false,
            }],
            band,
            critical_coupling: crit,
            continuum_weight: 0.0,
        });
    }

    let scale = freq_scale(model);
    let f = |omega: f64| -> Result<f64> { Ok(omega - omega_c - shift_outside(model, omega)?) };

    let mut poles = Vec::new();
    // Below the band: f rises from -∞ to f(lo⁻).
    if let Some(omega) = exterior_root(&f, band.0, Side::Below, scale)? {
        poles.push(omega);
    }
    // Above the band (absent for half-unbounded supports): f rises to +∞.
    if band.1.is_finite() {
        if let Some(omega) = exterior_root(&f, band.1, Side::Above, scale)? {
            poles.push(omega);
        }
    }
    poles.sort_by(|a, b| a.partial_cmp(b).expect("pole frequencies are finite"));

    let mut bound_poles = Vec::with_capacity(poles.len());
    for omega in poles {
        let edge_dist = (omega - band.0).abs().min((omega - band.1).abs());
        let marginal = edge_dist < MARGINAL_EDGE_TOL * scale;
        let residue = residue_at(model, omega)?;
        bound_poles.push(BoundPole {
            omega,
            residue,
            marginal,
        });
    }

    let continuum_weight = continuum_integral(model, omega_c, 0.0)?.re;

    Ok(PoleReport {
        bound_poles,
        band,
        critical_coupling: crit,
        continuum_weight,
    })
}

enum Side {
    Below,
    Above,
}

/// Locate the unique root of the increasing function f on one exterior
/// interval, or decide there is none.
fn exterior_root<F>(f: &F, edge: f64, side: Side, scale: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let sign = match side {
        Side::Below => -1.0,
        Side::Above => 1.0,
    };
    let probe = |h: f64| f(edge + sign * h);
    let near = 1e-12 * scale;
    let f_near = probe(near)?;
    // No root when f does not cross zero between the edge and ±∞.
    match side {
        Side::Below if f_near <= 0.0 => return Ok(None),
        Side::Above if f_near >= 0.0 => return Ok(None),
        _ => {}
    }
    // March outward geometrically until the sign flips.
    let mut h_in = near;
    let mut h_out = 1e-9 * scale;
    let mut f_out = probe(h_out)?;
    let mut guard = 0;
    while f_out * f_near > 0.0 {
        h_in = h_out;
        h_out *= 8.0;
        f_out = probe(h_out)?;
        guard += 1;
        if guard > 40 {
            return Err(Error::Consistency(format!(
                "no sign change while bracketing a pole beyond the band edge {edge}"
            )));
        }
    }
    // Bisect [h_in, h_out] on the probe coordinate.
    let tol = POLE_TOL * scale;
    let mut lo = h_in;
    let mut hi = h_out;
    let mut f_lo = probe(lo)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = probe(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid * f_lo > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(edge + sign * 0.5 * (lo + hi)))
}

/// Level shift inside the band as needed by the continuum spectral function:
/// closed form for the waveguide (the real part of the self-energy limit,
/// Δ = η²(ω - ω₀)/2 there), an interpolation table for other models.
enum InBandShift {
    Waveguide { eta: f64, omega0: f64 },
    Table { lo: f64, step: f64, values: Vec<f64> },
    Null,
}

impl InBandShift {
    fn build(model: &SpectralModel) -> Result<Self> {
        if model.is_null() {
            return Ok(InBandShift::Null);
        }
        match model {
            SpectralModel::Waveguide { eta, omega0, .. } => Ok(InBandShift::Waveguide {
                eta: *eta,
                omega0: *omega0,
            }),
            _ => {
                let (lo, _) = model.support();
                let hi = support_upper(model);
                let m = 2049usize;
                let step = (hi - lo) / m as f64;
                let mut values = Vec::with_capacity(m);
                for i in 0..m {
                    let omega = lo + (i as f64 + 0.5) * step;
                    values.push(level_shift(model, omega)?);
                }
                Ok(InBandShift::Table { lo, step, values })
            }
        }
    }

    fn at(&self, omega: f64) -> f64 {
        match self {
            InBandShift::Waveguide { eta, omega0 } => 0.5 * eta * eta * (omega - omega0),
            InBandShift::Table { lo, step, values } => {
                let x = (omega - lo) / step - 0.5;
                let i = (x.floor() as isize).clamp(0, values.len() as isize - 2) as usize;
                let frac = (x - i as f64).clamp(0.0, 1.0);
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
            InBandShift::Null => 0.0,
        }
    }
}

/// ∫ dω/2π · ρ_c(ω) e^{-iωt} over the band.
fn continuum_integral(model: &SpectralModel, omega_c: f64, t: f64) -> Result<Complex64> {
    let shift = InBandShift::build(model)?;
    continuum_integral_with(model, omega_c, &shift, t)
}

fn continuum_integral_with(
    model: &SpectralModel,
    omega_c: f64,
    shift: &InBandShift,
    t: f64,
) -> Result<Complex64> {
    if model.is_null() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cfg = QuadConfig {
        rel_tol: 1e-10,
        abs_tol: 1e-11,
        max_panels: 40_000,
    };
    let v = model.integrate_against_split(
        |omega| {
            let d = omega - omega_c - shift.at(omega);
            let half_j = 0.5 * model.density(omega);
            Complex64::from_polar(1.0, -omega * t) / (d * d + half_j * half_j)
        },
        &cfg,
        16,
    )?;
    Ok(v / (2.0 * std::f64::consts::PI))
}

/// Rebuild u(t) on a grid from the pole sum plus the continuum integral.
/// Marginal poles are excluded. Cross-validates the time-domain solver.
pub fn reconstruct_u(model: &SpectralModel, omega_c: f64, grid: &TimeGrid) -> Result<GreenTrajectory> {
    let report = find_bound_poles(model, omega_c)?;
    let shift = InBandShift::build(model)?;
    let mut u = Vec::with_capacity(grid.n);
    for k in 0..grid.n {
        let t = grid.time(k);
        let mut acc = continuum_integral_with(model, omega_c, &shift, t)?;
        for pole in &report.bound_poles {
            if pole.marginal {
                continue;
            }
            acc += pole.residue * Complex64::from_polar(1.0, -pole.omega * t);
        }
        u.push(acc);
    }
    Ok(GreenTrajectory { grid: *grid, u })
}

/// Weak-coupling (Born–Markov) parameters for a mode inside the band:
/// the shifted frequency ω_c + Δ(ω_c) and the decay rate J(ω_c)/2.
pub fn markov_limit(model: &SpectralModel, omega_c: f64) -> Result<(f64, f64)> {
    let (lo, hi) = model.support();
    if !(omega_c >= lo && omega_c <= hi) {
        return Err(Error::Domain(format!(
            "no Markov decay channel: ω_c = {omega_c} outside the support [{lo}, {hi}]"
        )));
    }
    if model.is_null() {
        return Ok((omega_c, 0.0));
    }
    let shift = level_shift(model, omega_c)?;
    Ok((omega_c + shift, 0.5 * model.density(omega_c)))
}

/// Long-time envelope of |u| in the two-pole regime of the resonant
/// waveguide: amplitude A(η) = (η² - 2)/(η² - 1) and oscillation frequency
/// ω(η) = η² ξ₀ / √(η² - 1), equal to the sum of residues and half the pole
/// separation respectively. Requires η > √2.
pub fn steady_envelope(eta: f64, xi0: f64) -> Result<(f64, f64)> {
    if !(eta > std::f64::consts::SQRT_2) {
        return Err(Error::Domain(format!(
            "steady envelope needs η > √2 (two bound poles); got η = {eta}"
        )));
    }
    let e2 = eta * eta;
    Ok(((e2 - 2.0) / (e2 - 1.0), e2 * xi0 / (e2 - 1.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greenfn::{solve_u, EvolutionProblem};
    use crate::spectral::BathSpec;
    use approx::assert_abs_diff_eq;

    fn waveguide(eta: f64) -> SpectralModel {
        SpectralModel::waveguide(eta, 5.0, 1.0).unwrap()
    }

    #[test]
    fn self_energy_closed_form_matches_defining_integral() {
        // The waveguide closed form must agree with the generic quadrature of
        // ∫ J/(is - ω) dω/2π wherever both are defined.
        let m = waveguide(1.3);
        let generic = |s: Complex64| {
            m.integrate_against(|w| ((Complex64::i() * s) - w).inv(), &tight())
                .unwrap()
                / (2.0 * std::f64::consts::PI)
        };
        for &s in &[
            Complex64::new(0.5, 0.3),
            Complex64::new(1.0, -7.0),
            Complex64::new(-0.3, 2.0),
            Complex64::new(2.0, -4.9),
        ] {
            let closed = self_energy(&m, s).unwrap();
            let q = generic(s);
            assert!(
                (closed - q).norm() < 1e-10,
                "Σ mismatch at s = {s}: {:.3e}",
                (closed - q).norm()
            );
        }
    }

    #[test]
    fn self_energy_vanishes_at_large_s() {
        let m = waveguide(1.0);
        let s = Complex64::new(1e6, 0.0);
        let sigma = self_energy(&m, s).unwrap();
        // Σ ≈ -i ∫J dω/2π / s = -i η²ξ₀²/s at large |s|.
        let asymptotic = -Complex64::i() / s;
        assert!(sigma.norm() < 1e-5);
        assert!((sigma - asymptotic).norm() < 1e-4 * asymptotic.norm());
    }

    #[test]
    fn self_energy_branch_cut_guard() {
        let m = waveguide(1.0);
        assert!(matches!(
            self_energy(&m, Complex64::new(0.0, -5.0)),
            Err(Error::BranchCut { .. })
        ));
        // Just outside the band the imaginary axis is fine, and Σ(-iω) is
        // real there: the level shift alone (J = 0 outside the band).
        let below = self_energy(&m, Complex64::new(0.0, -2.5)).unwrap();
        assert_abs_diff_eq!(below.im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(below.re, level_shift(&m, 2.5).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn self_energy_edge_limit() {
        // lim_{ε→0⁺} Σ(-iω₀ + ε) = -i η² ξ₀.
        let m = waveguide(1.0);
        let sigma = self_energy(&m, Complex64::new(1e-8, -5.0)).unwrap();
        assert!((sigma - Complex64::new(0.0, -1.0)).norm() < 1e-6);
    }

    #[test]
    fn level_shift_outside_band_closed_form() {
        // Below the band, with x = ω₀ - ω > 2ξ₀:
        // Δ(ω) = -(η²/2)(x - √(x² - 4ξ₀²)); mirrored above the band.
        let m = waveguide(2.0);
        assert_abs_diff_eq!(level_shift(&m, 2.5).unwrap(), -2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(level_shift(&m, 7.5).unwrap(), 2.0, epsilon = 1e-8);
        // Generic quadrature path agrees (tabulated semicircle approximant
        // not needed: compare ohmic against its own central difference is
        // covered elsewhere).
        let x: f64 = 3.0; // ω = 2.0
        let expect = -0.5 * 4.0 * (x - (x * x - 4.0).sqrt());
        assert_abs_diff_eq!(level_shift(&m, 2.0).unwrap(), expect, epsilon = 1e-8);
    }

    #[test]
    fn level_shift_inside_band_is_linear_for_waveguide() {
        // Δ(ω) = η²(ω - ω₀)/2 inside the band (Hilbert transform of the
        // semicircle), odd about the center.
        let m = waveguide(1.3);
        assert_abs_diff_eq!(level_shift(&m, 5.0).unwrap(), 0.0, epsilon = 1e-10);
        for &omega in &[4.1f64, 5.8, 6.9] {
            let expect = 0.5 * 1.3 * 1.3 * (omega - 5.0);
            assert_abs_diff_eq!(level_shift(&m, omega).unwrap(), expect, epsilon = 1e-8);
            // Odd symmetry about ω₀.
            assert_abs_diff_eq!(
                level_shift(&m, omega).unwrap(),
                -level_shift(&m, 10.0 - omega).unwrap(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn bound_poles_of_the_resonant_waveguide() {
        // η = 2: poles at ω₀ ± η²ξ₀/√(η²-1) = ω₀ ± 4/√3, residues 1/3.
        let report = find_bound_poles(&waveguide(2.0), 5.0).unwrap();
        assert_eq!(report.bound_poles.len(), 2);
        let x = 4.0 / 3.0f64.sqrt();
        let (p0, p1) = (report.bound_poles[0], report.bound_poles[1]);
        assert_abs_diff_eq!(p0.omega, 5.0 - x, epsilon = 1e-8);
        assert_abs_diff_eq!(p1.omega, 5.0 + x, epsilon = 1e-8);
        assert_abs_diff_eq!(p0.residue, 1.0 / 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(p1.residue, 1.0 / 3.0, epsilon = 1e-8);
        assert!(!p0.marginal && !p1.marginal);
        // Symmetric about the band center to bisection accuracy.
        assert_abs_diff_eq!(p0.omega + p1.omega, 10.0, epsilon = 1e-10);
        assert_eq!(report.critical_coupling, Some(std::f64::consts::SQRT_2));
        // Sum rule.
        assert!(report.sum_rule_residual().abs() < 1e-6);

        // η = 4: poles at ω₀ ± 16/√15, residues 7/15.
        let report = find_bound_poles(&waveguide(4.0), 5.0).unwrap();
        let x = 16.0 / 15.0f64.sqrt();
        assert_abs_diff_eq!(report.bound_poles[0].omega, 5.0 - x, epsilon = 1e-8);
        assert_abs_diff_eq!(report.bound_poles[1].omega, 5.0 + x, epsilon = 1e-8);
        for p in &report.bound_poles {
            assert_abs_diff_eq!(p.residue, 7.0 / 15.0, epsilon = 1e-8);
        }
        assert!(report.sum_rule_residual().abs() < 1e-6);
    }

    #[test]
    fn subcritical_coupling_has_no_poles() {
        for &eta in &[0.5, 1.0, 1.40] {
            let report = find_bound_poles(&waveguide(eta), 5.0).unwrap();
            assert!(
                report.bound_poles.is_empty(),
                "unexpected poles at η = {eta}: {:?}",
                report.bound_poles
            );
            // All the weight stays in the band.
            assert!(report.sum_rule_residual().abs() < 1e-6);
        }
        // Just past the threshold both poles appear.
        let report = find_bound_poles(&waveguide(1.42), 5.0).unwrap();
        assert_eq!(report.bound_poles.len(), 2);
    }

    #[test]
    fn critical_coupling_values() {
        assert_eq!(critical_coupling(5.0, 5.0, 1.0).unwrap(), std::f64::consts::SQRT_2);
        assert_abs_diff_eq!(critical_coupling(6.0, 5.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(critical_coupling(8.0, 5.0, 1.0).is_err());
    }

    #[test]
    fn decoupled_mode_report() {
        let m = SpectralModel::tabulated(vec![(3.0, 0.0), (7.0, 0.0)]).unwrap();
        let report = find_bound_poles(&m, 5.0).unwrap();
        assert_eq!(report.bound_poles.len(), 1);
        assert_eq!(report.bound_poles[0].omega, 5.0);
        assert_eq!(report.bound_poles[0].residue, 1.0);
        assert_eq!(report.continuum_weight, 0.0);
    }

    #[test]
    fn reconstruction_matches_time_domain_solver() {
        // Frequency-domain rebuild vs the Volterra solution, one subcritical
        // and one deep bound-state case (short horizon; the acceptance suite
        // runs the full-span comparison).
        for &eta in &[0.5, 4.0] {
            let model = waveguide(eta);
            let grid = TimeGrid::from_horizon(1e-3, 5.0).unwrap();
            let p = EvolutionProblem::new(model.clone(), BathSpec::vacuum(), 5.0, grid).unwrap();
            let kernels = p.kernel_table().unwrap();
            let solved = solve_u(&p, &kernels).unwrap();
            let rebuilt = reconstruct_u(&model, 5.0, &grid).unwrap();
            // Sum rule at t = 0.
            assert!((rebuilt.u[0] - Complex64::new(1.0, 0.0)).norm() < 1e-6);
            let max_dev = solved
                .u
                .iter()
                .zip(rebuilt.u.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max)
                ;
            assert!(max_dev < 1e-3, "η = {eta}: max deviation {max_dev:.3e}");
        }
    }

    #[test]
    fn markov_limit_values() {
        let m = waveguide(0.2);
        let (shifted, rate) = markov_limit(&m, 5.0).unwrap();
        assert_abs_diff_eq!(shifted, 5.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rate, 0.04, epsilon = 1e-14);
        assert!(markov_limit(&m, 8.0).is_err());
        // Decoupled limit: zero rate.
        let null = SpectralModel::tabulated(vec![(3.0, 0.0), (7.0, 0.0)]).unwrap();
        assert_eq!(markov_limit(&null, 5.0).unwrap(), (5.0, 0.0));
    }

    #[test]
    fn steady_envelope_matches_pole_data() {
        // Closed forms.
        let (a2, w2) = steady_envelope(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(a2, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w2, 4.0 / 3.0f64.sqrt(), epsilon = 1e-15);
        let (a4, w4) = steady_envelope(4.0, 1.0).unwrap();
        assert_abs_diff_eq!(a4, 14.0 / 15.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w4, 16.0 / 15.0f64.sqrt(), epsilon = 1e-15);
        // Equality with (sum of residues, half the pole separation).
        for &eta in &[2.0, 4.0] {
            let report = find_bound_poles(&waveguide(eta), 5.0).unwrap();
            let z_sum: f64 = report.bound_poles.iter().map(|p| p.residue).sum();
            let half_sep = 0.5 * (report.bound_poles[1].omega - report.bound_poles[0].omega);
            let (a, w) = steady_envelope(eta, 1.0).unwrap();
            assert_abs_diff_eq!(a, z_sum, epsilon = 1e-8);
            assert_abs_diff_eq!(w, half_sep, epsilon = 1e-8);
        }
        // Below threshold there is no two-pole envelope.
        assert!(steady_envelope(1.2, 1.0).is_err());
        assert!(steady_envelope(std::f64::consts::SQRT_2, 1.0).is_err());
    }

    #[test]
    fn pole_report_serializes_to_json() {
        let report = find_bound_poles(&waveguide(2.0), 5.0).unwrap();
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: PoleReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(json.contains("bound_poles"));
        assert!(json.contains("continuum_weight"));
    }
}
