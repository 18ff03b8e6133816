//! Closed-form phase-space dynamics of coherent-state superpositions.
//!
//! For an initial pure superposition ψ = Σ_m c_m |β_m⟩ the exact reduced
//! state stays a Gaussian mixture of displaced kernels, characterized by the
//! Green function u(t) and the noise integral v(t) through the inverse width
//!
//! ```text
//! Ω(t) = 2 / (1 + 2 v(t)),    0 < Ω <= 2,
//! ```
//!
//! and its Wigner function has the closed form
//!
//! ```text
//! W(z) = (Ω/π) e^{-Ω|z|²} Σ_{mn} c_m c̄_n e^{-(|β_m|² + |β_n|²)/2}
//!        · exp{ Ω u β_m z̄ + Ω ū β̄_n z + β̄_n β_m (1 - |u|² Ω) }.
//! ```
//!
//! Each diagonal term is a displaced Gaussian (Ω/π) e^{-Ω|z - uβ_m|²}; the
//! cross terms carry the interference fringes, damped by the factor
//!
//! ```text
//! F(t) = exp{ -2|α|² (1 - |u|²/(1 + 2v)) }
//! ```
//!
//! for the two-branch cat with β_± = ±α — the fringe visibility. Ω = 2 and
//! u = 1 at t = 0 reduce everything to the familiar pure-state forms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A superposition of coherent states: terms (c_m, β_m) meaning Σ c_m |β_m⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Superposition {
    pub terms: Vec<(Complex64, Complex64)>,
}

impl Superposition {
    /// The normalized two-branch cat N(|α⟩ + e^{iθ}|-α⟩).
    pub fn cat(alpha: Complex64, theta: f64) -> Self {
        let overlap = (-2.0 * alpha.norm_sqr()).exp();
        let n = 1.0 / (2.0 + 2.0 * theta.cos() * overlap).sqrt();
        Superposition {
            terms: vec![
                (Complex64::new(n, 0.0), alpha),
                (Complex64::from_polar(n, theta), -alpha),
            ],
        }
    }

    /// A single coherent state |β⟩.
    pub fn coherent(beta: Complex64) -> Self {
        Superposition {
            terms: vec![(Complex64::new(1.0, 0.0), beta)],
        }
    }

    /// ⟨ψ|ψ⟩ from the analytic coherent-state overlaps
    /// ⟨β_n|β_m⟩ = exp(-|β_n|²/2 - |β_m|²/2 + β̄_n β_m).
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(cm, bm) in &self.terms {
            for &(cn, bn) in &self.terms {
                let overlap =
                    (-0.5 * bn.norm_sqr() - 0.5 * bm.norm_sqr() + bn.conj() * bm).exp();
                acc += cm * cn.conj() * overlap;
            }
        }
        acc.re
    }

    /// Largest branch amplitude |β_m| (frame sizing).
    fn max_beta(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(_, b)| b.norm())
            .fold(0.0, f64::max)
    }
}

/// Inverse Gaussian width Ω = 2/(1 + 2v). Requires v >= 0, giving Ω ∈ (0, 2].
pub fn gaussian_omega(v: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::Domain(format!(
            "noise integral must be non-negative; got v = {v}"
        )));
    }
    Ok(2.0 / (1.0 + 2.0 * v))
}

/// Wigner function of an evolved coherent state |β⟩:
/// (Ω/π) e^{-Ω|z - uβ|²}.
pub fn coherent_wigner(z: Complex64, beta: Complex64, u: Complex64, v: f64) -> Result<f64> {
    let omega = gaussian_omega(v)?;
    Ok(omega / std::f64::consts::PI * (-omega * (z - u * beta).norm_sqr()).exp())
}

/// The Gaussian propagating kernel evaluated at a coherent-state label pair
/// (β, β̄′): the phase-space weight that the initial dyad |β⟩⟨β′| (in the
/// unnormalized analytic convention) acquires at the point z once the mode
/// has evolved to (u, v),
///
/// ```text
/// 𝔍(z | β, β̄′) = (Ω/π) e^{-Ω|z|²} exp{ Ω u β z̄ + Ω ū β̄′ z + β̄′ β (1 - |u|² Ω) }.
/// ```
///
/// Contracting it with c_m c̄_n e^{-(|β_m|²+|β_n|²)/2} over the branches of a
/// superposition yields the exact Wigner function. At u = 1, v = 0 and
/// β = β̄′ = 0 it reduces to the vacuum Gaussian (2/π) e^{-2|z|²}.
pub fn propagator_eval(
    z: Complex64,
    beta: Complex64,
    beta_prime_conj: Complex64,
    u: Complex64,
    v: f64,
) -> Result<Complex64> {
    let omega = gaussian_omega(v)?;
    let exponent = -omega * z.norm_sqr()
        + omega * u * beta * z.conj()
        + omega * u.conj() * beta_prime_conj * z
        + beta_prime_conj * beta * (1.0 - u.norm_sqr() * omega);
    Ok(omega / std::f64::consts::PI * exponent.exp())
}

/// Wigner function of an evolved superposition, by the closed-form double sum
/// of the propagating kernel over branch pairs. Exact for any term count.
pub fn superposition_wigner(
    z: Complex64,
    state: &Superposition,
    u: Complex64,
    v: f64,
) -> Result<f64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(cm, bm) in &state.terms {
        for &(cn, bn) in &state.terms {
            let weight = cm * cn.conj() * (-0.5 * (bm.norm_sqr() + bn.norm_sqr())).exp();
            acc += weight * propagator_eval(z, bm, bn.conj(), u, v)?;
        }
    }
    // The (m,n) and (n,m) terms are conjugate; the sum is real.
    Ok(acc.re)
}

/// The three pieces of the two-branch cat Wigner function, coded directly
/// from their explicit forms (an independent cross-check of the general sum):
/// the two displaced Gaussians and the interference term,
///
/// ```text
/// W_± (z) = |c_±|² (Ω/π) e^{-Ω|z ∓ uα|²}
/// W_I (z) = 2 (Ω/π) e^{-2|α|²} Re{ c_+ c̄_- e^{-Ω (z - u α)(z̄ + ū ᾱ)} }
/// ```
///
/// with the cat written as c_+|α⟩ + c_-|-α⟩.
pub fn cat_wigner_terms(
    z: Complex64,
    state: &Superposition,
    u: Complex64,
    v: f64,
) -> Result<(f64, f64, f64)> {
    let [(c_plus, alpha), (c_minus, alpha_m)] = state.terms[..] else {
        return Err(Error::Domain(format!(
            "cat decomposition needs exactly two branches; state has {}",
            state.terms.len()
        )));
    };
    if (alpha + alpha_m).norm() > 1e-12 * alpha.norm().max(1.0) {
        return Err(Error::Domain(
            "cat decomposition needs opposite branches ±α".into(),
        ));
    }
    let omega = gaussian_omega(v)?;
    let scale = omega / std::f64::consts::PI;
    let w_plus = c_plus.norm_sqr() * scale * (-omega * (z - u * alpha).norm_sqr()).exp();
    let w_minus = c_minus.norm_sqr() * scale * (-omega * (z + u * alpha).norm_sqr()).exp();
    let cross = (-omega * (z - u * alpha) * (z.conj() + u.conj() * alpha.conj())).exp();
    let w_int = 2.0 * scale * (-2.0 * alpha.norm_sqr()).exp() * (c_plus * c_minus.conj() * cross).re;
    Ok((w_plus, w_minus, w_int))
}

/// Fringe visibility of the evolved two-branch cat:
/// F = exp{-2|α|²(1 - |u|²/(1 + 2v))}, the interference amplitude at the
/// fringe center relative to twice the geometric mean of the branch peaks.
pub fn fringe_visibility(alpha: Complex64, u: Complex64, v: f64) -> Result<f64> {
    let omega = gaussian_omega(v)?;
    Ok((-2.0 * alpha.norm_sqr() * (1.0 - 0.5 * u.norm_sqr() * omega)).exp())
}

/// Wigner function of the thermal state with mean occupation n̄:
/// (2/π) (1 + 2n̄)⁻¹ e^{-2|z|²/(1 + 2n̄)}.
pub fn thermal_wigner(z: Complex64, nbar: f64) -> Result<f64> {
    if !(nbar >= 0.0) {
        return Err(Error::Domain(format!(
            "thermal occupation must be non-negative; got {nbar}"
        )));
    }
    let width = 1.0 + 2.0 * nbar;
    Ok(2.0 / (std::f64::consts::PI * width) * (-2.0 * z.norm_sqr() / width).exp())
}

/// Rectangular phase-space sampling grid (x = Re z, y = Im z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl FrameSpec {
    /// Default square window: 201 × 201 samples over
    /// ±(|u| max|β| + 4/√Ω), which holds every branch peak with four
    /// standard deviations of margin.
    pub fn default_for(state: &Superposition, u: Complex64, v: f64) -> Result<Self> {
        let omega = gaussian_omega(v)?;
        let half = u.norm() * state.max_beta() + 4.0 / omega.sqrt();
        Ok(FrameSpec {
            x_min: -half,
            x_max: half,
            nx: 201,
            y_min: -half,
            y_max: half,
            ny: 201,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_max > self.x_min) || !(self.y_max > self.y_min) {
            return Err(Error::Domain("frame window must have positive extent".into()));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Domain("frame needs at least 2 samples per axis".into()));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + (self.y_max - self.y_min) * j as f64 / (self.ny - 1) as f64
    }
}

/// A rendered Wigner frame with the evolution data it was built from, so
/// that diagnostics (normalization, peak visibility) are self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerFrame {
    pub t: f64,
    pub u: Complex64,
    pub v: f64,
    pub state: Superposition,
    pub spec: FrameSpec,
    /// Row-major: values[j * nx + i] = W(x_i + i y_j).
    pub values: Vec<f64>,
}

/// Sample the closed-form Wigner function of an evolved superposition.
///
/// The window must contain every branch peak u·β_m; a frame that cannot show
/// the peaks is refused rather than silently truncated.
pub fn render_frame(
    state: &Superposition,
    u: Complex64,
    v: f64,
    t: f64,
    spec: &FrameSpec,
) -> Result<WignerFrame> {
    spec.validate()?;
    gaussian_omega(v)?;
    for &(_, beta) in &state.terms {
        let peak = u * beta;
        if peak.re < spec.x_min
            || peak.re > spec.x_max
            || peak.im < spec.y_min
            || peak.im > spec.y_max
        {
            return Err(Error::Domain(format!(
                "frame window [{}, {}] x [{}, {}] does not cover the branch peak at ({}, {})",
                spec.x_min, spec.x_max, spec.y_min, spec.y_max, peak.re, peak.im
            )));
        }
    }
    let mut values = Vec::with_capacity(spec.nx * spec.ny);
    for j in 0..spec.ny {
        let y = spec.y(j);
        for i in 0..spec.nx {
            let z = Complex64::new(spec.x(i), y);
            values.push(superposition_wigner(z, state, u, v)?);
        }
    }
    Ok(WignerFrame {
        t,
        u,
        v,
        state: state.clone(),
        spec: *spec,
        values,
    })
}

impl WignerFrame {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    /// ∫ W dx dy by the trapezoid rule on the frame grid; approaches the
    /// state norm (1 for a normalized state) when the window holds the
    /// support.
    pub fn normalization(&self) -> f64 {
        let dx = (self.spec.x_max - self.spec.x_min) / (self.spec.nx - 1) as f64;
        let dy = (self.spec.y_max - self.spec.y_min) / (self.spec.ny - 1) as f64;
        let mut acc = 0.0;
        for j in 0..self.spec.ny {
            let wy = if j == 0 || j == self.spec.ny - 1 { 0.5 } else { 1.0 };
            for i in 0..self.spec.nx {
                let wx = if i == 0 || i == self.spec.nx - 1 { 0.5 } else { 1.0 };
                acc += wx * wy * self.value(i, j);
            }
        }
        acc * dx * dy
    }

    /// Fringe visibility measured from the frame's own two-branch state:
    /// each branch peak is tracked by the argmax of its displaced Gaussian
    /// over the grid, and the interference amplitude at their midpoint is
    /// compared with twice the geometric mean of the branch peaks.
    pub fn peak_visibility(&self) -> Result<f64> {
        if self.state.terms.len() != 2 {
            return Err(Error::Domain(
                "peak visibility is defined for two-branch states".into(),
            ));
        }
        let mut peaks = [Complex64::new(0.0, 0.0); 2];
        for (slot, &(c, beta)) in peaks.iter_mut().zip(&self.state.terms) {
            let branch = Superposition {
                terms: vec![(c, beta)],
            };
            let mut best = f64::NEG_INFINITY;
            for j in 0..self.spec.ny {
                for i in 0..self.spec.nx {
                    let z = Complex64::new(self.spec.x(i), self.spec.y(j));
                    let w = superposition_wigner(z, &branch, self.u, self.v)?;
                    if w > best {
                        best = w;
                        *slot = z;
                    }
                }
            }
        }
        let mid = 0.5 * (peaks[0] + peaks[1]);
        let (_, _, w_i) = cat_wigner_terms(mid, &self.state, self.u, self.v)?;
        let (p_p, _, _) = cat_wigner_terms(peaks[0], &self.state, self.u, self.v)?;
        let (_, p_m, _) = cat_wigner_terms(peaks[1], &self.state, self.u, self.v)?;
        if p_p <= 0.0 || p_m <= 0.0 {
            return Err(Error::Consistency(
                "branch peaks vanished; visibility undefined".into(),
            ));
        }
        Ok(w_i.abs() / (2.0 * (p_p * p_m).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    fn fresh() -> (Complex64, f64) {
        (Complex64::new(1.0, 0.0), 0.0)
    }

    #[test]
    fn initial_coherent_state_is_the_pure_gaussian() {
        let (u, v) = fresh();
        let beta = Complex64::new(0.8, -0.6);
        for &(x, y) in &[(0.0, 0.0), (0.8, -0.6), (1.5, 0.4)] {
            let z = Complex64::new(x, y);
            // Vacuum kernel: 𝔍(z|0,0) at u=1, v=0 is (2/π)e^{-2|z|²}.
            let kernel = propagator_eval(z, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), u, v)
                .unwrap();
            assert_abs_diff_eq!(kernel.re, 2.0 / PI * (-2.0 * z.norm_sqr()).exp(), epsilon = 1e-14);
            assert_abs_diff_eq!(kernel.im, 0.0, epsilon = 1e-15);
            let expect = 2.0 / PI * (-2.0 * (z - beta).norm_sqr()).exp();
            assert_abs_diff_eq!(coherent_wigner(z, beta, u, v).unwrap(), expect, epsilon = 1e-14);
            // The general sum with one term agrees.
            let s = Superposition::coherent(beta);
            assert_abs_diff_eq!(
                superposition_wigner(z, &s, u, v).unwrap(),
                expect,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn general_sum_matches_explicit_cat_terms() {
        // The double-sum evaluator and the hand-coded three-term cat form
        // must agree to near machine precision, including at finite (u, v).
        let alpha = Complex64::new(1.2, 0.3);
        let cases = [
            (Complex64::new(1.0, 0.0), 0.0),
            (Complex64::new(0.7, -0.4), 0.35),
            (Complex64::new(0.2, 0.1), 1.7),
        ];
        for theta in [0.0, PI, 0.5] {
            let cat = Superposition::cat(alpha, theta);
            for &(u, v) in &cases {
                for &(x, y) in &[(0.0, 0.0), (1.2, 0.3), (-0.9, 0.9), (0.31, -1.07)] {
                    let z = Complex64::new(x, y);
                    let whole = superposition_wigner(z, &cat, u, v).unwrap();
                    let (wp, wm, wi) = cat_wigner_terms(z, &cat, u, v).unwrap();
                    assert_abs_diff_eq!(whole, wp + wm + wi, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn even_cat_center_value_is_the_parity_bound() {
        // An even cat has parity +1, so W(0) = 2/π exactly, at any α.
        let (u, v) = fresh();
        for a in [0.5, 1.0, 2.0] {
            let cat = Superposition::cat(Complex64::new(a, 0.0), 0.0);
            assert_abs_diff_eq!(
                superposition_wigner(Complex64::new(0.0, 0.0), &cat, u, v).unwrap(),
                2.0 / PI,
                epsilon = 1e-12
            );
        }
        // The odd cat sits at the parity floor -2/π.
        let odd = Superposition::cat(Complex64::new(1.0, 0.0), PI);
        assert_abs_diff_eq!(
            superposition_wigner(Complex64::new(0.0, 0.0), &odd, u, v).unwrap(),
            -2.0 / PI,
            epsilon = 1e-12
        );
    }

    #[test]
    fn visibility_is_exactly_one_at_the_start_and_matches_peaks_later() {
        let alpha = Complex64::new(1.3, 0.0);
        let (u0, v0) = fresh();
        assert_abs_diff_eq!(fringe_visibility(alpha, u0, v0).unwrap(), 1.0, epsilon = 1e-15);

        // At finite (u, v) the closed form equals the measured peak ratio.
        let cat = Superposition::cat(alpha, 0.0);
        let u = Complex64::new(0.55, -0.35);
        let v = 0.4;
        let spec = FrameSpec::default_for(&cat, u, v).unwrap();
        let frame = render_frame(&cat, u, v, 1.0, &spec).unwrap();
        let measured = frame.peak_visibility().unwrap();
        let closed = fringe_visibility(alpha, u, v).unwrap();
        // The grid only quantizes the peak positions, not the midpoint value.
        assert!(
            (measured - closed).abs() < 1e-3 * closed.max(1e-12),
            "measured {measured:.6e} vs closed {closed:.6e}"
        );
    }

    #[test]
    fn frames_are_normalized() {
        let cat = Superposition::cat(Complex64::new(1.5, 0.0), 0.0);
        let (u, v) = (Complex64::new(0.6, 0.2), 0.8);
        let spec = FrameSpec::default_for(&cat, u, v).unwrap();
        let frame = render_frame(&cat, u, v, 2.0, &spec).unwrap();
        assert_abs_diff_eq!(frame.normalization(), 1.0, epsilon = 1e-6);
        // Thermal Wigner normalizes too (checked on an explicit window).
        let nbar: f64 = 0.7;
        let half = 4.0 * (0.5 + nbar).sqrt();
        let tspec = FrameSpec {
            x_min: -half,
            x_max: half,
            nx: 161,
            y_min: -half,
            y_max: half,
            ny: 161,
        };
        let mut acc = 0.0;
        let dx = (tspec.x_max - tspec.x_min) / (tspec.nx - 1) as f64;
        for j in 0..tspec.ny {
            for i in 0..tspec.nx {
                let wx: f64 = if i == 0 || i == tspec.nx - 1 { 0.5 } else { 1.0 };
                let wy: f64 = if j == 0 || j == tspec.ny - 1 { 0.5 } else { 1.0 };
                let z = Complex64::new(tspec.x(i), tspec.y(j));
                acc += wx * wy * thermal_wigner(z, nbar).unwrap();
            }
        }
        assert_abs_diff_eq!(acc * dx * dx, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn thermal_wigner_limits() {
        // n̄ = 0 is the vacuum.
        let z = Complex64::new(0.4, -0.2);
        assert_abs_diff_eq!(
            thermal_wigner(z, 0.0).unwrap(),
            2.0 / PI * (-2.0 * z.norm_sqr()).exp(),
            epsilon = 1e-15
        );
        assert!(thermal_wigner(z, -0.1).is_err());
    }

    #[test]
    fn late_time_cat_forgets_the_superposition() {
        // As u → 0 with v > 0 the cat Wigner tends to the thermal form with
        // n̄ = v, independent of α and θ.
        let v = 0.35;
        let u = Complex64::new(0.0, 0.0);
        for theta in [0.0, PI] {
            let cat = Superposition::cat(Complex64::new(1.4, 0.5), theta);
            for &(x, y) in &[(0.0, 0.0), (0.7, -0.3), (1.9, 1.1)] {
                let z = Complex64::new(x, y);
                assert_abs_diff_eq!(
                    superposition_wigner(z, &cat, u, v).unwrap(),
                    thermal_wigner(z, v).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn domain_guards() {
        let z = Complex64::new(0.0, 0.0);
        let s = Superposition::coherent(Complex64::new(1.0, 0.0));
        assert!(superposition_wigner(z, &s, Complex64::new(1.0, 0.0), -0.2).is_err());
        assert!(gaussian_omega(f64::NAN).is_err());
        // Three branches have no two-branch decomposition.
        let three = Superposition {
            terms: vec![
                (Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)),
                (Complex64::new(0.5, 0.0), Complex64::new(-1.0, 0.0)),
                (Complex64::new(0.5, 0.0), Complex64::new(0.0, 1.0)),
            ],
        };
        assert!(cat_wigner_terms(z, &three, Complex64::new(1.0, 0.0), 0.0).is_err());
        // A window that misses a branch peak is refused.
        let cat = Superposition::cat(Complex64::new(2.0, 0.0), 0.0);
        let narrow = FrameSpec {
            x_min: -1.0,
            x_max: 1.0,
            nx: 11,
            y_min: -1.0,
            y_max: 1.0,
            ny: 11,
        };
        assert!(render_frame(&cat, Complex64::new(1.0, 0.0), 0.0, 0.0, &narrow).is_err());
    }

    proptest! {
        #[test]
        fn omega_and_visibility_stay_in_their_physical_ranges(
            ur in -1.0f64..1.0,
            ui in -1.0f64..1.0,
            v in 0.0f64..5.0,
            ar in -2.0f64..2.0,
            ai in -2.0f64..2.0,
        ) {
            prop_assume!(ur * ur + ui * ui <= 1.0);
            let u = Complex64::new(ur, ui);
            let alpha = Complex64::new(ar, ai);
            let omega = gaussian_omega(v).unwrap();
            prop_assert!(omega > 0.0 && omega <= 2.0);
            let f = fringe_visibility(alpha, u, v).unwrap();
            prop_assert!(f > 0.0 && f <= 1.0 + 1e-12);
            // Visibility can only drop when the noise grows at fixed u.
            let f_noisier = fringe_visibility(alpha, u, v + 0.7).unwrap();
            prop_assert!(f_noisier <= f + 1e-12);
        }

        #[test]
        fn superposition_wigner_respects_the_pure_state_bound(
            x in -3.0f64..3.0,
            y in -3.0f64..3.0,
            a in 0.1f64..2.0,
            theta in 0.0f64..(2.0 * PI),
        ) {
            // At t = 0 the state is pure: |W| <= 2/π everywhere.
            let cat = Superposition::cat(Complex64::new(a, 0.0), theta);
            let w = superposition_wigner(
                Complex64::new(x, y),
                &cat,
                Complex64::new(1.0, 0.0),
                0.0,
            ).unwrap();
            prop_assert!(w.abs() <= 2.0 / PI + 1e-12);
        }
    }
}
