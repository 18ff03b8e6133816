//! Reservoir spectral densities and correlation kernels.
//!
//! A reservoir is described by its spectral density J(ω) ≥ 0 and, when it is
//! thermal, by a temperature θ (ħ = k_B = 1). The two kernels that drive the
//! mode dynamics are Fourier transforms over the support of J:
//!
//! ```text
//! g(τ)  = ∫ dω/2π · J(ω) e^{-iωτ}
//! g̃(τ)  = ∫ dω/2π · J(ω) n̄(ω) e^{-iωτ},   n̄(ω) = 1 / (e^{ω/θ} - 1)
//! ```
//!
//! Both are Hermitian, g(-τ) = g(τ)*, and g̃ vanishes identically at θ = 0.
//! For the finite-band waveguide model the substitution ω = ω₀ + 2ξ₀ cos φ
//! removes the square-root vanishing of J at the band edges, so every band
//! integral below has a smooth integrand.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quad::{self, QuadConfig};
use crate::{Error, Result};

/// Reservoir spectral density model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpectralModel {
    /// Finite band of half-width 2ξ₀ centered at ω₀ with square-root edges:
    /// J(ω) = η² √(4ξ₀² - (ω - ω₀)²) on |ω - ω₀| ≤ 2ξ₀, zero outside.
    /// η is the dimensionless mode–reservoir coupling.
    Waveguide { eta: f64, omega0: f64, xi0: f64 },
    /// Ohmic-family density J(ω) = 2π κ ω (ω/ω_cut)^{p-1} e^{-ω/ω_cut} on
    /// ω > 0 (p = 1 ohmic, p < 1 sub-ohmic, p > 1 super-ohmic).
    OhmicFamily {
        kappa: f64,
        omega_cut: f64,
        exponent: f64,
    },
    /// Piecewise-linear interpolation of (ω, J) samples; zero outside the
    /// sampled range.
    Tabulated { samples: Vec<(f64, f64)> },
}

impl SpectralModel {
    /// Finite-band waveguide reservoir.
    pub fn waveguide(eta: f64, omega0: f64, xi0: f64) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::Domain(format!("coupling eta must be >= 0, got {eta}")));
        }
        if !(xi0 > 0.0 && xi0.is_finite()) {
            return Err(Error::Domain(format!("band scale xi0 must be > 0, got {xi0}")));
        }
        if !omega0.is_finite() {
            return Err(Error::Domain(format!("band center omega0 must be finite, got {omega0}")));
        }
        Ok(SpectralModel::Waveguide { eta, omega0, xi0 })
    }

    /// Ohmic-family reservoir with exponential cutoff.
    pub fn ohmic_family(kappa: f64, omega_cut: f64, exponent: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::Domain(format!("strength kappa must be >= 0, got {kappa}")));
        }
        if !(omega_cut > 0.0 && omega_cut.is_finite()) {
            return Err(Error::Domain(format!("cutoff must be > 0, got {omega_cut}")));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Domain(format!("exponent must be > 0, got {exponent}")));
        }
        Ok(SpectralModel::OhmicFamily {
            kappa,
            omega_cut,
            exponent,
        })
    }

    /// Tabulated reservoir; frequencies must ascend strictly and be >= 0,
    /// densities must be >= 0, and at least two samples are required.
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain("tabulated model needs at least two samples".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Domain(format!(
                    "tabulated frequencies must ascend strictly ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(w, j) in &samples {
            if !(w >= 0.0 && w.is_finite() && j >= 0.0 && j.is_finite()) {
                return Err(Error::Domain(format!("bad tabulated sample ({w}, {j})")));
            }
        }
        Ok(SpectralModel::Tabulated { samples })
    }

    /// Spectral density J(ω); zero outside the support.
    pub fn density(&self, omega: f64) -> f64 {
        match self {
            SpectralModel::Waveguide { eta, omega0, xi0 } => {
                let d = omega - omega0;
                let rad = 4.0 * xi0 * xi0 - d * d;
                if rad > 0.0 {
                    eta * eta * rad.sqrt()
                } else {
                    0.0
                }
            }
            SpectralModel::OhmicFamily {
                kappa,
                omega_cut,
                exponent,
            } => {
                if omega <= 0.0 {
                    0.0
                } else {
                    2.0 * std::f64::consts::PI
                        * kappa
                        * omega
                        * (omega / omega_cut).powf(exponent - 1.0)
                        * (-omega / omega_cut).exp()
                }
            }
            SpectralModel::Tabulated { samples } => {
                let first = samples[0];
                let last = samples[samples.len() - 1];
                if omega < first.0 || omega > last.0 {
                    return 0.0;
                }
                let idx = samples.partition_point(|&(w, _)| w <= omega);
                if idx == 0 {
                    return first.1;
                }
                if idx == samples.len() {
                    return last.1;
                }
                let (w0, j0) = samples[idx - 1];
                let (w1, j1) = samples[idx];
                j0 + (j1 - j0) * (omega - w0) / (w1 - w0)
            }
        }
    }

    /// Support interval of J. The ohmic family is unbounded above.
    pub fn support(&self) -> (f64, f64) {
        match self {
            SpectralModel::Waveguide { omega0, xi0, .. } => (omega0 - 2.0 * xi0, omega0 + 2.0 * xi0),
            SpectralModel::OhmicFamily { .. } => (0.0, f64::INFINITY),
            SpectralModel::Tabulated { samples } => (samples[0].0, samples[samples.len() - 1].0),
        }
    }

    /// True when the density vanishes identically (decoupled mode).
    pub fn is_null(&self) -> bool {
        match self {
            SpectralModel::Waveguide { eta, .. } => *eta == 0.0,
            SpectralModel::OhmicFamily { kappa, .. } => *kappa == 0.0,
            SpectralModel::Tabulated { samples } => samples.iter().all(|&(_, j)| j == 0.0),
        }
    }

    /// Integration boundaries for quadrature over the support: the ohmic tail
    /// is truncated where the integrand is beyond double precision.
    pub(crate) fn quad_breaks(&self) -> Vec<f64> {
        match self {
            SpectralModel::Waveguide { .. } => unreachable!("waveguide integrates in the band angle"),
            SpectralModel::OhmicFamily {
                omega_cut, exponent, ..
            } => {
                let upper = omega_cut * (50.0 + 10.0 * exponent);
                vec![0.0, *omega_cut, omega_cut * (5.0 + exponent), upper]
            }
            SpectralModel::Tabulated { samples } => samples.iter().map(|&(w, _)| w).collect(),
        }
    }

    /// ∫ J(ω) f(ω) dω over the support of J.
    ///
    /// The waveguide band integrates over the angle φ with
    /// ω = ω₀ + 2ξ₀ cos φ, J dω = η² (2ξ₀ sin φ)² dφ, which is smooth at the
    /// edges; other models integrate in ω with panel breaks at model features.
    pub(crate) fn integrate_against<F>(&self, f: F, cfg: &QuadConfig) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        self.integrate_against_split(f, cfg, 1)
    }

    /// Like [`Self::integrate_against`] but with the waveguide band angle
    /// pre-subdivided into `splits` panels, so that narrow in-band features
    /// (resonance spikes) cannot slip between the nodes of the first pass.
    pub(crate) fn integrate_against_split<F>(
        &self,
        f: F,
        cfg: &QuadConfig,
        splits: usize,
    ) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        match self {
            SpectralModel::Waveguide { eta, omega0, xi0 } => {
                let amp = eta * eta * 4.0 * xi0 * xi0;
                let breaks: Vec<f64> = (0..=splits.max(1))
                    .map(|i| std::f64::consts::PI * i as f64 / splits.max(1) as f64)
                    .collect();
                quad::integrate_c_breaks(
                    |phi| {
                        let s = phi.sin();
                        f(omega0 + 2.0 * xi0 * phi.cos()) * (amp * s * s)
                    },
                    &breaks,
                    cfg,
                )
            }
            _ => {
                let breaks = self.quad_breaks();
                quad::integrate_c_breaks(|w| f(w) * self.density(w), &breaks, cfg)
            }
        }
    }

    /// Memory kernel g(τ) = ∫ dω/2π · J(ω) e^{-iωτ}.
    pub fn memory_kernel(&self, tau: f64) -> Result<Complex64> {
        self.weighted_kernel(|_| 1.0, tau)
    }

    /// Noise kernel g̃(τ) = ∫ dω/2π · J(ω) n̄(ω) e^{-iωτ}; identically zero
    /// for a zero-temperature bath.
    ///
    /// The occupation diverges at ω → 0⁺, so a thermal bath requires the
    /// support of J to avoid negative frequencies (an edge exactly at zero is
    /// fine: J n̄ stays integrable there).
    pub fn thermal_kernel(&self, bath: &BathSpec, tau: f64) -> Result<Complex64> {
        if bath.theta == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (lo, _) = self.support();
        if lo < 0.0 {
            return Err(Error::Domain(format!(
                "thermal kernel undefined: J has support below ω = 0 (from {lo}) where n̄ diverges"
            )));
        }
        let theta = bath.theta;
        self.weighted_kernel(|w| occupation_unchecked(w, theta), tau)
    }

    /// Shared implementation of the kernels: ∫ dω/2π · J(ω) W(ω) e^{-iωτ}.
    /// The kernels are linear in the weight W, which the tests exploit.
    pub(crate) fn weighted_kernel<W>(&self, weight: W, tau: f64) -> Result<Complex64>
    where
        W: Fn(f64) -> f64,
    {
        let cfg = QuadConfig::with_tol(1e-12, 1e-14);
        let v = self.integrate_against(
            |w| Complex64::from_polar(weight(w), -w * tau),
            &cfg,
        )?;
        Ok(v / (2.0 * std::f64::consts::PI))
    }
}

/// Thermal state of the reservoir: the temperature θ in the same frequency
/// units as J (ħ = k_B = 1). θ = 0 is the vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub theta: f64,
}

impl BathSpec {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("temperature must be >= 0, got {theta}")));
        }
        Ok(BathSpec { theta })
    }

    pub fn vacuum() -> Self {
        BathSpec { theta: 0.0 }
    }

    /// Temperature chosen so the occupation at `omega` equals `nbar`:
    /// θ = ω / ln(1 + 1/n̄).
    pub fn from_occupation(omega: f64, nbar: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!(
                "reference frequency for an occupation must be > 0, got {omega}"
            )));
        }
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::Domain(format!("occupation must be >= 0, got {nbar}")));
        }
        if nbar == 0.0 {
            return Ok(BathSpec { theta: 0.0 });
        }
        Ok(BathSpec {
            theta: omega / (1.0 + 1.0 / nbar).ln(),
        })
    }

    /// Bose–Einstein occupation n̄(ω) = 1 / (e^{ω/θ} - 1). Zero for the
    /// vacuum; positive frequencies only at θ > 0.
    pub fn occupation(&self, omega: f64) -> Result<f64> {
        if self.theta == 0.0 {
            return Ok(0.0);
        }
        if omega <= 0.0 {
            return Err(Error::Domain(format!(
                "occupation undefined at ω = {omega} <= 0 for θ > 0"
            )));
        }
        Ok(occupation_unchecked(omega, self.theta))
    }
}

fn occupation_unchecked(omega: f64, theta: f64) -> f64 {
    1.0 / (omega / theta).exp_m1()
}

/// Correlation kernels sampled on the uniform solver grid τ_k = k·dt,
/// computed once and shared read-only by the dynamics modules.
#[derive(Debug, Clone)]
pub struct KernelTable {
    dt: f64,
    g: Vec<Complex64>,
    /// Empty for a vacuum bath (g̃ ≡ 0).
    gtilde: Vec<Complex64>,
}

impl KernelTable {
    /// Tabulate g (and g̃ for a thermal bath) at τ = 0, dt, ..., (len-1)·dt.
    pub fn build(model: &SpectralModel, bath: &BathSpec, dt: f64, len: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("kernel table step must be > 0, got {dt}")));
        }
        let mut g = Vec::with_capacity(len);
        for k in 0..len {
            g.push(model.memory_kernel(k as f64 * dt)?);
        }
        let gtilde = if bath.theta > 0.0 {
            let mut gt = Vec::with_capacity(len);
            for k in 0..len {
                gt.push(model.thermal_kernel(bath, k as f64 * dt)?);
            }
            gt
        } else {
            Vec::new()
        };
        Ok(KernelTable { dt, g, gtilde })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// g(k·dt) for k >= 0.
    pub fn g(&self, k: usize) -> Complex64 {
        self.g[k]
    }

    /// g̃(k·dt) for k >= 0; zero for a vacuum bath.
    pub fn gtilde(&self, k: usize) -> Complex64 {
        if self.gtilde.is_empty() {
            Complex64::new(0.0, 0.0)
        } else {
            self.gtilde[k]
        }
    }

    /// g̃((i-j)·dt) for any sign of i-j, using g̃(-τ) = g̃(τ)*.
    pub fn gtilde_diff(&self, i: usize, j: usize) -> Complex64 {
        if i >= j {
            self.gtilde(i - j)
        } else {
            self.gtilde(j - i).conj()
        }
    }

    pub fn has_thermal(&self) -> bool {
        !self.gtilde.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Bessel J₁ by composite Simpson on the integral representation
    /// J₁(x) = (1/π) ∫₀^π cos(θ - x sin θ) dθ. Deliberately independent of
    /// the adaptive quadrature used by the implementation.
    fn bessel_j1(x: f64) -> f64 {
        let n = 1 << 17; // even
        let h = std::f64::consts::PI / n as f64;
        let f = |theta: f64| (theta - x * theta.sin()).cos();
        let mut acc = f(0.0) + f(std::f64::consts::PI);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(k as f64 * h);
        }
        acc * h / 3.0 / std::f64::consts::PI
    }

    fn waveguide(eta: f64, omega0: f64, xi0: f64) -> SpectralModel {
        SpectralModel::waveguide(eta, omega0, xi0).unwrap()
    }

    #[test]
    fn waveguide_density_profile() {
        let m = waveguide(1.0, 5.0, 1.0);
        // Band center: J(ω₀) = 2 ξ₀ η².
        assert_abs_diff_eq!(m.density(5.0), 2.0, epsilon = 1e-15);
        // Edges and outside.
        assert_eq!(m.density(3.0), 0.0);
        assert_eq!(m.density(7.0), 0.0);
        assert_eq!(m.density(2.0), 0.0);
        assert_eq!(m.density(8.5), 0.0);
        // Interior closed form.
        assert_abs_diff_eq!(m.density(5.5), (4.0f64 - 0.25).sqrt(), epsilon = 1e-15);
        assert_eq!(m.support(), (3.0, 7.0));
    }

    #[test]
    fn ohmic_density_profile() {
        let m = SpectralModel::ohmic_family(0.1, 2.0, 1.0).unwrap();
        let w = 2.0;
        let expect = 2.0 * std::f64::consts::PI * 0.1 * w * (-1.0f64).exp();
        assert_abs_diff_eq!(m.density(w), expect, epsilon = 1e-14);
        assert_eq!(m.density(-1.0), 0.0);
        assert_eq!(m.density(0.0), 0.0);
    }

    #[test]
    fn tabulated_density_interpolates() {
        let m = SpectralModel::tabulated(vec![(1.0, 0.0), (2.0, 2.0), (4.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(m.density(1.5), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.density(3.0), 1.5, epsilon = 1e-15);
        assert_eq!(m.density(0.5), 0.0);
        assert_eq!(m.density(4.5), 0.0);
        assert!(SpectralModel::tabulated(vec![(1.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(SpectralModel::tabulated(vec![(1.0, 0.0)]).is_err());
    }

    #[test]
    fn occupation_known_points() {
        // ω/θ = ln 2 → n̄ = 1; ω/θ = ln(3/2) → n̄ = 2.
        let bath = BathSpec::new(1.0).unwrap();
        assert_abs_diff_eq!(bath.occupation(2.0f64.ln()).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(bath.occupation(1.5f64.ln()).unwrap(), 2.0, epsilon = 1e-13);
        // Vacuum is exactly zero everywhere.
        assert_eq!(BathSpec::vacuum().occupation(3.0).unwrap(), 0.0);
        // Non-positive frequencies are outside the thermal domain.
        assert!(bath.occupation(0.0).is_err());
        assert!(bath.occupation(-1.0).is_err());
    }

    #[test]
    fn occupation_roundtrip_through_temperature() {
        let bath = BathSpec::from_occupation(5.0, 0.5).unwrap();
        assert_abs_diff_eq!(bath.occupation(5.0).unwrap(), 0.5, epsilon = 1e-13);
        assert_eq!(BathSpec::from_occupation(5.0, 0.0).unwrap().theta, 0.0);
    }

    #[test]
    fn waveguide_kernel_at_zero_lag() {
        // g(0) = ∫ J/2π = η² ξ₀² (semicircle area).
        for &(eta, xi0) in &[(1.0, 1.0), (2.0, 1.0), (0.5, 2.0)] {
            let m = waveguide(eta, 5.0, xi0);
            let g0 = m.memory_kernel(0.0).unwrap();
            assert_abs_diff_eq!(g0.re, eta * eta * xi0 * xi0, epsilon = 1e-10);
            assert_abs_diff_eq!(g0.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn waveguide_kernel_matches_bessel_closed_form() {
        // g(τ) = η² ξ₀ e^{-iω₀τ} J₁(2ξ₀τ)/τ. Sample lags avoid J₁ zeros so a
        // relative comparison is meaningful.
        let (eta, omega0, xi0) = (1.3, 5.0, 1.0);
        let m = waveguide(eta, omega0, xi0);
        for &tau in &[0.07, 0.5, 1.0, 2.3, 5.2, 9.8, 20.3, 34.6, 50.0] {
            let g = m.memory_kernel(tau).unwrap();
            let phase = Complex64::from_polar(1.0, -omega0 * tau);
            let exact = phase * (eta * eta * xi0 * bessel_j1(2.0 * xi0 * tau) / tau);
            let scale = exact.norm();
            assert!(scale > 1e-4, "test lag τ = {tau} sits too close to a Bessel zero");
            assert!(
                (g - exact).norm() <= 1e-10 * scale,
                "kernel mismatch at τ = {tau}: {:.3e} rel",
                (g - exact).norm() / scale
            );
        }
    }

    #[test]
    fn kernel_is_hermitian() {
        let m = waveguide(1.7, 5.0, 1.0);
        for &tau in &[0.3, 1.1, 4.0, 17.5] {
            let plus = m.memory_kernel(tau).unwrap();
            let minus = m.memory_kernel(-tau).unwrap();
            assert!((minus - plus.conj()).norm() < 1e-12);
        }
        let ohmic = SpectralModel::ohmic_family(0.2, 2.0, 1.0).unwrap();
        for &tau in &[0.4, 2.2] {
            let plus = ohmic.memory_kernel(tau).unwrap();
            let minus = ohmic.memory_kernel(-tau).unwrap();
            assert!((minus - plus.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn weighted_kernel_is_linear_in_the_weight() {
        // Replacing n̄(ω) by a constant c must give exactly c·g(τ).
        let m = waveguide(0.9, 5.0, 1.0);
        let c = 0.7;
        for &tau in &[0.0, 0.8, 3.3] {
            let flat = m.weighted_kernel(|_| c, tau).unwrap();
            let g = m.memory_kernel(tau).unwrap();
            assert!((flat - g * c).norm() < 1e-12);
        }
    }

    #[test]
    fn thermal_kernel_limits() {
        let m = waveguide(1.0, 5.0, 1.0);
        // Vacuum: identically zero without quadrature.
        let vac = m.thermal_kernel(&BathSpec::vacuum(), 1.3).unwrap();
        assert_eq!(vac, Complex64::new(0.0, 0.0));
        // Thermal: g̃(0) is real and positive, and g̃ is Hermitian.
        let bath = BathSpec::from_occupation(5.0, 0.5).unwrap();
        let gt0 = m.thermal_kernel(&bath, 0.0).unwrap();
        assert!(gt0.re > 0.0);
        assert_abs_diff_eq!(gt0.im, 0.0, epsilon = 1e-12);
        let plus = m.thermal_kernel(&bath, 2.1).unwrap();
        let minus = m.thermal_kernel(&bath, -2.1).unwrap();
        assert!((minus - plus.conj()).norm() < 1e-12);
        // A band reaching below ω = 0 has no thermal kernel.
        let low = waveguide(1.0, 1.0, 1.0); // support [-1, 3]
        assert!(low.thermal_kernel(&bath, 0.0).is_err());
    }

    #[test]
    fn ohmic_kernel_at_zero_lag() {
        // ∫ J/2π = κ ω_cut² Γ(p+1); p = 1 → κ ω_cut².
        let (kappa, omega_cut) = (0.3, 2.0);
        let m = SpectralModel::ohmic_family(kappa, omega_cut, 1.0).unwrap();
        let g0 = m.memory_kernel(0.0).unwrap();
        assert_abs_diff_eq!(g0.re, kappa * omega_cut * omega_cut, epsilon = 1e-9);
        assert_abs_diff_eq!(g0.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_table_matches_point_evaluations() {
        let m = waveguide(1.2, 5.0, 1.0);
        let bath = BathSpec::from_occupation(5.0, 0.4).unwrap();
        let dt = 0.05;
        let table = KernelTable::build(&m, &bath, dt, 41).unwrap();
        assert_eq!(table.len(), 41);
        assert!(table.has_thermal());
        for &k in &[0usize, 7, 23, 40] {
            let tau = k as f64 * dt;
            assert_eq!(table.g(k), m.memory_kernel(tau).unwrap());
            assert_eq!(table.gtilde(k), m.thermal_kernel(&bath, tau).unwrap());
        }
        // Hermitian lookup across the diagonal.
        assert_eq!(table.gtilde_diff(3, 9), table.gtilde(6).conj());
        // Vacuum tables skip g̃ and report zero.
        let vac = KernelTable::build(&m, &BathSpec::vacuum(), dt, 5).unwrap();
        assert!(!vac.has_thermal());
        assert_eq!(vac.gtilde(3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn null_models_are_detected() {
        assert!(waveguide(0.0, 5.0, 1.0).is_null());
        assert!(!waveguide(0.1, 5.0, 1.0).is_null());
        assert!(SpectralModel::ohmic_family(0.0, 1.0, 1.0).unwrap().is_null());
        assert!(SpectralModel::tabulated(vec![(0.0, 0.0), (1.0, 0.0)])
            .unwrap()
            .is_null());
    }

    proptest! {
        #[test]
        fn density_nonnegative_and_supported(
            eta in 0.1f64..4.0,
            omega0 in 2.5f64..8.0,
            xi0 in 0.5f64..2.0,
            omega in -5.0f64..15.0,
        ) {
            let m = waveguide(eta, omega0, xi0);
            let j = m.density(omega);
            prop_assert!(j >= 0.0);
            let (lo, hi) = m.support();
            if omega < lo || omega > hi {
                prop_assert_eq!(j, 0.0);
            }
        }

        #[test]
        fn kernel_hermiticity_random_lags(tau in 0.01f64..8.0) {
            let m = waveguide(1.1, 5.0, 1.0);
            let plus = m.memory_kernel(tau).unwrap();
            let minus = m.memory_kernel(-tau).unwrap();
            prop_assert!((minus - plus.conj()).norm() < 1e-12);
        }
    }
}
