//! Scenario files and the deterministic command-line front end.
//!
//! A scenario is a TOML file with one section per concern: the reservoir
//! model, the bath temperature, the solver grid, the cat state, the frame
//! schedule, and output options. All frequencies and times are dimensionless
//! (the reservoir width sets the unit); frame times may also be written as
//! multiples of the band-center period, e.g. `"2 T0"` for 4π/ω₀.
//!
//! Every run re-echoes the parsed scenario next to its outputs, and repeated
//! runs of the same scenario produce byte-identical files: all numeric output
//! is printed with 12 significant digits and no iteration order depends on
//! hashing or threads.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::greenfn::{solve_u, solve_v, EvolutionProblem, TimeGrid};
use crate::laplace::{find_bound_poles, steady_envelope};
use crate::master::{
    coefficients, propagate_fock, superposition_amplitudes, wigner_from_density,
    CoefficientTrajectory, FockDensityMatrix,
};
use crate::spectral::{BathSpec, SpectralModel};
use crate::wigner::{
    fringe_visibility, gaussian_omega, render_frame, superposition_wigner, FrameSpec,
    Superposition,
};
use crate::{Error, Result};

/// Subcommands of the front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Solve u, v and the master-equation coefficients; write `trajectory.tsv`.
    Solve,
    /// Bound-pole analysis; write `poles.json`.
    Poles,
    /// Render cat-state Wigner frames; write `frame_*.txt` + `frames.json`.
    Wigner,
    /// Cross-check closed forms against the Fock-basis integrator; write
    /// `oracle_report.json`.
    OracleCheck,
    /// Pole/envelope summary over a coupling grid; write `sweep.csv`.
    Sweep,
}

/// A fully parsed scenario. Unknown keys are rejected so typos cannot pass
/// silently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Bare mode frequency ω_c.
    pub omega_c: f64,
    pub model: ModelSection,
    #[serde(default)]
    pub bath: BathSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub cat: CatSection,
    #[serde(default)]
    pub frames: FramesSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Reservoir model: `kind = "waveguide"` (fields eta, omega0, xi0) or
/// `kind = "ohmic"` (fields kappa, omega_cut, exponent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_cut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

impl ModelSection {
    fn require(value: Option<f64>, key: &str) -> Result<f64> {
        value.ok_or_else(|| Error::Scenario(format!("model.{key} is required for this model kind")))
    }

    fn forbid(value: Option<f64>, key: &str, kind: &str) -> Result<()> {
        if value.is_some() {
            return Err(Error::Scenario(format!(
                "model.{key} does not apply to model.kind = \"{kind}\""
            )));
        }
        Ok(())
    }

    /// Build the spectral model, naming any missing or extraneous key.
    pub fn build(&self) -> Result<SpectralModel> {
        match self.kind.as_str() {
            "waveguide" => {
                Self::forbid(self.kappa, "kappa", "waveguide")?;
                Self::forbid(self.omega_cut, "omega_cut", "waveguide")?;
                Self::forbid(self.exponent, "exponent", "waveguide")?;
                SpectralModel::waveguide(
                    Self::require(self.eta, "eta")?,
                    Self::require(self.omega0, "omega0")?,
                    self.xi0.unwrap_or(1.0),
                )
            }
            "ohmic" => {
                Self::forbid(self.eta, "eta", "ohmic")?;
                Self::forbid(self.omega0, "omega0", "ohmic")?;
                Self::forbid(self.xi0, "xi0", "ohmic")?;
                SpectralModel::ohmic_family(
                    Self::require(self.kappa, "kappa")?,
                    Self::require(self.omega_cut, "omega_cut")?,
                    self.exponent.unwrap_or(1.0),
                )
            }
            other => Err(Error::Scenario(format!(
                "model.kind must be \"waveguide\" or \"ohmic\", got \"{other}\""
            ))),
        }
    }
}

/// Bath temperature: either `theta` (temperature, ħ = k_B = 1) or
/// `nbar_at_omega0` (occupation at the band center), never both.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nbar_at_omega0: Option<f64>,
}

impl BathSection {
    pub fn build(&self, model: &ModelSection) -> Result<BathSpec> {
        match (self.theta, self.nbar_at_omega0) {
            (Some(_), Some(_)) => Err(Error::Scenario(
                "bath.theta and bath.nbar_at_omega0 are mutually exclusive".into(),
            )),
            (Some(theta), None) => BathSpec::new(theta),
            (None, Some(nbar)) => {
                let omega0 = model.omega0.ok_or_else(|| {
                    Error::Scenario(
                        "bath.nbar_at_omega0 needs model.omega0 (waveguide model)".into(),
                    )
                })?;
                BathSpec::from_occupation(omega0, nbar)
            }
            (None, None) => Ok(BathSpec::vacuum()),
        }
    }
}

fn default_dt() -> f64 {
    1e-3
}

fn default_horizon() -> f64 {
    20.0
}

/// Solver grid: uniform steps of `dt` out to `horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            dt: default_dt(),
            horizon: default_horizon(),
        }
    }
}

impl GridSection {
    pub fn build(&self) -> Result<TimeGrid> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Scenario(format!(
                "grid.dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.horizon >= self.dt && self.horizon.is_finite()) {
            return Err(Error::Scenario(format!(
                "grid.horizon must be at least grid.dt, got {}",
                self.horizon
            )));
        }
        TimeGrid::from_horizon(self.dt, self.horizon)
    }
}

fn default_alpha() -> f64 {
    1.0
}

/// The initial even cat state N(|α⟩ + |-α⟩).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatSection {
    /// Re α.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Im α.
    #[serde(default)]
    pub alpha_im: f64,
}

impl Default for CatSection {
    fn default() -> Self {
        CatSection {
            alpha: default_alpha(),
            alpha_im: 0.0,
        }
    }
}

impl CatSection {
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.alpha, self.alpha_im)
    }
}

/// A frame time: a plain number, or a string `"<number> T0"` meaning
/// multiples of the band-center period T₀ = 2π/ω₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrameTime {
    Absolute(f64),
    Expr(String),
}

impl FrameTime {
    pub fn resolve(&self, model: &ModelSection) -> Result<f64> {
        let t = match self {
            FrameTime::Absolute(t) => *t,
            FrameTime::Expr(s) => {
                let body = s.trim();
                if let Some(stem) = body.strip_suffix("T0") {
                    let stem = stem.trim();
                    let factor: f64 = if stem.is_empty() {
                        1.0
                    } else {
                        stem.parse().map_err(|_| bad_frame_time(s))?
                    };
                    let omega0 = model.omega0.ok_or_else(|| {
                        Error::Scenario(format!(
                            "frames.times entry \"{s}\" uses T0 units, which need model.omega0"
                        ))
                    })?;
                    if omega0 <= 0.0 {
                        return Err(Error::Scenario(format!(
                            "frames.times entry \"{s}\": T0 = 2π/ω₀ needs model.omega0 > 0"
                        )));
                    }
                    factor * 2.0 * std::f64::consts::PI / omega0
                } else {
                    body.parse().map_err(|_| bad_frame_time(s))?
                }
            }
        };
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Scenario(format!(
                "frames.times entries must be finite and non-negative, got {t}"
            )));
        }
        Ok(t)
    }
}

fn bad_frame_time(s: &str) -> Error {
    Error::Scenario(format!(
        "frames.times entry \"{s}\" is neither a number nor \"<number> T0\""
    ))
}

fn default_frame_samples() -> usize {
    201
}

/// Frame schedule and sampling grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramesSection {
    #[serde(default)]
    pub times: Vec<FrameTime>,
    #[serde(default = "default_frame_samples")]
    pub nx: usize,
    #[serde(default = "default_frame_samples")]
    pub ny: usize,
    /// Half-width of the square window; defaults to |uα| + 4/√Ω per frame.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

impl Default for FramesSection {
    fn default() -> Self {
        FramesSection {
            times: Vec::new(),
            nx: default_frame_samples(),
            ny: default_frame_samples(),
            half_width: None,
        }
    }
}

impl FramesSection {
    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Scenario(format!(
                "frames.nx and frames.ny must be at least 2, got {} x {}",
                self.nx, self.ny
            )));
        }
        if let Some(h) = self.half_width {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Scenario(format!(
                    "frames.half_width must be positive, got {h}"
                )));
            }
        }
        Ok(())
    }

    fn spec_for(&self, state: &Superposition, u: Complex64, v: f64) -> Result<FrameSpec> {
        let mut spec = match self.half_width {
            Some(h) => FrameSpec {
                x_min: -h,
                x_max: h,
                nx: self.nx,
                y_min: -h,
                y_max: h,
                ny: self.ny,
            },
            None => FrameSpec::default_for(state, u, v)?,
        };
        spec.nx = self.nx;
        spec.ny = self.ny;
        Ok(spec)
    }
}

fn default_oracle_dim() -> usize {
    25
}

/// Fock-basis cross-check settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    /// Fock-space truncation dimension.
    #[serde(default = "default_oracle_dim")]
    pub dim: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            dim: default_oracle_dim(),
        }
    }
}

/// Coupling grid for `sweep` (waveguide model only).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub eta: Vec<f64>,
}

fn default_out_dir() -> String {
    "out".into()
}

/// Output options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; `--out` overrides it.
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_out_dir(),
        }
    }
}

impl Scenario {
    /// Parse and validate a TOML scenario string.
    pub fn from_toml(text: &str) -> Result<Self> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Cross-field validation beyond what the type structure enforces.
    pub fn validate(&self) -> Result<()> {
        if !self.omega_c.is_finite() {
            return Err(Error::Scenario(format!(
                "omega_c must be finite, got {}",
                self.omega_c
            )));
        }
        self.model.build()?;
        self.bath.build(&self.model)?;
        self.grid.build()?;
        self.frames.validate()?;
        for ft in &self.frames.times {
            ft.resolve(&self.model)?;
        }
        if self.oracle.dim < 2 {
            return Err(Error::Scenario(format!(
                "oracle.dim must be at least 2, got {}",
                self.oracle.dim
            )));
        }
        for &eta in &self.sweep.eta {
            if !(eta >= 0.0 && eta.is_finite()) {
                return Err(Error::Scenario(format!(
                    "sweep.eta entries must be non-negative, got {eta}"
                )));
            }
        }
        Ok(())
    }

    /// Serialize back to TOML (the echo written next to outputs).
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::Scenario(format!("scenario echo failed to serialize: {e}")))
    }
}

/// Parse a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path)?;
    Scenario::from_toml(&text)
}

/// Round to 12 significant digits, the precision of all file output.
fn sig12(x: f64) -> f64 {
    format!("{:.11e}", x + 0.0).parse().unwrap_or(x)
}

/// Format with 12 significant digits. Adding +0.0 first canonicalizes -0.0
/// (e.g. an empty `f64` sum) so no output ever carries a signed zero.
fn num(x: f64) -> String {
    format!("{:.11e}", x + 0.0)
}

/// The machine-readable error report printed to stderr on failure.
pub fn error_json(e: &Error) -> String {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string()
}

/// Everything the time-domain subcommands share: the solved trajectories and
/// derived coefficients.
struct SolvedScenario {
    grid: TimeGrid,
    alpha: Complex64,
    u: Vec<Complex64>,
    v: Vec<f64>,
    coeffs: CoefficientTrajectory,
}

fn solve_scenario(scenario: &Scenario) -> Result<SolvedScenario> {
    let model = scenario.model.build()?;
    let bath = scenario.bath.build(&scenario.model)?;
    let grid = scenario.grid.build()?;
    let problem = EvolutionProblem::new(model, bath, scenario.omega_c, grid)?;
    let kernels = problem.kernel_table()?;
    let usol = solve_u(&problem, &kernels)?;
    let vsol = solve_v(&problem, &kernels, &usol)?;
    let coeffs = coefficients(&problem, &kernels, &usol, &vsol)?;
    Ok(SolvedScenario {
        grid,
        alpha: scenario.cat.amplitude(),
        u: usol.u,
        v: vsol.v,
        coeffs,
    })
}

/// Run a subcommand against a scenario file. Returns the paths written.
pub fn run(cmd: Command, scenario_path: &Path, out_override: Option<&Path>) -> Result<Vec<PathBuf>> {
    let scenario = parse_scenario(scenario_path)?;
    let out_dir = out_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&scenario.output.dir));
    fs::create_dir_all(&out_dir)?;

    let echo_path = out_dir.join("scenario_echo.toml");
    fs::write(&echo_path, scenario.to_toml()?)?;
    let mut written = vec![echo_path];

    match cmd {
        Command::Solve => written.extend(run_solve(&scenario, &out_dir)?),
        Command::Poles => written.extend(run_poles(&scenario, &out_dir)?),
        Command::Wigner => written.extend(run_wigner(&scenario, &out_dir)?),
        Command::OracleCheck => written.extend(run_oracle_check(&scenario, &out_dir)?),
        Command::Sweep => written.extend(run_sweep(&scenario, &out_dir)?),
    }
    Ok(written)
}

fn run_solve(scenario: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let solved = solve_scenario(scenario)?;
    let mut table = String::new();
    table.push_str("t\tre_u\tim_u\tabs_u\tv\tomega_prime\tgamma\tgamma_tilde\tvisibility\n");
    for k in 0..solved.grid.n {
        let u = solved.u[k];
        let v = solved.v[k];
        let f = fringe_visibility(solved.alpha, u, v)?;
        let _ = writeln!(
            table,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            num(solved.grid.time(k)),
            num(u.re),
            num(u.im),
            num(u.norm()),
            num(v),
            num(solved.coeffs.omega_prime[k]),
            num(solved.coeffs.gamma[k]),
            num(solved.coeffs.gamma_tilde[k]),
            num(f),
        );
    }
    let path = out_dir.join("trajectory.tsv");
    fs::write(&path, table)?;
    Ok(vec![path])
}

/// The pole report as a JSON value (numbers rounded to 12 significant
/// digits), shared by the `poles` subcommand and the C ABI.
pub fn pole_report_json(model: &SpectralModel, omega_c: f64) -> Result<serde_json::Value> {
    let report = find_bound_poles(model, omega_c)?;
    let poles: Vec<_> = report
        .bound_poles
        .iter()
        .map(|p| {
            json!({
                "omega": sig12(p.omega),
                "residue": sig12(p.residue),
                "marginal": p.marginal,
            })
        })
        .collect();
    Ok(json!({
        "omega_c": sig12(omega_c),
        "band": [sig12(report.band.0), sig12(report.band.1)],
        "bound_poles": poles,
        "critical_coupling": report.critical_coupling.map(sig12),
        "continuum_weight": sig12(report.continuum_weight),
        "sum_rule_residual": sig12(report.sum_rule_residual()),
    }))
}

fn run_poles(scenario: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let model = scenario.model.build()?;
    let value = pole_report_json(&model, scenario.omega_c)?;
    let path = out_dir.join("poles.json");
    fs::write(&path, pretty_json(&value))?;
    Ok(vec![path])
}

/// Resolve the frame schedule to (requested time, grid index) pairs in
/// ascending grid order, refusing times beyond the horizon.
fn frame_indices(scenario: &Scenario, grid: &TimeGrid) -> Result<Vec<(f64, usize)>> {
    if scenario.frames.times.is_empty() {
        return Err(Error::Scenario(
            "frames.times must list at least one time for this subcommand".into(),
        ));
    }
    let mut pairs = Vec::new();
    for ft in &scenario.frames.times {
        let t = ft.resolve(&scenario.model)?;
        if t > grid.last_time() + 0.5 * grid.dt {
            return Err(Error::Scenario(format!(
                "frame time {t} exceeds grid.horizon = {}",
                grid.last_time()
            )));
        }
        pairs.push((t, grid.nearest_index(t)));
    }
    pairs.sort_by(|a, b| a.1.cmp(&b.1));
    pairs.dedup_by_key(|p| p.1);
    Ok(pairs)
}

fn run_wigner(scenario: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let solved = solve_scenario(scenario)?;
    let schedule = frame_indices(scenario, &solved.grid)?;
    let state = Superposition::cat(solved.alpha, 0.0);

    let mut written = Vec::new();
    let mut manifest = Vec::new();
    for (seq, &(t_req, k)) in schedule.iter().enumerate() {
        let u = solved.u[k];
        let v = solved.v[k];
        let spec = scenario.frames.spec_for(&state, u, v)?;
        let frame = render_frame(&state, u, v, solved.grid.time(k), &spec)?;

        let mut text = String::new();
        let _ = writeln!(
            text,
            "{} {} {} {} {} {} {}",
            num(frame.t),
            num(spec.x_min),
            num(spec.x_max),
            spec.nx,
            num(spec.y_min),
            num(spec.y_max),
            spec.ny,
        );
        for j in 0..spec.ny {
            let mut row = String::new();
            for i in 0..spec.nx {
                if i > 0 {
                    row.push(' ');
                }
                row.push_str(&num(frame.value(i, j)));
            }
            text.push_str(&row);
            text.push('\n');
        }
        let name = format!("frame_{seq:03}.txt");
        let path = out_dir.join(&name);
        fs::write(&path, text)?;

        manifest.push(json!({
            "index": seq,
            "file": name,
            "requested_time": sig12(t_req),
            "grid_time": sig12(frame.t),
            "u": [sig12(u.re), sig12(u.im)],
            "v": sig12(v),
            "normalization": sig12(frame.normalization()),
        }));
        written.push(path);
    }

    let manifest_value = json!({
        "alpha": [sig12(solved.alpha.re), sig12(solved.alpha.im)],
        "frames": manifest,
    });
    let manifest_path = out_dir.join("frames.json");
    fs::write(&manifest_path, pretty_json(&manifest_value))?;
    written.push(manifest_path);
    Ok(written)
}

fn run_oracle_check(scenario: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let solved = solve_scenario(scenario)?;
    let schedule = frame_indices(scenario, &solved.grid)?;
    let state = Superposition::cat(solved.alpha, 0.0);
    let dim = scenario.oracle.dim;

    let amps = superposition_amplitudes(&state.terms, dim);
    let rho0 = FockDensityMatrix::from_pure(&amps)?;
    let snapshots: Vec<usize> = schedule.iter().map(|&(_, k)| k).collect();
    let states = propagate_fock(&solved.coeffs, &rho0, &snapshots)?;

    let mut checks = Vec::new();
    let mut max_sup = 0.0f64;
    let mut max_drift = 0.0f64;
    for (&(t_req, k), rho) in schedule.iter().zip(&states) {
        let u = solved.u[k];
        let v = solved.v[k];
        // The comparison region is the disk |z| <= h, not a square: the
        // truncated parity sum behind the Fock-side Wigner transform is
        // certified only where the displaced state fits the truncation, and
        // the corners of a square window are the first place it does not.
        // The default radius holds both branch peaks plus one Gaussian width.
        let h = match scenario.frames.half_width {
            Some(h) => h,
            None => u.norm() * solved.alpha.norm() + 1.0 / gaussian_omega(v)?.sqrt(),
        };
        let spec = FrameSpec {
            x_min: -h,
            x_max: h,
            nx: scenario.frames.nx,
            y_min: -h,
            y_max: h,
            ny: scenario.frames.ny,
        };
        let mut sup = 0.0f64;
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let z = Complex64::new(spec.x(i), spec.y(j));
                if z.norm() > h {
                    continue;
                }
                let analytic = superposition_wigner(z, &state, u, v)?;
                let oracle = wigner_from_density(rho, z);
                sup = sup.max((analytic - oracle).abs());
            }
        }
        let drift = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
        max_sup = max_sup.max(sup);
        max_drift = max_drift.max(drift);
        checks.push(json!({
            "requested_time": sig12(t_req),
            "grid_time": sig12(solved.grid.time(k)),
            "radius": sig12(h),
            "sup_norm": sig12(sup),
            "trace_drift": sig12(drift),
        }));
    }

    let value = json!({
        "dim": dim,
        "alpha": [sig12(solved.alpha.re), sig12(solved.alpha.im)],
        "checks": checks,
        "max_sup_norm": sig12(max_sup),
        "max_trace_drift": sig12(max_drift),
    });
    let path = out_dir.join("oracle_report.json");
    fs::write(&path, pretty_json(&value))?;
    Ok(vec![path])
}

fn run_sweep(scenario: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if scenario.model.kind != "waveguide" {
        return Err(Error::Scenario(
            "sweep varies the waveguide coupling; it needs model.kind = \"waveguide\"".into(),
        ));
    }
    if scenario.sweep.eta.is_empty() {
        return Err(Error::Scenario(
            "sweep.eta must list at least one coupling".into(),
        ));
    }
    let omega0 = ModelSection::require(scenario.model.omega0, "omega0")?;
    let xi0 = scenario.model.xi0.unwrap_or(1.0);
    let resonant = (scenario.omega_c - omega0).abs() < 1e-12 * xi0;

    let mut csv = String::from(
        "eta,bound_poles,pole_1,pole_2,residue_sum,continuum_weight,sum_rule_residual,\
         envelope_amplitude,envelope_frequency\n",
    );
    for &eta in &scenario.sweep.eta {
        let model = SpectralModel::waveguide(eta, omega0, xi0)?;
        let report = find_bound_poles(&model, scenario.omega_c)?;
        let poles: Vec<String> = report.bound_poles.iter().map(|p| num(p.omega)).collect();
        let residue_sum: f64 = report.bound_poles.iter().map(|p| p.residue).sum();
        let envelope = if resonant && report.bound_poles.len() == 2 {
            steady_envelope(eta, xi0).ok()
        } else {
            None
        };
        let (env_a, env_w) = match envelope {
            Some((a, w)) => (num(a), num(w)),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            num(eta),
            report.bound_poles.len(),
            poles.first().cloned().unwrap_or_default(),
            poles.get(1).cloned().unwrap_or_default(),
            num(residue_sum),
            num(report.continuum_weight),
            num(report.sum_rule_residual()),
            env_a,
            env_w,
        );
    }
    let path = out_dir.join("sweep.csv");
    fs::write(&path, csv)?;
    Ok(vec![path])
}

/// Deterministic pretty JSON (serde_json orders map keys alphabetically).
fn pretty_json(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        "omega_c = 8.0\n[model]\nkind = \"waveguide\"\neta = 2.0\nomega0 = 8.0\n"
    }

    #[test]
    fn minimal_scenario_gets_documented_defaults() {
        let s = Scenario::from_toml(minimal()).unwrap();
        assert_eq!(s.grid.dt, 1e-3);
        assert_eq!(s.grid.horizon, 20.0);
        assert_eq!(s.cat.amplitude(), Complex64::new(1.0, 0.0));
        assert_eq!(s.oracle.dim, 25);
        // No temperature fields: vacuum.
        assert_eq!(s.bath.build(&s.model).unwrap(), BathSpec::vacuum());
        // xi0 defaults to 1 (the frequency unit).
        assert_eq!(
            s.model.build().unwrap(),
            SpectralModel::waveguide(2.0, 8.0, 1.0).unwrap()
        );
    }

    #[test]
    fn unknown_and_missing_keys_are_named() {
        let err = Scenario::from_toml(&format!("{}typo_key = 1\n", minimal())).unwrap_err();
        assert!(err.to_string().contains("typo_key"), "{err}");

        let err = Scenario::from_toml("omega_c = 8.0\n[model]\nkind = \"waveguide\"\n")
            .unwrap_err();
        assert!(err.to_string().contains("model.eta"), "{err}");

        let err = Scenario::from_toml(
            "omega_c = 8.0\n[model]\nkind = \"ohmic\"\nkappa = 0.1\nomega_cut = 5.0\neta = 1.0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("model.eta"), "{err}");
    }

    #[test]
    fn temperature_fields_are_mutually_exclusive() {
        let text = format!("{}[bath]\ntheta = 1.0\nnbar_at_omega0 = 0.5\n", minimal());
        let err = Scenario::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"), "{err}");

        // Either alone is fine; the occupation form reproduces its n̄.
        let text = format!("{}[bath]\nnbar_at_omega0 = 0.5\n", minimal());
        let s = Scenario::from_toml(&text).unwrap();
        let bath = s.bath.build(&s.model).unwrap();
        assert!((bath.occupation(8.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_positive_dt_is_rejected_by_name() {
        let text = format!("{}[grid]\ndt = 0.0\n", minimal());
        let err = Scenario::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("grid.dt"), "{err}");
    }

    #[test]
    fn frame_times_accept_band_center_periods() {
        let s = Scenario::from_toml(minimal()).unwrap();
        // "2 T0" -> 4π/ω₀.
        let t = FrameTime::Expr("2 T0".into()).resolve(&s.model).unwrap();
        assert!((t - 4.0 * std::f64::consts::PI / 8.0).abs() < 1e-15);
        // Bare "T0" and a tight "0.5T0" both parse.
        let t = FrameTime::Expr("T0".into()).resolve(&s.model).unwrap();
        assert!((t - 2.0 * std::f64::consts::PI / 8.0).abs() < 1e-15);
        let t = FrameTime::Expr("0.5T0".into()).resolve(&s.model).unwrap();
        assert!((t - std::f64::consts::PI / 8.0).abs() < 1e-15);
        // Plain numbers, in either form.
        let t = FrameTime::Absolute(2.5).resolve(&s.model).unwrap();
        assert_eq!(t, 2.5);
        let t = FrameTime::Expr("2.5".into()).resolve(&s.model).unwrap();
        assert_eq!(t, 2.5);
        // Garbage is named.
        let err = FrameTime::Expr("two T0".into()).resolve(&s.model).unwrap_err();
        assert!(err.to_string().contains("two T0"), "{err}");
        // T0 units need omega0: the ohmic model has none.
        let ohmic = Scenario::from_toml(
            "omega_c = 1.0\n[model]\nkind = \"ohmic\"\nkappa = 0.1\nomega_cut = 5.0\n",
        )
        .unwrap();
        let err = FrameTime::Expr("1 T0".into()).resolve(&ohmic.model).unwrap_err();
        assert!(err.to_string().contains("model.omega0"), "{err}");
    }

    #[test]
    fn scenario_round_trips_through_its_echo() {
        let text = format!(
            "{}[bath]\ntheta = 0.8\n[grid]\ndt = 0.002\nhorizon = 5.0\n\
             [cat]\nalpha = 1.5\nalpha_im = -0.25\n\
             [frames]\ntimes = [0.0, \"1 T0\", 2.5]\nnx = 41\nny = 31\nhalf_width = 4.0\n\
             [sweep]\neta = [1.4, 1.42]\n[output]\ndir = \"results\"\n",
            minimal()
        );
        let s = Scenario::from_toml(&text).unwrap();
        let echoed = Scenario::from_toml(&s.to_toml().unwrap()).unwrap();
        assert_eq!(s, echoed);
    }

    #[test]
    fn twelve_digit_formatting_is_stable() {
        assert_eq!(num(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(num(0.0), "0.00000000000e0");
        assert_eq!(num(-1.0 / 3.0), "-3.33333333333e-1");
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        // An empty f64 sum is -0.0; outputs must canonicalize the sign away.
        let empty_sum: f64 = std::iter::empty::<f64>().sum();
        assert_eq!(num(empty_sum), "0.00000000000e0");
        assert!(sig12(empty_sum).is_sign_positive());
    }
}
