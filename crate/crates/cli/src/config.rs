//! JSON problem files.
//!
//! ```json
//! {
//!   "k": 0.25, "nu": 0.5, "l": 1, "T": 1,
//!   "boundary": "neumann_robin",
//!   "mu0": [1, 0, 2],
//!   "F": [[0, 2, 3]],
//!   "T0": [5, 1, 1, 1],
//!   "grid": { "nx": 41, "nt": 41, "t_min": 0.01, "M": 200, "K": 200 },
//!   "series": { "n_max": 64, "tol": 1e-10 }
//! }
//! ```
//!
//! `mu0[i]` multiplies `x^i`, `T0[m]` multiplies `t^m` and `F[i][m]`
//! multiplies `x^i t^m`.

use std::path::{Path, PathBuf};

use heatrobin_core::spectral::{DEFAULT_MODES, DEFAULT_SERIES_TOL};
use heatrobin_core::{BoundaryKind, Poly1, Poly2, ProblemSpec, SolveOptions, Var};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MAX_STEPS: usize = 10_000;
pub const MAX_MODES: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryName {
    NeumannRobin,
    DirichletRobin,
    NeumannNeumann,
}

impl From<BoundaryName> for BoundaryKind {
    fn from(b: BoundaryName) -> Self {
        match b {
            BoundaryName::NeumannRobin => BoundaryKind::NeumannRobin,
            BoundaryName::DirichletRobin => BoundaryKind::DirichletRobin,
            BoundaryName::NeumannNeumann => BoundaryKind::NeumannNeumann,
        }
    }
}

impl From<BoundaryKind> for BoundaryName {
    fn from(b: BoundaryKind) -> Self {
        match b {
            BoundaryKind::NeumannRobin => BoundaryName::NeumannRobin,
            BoundaryKind::DirichletRobin => BoundaryName::DirichletRobin,
            BoundaryKind::NeumannNeumann => BoundaryName::NeumannNeumann,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    /// Output and residual sample counts in `x` and `t`.
    #[serde(default = "default_samples")]
    pub nx: usize,
    #[serde(default = "default_samples")]
    pub nt: usize,
    /// Residuals and the oracle comparison use `t ≥ t_min`.
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    /// Crank–Nicolson space intervals.
    #[serde(rename = "M", default = "default_steps")]
    pub space_steps: usize,
    /// Crank–Nicolson time steps.
    #[serde(rename = "K", default = "default_steps")]
    pub time_steps: usize,
}

fn default_samples() -> usize {
    41
}

fn default_t_min() -> f64 {
    0.01
}

fn default_steps() -> usize {
    200
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            nx: default_samples(),
            nt: default_samples(),
            t_min: default_t_min(),
            space_steps: default_steps(),
            time_steps: default_steps(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSettings {
    #[serde(default = "default_modes")]
    pub n_max: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_modes() -> usize {
    DEFAULT_MODES
}

fn default_tol() -> f64 {
    DEFAULT_SERIES_TOL
}

impl Default for SeriesSettings {
    fn default() -> Self {
        SeriesSettings {
            n_max: default_modes(),
            tol: default_tol(),
        }
    }
}

impl From<SeriesSettings> for SolveOptions {
    fn from(s: SeriesSettings) -> Self {
        SolveOptions {
            n_max: s.n_max,
            tol: s.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_report")]
    pub report: String,
}

fn default_csv() -> String {
    "solution.csv".into()
}

fn default_report() -> String {
    "report.json".into()
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings {
            csv: default_csv(),
            report: default_report(),
        }
    }
}

/// The file as written by the user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub k: f64,
    #[serde(default)]
    pub nu: Option<f64>,
    pub l: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub boundary: BoundaryName,
    pub mu0: Vec<f64>,
    #[serde(rename = "F", default)]
    pub source: Vec<Vec<f64>>,
    #[serde(rename = "T0", default)]
    pub ambient: Vec<f64>,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub series: SeriesSettings,
    #[serde(default)]
    pub output: OutputSettings,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    pub grid: GridSettings,
    pub series: SeriesSettings,
    pub output: OutputSettings,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> Result<RunConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| config_error(path, e.to_string()))?;
    let located = |field: &str, message: String| {
        let message = match key_line(text, field) {
            Some(line) => format!("field `{field}` (line {line}): {message}"),
            None => format!("field `{field}`: {message}"),
        };
        config_error(path, message)
    };
    let run = raw.into_run_config().map_err(|(field, msg)| located(field, msg))?;
    if let Err(heatrobin_core::Error::InvalidParameter { name, reason }) = run.spec.validate() {
        return Err(located(name, reason));
    }
    Ok(run)
}

fn config_error(path: &Path, message: String) -> CliError {
    CliError::Config {
        path: PathBuf::from(path),
        message,
    }
}

/// Line of the first `"key":` occurrence.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|line| line.contains(&needle)).map(|i| i + 1)
}

impl RawConfig {
    fn into_run_config(self) -> Result<RunConfig, (&'static str, String)> {
        let boundary = BoundaryKind::from(self.boundary);
        let transfer = match (boundary, self.nu) {
            (BoundaryKind::NeumannNeumann, nu) => nu.unwrap_or(0.0),
            (_, Some(nu)) => nu,
            (_, None) => return Err(("nu", "required for Robin boundaries".into())),
        };
        let g = &self.grid;
        if !(2..=MAX_STEPS).contains(&g.nx) {
            return Err(("nx", format!("must be between 2 and {MAX_STEPS}, got {}", g.nx)));
        }
        if !(2..=MAX_STEPS).contains(&g.nt) {
            return Err(("nt", format!("must be between 2 and {MAX_STEPS}, got {}", g.nt)));
        }
        if !(8..=MAX_STEPS).contains(&g.space_steps) {
            return Err(("M", format!("must be between 8 and {MAX_STEPS}, got {}", g.space_steps)));
        }
        if !(8..=MAX_STEPS).contains(&g.time_steps) {
            return Err(("K", format!("must be between 8 and {MAX_STEPS}, got {}", g.time_steps)));
        }
        if !(g.t_min >= 0.0 && g.t_min < self.horizon) {
            return Err(("t_min", format!("must lie in [0, T), got {}", g.t_min)));
        }
        if !(1..=MAX_MODES).contains(&self.series.n_max) {
            return Err(("n_max", format!("must be between 1 and {MAX_MODES}, got {}", self.series.n_max)));
        }
        if !(self.series.tol.is_finite() && self.series.tol > 0.0) {
            return Err(("tol", format!("must be positive, got {}", self.series.tol)));
        }
        for (field, name) in [(&self.output.csv, "csv"), (&self.output.report, "report")] {
            if field.is_empty() || field.contains(['/', '\\']) {
                return Err((name, format!("must be a plain file name, got {field:?}")));
            }
        }
        let spec = ProblemSpec {
            diffusivity: self.k,
            transfer,
            length: self.l,
            horizon: self.horizon,
            boundary,
            initial: Poly1::new(Var::X, self.mu0),
            source: Poly2::from_coeffs(self.source),
            ambient: Poly1::new(Var::T, self.ambient),
        };
        Ok(RunConfig {
            spec,
            grid: self.grid,
            series: self.series,
            output: self.output,
        })
    }
}
