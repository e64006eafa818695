//! The `report.json` layout and re-evaluation of a solution from it.

use heatrobin_core::spectral::evaluate_series;
use heatrobin_core::verify::VerificationReport;
use heatrobin_core::{
    EigenSystem, ModalSeries, NeumannNeumannSolution, Parity, Poly2, RobinKind, RodParams, SemiAnalyticSolution,
};
use serde::{Deserialize, Serialize};

use crate::config::BoundaryName;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityName {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub parity: ParityName,
    /// Coefficients of `x^{2i}` (even) or `x^{2i+1}` (odd).
    pub coeffs: Vec<f64>,
    pub d: f64,
}

/// Everything needed to evaluate an extension-method solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobinRecord {
    pub k: f64,
    pub nu: f64,
    pub l: f64,
    pub profile: ProfileRecord,
    #[serde(rename = "C_T")]
    pub offset: f64,
    /// `F`-driven particular solution, `rows[i][m]` multiplying `x^i t^m`.
    pub particular: Vec<Vec<f64>>,
    /// Evolved profile plus particular solution.
    pub poly_part: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub brackets: Vec<(f64, f64)>,
    pub residuals: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub amplitude_bound: f64,
    pub tol: f64,
}

/// Cosine coefficients of a Neumann–Neumann solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosineRecord {
    pub k: f64,
    pub initial_coeffs: Vec<f64>,
    pub source_coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SolutionRecord {
    Extension(RobinRecord),
    CosineSeries(CosineRecord),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub pde_residual_max: f64,
    pub bc_residual_left: f64,
    pub bc_residual_right: f64,
    pub initial_l2_error: f64,
    pub oracle_max_diff: Option<f64>,
    pub compatibility_defect: f64,
    pub diagnostics: Vec<String>,
}

impl From<VerificationReport> for VerificationRecord {
    fn from(r: VerificationReport) -> Self {
        VerificationRecord {
            pde_residual_max: r.pde_residual_max,
            bc_residual_left: r.bc_residual_left,
            bc_residual_right: r.bc_residual_right,
            initial_l2_error: r.initial_l2_error,
            oracle_max_diff: r.oracle_max_diff,
            compatibility_defect: r.compatibility_defect,
            diagnostics: r.diagnostics,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub boundary: BoundaryName,
    /// Output grid.
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub solution: SolutionRecord,
    pub verification: VerificationRecord,
}

impl RobinRecord {
    pub fn from_solution(sol: &SemiAnalyticSolution) -> Self {
        let eigen = &sol.modal.eigen;
        RobinRecord {
            k: eigen.params.diffusivity,
            nu: eigen.params.transfer,
            l: eigen.params.length,
            profile: ProfileRecord {
                parity: match sol.profile.parity {
                    Parity::Even => ParityName::Even,
                    Parity::Odd => ParityName::Odd,
                },
                coeffs: sol.profile.coeffs.clone(),
                d: sol.profile.d,
            },
            offset: sol.modal.offset,
            particular: sol.particular.rows().to_vec(),
            poly_part: sol.poly_part.rows().to_vec(),
            eigenvalues: eigen.roots.clone(),
            brackets: eigen.brackets.clone(),
            residuals: eigen.residuals.clone(),
            amplitudes: sol.modal.amplitudes.clone(),
            amplitude_bound: sol.modal.amplitude_bound,
            tol: sol.options.tol,
        }
    }
}

impl CosineRecord {
    pub fn from_solution(sol: &NeumannNeumannSolution) -> Self {
        CosineRecord {
            k: sol.diffusivity,
            initial_coeffs: sol.initial_coeffs.clone(),
            source_coeffs: sol.source_coeffs.clone(),
        }
    }
}

/// Point evaluator rebuilt from a [`SolutionRecord`]; the CSV is always
/// produced through this, so a re-read report reproduces it exactly.
pub enum Evaluator {
    Extension { poly: Poly2, series: ModalSeries, tol: f64 },
    CosineSeries(NeumannNeumannSolution),
}

impl Evaluator {
    pub fn new(record: &SolutionRecord) -> Self {
        match record {
            SolutionRecord::Extension(r) => {
                let kind = match r.profile.parity {
                    ParityName::Even => RobinKind::NeumannRobin,
                    ParityName::Odd => RobinKind::DirichletRobin,
                };
                let eigen = EigenSystem {
                    kind,
                    params: RodParams::new(r.k, r.nu, r.l),
                    roots: r.eigenvalues.clone(),
                    brackets: r.brackets.clone(),
                    residuals: r.residuals.clone(),
                };
                Evaluator::Extension {
                    poly: Poly2::from_coeffs(r.poly_part.clone()),
                    series: ModalSeries {
                        eigen,
                        amplitudes: r.amplitudes.clone(),
                        offset: r.offset,
                        amplitude_bound: r.amplitude_bound,
                    },
                    tol: r.tol,
                }
            }
            SolutionRecord::CosineSeries(r) => Evaluator::CosineSeries(NeumannNeumannSolution {
                diffusivity: r.k,
                initial_coeffs: r.initial_coeffs.clone(),
                source_coeffs: r.source_coeffs.clone(),
            }),
        }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        match self {
            Evaluator::Extension { poly, series, tol } => evaluate_series(series, x, t, *tol).value + poly.eval(x, t),
            Evaluator::CosineSeries(sol) => sol.eval_series(x, t),
        }
    }
}
