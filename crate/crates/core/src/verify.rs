//! Independent checks on a computed solution.
//!
//! [`crank_nicolson_reference`] is a plain finite-difference solver that
//! shares nothing with the semi-analytic path except the problem statement.
//! [`residual_report`] measures PDE and boundary residuals of any
//! [`SolutionField`] by central differences and optionally compares it with the
//! finite-difference reference.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::polyalg::Poly1;
use crate::quadrature::integrate;
use crate::solver::{
    solve_neumann_neumann, BoundaryKind, CosineData, NeumannNeumannSolution, ProblemSpec,
    SemiAnalyticSolution,
};

/// Anything that can be evaluated on `[0, l] × [0, T]`.
pub trait SolutionField {
    /// Must be smooth in both arguments; residuals are taken by differencing.
    fn value(&self, x: f64, t: f64) -> f64;

    /// Free-form findings appended to a report.
    fn findings(&self) -> Vec<String> {
        Vec::new()
    }
}

impl SolutionField for SemiAnalyticSolution {
    fn value(&self, x: f64, t: f64) -> f64 {
        self.eval_all_terms(x, t)
    }

    fn findings(&self) -> Vec<String> {
        use crate::extension::ExtensionWarning;
        use crate::solver::SolveWarning;
        let mut out = self.matrix_findings();
        for w in &self.warnings {
            out.push(match w {
                SolveWarning::Incompatible { defect } => alloc::format!(
                    "initial and boundary data are incompatible at (l, 0): defect {defect}"
                ),
                SolveWarning::Extension(ExtensionWarning::DegenerateAugmented { singular_row, pinned_value }) => {
                    alloc::format!(
                        "singular pivot at row {singular_row}; basis augmented with lowest coefficient {pinned_value}"
                    )
                }
            });
        }
        out
    }
}

impl SolutionField for NeumannNeumannSolution {
    fn value(&self, x: f64, t: f64) -> f64 {
        self.eval_series(x, t)
    }
}

/// Values on a uniform space-time grid, row-major in time.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSolution {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridSolution {
    pub fn at(&self, time_index: usize, space_index: usize) -> f64 {
        self.values[time_index * self.xs.len() + space_index]
    }

    pub fn row(&self, time_index: usize) -> &[f64] {
        let n = self.xs.len();
        &self.values[time_index * n..(time_index + 1) * n]
    }
}

/// Implicit-Euler substeps replacing the first Crank–Nicolson step; damps the
/// high modes an incompatible corner excites, which Crank–Nicolson leaves
/// undamped.
pub const STARTUP_SUBSTEPS: usize = 4;

/// Solves `A x = rhs` for tridiagonal `A` (sub, diag, sup); `diag` and `rhs`
/// are overwritten.
fn thomas(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    }
}

struct Discretization {
    first: usize,
    h: f64,
    // semi-discrete operator rows for the unknowns first..=M
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl Discretization {
    fn new(spec: &ProblemSpec, m: usize) -> Self {
        let h = spec.length / m as f64;
        let k = spec.diffusivity;
        let c = k / (h * h);
        let first = if spec.boundary == BoundaryKind::DirichletRobin { 1 } else { 0 };
        let n = m + 1 - first;
        let mut sub = vec![c; n];
        let mut diag = vec![-2.0 * c; n];
        let mut sup = vec![c; n];
        sub[0] = 0.0;
        sup[n - 1] = 0.0;
        if first == 0 {
            // ghost u_{-1} = u_1
            sup[0] = 2.0 * c;
        }
        // ghost u_{M+1} = u_{M-1} - (2hν/k)(u_M - T0)
        sub[n - 1] = 2.0 * c;
        if spec.boundary != BoundaryKind::NeumannNeumann {
            diag[n - 1] -= 2.0 * spec.transfer / h;
        }
        Discretization {
            first,
            h,
            sub,
            diag,
            sup,
        }
    }

    fn forcing(&self, spec: &ProblemSpec, t: f64) -> Vec<f64> {
        let n = self.diag.len();
        let mut g: Vec<f64> = (0..n)
            .map(|j| spec.source.eval((j + self.first) as f64 * self.h, t))
            .collect();
        if spec.boundary != BoundaryKind::NeumannNeumann {
            g[n - 1] += 2.0 * spec.transfer / self.h * spec.ambient.eval(t);
        }
        g
    }

    fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        (0..n)
            .map(|j| {
                let mut v = self.diag[j] * u[j];
                if j > 0 {
                    v += self.sub[j] * u[j - 1];
                }
                if j + 1 < n {
                    v += self.sup[j] * u[j + 1];
                }
                v
            })
            .collect()
    }

    /// One θ-step of size `dt` from `t`.
    fn step(&self, spec: &ProblemSpec, u: &mut [f64], t: f64, dt: f64, theta: f64) {
        let lu = self.apply(u);
        let g0 = self.forcing(spec, t);
        let g1 = self.forcing(spec, t + dt);
        let mut rhs: Vec<f64> = (0..u.len())
            .map(|j| u[j] + dt * ((1.0 - theta) * (lu[j] + g0[j]) + theta * g1[j]))
            .collect();
        let sub: Vec<f64> = self.sub.iter().map(|s| -theta * dt * s).collect();
        let sup: Vec<f64> = self.sup.iter().map(|s| -theta * dt * s).collect();
        let mut diag: Vec<f64> = self.diag.iter().map(|d| 1.0 - theta * dt * d).collect();
        thomas(&sub, &mut diag, &sup, &mut rhs);
        u.copy_from_slice(&rhs);
    }
}

/// Crank–Nicolson on `M` space and `K` time intervals, ghost-point boundary
/// closures, the first step split into [`STARTUP_SUBSTEPS`] implicit-Euler
/// substeps.
pub fn crank_nicolson_reference(spec: &ProblemSpec, m: usize, k: usize) -> Result<GridSolution> {
    crank_nicolson_with_startup(spec, m, k, STARTUP_SUBSTEPS)
}

/// As [`crank_nicolson_reference`] with an explicit number of startup
/// substeps (0 gives pure Crank–Nicolson).
pub fn crank_nicolson_with_startup(
    spec: &ProblemSpec,
    m: usize,
    k: usize,
    startup_substeps: usize,
) -> Result<GridSolution> {
    spec.validate()?;
    if m < 8 {
        return Err(invalid("M", "at least 8 space intervals are required"));
    }
    if k < 8 {
        return Err(invalid("K", "at least 8 time steps are required"));
    }
    let disc = Discretization::new(spec, m);
    let h = disc.h;
    let dt = spec.horizon / k as f64;
    let xs: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
    let ts: Vec<f64> = (0..=k).map(|n| n as f64 * dt).collect();

    let mut values = Vec::with_capacity((m + 1) * (k + 1));
    values.extend(xs.iter().map(|&x| spec.initial.eval(x)));
    let mut u: Vec<f64> = xs[disc.first..].iter().map(|&x| spec.initial.eval(x)).collect();
    for n in 0..k {
        let t = ts[n];
        if n == 0 && startup_substeps > 0 {
            let sub_dt = dt / startup_substeps as f64;
            for s in 0..startup_substeps {
                disc.step(spec, &mut u, t + s as f64 * sub_dt, sub_dt, 1.0);
            }
        } else {
            disc.step(spec, &mut u, t, dt, 0.5);
        }
        if disc.first == 1 {
            values.push(0.0);
        }
        values.extend_from_slice(&u);
    }
    Ok(GridSolution { xs, ts, values })
}

/// Where and how finely a report samples the solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportParams {
    pub nx: usize,
    pub nt: usize,
    /// Residuals are taken on `t ∈ [t_min, T]`.
    pub t_min: f64,
    /// Central-difference step in both variables.
    pub step: f64,
    pub oracle: Option<OracleParams>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleParams {
    pub space_steps: usize,
    pub time_steps: usize,
    /// Comparison uses grid levels with `t ≥ t_min`.
    pub t_min: f64,
}

impl Default for ReportParams {
    fn default() -> Self {
        ReportParams {
            nx: 41,
            nt: 41,
            t_min: 0.01,
            step: 1e-4,
            oracle: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub pde_residual_max: f64,
    pub bc_residual_left: f64,
    pub bc_residual_right: f64,
    pub initial_l2_error: f64,
    pub oracle_max_diff: Option<f64>,
    /// Absolute corner defect `|k μ0'(l) + ν(μ0(l) - T0(0))|`.
    pub compatibility_defect: f64,
    pub diagnostics: Vec<String>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// `‖u(·,0) - μ0‖_{L2(0,l)}` by adaptive quadrature.
pub fn initial_l2_error(sol: &dyn SolutionField, initial: &Poly1, length: f64, min_panels: usize) -> f64 {
    let sq = integrate(
        |x| {
            let d = sol.value(x, 0.0) - initial.eval(x);
            d * d
        },
        0.0,
        length,
        1e-14,
        min_panels,
    );
    libm::sqrt(sq.value.max(0.0))
}

// Fourth-order central differences; early-time modes make second-order
// stencils too coarse at the default step.
fn slope4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn curvature4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
}

pub fn residual_report(sol: &dyn SolutionField, spec: &ProblemSpec, params: &ReportParams) -> Result<VerificationReport> {
    spec.validate()?;
    let k = spec.diffusivity;
    let h = params.step;
    let xs = linspace(0.0, spec.length, params.nx);
    let ts = linspace(params.t_min, spec.horizon, params.nt);

    let mut pde: f64 = 0.0;
    for &t in &ts {
        for &x in &xs {
            let u_t = slope4(|s| sol.value(x, s), t, h);
            let u_xx = curvature4(|y| sol.value(y, t), x, h);
            pde = pde.max((u_t - k * u_xx - spec.source.eval(x, t)).abs());
        }
    }

    let slope = |x: f64, t: f64| slope4(|y| sol.value(y, t), x, h);
    let l = spec.length;
    let mut left: f64 = 0.0;
    let mut right: f64 = 0.0;
    for &t in &ts {
        left = left.max(match spec.boundary {
            BoundaryKind::DirichletRobin => sol.value(0.0, t).abs(),
            _ => slope(0.0, t).abs(),
        });
        right = right.max(match spec.boundary {
            BoundaryKind::NeumannNeumann => slope(l, t).abs(),
            _ => (k * slope(l, t) + spec.transfer * (sol.value(l, t) - spec.ambient.eval(t))).abs(),
        });
    }

    let oracle_max_diff = match params.oracle {
        None => None,
        Some(o) => {
            let grid = crank_nicolson_reference(spec, o.space_steps, o.time_steps)?;
            Some(max_grid_difference(sol, &grid, o.t_min))
        }
    };

    let diagnostics = sol.findings();
    Ok(VerificationReport {
        pde_residual_max: pde,
        bc_residual_left: left,
        bc_residual_right: right,
        initial_l2_error: initial_l2_error(sol, &spec.initial, spec.length, 256),
        oracle_max_diff,
        compatibility_defect: spec.compatibility_defect().abs(),
        diagnostics,
    })
}

/// Largest `|u - grid|` over grid levels with `t ≥ t_min`, sampling at most
/// about a hundred points per direction.
pub fn max_grid_difference(sol: &dyn SolutionField, grid: &GridSolution, t_min: f64) -> f64 {
    let sx = (grid.xs.len() / 100).max(1);
    let st = (grid.ts.len() / 100).max(1);
    let mut worst: f64 = 0.0;
    for (n, &t) in grid.ts.iter().enumerate() {
        if t < t_min - 1e-12 || (n % st != 0 && n + 1 != grid.ts.len()) {
            continue;
        }
        for (i, &x) in grid.xs.iter().enumerate() {
            if i % sx != 0 && i + 1 != grid.xs.len() {
                continue;
            }
            worst = worst.max((sol.value(x, t) - grid.at(n, i)).abs());
        }
    }
    worst
}

/// Sampling for [`two_forms_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoFormsParams {
    pub nx: usize,
    pub nt: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub n_max: usize,
}

impl Default for TwoFormsParams {
    fn default() -> Self {
        TwoFormsParams {
            nx: 21,
            nt: 11,
            t_min: 0.01,
            t_max: 1.0,
            n_max: 200,
        }
    }
}

/// Max difference between the separated-variables series and the kernel form
/// of the Neumann–Neumann solution on `[0,1] × [t_min, t_max]`.
pub fn two_forms_check(source: &Poly1, initial: &Poly1, diffusivity: f64, params: &TwoFormsParams) -> Result<f64> {
    let sol = solve_neumann_neumann(
        &CosineData::Poly(source.clone()),
        &CosineData::Poly(initial.clone()),
        diffusivity,
        params.n_max,
    )?;
    let mut worst: f64 = 0.0;
    for t in linspace(params.t_min, params.t_max, params.nt) {
        let weights = sol.kernel_time_integrals(t);
        for x in linspace(0.0, 1.0, params.nx) {
            let a = sol.eval_series(x, t);
            let b = sol.eval_kernel_form_with(x, t, &weights);
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{Poly2, Var};

    fn spec(boundary: BoundaryKind, initial: Poly1, ambient: Poly1, source: Poly2) -> ProblemSpec {
        ProblemSpec {
            diffusivity: 0.25,
            transfer: 0.5,
            length: 1.0,
            horizon: 1.0,
            boundary,
            initial,
            source,
            ambient,
        }
    }

    #[test]
    fn steady_state_is_preserved() {
        let c = 2.75;
        let s = spec(
            BoundaryKind::NeumannRobin,
            Poly1::constant(Var::X, c),
            Poly1::constant(Var::T, c),
            Poly2::zero(),
        );
        let grid = crank_nicolson_reference(&s, 16, 16).unwrap();
        assert!(grid.values.iter().all(|v| (v - c).abs() < 1e-12));
    }

    #[test]
    fn dirichlet_decay() {
        let s = spec(
            BoundaryKind::DirichletRobin,
            Poly1::new(Var::X, vec![0.0, 1.0]),
            Poly1::zero(Var::T),
            Poly2::zero(),
        );
        let grid = crank_nicolson_reference(&s, 40, 40).unwrap();
        let maxima: Vec<f64> = (0..grid.ts.len())
            .map(|n| grid.row(n).iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .collect();
        assert!(maxima.windows(2).all(|w| w[1] < w[0]));
        assert!(grid.row(5)[0] == 0.0);
    }

    #[test]
    fn grid_is_validated() {
        let s = spec(
            BoundaryKind::NeumannRobin,
            Poly1::zero(Var::X),
            Poly1::zero(Var::T),
            Poly2::zero(),
        );
        assert!(crank_nicolson_reference(&s, 4, 16).is_err());
        assert!(crank_nicolson_reference(&s, 16, 7).is_err());
    }

    #[test]
    fn two_forms_trivial() {
        let d = two_forms_check(
            &Poly1::zero(Var::X),
            &Poly1::constant(Var::X, 1.0),
            1.0,
            &TwoFormsParams::default(),
        )
        .unwrap();
        assert_eq!(d, 0.0);
    }
}
