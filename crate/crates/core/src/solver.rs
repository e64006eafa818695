//! End-to-end solution of the Neumann–Robin and Dirichlet–Robin problems, and
//! the two solution forms of the Neumann–Neumann problem on `(0, 1)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, require_positive, Error, Result};
use crate::extension::{
    build_coefficient_system, compare_with_printed, duhamel_poly, match_boundary_polynomial,
    robin_trace, ExtensionProfile, ExtensionWarning, RodParams,
};
use crate::polyalg::{trig_poly_integrals_upto, Poly1, Poly2, Var};
use crate::quadrature::{integrate, integrate_gaussian_weighted};
use crate::spectral::{
    eigenvalues, evaluate_series, ModalSeries, RobinKind, SeriesValue, DEFAULT_MODES, DEFAULT_SERIES_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// `u_x(0,t) = 0`, Robin at `x = l`.
    NeumannRobin,
    /// `u(0,t) = 0`, Robin at `x = l`.
    DirichletRobin,
    /// `u_x = 0` at both ends of `(0, 1)`; time-independent source only.
    NeumannNeumann,
}

impl BoundaryKind {
    pub fn robin_kind(self) -> Option<RobinKind> {
        match self {
            BoundaryKind::NeumannRobin => Some(RobinKind::NeumannRobin),
            BoundaryKind::DirichletRobin => Some(RobinKind::DirichletRobin),
            BoundaryKind::NeumannNeumann => None,
        }
    }
}

/// Full problem statement.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub diffusivity: f64,
    pub transfer: f64,
    pub length: f64,
    pub horizon: f64,
    pub boundary: BoundaryKind,
    /// `μ0(x)`.
    pub initial: Poly1,
    /// `F(x, t)`.
    pub source: Poly2,
    /// Ambient temperature `T0(t)`; unused for Neumann–Neumann.
    pub ambient: Poly1,
}

impl ProblemSpec {
    pub fn params(&self) -> RodParams {
        RodParams::new(self.diffusivity, self.transfer, self.length)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("k", self.diffusivity)?;
        require_positive("l", self.length)?;
        require_positive("T", self.horizon)?;
        if self.boundary != BoundaryKind::NeumannNeumann {
            require_positive("nu", self.transfer)?;
        }
        if self.initial.var() != Var::X {
            return Err(invalid("mu0", "must be a polynomial in x"));
        }
        if self.ambient.var() != Var::T {
            return Err(invalid("T0", "must be a polynomial in t"));
        }
        let finite = self.initial.coeffs().iter().all(|c| c.is_finite())
            && self.ambient.coeffs().iter().all(|c| c.is_finite())
            && self.source.terms().all(|(_, _, c)| c.is_finite());
        if !finite {
            return Err(invalid("coefficients", "all polynomial coefficients must be finite"));
        }
        if self.boundary == BoundaryKind::NeumannNeumann {
            if self.length != 1.0 {
                return Err(invalid("l", "the Neumann-Neumann problem is posed on (0, 1); l must be 1"));
            }
            if !self.source.is_time_independent() {
                return Err(invalid("F", "the Neumann-Neumann problem needs a time-independent source"));
            }
        }
        Ok(())
    }

    /// `k μ0'(l) + ν (μ0(l) - T0(0))`; zero when the data agree at the corner.
    pub fn compatibility_defect(&self) -> f64 {
        let l = self.length;
        match self.boundary {
            BoundaryKind::NeumannNeumann => self.diffusivity * self.initial.derivative().eval(l),
            _ => {
                self.diffusivity * self.initial.derivative().eval(l)
                    + self.transfer * (self.initial.eval(l) - self.ambient.eval(0.0))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Number of eigenmodes stored.
    pub n_max: usize,
    /// Tail tolerance used by [`SemiAnalyticSolution::eval`].
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            n_max: DEFAULT_MODES,
            tol: DEFAULT_SERIES_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveWarning {
    /// Initial and boundary data disagree at `(l, 0)`; the series absorbs the
    /// jump in L2 only.
    Incompatible { defect: f64 },
    Extension(ExtensionWarning),
}

/// `u = poly_part + modal`, with `poly_part = u1 + u_p` and the constant
/// offset carried by the modal series.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiAnalyticSolution {
    pub spec: ProblemSpec,
    pub options: SolveOptions,
    /// Duhamel particular solution `u_p`.
    pub particular: Poly2,
    pub profile: ExtensionProfile,
    /// Evolution `u1` of the profile.
    pub evolved_profile: Poly2,
    pub poly_part: Poly2,
    pub modal: ModalSeries,
    pub warnings: Vec<SolveWarning>,
}

impl SemiAnalyticSolution {
    /// Value with the series truncated at the configured tolerance.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.eval_detailed(x, t).value
    }

    pub fn eval_detailed(&self, x: f64, t: f64) -> SeriesValue {
        let mut v = evaluate_series(&self.modal, x, t, self.options.tol);
        v.value += self.poly_part.eval(x, t);
        v
    }

    /// Value using every stored mode; smooth in `(x, t)`, which finite
    /// differences need.
    pub fn eval_all_terms(&self, x: f64, t: f64) -> f64 {
        self.poly_part.eval(x, t) + self.modal.evaluate_all(x, t)
    }

    /// `μ0 - μ - C_T`, the initial datum of the homogeneous correction.
    pub fn initial_residual(&self) -> Poly1 {
        let mu = self.profile.to_poly();
        let shifted = &self.spec.initial - &mu;
        &shifted - &Poly1::constant(Var::X, self.modal.offset)
    }

    /// Entries where the generated coefficient system differs from the
    /// closed form with the opposite `2k/ν` sign.
    pub fn matrix_findings(&self) -> Vec<String> {
        let degree = self.profile.coeffs.len().saturating_sub(1);
        let system = build_coefficient_system(degree, &self.spec.params(), self.profile.parity);
        compare_with_printed(&system)
            .into_iter()
            .map(|d| {
                format!(
                    "coefficient system ({}, {}): generated {} vs printed {}",
                    d.row, d.col, d.generated, d.printed
                )
            })
            .collect()
    }
}

/// Runs the extension pipeline:
///
/// 1. `u_p` from the source by Duhamel's principle;
/// 2. target boundary data `T0 - trace(u_p)`;
/// 3. profile `μ` whose evolved trace equals the target;
/// 4. `u1 = evolve(μ)`, offset `C_T = T0(0) - trace(u1 + u_p)(0)`;
/// 5. eigen-expansion of `μ0 - μ - C_T`.
pub fn solve_problem(spec: &ProblemSpec, options: &SolveOptions) -> Result<SemiAnalyticSolution> {
    spec.validate()?;
    let kind = spec
        .boundary
        .robin_kind()
        .ok_or(Error::Unsupported("use solve_neumann_neumann for Neumann-Neumann problems"))?;
    if options.tol.is_nan() || options.tol <= 0.0 {
        return Err(invalid("tol", "must be positive"));
    }
    let params = spec.params();
    let parity = kind.parity();

    let particular = duhamel_poly(&spec.source, spec.diffusivity, parity)?;
    let particular_trace = robin_trace(&particular, &params);
    let target = &spec.ambient - &particular_trace;
    let mut profile = match_boundary_polynomial(&target, &params, parity)?;
    let evolved_profile = profile.evolve(spec.diffusivity);
    let offset = spec.ambient.eval(0.0) - (profile.d + particular_trace.eval(0.0));
    profile.offset = offset;

    let eigen = eigenvalues(kind, &params, options.n_max)?;
    let mu = profile.to_poly();
    let residual = &(&spec.initial - &mu) - &Poly1::constant(Var::X, offset);
    let modal = ModalSeries::from_residual(eigen, &residual, offset);

    let mut warnings: Vec<SolveWarning> = profile
        .warnings
        .iter()
        .cloned()
        .map(SolveWarning::Extension)
        .collect();
    let defect = spec.compatibility_defect();
    let scale = spec.diffusivity * spec.initial.derivative().eval(spec.length).abs()
        + spec.transfer * (spec.initial.eval(spec.length).abs() + spec.ambient.eval(0.0).abs());
    if defect.abs() > 1e-12 * scale.max(1.0) {
        warnings.push(SolveWarning::Incompatible { defect });
    }

    let poly_part = &evolved_profile + &particular;
    Ok(SemiAnalyticSolution {
        spec: spec.clone(),
        options: *options,
        particular,
        profile,
        evolved_profile,
        poly_part,
        modal,
        warnings,
    })
}

/// `∫ cos(nπy) (4πkt)^{-1/2} e^{-y²/4kt} dy = e^{-n²π²kt}`.
pub fn kernel_cosine_transform(n: usize, diffusivity: f64, t: f64) -> f64 {
    let w = n as f64 * PI;
    libm::exp(-w * w * diffusivity * t)
}

/// Kernel applied to `cos(nπ·)` and evaluated at `x`: `cos(nπx) e^{-n²π²kt}`.
pub fn kernel_cosine_transform_shifted(n: usize, diffusivity: f64, t: f64, x: f64) -> f64 {
    libm::cos(n as f64 * PI * x) * kernel_cosine_transform(n, diffusivity, t)
}

/// The same transform by adaptive quadrature over the real line, for
/// `(closed form, quadrature)` comparison.
pub fn kernel_cosine_self_test(n: usize, diffusivity: f64, t: f64) -> (f64, f64) {
    let s = 4.0 * diffusivity * t;
    let w = n as f64 * PI;
    let span = 18.0 * libm::sqrt(s);
    let panels = 8usize.max((4.0 * w * span / (2.0 * PI)) as usize + 1);
    let quad = integrate_gaussian_weighted(|y| libm::cos(w * y), 0.0, s, 1e-14, panels);
    (kernel_cosine_transform(n, diffusivity, t), quad.value)
}

/// Data for the Neumann–Neumann problem: a polynomial on `(0, 1)` or its
/// cosine coefficients `(a_0, a_1, ...)` in `a_0 + Σ a_n cos(nπx)`.
#[derive(Clone, Debug, PartialEq)]
pub enum CosineData {
    Poly(Poly1),
    Coefficients(Vec<f64>),
}

impl CosineData {
    /// Cosine coefficients up to index `n_max`.
    pub fn coefficients(&self, n_max: usize) -> Vec<f64> {
        match self {
            CosineData::Coefficients(c) => {
                let mut out = c.clone();
                out.resize(n_max + 1, 0.0);
                out
            }
            CosineData::Poly(p) => {
                let mut out = Vec::with_capacity(n_max + 1);
                out.push(p.antiderivative().eval(1.0));
                if let Some(deg) = p.degree() {
                    for n in 1..=n_max {
                        let (cos_int, _) = trig_poly_integrals_upto(deg, n as f64 * PI, 1.0);
                        let v: f64 = p.coeffs().iter().zip(&cos_int).map(|(c, i)| c * i).sum();
                        out.push(2.0 * v);
                    }
                } else {
                    out.resize(n_max + 1, 0.0);
                }
                out
            }
        }
    }
}

/// Cosine-series solution of `u_t = k u_xx + f(x)`, `u_x(0) = u_x(1) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NeumannNeumannSolution {
    pub diffusivity: f64,
    /// Cosine coefficients of `μ0`.
    pub initial_coeffs: Vec<f64>,
    /// Cosine coefficients of `f`.
    pub source_coeffs: Vec<f64>,
}

/// `(1 - e^{-n²π²kt}) / (n²π²k)`, continued by `t` at `n = 0`.
fn source_growth(n: usize, diffusivity: f64, t: f64) -> f64 {
    if n == 0 {
        return t;
    }
    let w = n as f64 * PI;
    let rate = w * w * diffusivity;
    -libm::expm1(-rate * t) / rate
}

impl NeumannNeumannSolution {
    pub fn modes(&self) -> usize {
        self.initial_coeffs.len()
    }

    /// Separation-of-variables form.
    pub fn eval_series(&self, x: f64, t: f64) -> f64 {
        (0..self.modes())
            .map(|n| {
                let mode = libm::cos(n as f64 * PI * x);
                (self.initial_coeffs[n] * kernel_cosine_transform(n, self.diffusivity, t)
                    + source_growth(n, self.diffusivity, t) * self.source_coeffs[n])
                    * mode
            })
            .sum()
    }

    /// Kernel form: every cosine mode of the evenly extended data is pushed
    /// through the free-space heat kernel with
    /// [`kernel_cosine_transform_shifted`], and the source's time integral is
    /// done by quadrature.
    pub fn eval_kernel_form(&self, x: f64, t: f64) -> f64 {
        let weights = self.kernel_time_integrals(t);
        self.eval_kernel_form_with(x, t, &weights)
    }

    /// `∫₀^t e^{-n²π²ks} ds` for every mode, by adaptive quadrature.
    pub fn kernel_time_integrals(&self, t: f64) -> Vec<f64> {
        (0..self.modes())
            .map(|n| {
                if t <= 0.0 {
                    return 0.0;
                }
                // past 50 decay times the integrand is below e^{-50}; cutting
                // there keeps the boundary layer inside the sampled panels
                let w = n as f64 * PI;
                let rate = w * w * self.diffusivity;
                let end = if rate > 0.0 { t.min(50.0 / rate) } else { t };
                integrate(|s| kernel_cosine_transform(n, self.diffusivity, s), 0.0, end, 1e-15, 4).value
            })
            .collect()
    }

    pub fn eval_kernel_form_with(&self, x: f64, t: f64, time_integrals: &[f64]) -> f64 {
        (0..self.modes())
            .map(|n| {
                self.initial_coeffs[n] * kernel_cosine_transform_shifted(n, self.diffusivity, t, x)
                    + self.source_coeffs[n] * time_integrals[n] * libm::cos(n as f64 * PI * x)
            })
            .sum()
    }
}

/// Cosine coefficients `a_n`, `b_n` (`n = 0..=n_max`) of `μ0` and `f`.
pub fn solve_neumann_neumann(
    source: &CosineData,
    initial: &CosineData,
    diffusivity: f64,
    n_max: usize,
) -> Result<NeumannNeumannSolution> {
    require_positive("k", diffusivity)?;
    Ok(NeumannNeumannSolution {
        diffusivity,
        initial_coeffs: initial.coefficients(n_max),
        source_coeffs: source.coefficients(n_max),
    })
}

/// Neumann–Neumann solution for a validated [`ProblemSpec`].
pub fn solve_neumann_neumann_spec(spec: &ProblemSpec, n_max: usize) -> Result<NeumannNeumannSolution> {
    spec.validate()?;
    if spec.boundary != BoundaryKind::NeumannNeumann {
        return Err(Error::Unsupported("solve_neumann_neumann_spec needs a Neumann-Neumann problem"));
    }
    let f = spec.source.restrict_t(0.0);
    solve_neumann_neumann(
        &CosineData::Poly(f),
        &CosineData::Poly(spec.initial.clone()),
        spec.diffusivity,
        n_max,
    )
}
