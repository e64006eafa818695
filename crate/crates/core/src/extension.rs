//! Closed-form heat evolution of parity-extended polynomial data.
//!
//! Data on `(0, l)` is extended to the whole line as an even polynomial
//! (insulated left end) or an odd one (left end held at zero). The free-space
//! heat semigroup maps such a polynomial to a polynomial in `(x, t)` that
//! keeps the parity, so the left boundary condition holds for all time. What
//! remains is the Robin condition at `x = l`: the trace `u(l,t) + (k/ν) u_x(l,t)`
//! of the evolved profile is again a polynomial in `t`, linear in the profile
//! coefficients through an upper-triangular matrix. Solving that system picks
//! the profile whose trace equals the requested boundary data.
//!
//! The matrix is assembled by applying [`robin_trace`] to the evolution of
//! each basis monomial. [`printed_coefficient_system`] reproduces the
//! alternative closed form whose `2k/ν` terms carry the opposite sign, so the
//! two can be compared entry by entry.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{require_positive, Error, Result};
use crate::polyalg::{
    binomial, half_factorial_coeff, heat_monomial_factor, Parity, Poly1, Poly2, Rational, Var,
};

/// Physical constants of the rod: diffusivity `k`, heat-transfer coefficient
/// `ν` and length `l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RodParams {
    pub diffusivity: f64,
    pub transfer: f64,
    pub length: f64,
}

impl RodParams {
    pub fn new(diffusivity: f64, transfer: f64, length: f64) -> Self {
        RodParams {
            diffusivity,
            transfer,
            length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("k", self.diffusivity)?;
        require_positive("nu", self.transfer)?;
        require_positive("l", self.length)
    }

    /// `k / ν`, the weight of `u_x` in the Robin trace.
    pub fn flux_ratio(&self) -> f64 {
        self.diffusivity / self.transfer
    }
}

/// Adds the heat evolution of `coeff * x^p` (time `t`, diffusivity `k`) to `out`.
fn add_evolved_monomial(out: &mut Poly2, p: usize, coeff: f64, diffusivity: f64) {
    if coeff == 0.0 {
        return;
    }
    for j in 0..=p / 2 {
        let factor = heat_monomial_factor(p, j).to_f64();
        out.add_term(p - 2 * j, j, coeff * factor * libm::pow(diffusivity, j as f64));
    }
}

/// `u1(x,t) = Σ a_i Σ_j c_j C(2i,2j) x^{2i-2j} (4kt)^j`, the evolution of
/// `μ(x) = Σ a_i x^{2i}`.
pub fn evolve_even_poly(coeffs: &[f64], diffusivity: f64) -> Poly2 {
    let mut out = Poly2::zero();
    for (i, &a) in coeffs.iter().enumerate() {
        add_evolved_monomial(&mut out, 2 * i, a, diffusivity);
    }
    out
}

/// Evolution of `μ̃(x) = Σ ã_i x^{2i+1}`; vanishes at `x = 0` for all `t`.
pub fn evolve_odd_poly(coeffs: &[f64], diffusivity: f64) -> Poly2 {
    let mut out = Poly2::zero();
    for (i, &a) in coeffs.iter().enumerate() {
        add_evolved_monomial(&mut out, 2 * i + 1, a, diffusivity);
    }
    out
}

/// Evolution of an arbitrary polynomial in `x`.
pub fn evolve_poly(initial: &Poly1, diffusivity: f64) -> Poly2 {
    debug_assert_eq!(initial.var(), Var::X);
    let mut out = Poly2::zero();
    for (p, &c) in initial.coeffs().iter().enumerate() {
        add_evolved_monomial(&mut out, p, c, diffusivity);
    }
    out
}

/// Particular solution `u_p = ∫₀^t e^{(t-s) k ∂²}F(·,s) ds` with `u_p(x, 0) = 0`.
///
/// Each monomial `x^p s^m` evolves to `Σ_j γ_{p,j} x^{p-2j} (k(t-s))^j`; the
/// `s`-integral of `s^m (t-s)^j` over `[0, t]` is `t^{m+j+1} m! j! / (m+j+1)!`.
pub fn duhamel_poly(source: &Poly2, diffusivity: f64, parity: Parity) -> Result<Poly2> {
    if let Some((x_power, t_power)) = source.parity_violation(parity) {
        return Err(Error::ParityViolation {
            parity,
            x_power,
            t_power,
        });
    }
    let mut out = Poly2::zero();
    for (p, m, f) in source.terms() {
        for j in 0..=p / 2 {
            let beta = Rational::new(1, (m + j + 1) as i128 * binomial(m + j, j));
            let factor = (heat_monomial_factor(p, j) * beta).to_f64();
            out.add_term(
                p - 2 * j,
                m + j + 1,
                f * factor * libm::pow(diffusivity, j as f64),
            );
        }
    }
    Ok(out)
}

/// `g(t) = P(l,t) + (k/ν) ∂ₓP(l,t)`: the boundary data a field must match for
/// `-k u_x(l,t) = ν (u(l,t) - g(t))` to hold.
pub fn robin_trace(field: &Poly2, params: &RodParams) -> Poly1 {
    let value = field.restrict_x(params.length);
    let slope = field.deriv_x().restrict_x(params.length);
    &value + &slope.scale(params.flux_ratio())
}

/// Upper-triangular map from profile coefficients to trace coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSystem {
    pub parity: Parity,
    pub params: RodParams,
    /// Row `j`, column `i`: coefficient of `t^j` in the trace of basis monomial `i`.
    pub matrix: Vec<Vec<f64>>,
}

impl CoefficientSystem {
    pub fn order(&self) -> usize {
        self.matrix.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row][col]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order()).map(|j| self.matrix[j][j]).collect()
    }

    pub fn apply(&self, coeffs: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(coeffs).map(|(m, a)| m * a).sum())
            .collect()
    }
}

fn basis_evolution(index: usize, parity: Parity, diffusivity: f64) -> Poly2 {
    let mut e = vec![0.0; index + 1];
    e[index] = 1.0;
    match parity {
        Parity::Even => evolve_even_poly(&e, diffusivity),
        Parity::Odd => evolve_odd_poly(&e, diffusivity),
    }
}

/// Builds the `(degree+1)²` system column by column as
/// `robin_trace(evolve(e_i))`.
pub fn build_coefficient_system(degree: usize, params: &RodParams, parity: Parity) -> CoefficientSystem {
    build_rectangular(degree + 1, degree + 1, params, parity)
}

fn build_rectangular(rows: usize, cols: usize, params: &RodParams, parity: Parity) -> CoefficientSystem {
    let mut matrix = vec![vec![0.0; cols]; rows];
    for i in 0..cols {
        let trace = robin_trace(&basis_evolution(i, parity, params.diffusivity), params);
        for (j, row) in matrix.iter_mut().enumerate() {
            row[i] = trace.coeff(j);
        }
        debug_assert!(trace.degree().is_none_or(|d| d <= i));
    }
    CoefficientSystem {
        parity,
        params: *params,
        matrix,
    }
}

/// The closed form in which the `2k/ν` contributions enter with a minus sign:
/// entry `(j, i)` is `l^{p-2j-1}(l C(p,2j) c_j - (2k/ν) C(p,2j+1) c_{j+1}) (4k)^j`
/// with `p = 2i` (even) or `2i+1` (odd).
pub fn printed_coefficient_system(degree: usize, params: &RodParams, parity: Parity) -> CoefficientSystem {
    let n = degree + 1;
    let l = params.length;
    let two_ratio = 2.0 * params.flux_ratio();
    let four_k = 4.0 * params.diffusivity;
    let mut matrix = vec![vec![0.0; n]; n];
    for (j, row) in matrix.iter_mut().enumerate() {
        for (i, entry) in row.iter_mut().enumerate().skip(j) {
            let p = match parity {
                Parity::Even => 2 * i,
                Parity::Odd => 2 * i + 1,
            };
            let cj = half_factorial_coeff(j).to_f64();
            let cj1 = half_factorial_coeff(j + 1).to_f64();
            let lead = binomial(p, 2 * j) as f64 * cj * libm::pow(l, (p - 2 * j) as f64);
            let cross = if 2 * j < p {
                two_ratio * binomial(p, 2 * j + 1) as f64 * cj1 * libm::pow(l, (p - 2 * j - 1) as f64)
            } else {
                0.0
            };
            *entry = (lead - cross) * libm::pow(four_k, j as f64);
        }
    }
    CoefficientSystem {
        parity,
        params: *params,
        matrix,
    }
}

/// An entry where the generated and the printed systems disagree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixDiscrepancy {
    pub row: usize,
    pub col: usize,
    pub generated: f64,
    pub printed: f64,
}

pub fn compare_with_printed(system: &CoefficientSystem) -> Vec<MatrixDiscrepancy> {
    let printed = printed_coefficient_system(system.order() - 1, &system.params, system.parity);
    let mut out = Vec::new();
    for j in 0..system.order() {
        for i in 0..system.order() {
            let g = system.entry(j, i);
            let p = printed.entry(j, i);
            if (g - p).abs() > 1e-12 * g.abs().max(p.abs()).max(1.0) {
                out.push(MatrixDiscrepancy {
                    row: j,
                    col: i,
                    generated: g,
                    printed: p,
                });
            }
        }
    }
    out
}

/// Non-fatal events while matching boundary data.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtensionWarning {
    /// A zero pivot forced one extra basis degree; the lowest coefficient was
    /// pinned to `pinned_value` and the system solved on its superdiagonal.
    DegenerateAugmented { singular_row: usize, pinned_value: f64 },
}

/// The extension polynomial `μ` and its boundary constants.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionProfile {
    pub parity: Parity,
    /// `a_i` of `Σ a_i x^{2i}` (even) or `ã_i` of `Σ ã_i x^{2i+1}` (odd).
    pub coeffs: Vec<f64>,
    /// Trace constant `μ(l) + (k/ν) μ'(l)`.
    pub d: f64,
    /// Offset left to the homogeneous correction; set by the solver.
    pub offset: f64,
    pub warnings: Vec<ExtensionWarning>,
}

impl ExtensionProfile {
    /// `μ` as a polynomial in `x`.
    pub fn to_poly(&self) -> Poly1 {
        let shift = match self.parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        let n = 2 * self.coeffs.len() + shift;
        let mut dense = vec![0.0; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            dense[2 * i + shift] = a;
        }
        Poly1::new(Var::X, dense)
    }

    pub fn evolve(&self, diffusivity: f64) -> Poly2 {
        match self.parity {
            Parity::Even => evolve_even_poly(&self.coeffs, diffusivity),
            Parity::Odd => evolve_odd_poly(&self.coeffs, diffusivity),
        }
    }

    /// `μ(l) + (k/ν) μ'(l)` recomputed from the coefficients.
    pub fn trace_constant(&self, params: &RodParams) -> f64 {
        let mu = self.to_poly();
        mu.eval(params.length) + params.flux_ratio() * mu.derivative().eval(params.length)
    }
}

/// Finds the profile whose evolved Robin trace equals `target` coefficient-wise.
pub fn match_boundary_polynomial(target: &Poly1, params: &RodParams, parity: Parity) -> Result<ExtensionProfile> {
    params.validate()?;
    match_unchecked(target, params, parity)
}

fn is_negligible_pivot(pivot: f64, row: &[f64]) -> bool {
    let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    pivot == 0.0 || pivot.abs() <= 1e-13 * scale
}

/// Matching without parameter validation; lets the degenerate branch be
/// reached with parameters outside the physical range.
pub(crate) fn match_unchecked(target: &Poly1, params: &RodParams, parity: Parity) -> Result<ExtensionProfile> {
    debug_assert_eq!(target.var(), Var::T);
    let degree = target.degree().unwrap_or(0);
    let rhs: Vec<f64> = (0..=degree).map(|j| target.coeff(j)).collect();
    let system = build_coefficient_system(degree, params, parity);

    let singular = (0..=degree).find(|&j| is_negligible_pivot(system.entry(j, j), &system.matrix[j]));
    let (coeffs, warnings) = match (singular, parity) {
        (None, _) => (back_substitute(&system.matrix, &rhs, 0)?, Vec::new()),
        (Some(row), Parity::Odd)
            if (0..=degree).all(|j| is_negligible_pivot(system.entry(j, j), &system.matrix[j])) =>
        {
            // one extra degree, lowest coefficient pinned, pivots on the superdiagonal
            let wide = build_rectangular(degree + 1, degree + 2, params, parity);
            let mut coeffs = back_substitute(&wide.matrix, &rhs, 1)?;
            coeffs.insert(0, 0.0);
            (
                coeffs,
                vec![ExtensionWarning::DegenerateAugmented {
                    singular_row: row,
                    pinned_value: 0.0,
                }],
            )
        }
        (Some(row), _) => {
            return Err(Error::SingularSystem {
                row,
                pivot: system.entry(row, row),
            })
        }
    };
    let mut profile = ExtensionProfile {
        parity,
        coeffs,
        d: rhs[0],
        offset: 0.0,
        warnings,
    };
    trim_profile(&mut profile.coeffs);
    Ok(profile)
}

fn trim_profile(coeffs: &mut Vec<f64>) {
    while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
}

/// Solves rows `0..rhs.len()` for unknowns `shift..shift+rhs.len()`, using
/// `matrix[j][j + shift]` as pivots.
fn back_substitute(matrix: &[Vec<f64>], rhs: &[f64], shift: usize) -> Result<Vec<f64>> {
    let n = rhs.len();
    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        let pivot = matrix[j][j + shift];
        if is_negligible_pivot(pivot, &matrix[j]) {
            return Err(Error::SingularSystem { row: j, pivot });
        }
        let tail: f64 = ((j + 1)..n).map(|i| matrix[j][i + shift] * x[i]).sum();
        x[j] = (rhs[j] - tail) / pivot;
    }
    Ok(x)
}
