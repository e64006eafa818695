//! Robin eigenfunctions for the homogeneous correction problem.
//!
//! Neumann–Robin modes are `cos(σx)` with `kσ tan(σl) = ν`; Dirichlet–Robin
//! modes are `sin(σx)` with `kσ = -ν tan(σl)`. Both are found on
//! pole-free brackets of the equivalent forms
//!
//! ```text
//! NR:  kσ sin(σl) - ν cos(σl) = 0,   σl ∈ (mπ, (m+½)π),   m = 0, 1, ...
//! DR:  kσ cos(σl) + ν sin(σl) = 0,   σl ∈ ((m-½)π, mπ),   m = 1, 2, ...
//! ```
//!
//! Residuals are reported for these forms divided by `√((kσ)² + ν²)`, i.e. as
//! the sine of the phase error, which stays meaningful for large `σ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::extension::RodParams;
use crate::polyalg::{trig_poly_integrals_upto, Parity, Poly1, TrigKind};

pub const DEFAULT_MODES: usize = 64;
pub const DEFAULT_SERIES_TOL: f64 = 1e-10;

const BISECTION_WIDTH: f64 = 1e-10;
const MAX_NEWTON_STEPS: usize = 5;

/// Boundary kind of the homogeneous problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RobinKind {
    NeumannRobin,
    DirichletRobin,
}

impl RobinKind {
    pub fn parity(self) -> Parity {
        match self {
            RobinKind::NeumannRobin => Parity::Even,
            RobinKind::DirichletRobin => Parity::Odd,
        }
    }

    pub fn trig(self) -> TrigKind {
        match self {
            RobinKind::NeumannRobin => TrigKind::Cos,
            RobinKind::DirichletRobin => TrigKind::Sin,
        }
    }

    /// Offset of the asymptotic lattice in units of `π/l`: roots approach
    /// `(m + offset) π / l`.
    fn lattice_offset(self) -> f64 {
        match self {
            RobinKind::NeumannRobin => 0.0,
            RobinKind::DirichletRobin => 0.5,
        }
    }

    /// Bracket of root `index` (0-based) in `σ`.
    pub fn bracket(self, index: usize, length: f64) -> (f64, f64) {
        let m = index as f64;
        match self {
            RobinKind::NeumannRobin => (m * PI / length, (m + 0.5) * PI / length),
            RobinKind::DirichletRobin => ((m + 0.5) * PI / length, (m + 1.0) * PI / length),
        }
    }
}

fn characteristic(kind: RobinKind, p: &RodParams, sigma: f64) -> (f64, f64) {
    let (s, c) = libm::sincos(sigma * p.length);
    let ks = p.diffusivity * sigma;
    let (k, nu, l) = (p.diffusivity, p.transfer, p.length);
    match kind {
        RobinKind::NeumannRobin => (ks * s - nu * c, k * s + ks * l * c + nu * l * s),
        RobinKind::DirichletRobin => (ks * c + nu * s, k * c - ks * l * s + nu * l * c),
    }
}

/// Normalized residual of the eigenvalue condition at `sigma`.
pub fn normalized_residual(kind: RobinKind, params: &RodParams, sigma: f64) -> f64 {
    let (g, _) = characteristic(kind, params, sigma);
    g / libm::hypot(params.diffusivity * sigma, params.transfer)
}

/// Residual of the tangent form as usually written: `kσ tan(σl) - ν` (NR) or
/// `kσ + ν tan(σl)` (DR).
pub fn tangent_residual(kind: RobinKind, params: &RodParams, sigma: f64) -> f64 {
    let tan = libm::tan(sigma * params.length);
    let ks = params.diffusivity * sigma;
    match kind {
        RobinKind::NeumannRobin => ks * tan - params.transfer,
        RobinKind::DirichletRobin => ks + params.transfer * tan,
    }
}

fn find_root(kind: RobinKind, p: &RodParams, lo0: f64, hi0: f64) -> f64 {
    let (mut lo, mut hi) = (lo0, hi0);
    let g_lo_sign = characteristic(kind, p, lo).0.signum();
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = characteristic(kind, p, mid).0;
        if g == 0.0 {
            return mid;
        }
        if g.signum() == g_lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut sigma = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON_STEPS {
        let (g, dg) = characteristic(kind, p, sigma);
        if g == 0.0 || dg == 0.0 {
            break;
        }
        let next = sigma - g / dg;
        if !(next >= lo && next <= hi) {
            break;
        }
        let step = (next - sigma).abs();
        sigma = next;
        if step <= 4.0 * f64::EPSILON * sigma {
            break;
        }
    }
    sigma
}

/// Roots of the eigenvalue condition with their brackets and residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub kind: RobinKind,
    pub params: RodParams,
    pub roots: Vec<f64>,
    pub brackets: Vec<(f64, f64)>,
    pub residuals: Vec<f64>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Distance from root `index` to the nearest point of the asymptotic
    /// lattice `(m + offset) π / l` (multiples of `π/l` for NR, half-odd
    /// multiples for DR).
    pub fn lattice_gap(&self, index: usize) -> f64 {
        let unit = PI / self.params.length;
        let shifted = self.roots[index] / unit - self.kind.lattice_offset();
        (shifted - libm::round(shifted)).abs() * unit
    }

    /// Distance from root `index` to the nearest multiple of `π/l`.
    pub fn pi_multiple_gap(&self, index: usize) -> f64 {
        let unit = PI / self.params.length;
        let q = self.roots[index] / unit;
        (q - libm::round(q)).abs() * unit
    }

    /// `∫₀^l trig²(σ_n x) dx = (νl + k sin²(σ_n l)) / 2ν` (NR, `cos²` for DR).
    pub fn norm_squared(&self, index: usize) -> f64 {
        let p = &self.params;
        let (s, c) = libm::sincos(self.roots[index] * p.length);
        let w = match self.kind {
            RobinKind::NeumannRobin => s * s,
            RobinKind::DirichletRobin => c * c,
        };
        (p.transfer * p.length + p.diffusivity * w) / (2.0 * p.transfer)
    }
}

/// The first `n_max` roots, each bisected on its bracket and polished by at
/// most five Newton steps that are discarded if they leave the bracket.
pub fn eigenvalues(kind: RobinKind, params: &RodParams, n_max: usize) -> Result<EigenSystem> {
    params.validate()?;
    if n_max == 0 {
        return Err(invalid("n_max", "at least one eigenvalue is required"));
    }
    let brackets: Vec<(f64, f64)> = (0..n_max).map(|i| kind.bracket(i, params.length)).collect();
    let roots: Vec<f64> = brackets
        .iter()
        .map(|&(lo, hi)| find_root(kind, params, lo, hi))
        .collect();
    let residuals = roots
        .iter()
        .map(|&s| normalized_residual(kind, params, s))
        .collect();
    Ok(EigenSystem {
        kind,
        params: *params,
        roots,
        brackets,
        residuals,
    })
}

/// Generalized Fourier amplitudes of `residual` on `(0, l)`:
/// `b_n = ∫₀^l r(x) trig(σ_n x) dx / ∫₀^l trig²(σ_n x) dx`.
pub fn fourier_coeffs(eigen: &EigenSystem, residual: &Poly1) -> Vec<f64> {
    let l = eigen.params.length;
    let degree = residual.degree();
    (0..eigen.len())
        .map(|n| match degree {
            None => 0.0,
            Some(deg) => {
                let (cos_int, sin_int) = trig_poly_integrals_upto(deg, eigen.roots[n], l);
                let table = match eigen.kind.trig() {
                    TrigKind::Cos => cos_int,
                    TrigKind::Sin => sin_int,
                };
                let projection: f64 = residual.coeffs().iter().zip(&table).map(|(r, i)| r * i).sum();
                projection / eigen.norm_squared(n)
            }
        })
        .collect()
}

/// `Σ b_n e^{-σ_n² k t} trig(σ_n x) + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModalSeries {
    pub eigen: EigenSystem,
    pub amplitudes: Vec<f64>,
    pub offset: f64,
    /// Bound valid for every amplitude, stored or not; feeds the tail estimate.
    pub amplitude_bound: f64,
}

/// A series value with its truncation bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms_used: usize,
    /// Upper bound on the omitted terms; infinite at `t = 0`.
    pub tail_bound: f64,
    /// False when the requested tolerance could not be certified.
    pub verified: bool,
}

impl ModalSeries {
    /// Builds the series for initial residual `residual`.
    ///
    /// Every amplitude obeys `|b_n| ≤ (2ν/νl) ∫|r| ≤ 2 Σ|r_m| l^m`.
    pub fn from_residual(eigen: EigenSystem, residual: &Poly1, offset: f64) -> Self {
        let amplitudes = fourier_coeffs(&eigen, residual);
        let l = eigen.params.length;
        let sup: f64 = residual
            .coeffs()
            .iter()
            .enumerate()
            .map(|(m, r)| r.abs() * libm::pow(l, m as f64))
            .sum();
        ModalSeries {
            eigen,
            amplitudes,
            offset,
            amplitude_bound: 2.0 * sup,
        }
    }

    pub fn trig(&self) -> TrigKind {
        self.eigen.kind.trig()
    }

    pub fn term(&self, n: usize, x: f64, t: f64) -> f64 {
        let sigma = self.eigen.roots[n];
        let decay = libm::exp(-sigma * sigma * self.eigen.params.diffusivity * t);
        let shape = match self.trig() {
            TrigKind::Cos => libm::cos(sigma * x),
            TrigKind::Sin => libm::sin(sigma * x),
        };
        self.amplitudes[n] * decay * shape
    }

    /// Sum of every stored term.
    pub fn evaluate_all(&self, x: f64, t: f64) -> f64 {
        self.offset + (0..self.amplitudes.len()).map(|n| self.term(n, x, t)).sum::<f64>()
    }

    /// Bound on `Σ_{n ≥ N} |b_n| e^{-σ_n² k t}` over the modes that were not
    /// computed, using `σ_n ≥ (n + offset) π / l`.
    pub fn unstored_tail_bound(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::INFINITY;
        }
        let p = &self.eigen.params;
        let q = (PI / p.length) * (PI / p.length) * p.diffusivity * t;
        let first = self.amplitudes.len() as f64 + self.eigen.kind.lattice_offset();
        let ratio = libm::exp(-q * (2.0 * first + 1.0));
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        self.amplitude_bound * libm::exp(-q * first * first) / (1.0 - ratio)
    }
}

/// Partial sum stopped at the first `N` whose tail bound is below `tol`.
///
/// At `t = 0` nothing decays, so every stored term is summed and the result
/// is flagged unverified.
pub fn evaluate_series(series: &ModalSeries, x: f64, t: f64, tol: f64) -> SeriesValue {
    let n = series.amplitudes.len();
    if t <= 0.0 {
        return SeriesValue {
            value: series.evaluate_all(x, 0.0),
            terms_used: n,
            tail_bound: f64::INFINITY,
            verified: false,
        };
    }
    let k = series.eigen.params.diffusivity;
    let weights: Vec<f64> = series
        .amplitudes
        .iter()
        .zip(&series.eigen.roots)
        .map(|(b, s)| b.abs() * libm::exp(-s * s * k * t))
        .collect();
    // tails[i] = bound on everything from term i onward
    let mut tails = alloc::vec![0.0; n + 1];
    tails[n] = series.unstored_tail_bound(t);
    for i in (0..n).rev() {
        tails[i] = tails[i + 1] + weights[i];
    }
    let cut = (0..=n).find(|&i| tails[i] < tol).unwrap_or(n);
    let value = series.offset + (0..cut).map(|i| series.term(i, x, t)).sum::<f64>();
    SeriesValue {
        value,
        terms_used: cut,
        tail_bound: tails[cut],
        verified: tails[cut] < tol,
    }
}
