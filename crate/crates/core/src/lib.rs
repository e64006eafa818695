//! Semi-analytic solution of `u_t = k u_xx + F(x,t)` on `(0, l) × (0, T]` with an
//! insulated or grounded left end and a convective (Robin) right end.
//!
//! Polynomial data are evolved in closed form after an even or odd extension
//! to the whole line ([`extension`]); what the polynomial part cannot absorb is
//! expanded in the Robin eigenfunctions ([`spectral`]). [`solver`] assembles the
//! two, and [`verify`] carries the independent checks: a Crank–Nicolson
//! reference solver and finite-difference residuals.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod extension;
pub mod polyalg;
pub mod quadrature;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use extension::{
    build_coefficient_system, compare_with_printed, duhamel_poly, evolve_even_poly, evolve_odd_poly,
    match_boundary_polynomial, robin_trace, CoefficientSystem, ExtensionProfile, RodParams,
};
pub use polyalg::{Parity, Poly1, Poly2, Rational, TrigKind, Var};
pub use solver::{
    kernel_cosine_transform, solve_neumann_neumann, solve_problem, BoundaryKind, CosineData,
    NeumannNeumannSolution, ProblemSpec, SemiAnalyticSolution, SolveOptions,
};
pub use spectral::{eigenvalues, evaluate_series, fourier_coeffs, EigenSystem, ModalSeries, RobinKind};
pub use verify::{
    crank_nicolson_reference, residual_report, two_forms_check, GridSolution, SolutionField,
    VerificationReport,
};
