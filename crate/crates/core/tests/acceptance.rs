//! Acceptance run: one line per criterion, non-zero exit if any fails.

use heatrobin_core::polyalg::{binomial, half_factorial_coeff};
use heatrobin_core::quadrature::{integrate, integrate_gaussian_weighted};
use heatrobin_core::verify::{max_grid_difference, ReportParams, TwoFormsParams};
use heatrobin_core::{
    build_coefficient_system, compare_with_printed, crank_nicolson_reference, duhamel_poly, eigenvalues,
    evolve_even_poly, evolve_odd_poly, kernel_cosine_transform, match_boundary_polynomial, residual_report,
    robin_trace, solve_problem, two_forms_check, BoundaryKind, Parity, Poly1, Poly2, ProblemSpec, RobinKind,
    RodParams, SolutionField, SolveOptions, Var,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn example(initial: Vec<f64>, source: Vec<Vec<f64>>, ambient: Vec<f64>) -> ProblemSpec {
    ProblemSpec {
        diffusivity: 0.25,
        transfer: 0.5,
        length: 1.0,
        horizon: 1.0,
        boundary: BoundaryKind::NeumannRobin,
        initial: Poly1::new(Var::X, initial),
        source: Poly2::from_coeffs(source),
        ambient: Poly1::new(Var::T, ambient),
    }
}

fn sample<S: Strategy>(runner: &mut TestRunner, strategy: &S) -> S::Value {
    strategy.new_tree(runner).expect("strategy").current()
}

fn exact_reproduction() -> Outcome {
    let start = Instant::now();
    let spec = example(vec![1.0, 0.0, 2.0], vec![vec![0.0, 2.0, 3.0]], vec![5.0, 1.0, 1.0, 1.0]);
    let sol = solve_problem(&spec, &SolveOptions::default()).unwrap();
    let mut err: f64 = 0.0;
    for j in 0..=40 {
        let t = j as f64 / 40.0;
        for i in 0..=40 {
            let x = i as f64 / 40.0;
            let exact = 2.0 * x * x + t * t * t + t * t + t + 1.0;
            err = err.max((sol.eval(x, t) - exact).abs());
        }
    }
    let amp = sol.modal.amplitudes.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let elapsed = start.elapsed();
    Outcome::new(
        err <= 1e-9 && amp <= 1e-10 && elapsed < Duration::from_secs(1),
        format!("max error {err:.2e} (≤ 1e-9), max amplitude {amp:.2e} (≤ 1e-10), {elapsed:.2?} (< 1 s)"),
    )
}

fn zero_profile() -> Outcome {
    let spec = example(vec![2.0, 0.0, -1.0], vec![vec![1.0, 2.0]], vec![0.0, 1.0, 1.0]);
    let sol = solve_problem(&spec, &SolveOptions::default()).unwrap();
    let mu = sol.profile.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let expected = Poly2::from_coeffs(vec![vec![0.0, 1.0, 1.0]]);
    let poly = (&sol.poly_part - &expected).max_abs_coeff();
    Outcome::new(
        mu <= 1e-12 && poly <= 1e-12 && sol.modal.offset == 0.0,
        format!("max |a_i| {mu:.2e}, poly part vs t²+t {poly:.2e} (≤ 1e-12)"),
    )
}

fn residual_acceptance() -> Outcome {
    let start = Instant::now();
    let spec = example(vec![1.0, 0.0, 3.0, 1.0], vec![vec![], vec![], vec![2.0, 5.0]], vec![1.0, 3.0]);
    let sol = solve_problem(&spec, &SolveOptions::default()).unwrap();
    let report = residual_report(&sol, &spec, &ReportParams::default()).unwrap();
    let grid = crank_nicolson_reference(&spec, 400, 400).unwrap();
    let diff = max_grid_difference(&sol, &grid, 0.01);
    let elapsed = start.elapsed();
    let passed = report.pde_residual_max <= 1e-5
        && report.bc_residual_left <= 1e-6
        && report.bc_residual_right <= 1e-5
        && diff <= 1e-3
        && elapsed < Duration::from_secs(10);
    Outcome::new(
        passed,
        format!(
            "PDE {:.2e} (≤ 1e-5), left {:.2e} (≤ 1e-6), Robin {:.2e} (≤ 1e-5), CN 400 diff {diff:.2e} (≤ 1e-3), {elapsed:.2?} (< 10 s)",
            report.pde_residual_max, report.bc_residual_left, report.bc_residual_right
        ),
    )
}

fn printed_matrix_diagnostic() -> Outcome {
    let params = RodParams::new(0.25, 0.5, 1.0);
    let system = build_coefficient_system(4, &params, Parity::Even);
    let diagonal_ok = system.diagonal() == [1.0, 0.5, 0.75, 1.875, 6.5625];
    let found = compare_with_printed(&system);

    // every difference should be twice the flux contribution
    let c = |j: usize| half_factorial_coeff(j).to_f64();
    let ratio = params.flux_ratio();
    let mut explained = true;
    for d in &found {
        let p = 2 * d.col;
        let flux = 2.0 * ratio * binomial(p, 2 * d.row + 1) as f64 * c(d.row + 1) * (4.0 * params.diffusivity).powi(d.row as i32);
        explained &= ((d.generated - d.printed) - 2.0 * flux).abs() <= 1e-12 * flux.abs().max(1.0);
    }
    for d in &found {
        println!("    ({}, {}): generated {} printed {}", d.row, d.col, d.generated, d.printed);
    }
    Outcome::new(
        diagonal_ok && !found.is_empty() && explained,
        format!(
            "diagonal {:?}, {} differing entries, all from the 2k/ν terms: {explained}",
            system.diagonal(),
            found.len()
        ),
    )
}

fn eigen_suite() -> Outcome {
    let start = Instant::now();
    let values = [0.25, 1.0, 4.0];
    let (mut bracketed, mut worst_residual, mut worst_inner, mut monotone) = (true, 0.0f64, 0.0f64, true);
    for &k in &values {
        for &nu in &values {
            for &l in &values {
                let params = RodParams::new(k, nu, l);
                for kind in [RobinKind::NeumannRobin, RobinKind::DirichletRobin] {
                    let eigen = eigenvalues(kind, &params, 50).unwrap();
                    for (n, &root) in eigen.roots.iter().enumerate() {
                        let (lo, hi) = kind.bracket(n, l);
                        bracketed &= lo < root && root < hi;
                        worst_residual = worst_residual.max(eigen.residuals[n].abs());
                    }
                    let gap = |n: usize| match kind {
                        RobinKind::NeumannRobin => eigen.pi_multiple_gap(n),
                        RobinKind::DirichletRobin => eigen.lattice_gap(n),
                    };
                    monotone &= (5..49).all(|n| gap(n + 1) < gap(n));
                    let trig = |v: f64| match kind {
                        RobinKind::NeumannRobin => v.cos(),
                        RobinKind::DirichletRobin => v.sin(),
                    };
                    for n in 0..9 {
                        for m in 0..n {
                            let (sn, sm) = (eigen.roots[n], eigen.roots[m]);
                            let inner = integrate(|x| trig(sn * x) * trig(sm * x), 0.0, l, 1e-14, 16).value;
                            worst_inner = worst_inner.max(inner.abs());
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        bracketed && worst_residual <= 1e-12 && worst_inner <= 1e-10 && monotone && elapsed < Duration::from_secs(5),
        format!(
            "bracketed {bracketed}, residual {worst_residual:.2e} (≤ 1e-12), orthogonality {worst_inner:.2e} (≤ 1e-10), gaps decreasing {monotone}, {elapsed:.2?} (< 5 s)"
        ),
    )
}

fn kernel_lemma() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 0..=10 {
        for k in [0.25, 1.0] {
            for t in [0.1, 1.0] {
                let freq = n as f64 * PI;
                let quad = integrate_gaussian_weighted(|y| (freq * y).cos(), 0.0, 4.0 * k * t, 1e-15, 64).value;
                worst = worst.max((quad - kernel_cosine_transform(n, k, t)).abs());
            }
        }
    }
    Outcome::new(worst <= 1e-10, format!("max |quadrature - closed form| {worst:.2e} (≤ 1e-10)"))
}

fn two_forms(runner: &mut TestRunner) -> Outcome {
    let poly = proptest::collection::vec(-2.0..2.0f64, 1..=5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = Poly1::new(Var::X, sample(runner, &poly));
        let mu = Poly1::new(Var::X, sample(runner, &poly));
        let k = sample(runner, &(0.25..1.0f64));
        worst = worst.max(two_forms_check(&f, &mu, k, &TwoFormsParams::default()).unwrap());
    }
    Outcome::new(worst <= 1e-8, format!("20 pairs, max difference {worst:.2e} (≤ 1e-8)"))
}

fn heat_defect(u: &Poly2, k: f64, source: &Poly2) -> f64 {
    let lhs = &u.deriv_t() - &u.deriv_x().deriv_x().scale(k);
    (&lhs - source).max_abs_coeff()
}

fn property_suites(runner: &mut TestRunner) -> Outcome {
    let coeffs = proptest::collection::vec(-10.0..10.0f64, 1..=9);
    let (mut pde, mut round_trip, mut quad_gap) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let a = sample(runner, &coeffs);
        let k = sample(runner, &(0.25..3.0f64));
        for u in [evolve_even_poly(&a, k), evolve_odd_poly(&a, k)] {
            pde = pde.max(heat_defect(&u, k, &Poly2::zero()) / u.max_abs_coeff().max(1.0));
        }
        let mut source = Poly2::zero();
        for (i, &c) in a.iter().take(4).enumerate() {
            source.add_term(2 * (i % 2), i / 2, c);
        }
        let up = duhamel_poly(&source, k, Parity::Even).unwrap();
        pde = pde.max(heat_defect(&up, k, &source) / up.max_abs_coeff().max(1.0));

        let params = RodParams::new(k, sample(runner, &(0.25..3.0f64)), sample(runner, &(0.5..2.0f64)));
        let target = Poly1::new(Var::T, a.clone());
        let profile = match_boundary_polynomial(&target, &params, Parity::Even).unwrap();
        let trace = robin_trace(&profile.evolve(k), &params);
        let system = build_coefficient_system(target.degree().unwrap_or(0), &params, Parity::Even);
        let scale = system
            .matrix
            .iter()
            .map(|row| row.iter().zip(&profile.coeffs).map(|(m, c)| (m * c).abs()).sum::<f64>())
            .fold(target.max_abs_coeff(), f64::max);
        round_trip = round_trip.max((&trace - &target).max_abs_coeff() / scale);
    }
    for _ in 0..30 {
        let a = sample(runner, &proptest::collection::vec(-10.0..10.0f64, 1..=4));
        let params = RodParams::new(
            sample(runner, &(0.1..1.0f64)),
            sample(runner, &(0.25..2.0f64)),
            sample(runner, &(0.5..1.5f64)),
        );
        let (k, nu, l) = (params.diffusivity, params.transfer, params.length);
        let mut dense = vec![0.0; 2 * a.len()];
        for (i, &c) in a.iter().enumerate() {
            dense[2 * i] = c;
        }
        let mu = Poly1::new(Var::X, dense);
        let trace = robin_trace(&evolve_even_poly(&a, k), &params);
        for t in [0.1, 0.5, 1.0] {
            let quad = integrate_gaussian_weighted(
                |y| (1.0 - (l - y) / (2.0 * nu * t)) * mu.eval(y),
                l,
                4.0 * k * t,
                1e-12,
                32,
            )
            .value;
            quad_gap = quad_gap.max((trace.eval(t) - quad).abs());
        }
    }

    let ex2 = example(vec![1.0, 0.0, 2.0], vec![vec![0.0, 2.0, 3.0]], vec![5.0, 1.0, 1.0, 1.0]);
    let errors: Vec<f64> = [50usize, 100, 200]
        .iter()
        .map(|&m| {
            let grid = crank_nicolson_reference(&ex2, m, m).unwrap();
            let mut worst: f64 = 0.0;
            for (n, &t) in grid.ts.iter().enumerate() {
                for (i, &x) in grid.xs.iter().enumerate() {
                    let exact = 2.0 * x * x + t * t * t + t * t + t + 1.0;
                    worst = worst.max((grid.at(n, i) - exact).abs());
                }
            }
            worst
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let order_ok = orders.iter().all(|o| (1.8..=2.2).contains(o));

    let mut linear: f64 = 0.0;
    let data = proptest::collection::vec(-3.0..3.0f64, 1..=4);
    for _ in 0..10 {
        let build = |runner: &mut TestRunner| {
            let mut spec = ex2.clone();
            spec.initial = Poly1::new(Var::X, sample(runner, &data));
            spec.source = Poly2::from_coeffs(vec![sample(runner, &data), vec![], sample(runner, &data)]);
            spec.ambient = Poly1::new(Var::T, sample(runner, &data));
            spec
        };
        let (p1, p2) = (build(runner), build(runner));
        let (alpha, beta) = (sample(runner, &(-2.0..2.0f64)), sample(runner, &(-2.0..2.0f64)));
        let mut combined = p1.clone();
        combined.initial = &p1.initial.scale(alpha) + &p2.initial.scale(beta);
        combined.source = &p1.source.scale(alpha) + &p2.source.scale(beta);
        combined.ambient = &p1.ambient.scale(alpha) + &p2.ambient.scale(beta);
        let options = SolveOptions::default();
        let (s1, s2, sc) = (
            solve_problem(&p1, &options).unwrap(),
            solve_problem(&p2, &options).unwrap(),
            solve_problem(&combined, &options).unwrap(),
        );
        for i in 0..=10 {
            for j in 0..=10 {
                let (x, t) = (i as f64 / 10.0, 0.01 + 0.099 * j as f64);
                linear = linear.max((sc.value(x, t) - alpha * s1.value(x, t) - beta * s2.value(x, t)).abs());
            }
        }
    }

    let passed = pde <= 1e-10 && round_trip <= 1e-10 && quad_gap <= 1e-8 && order_ok && linear <= 1e-9;
    Outcome::new(
        passed,
        format!(
            "PDE identities {pde:.2e} (≤ 1e-10 rel), round trip {round_trip:.2e} (≤ 1e-10 rel), trace vs quadrature {quad_gap:.2e} (≤ 1e-8), CN orders {orders:.3?} (in [1.8, 2.2]), linearity {linear:.2e} (≤ 1e-9)"
        ),
    )
}

type Criterion = Box<dyn FnOnce(&mut TestRunner) -> Outcome>;

fn main() {
    let start = Instant::now();
    let mut runner = TestRunner::deterministic();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 exact polynomial solution", Box::new(|_| exact_reproduction())),
        ("2 zero extension profile", Box::new(|_| zero_profile())),
        ("3 residuals and oracle agreement", Box::new(|_| residual_acceptance())),
        ("4 coefficient system diagnostic", Box::new(|_| printed_matrix_diagnostic())),
        ("5 eigenvalue suite", Box::new(|_| eigen_suite())),
        ("6 kernel cosine transform", Box::new(|_| kernel_lemma())),
        ("7 series and kernel forms", Box::new(two_forms)),
        ("8 property suites", Box::new(property_suites)),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let outcome = check(&mut runner);
        if !outcome.passed {
            failures += 1;
        }
        println!("{} criterion {name}: {}", if outcome.passed { "PASS" } else { "FAIL" }, outcome.detail);
    }
    println!("acceptance run took {:.2?}", start.elapsed());
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
