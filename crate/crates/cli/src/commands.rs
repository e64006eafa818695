//! The three subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use heatrobin_core::solver::solve_neumann_neumann_spec;
use heatrobin_core::verify::{OracleParams, ReportParams};
use heatrobin_core::{eigenvalues, residual_report, solve_problem, BoundaryKind, RobinKind, RodParams, SolutionField};
use rayon::prelude::*;

use crate::config::{self, BoundaryName, RunConfig, MAX_MODES};
use crate::error::{from_solver, CliError};
use crate::report::{CosineRecord, Evaluator, Report, RobinRecord, SolutionRecord, VerificationRecord};

/// Caps the number of grid-evaluation threads.
pub const THREADS_VAR: &str = "HEATROBIN_THREADS";

/// Differencing step for residuals.
pub const RESIDUAL_STEP: f64 = 1e-4;

pub const PDE_TOL: f64 = 1e-5;
pub const LEFT_TOL: f64 = 1e-6;
/// `|u(0,t)|` is exact up to rounding for odd extensions.
pub const LEFT_DIRICHLET_TOL: f64 = 1e-10;
pub const ROBIN_TOL: f64 = 1e-5;
pub const ORACLE_TOL: f64 = 1e-3;

/// Solves, verifies and evaluates the output grid; nothing is written.
pub fn build_report(run: &RunConfig) -> Result<Report, CliError> {
    let spec = &run.spec;
    let params = ReportParams {
        nx: run.grid.nx,
        nt: run.grid.nt,
        t_min: run.grid.t_min,
        step: RESIDUAL_STEP,
        oracle: Some(OracleParams {
            space_steps: run.grid.space_steps,
            time_steps: run.grid.time_steps,
            t_min: run.grid.t_min,
        }),
    };
    let (solution, verification) = match spec.boundary {
        BoundaryKind::NeumannNeumann => {
            let sol = solve_neumann_neumann_spec(spec, run.series.n_max).map_err(from_solver)?;
            let report = residual_report(&sol, spec, &params).map_err(from_solver)?;
            (SolutionRecord::CosineSeries(CosineRecord::from_solution(&sol)), report)
        }
        _ => {
            let sol = solve_problem(spec, &run.series.into()).map_err(from_solver)?;
            let report = residual_report(&sol as &dyn SolutionField, spec, &params).map_err(from_solver)?;
            (SolutionRecord::Extension(RobinRecord::from_solution(&sol)), report)
        }
    };
    Ok(Report {
        boundary: spec.boundary.into(),
        xs: linspace(spec.length, run.grid.nx),
        ts: linspace(spec.horizon, run.grid.nt),
        solution,
        verification: VerificationRecord::from(verification),
    })
}

/// `n` points from 0 to `end` inclusive.
fn linspace(end: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { end } else { end * i as f64 / (n - 1) as f64 })
        .collect()
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(None);
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(Some(n)),
        _ => Err(CliError::Env {
            name: THREADS_VAR,
            message: format!("expected a positive integer, got {raw:?}"),
        }),
    }
}

/// Solution values on the report grid, time-major.
pub fn evaluate_grid(report: &Report) -> Result<Vec<f64>, CliError> {
    let evaluator = Evaluator::new(&report.solution);
    let rows = || -> Vec<f64> {
        report
            .ts
            .par_iter()
            .flat_map_iter(|&t| report.xs.iter().map(move |&x| (x, t)))
            .map(|(x, t)| evaluator.value(x, t))
            .collect()
    };
    match thread_cap()? {
        None => Ok(rows()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Env {
                    name: THREADS_VAR,
                    message: e.to_string(),
                })?;
            Ok(pool.install(rows))
        }
    }
}

/// `x,t,u` rows, time-major, shortest round-trip number formatting.
pub fn render_csv(report: &Report) -> Result<String, CliError> {
    let values = evaluate_grid(report)?;
    let mut out = String::with_capacity(values.len() * 48 + 6);
    out.push_str("x,t,u\n");
    let points = report.ts.iter().flat_map(|t| report.xs.iter().map(move |x| (x, t)));
    for ((x, t), u) in points.zip(&values) {
        let _ = writeln!(out, "{x},{t},{u}");
    }
    Ok(out)
}

fn write_outputs(run: &RunConfig, report: &Report, out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(format!("creating {}", out_dir.display()), e))?;
    let csv_path = out_dir.join(&run.output.csv);
    let report_path = out_dir.join(&run.output.report);
    let csv = render_csv(report)?;
    fs::write(&csv_path, csv).map_err(|e| CliError::io(format!("writing {}", csv_path.display()), e))?;
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(&report_path, json + "\n")
        .map_err(|e| CliError::io(format!("writing {}", report_path.display()), e))?;
    Ok(())
}

pub fn solve(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let run = config::load(config_path)?;
    let report = build_report(&run)?;
    write_outputs(&run, &report, out_dir)?;
    println!(
        "wrote {} and {}",
        out_dir.join(&run.output.csv).display(),
        out_dir.join(&run.output.report).display()
    );
    Ok(())
}

/// One row of the verification table.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    /// `None` for informational rows.
    pub threshold: Option<f64>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.threshold.is_none_or(|tol| self.value <= tol)
    }
}

pub fn checks(boundary: BoundaryName, v: &VerificationRecord) -> Vec<Check> {
    let left_tol = match boundary {
        BoundaryName::DirichletRobin => LEFT_DIRICHLET_TOL,
        _ => LEFT_TOL,
    };
    let mut rows = vec![
        Check {
            name: "PDE residual",
            value: v.pde_residual_max,
            threshold: Some(PDE_TOL),
        },
        Check {
            name: "left boundary residual",
            value: v.bc_residual_left,
            threshold: Some(left_tol),
        },
        Check {
            name: "right boundary residual",
            value: v.bc_residual_right,
            threshold: Some(ROBIN_TOL),
        },
    ];
    if let Some(diff) = v.oracle_max_diff {
        rows.push(Check {
            name: "Crank-Nicolson max diff",
            value: diff,
            threshold: Some(ORACLE_TOL),
        });
    }
    rows.push(Check {
        name: "initial L2 error",
        value: v.initial_l2_error,
        threshold: None,
    });
    rows.push(Check {
        name: "compatibility defect",
        value: v.compatibility_defect,
        threshold: None,
    });
    rows
}

pub fn render_checks(rows: &[Check], diagnostics: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<26} {:>12} {:>10}  status", "check", "value", "threshold");
    for row in rows {
        let (threshold, status) = match row.threshold {
            Some(tol) => (format!("{tol:.0e}"), if row.passed() { "PASS" } else { "FAIL" }),
            None => ("-".to_string(), "info"),
        };
        let _ = writeln!(out, "{:<26} {:>12.3e} {:>10}  {status}", row.name, row.value, threshold);
    }
    if !diagnostics.is_empty() {
        out.push_str("\ndiagnostics:\n");
        for line in diagnostics {
            let _ = writeln!(out, "  {line}");
        }
    }
    out
}

pub fn verify(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let run = config::load(config_path)?;
    let report = build_report(&run)?;
    write_outputs(&run, &report, out_dir)?;
    let rows = checks(report.boundary, &report.verification);
    print!("{}", render_checks(&rows, &report.verification.diagnostics));
    match rows.iter().filter(|r| !r.passed()).count() {
        0 => Ok(()),
        failed => Err(CliError::Threshold { failed }),
    }
}

pub fn eigen(kind: RobinKind, k: f64, nu: f64, l: f64, n: usize) -> Result<(), CliError> {
    if n > MAX_MODES {
        return Err(CliError::Invalid(heatrobin_core::Error::InvalidParameter {
            name: "n",
            reason: format!("at most {MAX_MODES} eigenvalues, got {n}"),
        }));
    }
    let system = eigenvalues(kind, &RodParams::new(k, nu, l), n).map_err(from_solver)?;
    print!("{}", render_eigen_table(&system));
    Ok(())
}

pub fn render_eigen_table(system: &heatrobin_core::EigenSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5} {:>22} {:>22} {:>22} {:>10} {:>10} {:>11}",
        "n", "sigma", "bracket_lo", "bracket_hi", "residual", "pi_gap", "lattice_gap"
    );
    for i in 0..system.len() {
        let (lo, hi) = system.brackets[i];
        let _ = writeln!(
            out,
            "{:>5} {:>22.16} {:>22.16} {:>22.16} {:>10.2e} {:>10.2e} {:>11.2e}",
            i + 1,
            system.roots[i],
            lo,
            hi,
            system.residuals[i].abs(),
            system.pi_multiple_gap(i),
            system.lattice_gap(i)
        );
    }
    out
}
