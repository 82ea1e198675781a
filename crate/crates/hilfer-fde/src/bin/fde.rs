//! Command-line front end: solve problem files, run the time-stepped
//! reference, cross-check both, and evaluate the Mittag-Leffler kernel.
//!
//! Exit codes: 0 success/solvable, 1 input or evaluation error,
//! 2 unsolvable initial data, 3 check thresholds exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hilfer_fde::config;
use hilfer_fde::io;
use hilfer_fde::oracle;
use hilfer_fde::problem::{existence_report, validate, Verdict};
use hilfer_fde::solver;
use hilfer_fde::specfun::{ml_eval, MlSpec};
use hilfer_fde::{FdeProblem, GridSpec};

#[derive(Parser)]
#[command(name = "fde", version, about = "Multi-term fractional differential equation solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a problem file: print the existence report and term list as
    /// JSON, optionally write solution samples as CSV.
    Solve {
        problem: PathBuf,
        /// Grid intervals (default 1024, env FDE_DEFAULT_GRID).
        #[arg(long)]
        grid: Option<usize>,
        /// Override the interval end from the problem file.
        #[arg(long)]
        end: Option<f64>,
        /// Series tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Write CSV samples here (only when solvable).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time-step the equivalent Volterra equation; same CSV contract.
    Oracle {
        problem: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        end: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve, then verify: equation residual plus agreement with the
    /// time-stepped reference.
    Check {
        problem: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        end: Option<f64>,
        /// Residual margin (default 10·h).
        #[arg(long)]
        margin: Option<f64>,
        /// Residual threshold.
        #[arg(long, default_value_t = config::CHECK_MAX_RESIDUAL)]
        max_residual: f64,
        /// Relative-agreement threshold against the reference.
        #[arg(long, default_value_t = config::CHECK_MAX_ORACLE_REL)]
        max_rel: f64,
    },
    /// Evaluate the vector-index Mittag-Leffler function.
    Ml {
        /// Weights a_1,…,a_n (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        /// Parameter b.
        #[arg(long)]
        b: f64,
        /// Arguments z_1,…,z_n (comma separated).
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        z: Vec<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn load(problem: &PathBuf, end: Option<f64>) -> Result<FdeProblem, hilfer_fde::FdeError> {
    let mut p = io::parse_problem_file(problem)?;
    if let Some(x) = end {
        p.interval_end = x;
    }
    Ok(p)
}

fn grid_for(p: &FdeProblem, n: Option<usize>) -> Result<GridSpec, hilfer_fde::FdeError> {
    GridSpec::new(p.interval_end, n.unwrap_or_else(config::default_grid))
}

fn run() -> Result<u8, hilfer_fde::FdeError> {
    match Cli::parse().cmd {
        Cmd::Solve { problem, grid, end, tol, out } => {
            let p = load(&problem, end)?;
            let v = validate(&p)?;
            let (report, sol) = solver::solve_validated(&v)?;
            print!("{}", io::to_json(&io::solve_report(&report, v.indices(), sol.as_ref())));
            match sol {
                None => Ok(2),
                Some(sol) => {
                    if let Some(path) = out {
                        let g = grid_for(&p, grid)?;
                        let y = solver::eval_solution(
                            &sol,
                            &g,
                            tol.unwrap_or(config::DEFAULT_TOL),
                        )?;
                        std::fs::write(path, io::to_csv(&y.samples))?;
                    }
                    Ok(0)
                }
            }
        }
        Cmd::Oracle { problem, grid, end, out } => {
            let p = load(&problem, end)?;
            let v = validate(&p)?;
            let report = existence_report(&v);
            if report.verdict == Verdict::Unsolvable {
                print!("{}", io::to_json(&io::solve_report(&report, v.indices(), None)));
                return Ok(2);
            }
            let g = grid_for(&p, grid)?;
            let y = oracle::volterra_solve_validated(&v, &g)?;
            match out {
                Some(path) => std::fs::write(path, io::to_csv(&y.samples))?,
                None => print!("{}", io::to_csv(&y.samples)),
            }
            Ok(0)
        }
        Cmd::Check { problem, grid, end, margin, max_residual, max_rel } => {
            let p = load(&problem, end)?;
            let v = validate(&p)?;
            let (report, sol) = solver::solve_validated(&v)?;
            let Some(sol) = sol else {
                print!("{}", io::to_json(&io::solve_report(&report, v.indices(), None)));
                return Ok(2);
            };
            let g = grid_for(&p, grid)?;
            let margin = margin.unwrap_or(config::MARGIN_STEPS as f64 * g.step());
            let max_residual_got = solver::residual_check(&p, &sol, &g, margin)?;
            let y = solver::eval_solution(&sol, &g, config::DEFAULT_TOL)?;
            let reference = oracle::volterra_solve_validated(&v, &g)?;
            let metrics = oracle::compare(&y.samples, &reference.samples, config::COMPARE_SKIP)?;
            let pass = max_residual_got <= max_residual && metrics.max_rel <= max_rel;
            print!(
                "{}",
                io::to_json(&io::CheckReport {
                    max_residual: max_residual_got,
                    oracle_max_rel: metrics.max_rel,
                    residual_threshold: max_residual,
                    rel_threshold: max_rel,
                    pass,
                })
            );
            Ok(if pass { 0 } else { 3 })
        }
        Cmd::Ml { weights, b, z, tol } => {
            let spec = MlSpec::new(weights, b)?;
            let v = ml_eval(&spec, &z, tol.unwrap_or(config::DEFAULT_TOL))?;
            print!(
                "{}",
                io::to_json(&io::MlReport {
                    value: v.value,
                    terms_used: v.terms_used,
                    truncation_bound: v.truncation_bound,
                })
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
