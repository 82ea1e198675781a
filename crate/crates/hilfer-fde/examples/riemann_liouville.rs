//! Riemann-Liouville-type problem (types all 0) with inhomogeneous data.
//!
//! For D^{1.5,0} y + 0.9 D^{0.5,0} y = 1 both terms have m - α = 0.5, so
//! their shifts γ coincide and every choice of the data
//! y_{k-1/2} = (d/dx)^k I^{1/2} y(0+), k = 0, 1, is admissible. The k = 0
//! datum puts an x^{-1/2} singularity into the solution.
//!
//! ```bash
//! cargo run --example riemann_liouville
//! ```

use hilfer_fde::problem::ForcingSpec;
use hilfer_fde::solver::{eval_solution, residual_check, solve_rl};
use hilfer_fde::{FdeProblem, GridSpec};
use hilfer_fde::problem::FractionalTerm;

fn main() {
    // I^{0.5}y(0+) = 0.8, (d/dx) I^{0.5}y(0+) = -0.4
    let (report, sol) = solve_rl(
        &[1.5, 0.5],
        &[1.0, 0.9],
        &[(0, 0, 0.8), (0, 1, -0.4)],
        ForcingSpec::constant(1.0),
        1.0,
    )
    .unwrap();
    let sol = sol.unwrap();
    println!("verdict: {:?}, unbounded at origin: {}", report.verdict, sol.origin_unbounded());
    for t in &sol.power_terms {
        println!("  power: {:+.6} * x^{:+.2}", t.coeff, t.exponent);
    }
    for t in &sol.ml_terms {
        println!("  ml:    {:+.6} * x^{:+.2} * E_(1.0),{:.2}(-0.9 x)", t.coeff, t.exponent, t.b);
    }

    let grid = GridSpec::new(1.0, 1024).unwrap();
    let y = eval_solution(&sol, &grid, 1e-10).unwrap();
    println!("\nsamples: y(0.25) = {:.8}, y(0.5) = {:.8}, y(1) = {:.8}",
        y.samples.values()[256], y.samples.values()[512], y.samples.values()[1024]);

    // the equation residual is the quality gate for the construction
    let p = FdeProblem::new(
        FractionalTerm::new(1.5, 0.0, 1.0).unwrap(),
        vec![FractionalTerm::new(0.5, 0.0, -0.9).unwrap()],
        ForcingSpec::constant(1.0),
        1.0,
    )
    .with_initial(0, 0, 0.8)
    .with_initial(0, 1, -0.4);
    let r = residual_check(&p, &sol, &grid, 10.0 * grid.step()).unwrap();
    println!("max equation residual on [10h, 1]: {r:.3e}");
}
