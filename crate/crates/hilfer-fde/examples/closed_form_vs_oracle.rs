//! Constructed solution vs independent time stepper.
//!
//! The closed form comes from Mittag-Leffler series; the reference marches
//! the equivalent weakly singular Volterra equation with product
//! integration. Agreement between two unrelated computations is the
//! library's core correctness argument.
//!
//! ```bash
//! cargo run --release --example closed_form_vs_oracle
//! ```

use hilfer_fde::oracle::{compare, volterra_solve};
use hilfer_fde::problem::{FdeProblem, ForcingSpec, FractionalTerm};
use hilfer_fde::solver::{eval_solution, solve};
use hilfer_fde::GridSpec;

fn main() {
    // D^{1.5,1} y - 0.5 D^{0.5,0} y - 0.5 y = sin(x), homogeneous data
    let p = FdeProblem::new(
        FractionalTerm::new(1.5, 1.0, 1.0).unwrap(),
        vec![
            FractionalTerm::new(0.5, 0.0, -0.5).unwrap(),
            FractionalTerm::new(0.0, 1.0, -0.5).unwrap(),
        ],
        ForcingSpec::Sinusoid { scale: 1.0, angular_freq: 1.0, phase: 0.0 },
        1.0,
    );
    let (report, sol) = solve(&p).unwrap();
    let sol = sol.unwrap();
    println!("verdict: {:?}", report.verdict);
    println!(
        "solution = convolution of the forcing with t^0.5 E_(1.0,1.5),1.5(-0.5 t, -0.5 t^1.5)\n"
    );

    println!("{:>6} {:>7} {:>12} {:>12}", "N", "skip", "max_rel", "max_abs");
    for n in [512, 1024, 2048] {
        let grid = GridSpec::new(1.0, n).unwrap();
        let y = eval_solution(&sol, &grid, 1e-10).unwrap();
        let o = volterra_solve(&p, &grid).unwrap();
        let m = compare(&y.samples, &o.samples, 10).unwrap();
        println!("{n:6} {:7} {:12.3e} {:12.3e}", 10, m.max_rel, m.max_abs);
    }
}
