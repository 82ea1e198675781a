//! The existence gate: not every set of initial data admits a solution.
//!
//! For D^{0.7,0} y - D^{0.5,0} y = 0 with I^{0.3}y(0+) = C0 and
//! I^{0.5}y(0+) = C1, a solution exists iff C1 = 0 — C0 is free. Run with
//!
//! ```bash
//! cargo run --example existence_gate
//! ```

use hilfer_fde::problem::{FdeProblem, ForcingSpec, FractionalTerm, Verdict};
use hilfer_fde::solver::solve;

fn two_term(c0: f64, c1: f64) -> FdeProblem {
    FdeProblem::new(
        FractionalTerm::new(0.7, 0.0, 1.0).unwrap(),
        vec![FractionalTerm::new(0.5, 0.0, 1.0).unwrap()],
        ForcingSpec::Zero,
        1.0,
    )
    .with_initial(0, 0, c0)
    .with_initial(1, 0, c1)
}

fn main() {
    for (c0, c1) in [(1.0, 0.0), (1.0, 0.25), (-3.0, 0.0), (0.0, 1e-12)] {
        let (report, sol) = solve(&two_term(c0, c1)).unwrap();
        println!("C0 = {c0:6}, C1 = {c1:6}  ->  {:?}", report.verdict);
        match report.verdict {
            Verdict::Solvable => {
                let sol = sol.unwrap();
                println!(
                    "    solution: {} power term(s), {} Mittag-Leffler term(s), singular at 0: {}",
                    sol.power_terms.len(),
                    sol.ml_terms.len(),
                    sol.origin_unbounded()
                );
                for t in &sol.power_terms {
                    println!("    power: {:+.6} * x^{:.2}", t.coeff, t.exponent);
                }
                for t in &sol.ml_terms {
                    println!(
                        "    ml:    {:+.6} * x^{:.2} * E_(0.2),{:.2}(x^0.2)",
                        t.coeff, t.exponent, t.b
                    );
                }
            }
            Verdict::Unsolvable => {
                for z in report.offending() {
                    println!(
                        "    blocked by initial value (term {}, k {}) = {}",
                        z.term, z.k, z.supplied
                    );
                }
            }
        }
    }
}
