//! Caputo-type relaxation D^{α} y + y = 0 with y(0) = 1.
//!
//! The closed form produced by the solver, 1 - x^α E_{(α),1+α}(-x^α),
//! collapses to the classical relaxation function E_α(-x^α).
//!
//! ```bash
//! cargo run --example caputo_relaxation
//! ```

use hilfer_fde::problem::ForcingSpec;
use hilfer_fde::solver::{eval_at, solve_caputo};
use hilfer_fde::specfun::recip_gamma;

fn main() {
    let alpha = 0.6;
    let (report, sol) =
        solve_caputo(&[alpha, 0.0], &[1.0, 1.0], &[1.0], ForcingSpec::Zero, 1.0).unwrap();
    let sol = sol.unwrap();
    println!("verdict: {:?}", report.verdict);
    println!("terms: {:?} + {:?}\n", sol.power_terms, sol.ml_terms);

    // classical scalar series for comparison
    let e_alpha = |x: f64| {
        let z = -x.powf(alpha);
        let mut acc = 0.0;
        let mut zp = 1.0;
        for k in 0..200 {
            acc += zp * recip_gamma(alpha * k as f64 + 1.0);
            zp *= z;
        }
        acc
    };

    println!("{:>6} {:>18} {:>18} {:>10}", "x", "solver", "E_a(-x^a)", "diff");
    for j in 0..=10 {
        let x = j as f64 / 10.0;
        let got = eval_at(&sol, x, 1e-12).unwrap();
        let want = e_alpha(x);
        println!("{x:6.2} {got:18.12} {want:18.12} {:10.2e}", (got - want).abs());
    }
}
