//! Fractional integrals and numerical Hilfer derivatives on grids.
//!
//! ```bash
//! cargo run --example fractional_quadrature
//! ```

use hilfer_fde::fracops::{hilfer_derivative_numeric, rl_integral};
use hilfer_fde::specfun::gamma_fn;
use hilfer_fde::{GridSpec, SampledFunction};

fn sample(grid: &GridSpec, f: impl Fn(f64) -> f64) -> SampledFunction {
    SampledFunction::new(grid.step(), (0..=grid.points()).map(|j| f(grid.node(j))).collect())
        .unwrap()
}

fn main() {
    let grid = GridSpec::new(1.0, 1024).unwrap();

    // power rule: I^{0.5} x = x^{1.5}/Γ(2.5)
    let f = sample(&grid, |x| x);
    let i = rl_integral(&f, 0.5).unwrap();
    let exact = 1.0 / gamma_fn(2.5).unwrap();
    println!(
        "I^0.5 x at x=1: {:.12} (exact {:.12}, err {:.1e})",
        i.values()[1024],
        exact,
        (i.values()[1024] - exact).abs()
    );

    // semigroup: I^{0.5} I^{0.5} = I^1
    let f = sample(&grid, |x| x * x);
    let twice = rl_integral(&rl_integral(&f, 0.5).unwrap(), 0.5).unwrap();
    let once = rl_integral(&f, 1.0).unwrap();
    let defect = twice
        .values()
        .iter()
        .zip(once.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("semigroup defect ‖I^½I^½x² - I¹x²‖∞ = {defect:.2e}");

    // Hilfer derivative sandwich: D^{0.5,1} x = x^{1/2}/Γ(1.5) (Caputo),
    // D^{0.5,0} x = x^{1/2}/Γ(1.5) + boundary kernel difference
    let f = sample(&grid, |x| x);
    let caputo = hilfer_derivative_numeric(&f, 0.5, 1.0, 0.05).unwrap();
    let rl = hilfer_derivative_numeric(&f, 0.5, 0.0, 0.05).unwrap();
    println!("\n{:>6} {:>14} {:>14} {:>14}", "x", "D^{0.5,1}x", "D^{0.5,0}x", "exact Caputo");
    for j in [256, 512, 768, 1024] {
        let x = grid.node(j);
        let exact = x.sqrt() / gamma_fn(1.5).unwrap();
        println!(
            "{x:6.2} {:14.8} {:14.8} {:14.8}",
            caputo.values()[j],
            rl.values()[j],
            exact
        );
    }
    println!("(the two types agree on x because x^{{1}} has no boundary kernel here)");
}
