//! The multivariate vector-index Mittag-Leffler function.
//!
//! ```bash
//! cargo run --example mittag_leffler
//! ```

use hilfer_fde::specfun::{ml_eval, recip_gamma, MlSpec};

fn main() {
    // classical reductions
    let exp1 = MlSpec::new(vec![1.0], 1.0).unwrap();
    let v = ml_eval(&exp1, &[1.0], 1e-12).unwrap();
    println!("E_(1),1(1)        = {:.12}  (e = {:.12})", v.value, 1.0f64.exp());

    let two = MlSpec::new(vec![1.0, 1.0], 1.0).unwrap();
    let v = ml_eval(&two, &[1.0, 2.0], 1e-12).unwrap();
    println!("E_(1,1),1(1,2)    = {:.12}  (e^3 = {:.12})", v.value, 3.0f64.exp());

    let spec = MlSpec::new(vec![0.4, 1.3], 0.7).unwrap();
    let v = ml_eval(&spec, &[0.0, 0.0], 1e-12).unwrap();
    println!("E_(0.4,1.3),0.7(0,0) = {:.12}  (1/Γ(0.7) = {:.12})", v.value, recip_gamma(0.7));

    // every value carries a certified error bound
    let relax = MlSpec::new(vec![0.5, 1.0], 1.0).unwrap();
    let v = ml_eval(&relax, &[-0.7, -0.5], 1e-12).unwrap();
    println!(
        "\nE_(0.5,1),1(-0.7,-0.5) = {:.15}   [{} terms, bound {:.1e}]",
        v.value, v.terms_used, v.truncation_bound
    );

    // when double precision cannot deliver the tolerance, the evaluator
    // refuses instead of returning digits that look plausible
    let hard = MlSpec::new(vec![0.001, 1.0], 1.0).unwrap();
    match ml_eval(&hard, &[-0.999, -0.5], 1e-10) {
        Ok(_) => unreachable!("this argument region cancels beyond f64"),
        Err(e) => println!("\nhonest refusal: {e}"),
    }
}
