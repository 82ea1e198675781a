//! Independent time-stepping reference solver.
//!
//! Applying I^{α0} to the equation gives a weakly singular Volterra equation
//! of the second kind,
//!
//! ```text
//! y = y_{α0,β0} - Σ a_i I^{α0-αi} y_{αi,βi} + I^{α0} g + Σ a_i I^{α0-αi} y,
//! ```
//!
//! which product integration marches node by node: the unknown enters the
//! current panel linearly, so every step solves one scalar equation. The
//! known power head of the solution (initial-value functions plus the
//! forcing's analytic head, Neumann-expanded below x^1) is peeled off first
//! so the marched remainder is smooth and the scheme keeps second-order
//! behavior even for solutions that blow up at the origin.
//!
//! Nothing here touches the closed-form machinery: this is the instrument
//! the solution formulas are measured against.

use crate::error::{FdeError, Result};
use crate::fracops::{panel_moments, rl_integral, GridSpec, SampledFunction};
use crate::ladder::{neumann_ladder, ForcingHead};
use crate::problem::{existence_report, validate, FdeProblem, Validated, Verdict};
use crate::solver::GridSolution;
use crate::specfun::recip_gamma;

/// March the Volterra form of the problem on `grid`.
///
/// Requires solvable initial data (the fixed-point equation has nothing to
/// converge to otherwise).
pub fn volterra_solve(problem: &FdeProblem, grid: &GridSpec) -> Result<GridSolution> {
    let v = validate(problem)?;
    volterra_solve_validated(&v, grid)
}

pub fn volterra_solve_validated(v: &Validated, grid: &GridSpec) -> Result<GridSolution> {
    let report = existence_report(v);
    if report.verdict == Verdict::Unsolvable {
        return Err(FdeError::Contract(
            "initial data violate the existence conditions; there is no solution to march toward"
                .into(),
        ));
    }
    let p = v.problem();
    let n = grid.points();
    let h = grid.step();

    // peel the known sub-x^1 head of the solution
    let lad = neumann_ladder(v, 1.0)?;
    let origin_unbounded = lad.below.min_exponent().map(|e| e < 0.0).unwrap_or(false);

    // known term F of the peeled equation w = F + Σ a_i I^{α0-αi} w
    let alpha0 = p.leading.order;
    let mut f_known: Vec<f64> = (0..=n).map(|j| lad.above.eval(grid.node(j))).collect();
    match &lad.forcing_head {
        ForcingHead::Exact => {}
        ForcingHead::Taylor(coeffs) => {
            // I^{α0} of the Taylor remainder g - poly via quadrature
            let resid: Vec<f64> = (0..=n)
                .map(|j| {
                    let x = grid.node(j);
                    let mut poly = 0.0;
                    for (k, &c) in coeffs.iter().enumerate() {
                        poly += c * x.powi(k as i32);
                    }
                    p.forcing.eval(x) - poly
                })
                .collect();
            let resid = SampledFunction::new(h, resid)?;
            let integ = rl_integral(&resid, alpha0)?;
            for (f, r) in f_known.iter_mut().zip(integ.values()) {
                *f += r;
            }
        }
        ForcingHead::None => {
            let g = p.forcing.sample(grid)?;
            let integ = rl_integral(&g, alpha0)?;
            for (f, r) in f_known.iter_mut().zip(integ.values()) {
                *f += r;
            }
        }
    }

    // per-term kernel moments and the shared diagonal weight
    struct Kernel {
        coeff: f64,
        rg: f64,
        ca: Vec<f64>,
        cb: Vec<f64>,
    }
    let mut kernels = Vec::new();
    let mut diag = 0.0;
    for t in &p.lower {
        if t.coefficient == 0.0 {
            continue;
        }
        let nu = alpha0 - t.order;
        let w = panel_moments(nu, h, n);
        let rg = recip_gamma(nu);
        diag += t.coefficient * rg * w.cb[1];
        kernels.push(Kernel { coeff: t.coefficient, rg, ca: w.ca, cb: w.cb });
    }
    let pivot = 1.0 - diag;
    if pivot.abs() < 1e-14 {
        return Err(FdeError::StepFailure(format!(
            "step equation pivot {pivot:.3e} too small; refine the grid"
        )));
    }

    let mut w = vec![0.0; n + 1];
    for j in 1..=n {
        let mut rhs = f_known[j];
        for k in &kernels {
            let mut acc = 0.0;
            for q in 1..=j {
                let left = w[j - q];
                let right = if q == 1 { 0.0 } else { w[j - q + 1] };
                acc += left * k.ca[q] + right * k.cb[q];
            }
            rhs += k.coeff * k.rg * acc;
        }
        w[j] = rhs / pivot;
    }

    let mut values = vec![0.0; n + 1];
    for j in 1..=n {
        values[j] = lad.below.eval(grid.node(j)) + w[j];
    }
    values[0] = if origin_unbounded { 0.0 } else { lad.below.eval(0.0) + w[0] };
    Ok(GridSolution {
        samples: SampledFunction::new(h, values)?,
        origin_unbounded,
    })
}

/// Error metrics between two functions on the same grid, skipping the first
/// `skip` nodes (origin singularities make them unreliable).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub max_abs: f64,
    pub max_rel: f64,
    pub l2: f64,
}

/// Compare `a` against the reference `b`. Relative errors use
/// max(|b|, 1e-12) as denominator.
pub fn compare(a: &SampledFunction, b: &SampledFunction, skip: usize) -> Result<ErrorMetrics> {
    if a.values().len() != b.values().len()
        || (a.step() - b.step()).abs() > 1e-12 * a.step().max(b.step())
    {
        return Err(FdeError::GridMismatch(format!(
            "{} samples at h={} vs {} samples at h={}",
            a.values().len(),
            a.step(),
            b.values().len(),
            b.step()
        )));
    }
    if skip >= a.values().len() {
        return Err(FdeError::Domain(format!(
            "skip {skip} leaves no samples out of {}",
            a.values().len()
        )));
    }
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut sq = 0.0f64;
    for (&av, &bv) in a.values().iter().zip(b.values()).skip(skip) {
        let d = (av - bv).abs();
        max_abs = max_abs.max(d);
        max_rel = max_rel.max(d / bv.abs().max(1e-12));
        sq += d * d;
    }
    Ok(ErrorMetrics { max_abs, max_rel, l2: (a.step() * sq).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{FdeProblem, ForcingSpec, FractionalTerm};

    #[test]
    fn constant_solution_is_exact() {
        // y' = 0 as D^{1,1} y = 0, y(0) = 3
        let p = FdeProblem::new(
            FractionalTerm::new(1.0, 1.0, 1.0).unwrap(),
            vec![],
            ForcingSpec::Zero,
            1.0,
        )
        .with_initial(0, 0, 3.0);
        let grid = GridSpec::new(1.0, 64).unwrap();
        let y = volterra_solve(&p, &grid).unwrap();
        for &v in y.samples.values() {
            assert!((v - 3.0).abs() < 1e-13);
        }
        assert!(!y.origin_unbounded);
    }

    #[test]
    fn pure_integral_problem() {
        // D^{0.5,1} y = 1, zero data → y = x^{0.5}/Γ(1.5)
        let p = FdeProblem::new(
            FractionalTerm::new(0.5, 1.0, 1.0).unwrap(),
            vec![],
            ForcingSpec::constant(1.0),
            1.0,
        );
        let grid = GridSpec::new(1.0, 256).unwrap();
        let y = volterra_solve(&p, &grid).unwrap();
        let g15 = 0.88622692545275801;
        for j in (16..=256).step_by(16) {
            let x = grid.node(j);
            assert!(
                (y.samples.values()[j] - x.sqrt() / g15).abs() < 1e-6,
                "x={x}"
            );
        }
    }

    #[test]
    fn refuses_unsolvable_data() {
        let p = FdeProblem::new(
            FractionalTerm::new(0.7, 0.0, 1.0).unwrap(),
            vec![FractionalTerm::new(0.5, 0.0, 1.0).unwrap()],
            ForcingSpec::Zero,
            1.0,
        )
        .with_initial(1, 0, 1.0);
        let grid = GridSpec::new(1.0, 64).unwrap();
        assert!(matches!(volterra_solve(&p, &grid), Err(FdeError::Contract(_))));
    }

    #[test]
    fn stepping_is_linear_in_the_data() {
        let base = FdeProblem::new(
            FractionalTerm::new(0.9, 1.0, 1.0).unwrap(),
            vec![FractionalTerm::new(0.4, 1.0, -0.7).unwrap()],
            ForcingSpec::constant(1.0),
            1.0,
        )
        .with_initial(0, 0, 0.5);
        let scaled = FdeProblem::new(
            FractionalTerm::new(0.9, 1.0, 1.0).unwrap(),
            vec![FractionalTerm::new(0.4, 1.0, -0.7).unwrap()],
            ForcingSpec::constant(3.0),
            1.0,
        )
        .with_initial(0, 0, 1.5);
        let grid = GridSpec::new(1.0, 128).unwrap();
        let y1 = volterra_solve(&base, &grid).unwrap();
        let y3 = volterra_solve(&scaled, &grid).unwrap();
        for (a, b) in y1.samples.values().iter().zip(y3.samples.values()) {
            assert!((3.0 * a - b).abs() < 1e-11 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn compare_metrics() {
        let a = SampledFunction::new(0.1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let m = compare(&a, &a, 0).unwrap();
        assert_eq!(m.max_abs, 0.0);
        assert_eq!(m.max_rel, 0.0);
        assert_eq!(m.l2, 0.0);

        let b = SampledFunction::new(0.1, vec![1.5, 2.5, 3.5, 4.5]).unwrap();
        let m = compare(&b, &a, 0).unwrap();
        assert!((m.max_abs - 0.5).abs() < 1e-15);
        assert!((m.max_rel - 0.5).abs() < 1e-15);

        let c = SampledFunction::new(0.2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(compare(&a, &c, 0).is_err());
    }
}
