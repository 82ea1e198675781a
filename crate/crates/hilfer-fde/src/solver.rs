//! Closed-form solutions of the multi-term equation.
//!
//! With homogeneous initial data the solution is a convolution of the
//! forcing with the kernel t^{α0-1}·E_{(α0-α1,…,α0-αn),α0}(a_1 t^{α0-α1},…).
//! Inhomogeneous data add, per derivative index k of the leading term, a
//! power x^{k-γ}/Γ(k-γ+1) plus Mittag-Leffler-weighted powers for the lower
//! terms selected by the index table l_k. When the shifts split at l, the
//! data must satisfy the mandatory-zero conditions first; `solve` reports
//! that verdict instead of failing.

use crate::config;
use crate::error::{FdeError, Result};
use crate::fracops::{self, GridSpec, SampledFunction};
use crate::ladder::{self, hilfer_power, neumann_ladder, PowerSum, PowerTerm};
use crate::problem::{
    existence_report, validate, CaseKind, ExistenceReport, FdeProblem, ForcingSpec,
    FractionalTerm, Validated, Verdict,
};
use crate::specfun::{ml_eval, recip_gamma, MlSpec};

/// One Mittag-Leffler-weighted power term:
/// coeff · x^exponent · E_{(weights),b}(a_1 x^{w_1},…,a_n x^{w_n}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlTerm {
    pub coeff: f64,
    pub exponent: f64,
    pub b: f64,
}

/// The forcing convolution ∫_0^x t^{p-1} E_{(weights),b}(…) g(x-t) dt.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionPart {
    pub p: f64,
    pub b: f64,
    pub forcing: ForcingSpec,
}

/// A closed-form solution: power terms, Mittag-Leffler terms sharing one
/// weight/argument family (only b varies), and an optional forcing
/// convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSolution {
    /// Mittag-Leffler weights (α0-α1, …, α0-αn).
    pub ml_weights: Vec<f64>,
    /// Argument scales (a_1, …, a_n): the j-th argument at x is a_j·x^{w_j}.
    pub ml_args_scale: Vec<f64>,
    pub power_terms: Vec<PowerTerm>,
    pub ml_terms: Vec<MlTerm>,
    pub convolution: Option<ConvolutionPart>,
}

impl ClosedFormSolution {
    /// Whether the solution has an integrable singularity at the origin
    /// (some negative exponent with a nonzero coefficient).
    pub fn origin_unbounded(&self) -> bool {
        self.power_terms.iter().any(|t| t.coeff != 0.0 && t.exponent < 0.0)
            || self.ml_terms.iter().any(|t| t.coeff != 0.0 && t.exponent < 0.0)
    }

    /// True for the empty term list (the zero solution).
    pub fn is_identically_zero(&self) -> bool {
        self.power_terms.is_empty() && self.ml_terms.is_empty() && self.convolution.is_none()
    }
}

/// Samples of a solution on a grid. When the solution is unbounded at the
/// origin the node-0 value is set to zero and flagged here instead.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub samples: SampledFunction,
    pub origin_unbounded: bool,
}

/// Power terms of the initial-value function of term i:
/// Σ_k y_{k-γi} x^{k-γi}/Γ(k-γi+1).
pub fn initial_function(v: &Validated, i: usize) -> Vec<PowerTerm> {
    ladder::initial_power_sum(v, i).terms().to_vec()
}

/// Solve with homogeneous initial data: the solution is the forcing
/// convolution alone (identically zero for zero forcing). Nonzero initial
/// values are a contract violation here; use [`solve`] for the general case.
pub fn solve_homogeneous_ic(problem: &FdeProblem) -> Result<ClosedFormSolution> {
    let v = validate(problem)?;
    if v.problem().initial_values.values().any(|&val| val != 0.0) {
        return Err(FdeError::Contract(
            "solve_homogeneous_ic requires all initial values to be zero".into(),
        ));
    }
    Ok(build_solution(&v, None))
}

/// Existence verdict plus the closed-form solution when one exists.
pub fn solve(problem: &FdeProblem) -> Result<(ExistenceReport, Option<ClosedFormSolution>)> {
    let v = validate(problem)?;
    solve_validated(&v)
}

pub fn solve_validated(v: &Validated) -> Result<(ExistenceReport, Option<ClosedFormSolution>)> {
    let report = existence_report(v);
    if report.verdict == Verdict::Unsolvable {
        return Ok((report, None));
    }
    Ok((report, Some(build_solution(v, None))))
}

/// Assemble the term list. `forced_split` overrides the case classification
/// with a split at the given l (used by the relaxation-model constructor at
/// its type-parameter boundary).
fn build_solution(v: &Validated, forced_split: Option<usize>) -> ClosedFormSolution {
    let p = v.problem();
    let idx = v.indices();
    let n = p.n_lower();
    let alpha0 = p.leading.order;
    let ml_weights: Vec<f64> = p.lower.iter().map(|t| alpha0 - t.order).collect();
    let ml_args_scale: Vec<f64> = p.lower.iter().map(|t| t.coefficient).collect();
    let gamma0 = idx.gamma[0];

    let (k_start, range_top) = match forced_split {
        Some(l) => (0usize, l - 1),
        None => match idx.case {
            CaseKind::AllGammaEqual => (0usize, n),
            CaseKind::Split { l, m_bound } => (m_bound.max(0) as usize, l - 1),
        },
    };

    let mut power_terms = Vec::new();
    let mut ml_terms = Vec::new();
    for k in k_start..idx.m[0] {
        let c = v.leading_values()[k];
        if c == 0.0 {
            continue;
        }
        let e = k as f64 - gamma0;
        power_terms.push(PowerTerm { coeff: c * recip_gamma(e + 1.0), exponent: e });
        let lk = crate::problem::compute_lk(k, &idx.m, range_top);
        for i in lk + 1..=n {
            let ai = p.lower[i - 1].coefficient;
            if ai == 0.0 {
                continue;
            }
            let w = alpha0 - p.lower[i - 1].order;
            ml_terms.push(MlTerm { coeff: c * ai, exponent: e + w, b: e + w + 1.0 });
        }
    }
    let convolution = if p.forcing.is_zero() {
        None
    } else {
        Some(ConvolutionPart { p: alpha0, b: alpha0, forcing: p.forcing.clone() })
    };
    ClosedFormSolution { ml_weights, ml_args_scale, power_terms, ml_terms, convolution }
}

fn ml_factor(
    weights: &[f64],
    scales: &[f64],
    b: f64,
    x: f64,
    tol: f64,
) -> Result<f64> {
    if weights.is_empty() {
        return Ok(recip_gamma(b));
    }
    let spec = MlSpec::new(weights.to_vec(), b)?;
    let z: Vec<f64> = weights
        .iter()
        .zip(scales)
        .map(|(&w, &a)| if x == 0.0 { 0.0 } else { a * x.powf(w) })
        .collect();
    Ok(ml_eval(&spec, &z, tol)?.value)
}

/// Fractional-power head of the kernel factor E_{(w),b}(a_1 t^{w_1},…):
/// every series term with t-exponent Σ w_j l_j below `cap`, as explicit
/// powers. Peeling these off leaves a remainder smooth enough for
/// piecewise-linear quadrature.
fn ml_kernel_head(
    weights: &[f64],
    scales: &[f64],
    b: f64,
    cap: f64,
    max_terms: usize,
) -> PowerSum {
    let mut head = PowerSum::new();
    if weights.is_empty() {
        head.push(recip_gamma(b), 0.0);
        return head;
    }
    // enumerate multi-indices slot by slot while the exponent stays below cap
    fn recurse(
        slot: usize,
        e: f64,
        coeff: f64,
        k: usize,
        weights: &[f64],
        scales: &[f64],
        b: f64,
        cap: f64,
        max_terms: usize,
        out: &mut PowerSum,
        count: &mut usize,
    ) {
        if *count >= max_terms {
            return;
        }
        if slot == weights.len() {
            // multinomial (k; l⃗) is carried incrementally inside `coeff`
            out.push(coeff * recip_gamma(b + e), e);
            *count += 1;
            return;
        }
        let mut c = coeff;
        let mut ee = e;
        let mut kk = k;
        loop {
            recurse(slot + 1, ee, c, kk, weights, scales, b, cap, max_terms, out, count);
            ee += weights[slot];
            if ee >= cap || scales[slot] == 0.0 || *count >= max_terms {
                break;
            }
            kk += 1;
            // (k+1; …, l_j+1, …) = (k; …, l_j, …) · (k+1)/(l_j+1); track l_j
            // through the loop iteration count
            let lj = ((ee - e) / weights[slot]).round();
            c *= scales[slot] * kk as f64 / lj;
        }
    }
    let mut count = 0usize;
    recurse(0, 0.0, 1.0, 0, weights, scales, b, cap, max_terms, &mut head, &mut count);
    head
}

/// Value of the solution at a single point x ≥ 0. At x = 0 a solution
/// with an integrable singularity evaluates to ±inf.
pub fn eval_at(sol: &ClosedFormSolution, x: f64, tol: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(FdeError::Domain("solutions are defined for x >= 0".into()));
    }
    if sol.convolution.is_some() {
        return Err(FdeError::Contract(
            "eval_at supports term-only solutions; use eval_solution for convolutions".into(),
        ));
    }
    let mut acc = 0.0;
    for t in &sol.power_terms {
        acc += if x == 0.0 {
            match t.exponent.partial_cmp(&0.0).unwrap() {
                std::cmp::Ordering::Greater => 0.0,
                std::cmp::Ordering::Equal => t.coeff,
                std::cmp::Ordering::Less => f64::INFINITY * t.coeff.signum(),
            }
        } else {
            t.coeff * x.powf(t.exponent)
        };
    }
    for t in &sol.ml_terms {
        let e = ml_factor(&sol.ml_weights, &sol.ml_args_scale, t.b, x, tol)?;
        let pw = if x == 0.0 {
            match t.exponent.partial_cmp(&0.0).unwrap() {
                std::cmp::Ordering::Greater => 0.0,
                std::cmp::Ordering::Equal => 1.0,
                std::cmp::Ordering::Less => f64::INFINITY * t.coeff.signum(),
            }
        } else {
            x.powf(t.exponent)
        };
        acc += t.coeff * pw * e;
    }
    Ok(acc)
}

/// Sample the solution on a grid. Power and Mittag-Leffler terms are
/// evaluated pointwise; the forcing convolution goes through product
/// integration with the Mittag-Leffler factor as the smooth part.
pub fn eval_solution(sol: &ClosedFormSolution, grid: &GridSpec, tol: f64) -> Result<GridSolution> {
    let n = grid.points();
    let origin_unbounded = sol.origin_unbounded();
    let mut values = vec![0.0; n + 1];

    for t in &sol.power_terms {
        for (j, v) in values.iter_mut().enumerate() {
            let x = grid.node(j);
            if j == 0 {
                if t.exponent == 0.0 {
                    *v += t.coeff;
                }
            } else {
                *v += t.coeff * x.powf(t.exponent);
            }
        }
    }
    for t in &sol.ml_terms {
        for (j, v) in values.iter_mut().enumerate() {
            let x = grid.node(j);
            if j == 0 {
                if t.exponent == 0.0 {
                    *v += t.coeff * recip_gamma(t.b);
                }
            } else {
                let e = ml_factor(&sol.ml_weights, &sol.ml_args_scale, t.b, x, tol)?;
                *v += t.coeff * x.powf(t.exponent) * e;
            }
        }
    }
    if let Some(conv) = &sol.convolution {
        // Split the kernel t^{p-1}·E(…) into its fractional-power head,
        // convolved exactly through the power rule
        // ∫ t^{p-1+e} g(x-t) dt = Γ(p+e)·I^{p+e} g, plus a smooth remainder
        // for product integration. Without the split the Hölder head of the
        // Mittag-Leffler factor costs two orders of accuracy near t = 0.
        let head = ml_kernel_head(&sol.ml_weights, &sol.ml_args_scale, conv.b, 1.5, 256);
        let gs = conv.forcing.sample(grid)?;
        for t in head.terms() {
            let nu = conv.p + t.exponent;
            let integ = fracops::rl_integral(&gs, nu)?;
            let factor = t.coeff * crate::specfun::gamma_fn(nu)?;
            for (v, iv) in values.iter_mut().zip(integ.values()) {
                *v += factor * iv;
            }
        }
        let weights = sol.ml_weights.clone();
        let scales = sol.ml_args_scale.clone();
        let b = conv.b;
        let head_rem = head.clone();
        let smooth =
            move |t: f64| Ok(ml_factor(&weights, &scales, b, t, tol)? - head_rem.eval(t));
        let c = fracops::singular_convolution(conv.p, &smooth, &conv.forcing, grid)?;
        for (v, cv) in values.iter_mut().zip(c.values()) {
            *v += cv;
        }
    }
    if origin_unbounded {
        values[0] = 0.0;
    }
    Ok(GridSolution { samples: SampledFunction::new(grid.step(), values)?, origin_unbounded })
}

/// One 4th-order first derivative (5-point interior stencil, lower-order
/// fallbacks near the edges). The edge noise stays inside the residual
/// margin.
fn derivative4_once(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len() - 1;
    let mut d = vec![0.0; n + 1];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[1] = (v[2] - v[0]) / (2.0 * h);
    for j in 2..n.saturating_sub(1) {
        d[j] = (v[j - 2] - 8.0 * v[j - 1] + 8.0 * v[j + 1] - v[j + 2]) / (12.0 * h);
    }
    if n >= 2 {
        d[n - 1] = (v[n] - v[n - 2]) / (2.0 * h);
    }
    d[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    d
}

/// Max-norm equation residual |D^{α0,β0}y - Σ a_i D^{αi,βi}y - g| over
/// [margin, X], with the solution sampled on `grid`.
///
/// The known rough head of the solution (all powers below x^max(2,m0),
/// reconstructed independently from the fixed-point expansion) is
/// differentiated analytically; the smooth remainder goes through
/// quadrature plus finite differences as D^m I^{m-α}, which is exact on the
/// peeled class. This keeps the origin singularity from polluting the whole
/// interval through the memory integral.
pub fn residual_check(
    problem: &FdeProblem,
    sol: &ClosedFormSolution,
    grid: &GridSpec,
    margin: f64,
) -> Result<f64> {
    let v = validate(problem)?;
    let idx = v.indices().clone();
    let p = v.problem().clone();
    if !(margin > 0.0) || margin >= grid.interval_end() {
        return Err(FdeError::Domain(format!(
            "margin must lie inside (0, {}), got {margin}",
            grid.interval_end()
        )));
    }
    let n = grid.points();
    if n < config::MIN_POINTS_PER_ORDER * idx.m[0].max(1) {
        return Err(FdeError::GridTooCoarse(format!(
            "residual check needs at least {} intervals",
            config::MIN_POINTS_PER_ORDER * idx.m[0].max(1)
        )));
    }
    let h = grid.step();
    let y = eval_solution(sol, grid, config::DEFAULT_TOL)?;

    let cap = (idx.m[0] as f64).max(2.0);
    let lad = neumann_ladder(&v, cap)?;
    let mut yr = vec![0.0; n + 1];
    for (j, slot) in yr.iter_mut().enumerate().skip(1) {
        *slot = y.samples.values()[j] - lad.below.eval(grid.node(j));
    }
    // remainder head has positive exponent, so its limit at 0 is 0
    yr[0] = 0.0;
    let yr_s = SampledFunction::new(h, yr)?;

    let mut terms: Vec<(f64, f64, f64)> = vec![(p.leading.order, p.leading.type_param, 1.0)];
    for t in &p.lower {
        terms.push((t.order, t.type_param, -t.coefficient));
    }

    let mut lhs = vec![0.0; n + 1];
    for &(order, beta, c) in &terms {
        if order == 0.0 {
            for (j, slot) in lhs.iter_mut().enumerate().skip(1) {
                *slot += c * y.samples.values()[j];
            }
            continue;
        }
        let m = order.ceil() as usize;
        let mut head = PowerSum::new();
        for t in lad.below.terms() {
            if let Some(d) = hilfer_power(t.coeff, t.exponent, order, beta) {
                head.push(d.coeff, d.exponent);
            }
        }
        let w = fracops::rl_integral(&yr_s, m as f64 - order)?;
        let mut d = w.values().to_vec();
        for _ in 0..m {
            d = derivative4_once(&d, h);
        }
        for (j, slot) in lhs.iter_mut().enumerate().skip(1) {
            *slot += c * (head.eval(grid.node(j)) + d[j]);
        }
    }

    let mut max_resid = 0.0f64;
    for (j, &l) in lhs.iter().enumerate().skip(1) {
        let x = grid.node(j);
        if x + 1e-12 < margin {
            continue;
        }
        let r = (l - p.forcing.eval(x)).abs();
        if r > max_resid {
            max_resid = r;
        }
    }
    Ok(max_resid)
}

fn build_linear_combination(
    orders: &[f64],
    coeffs: &[f64],
    type_param: f64,
    forcing: ForcingSpec,
    interval_end: f64,
) -> Result<FdeProblem> {
    if orders.is_empty() || orders.len() != coeffs.len() {
        return Err(FdeError::InvalidProblem(
            "orders and coefficients must be non-empty and of equal length".into(),
        ));
    }
    let leading = FractionalTerm::new(orders[0], type_param, coeffs[0])?;
    // equation Σ c_i D^{αi} y = g  ↦  canonical D^{α0} y - Σ (-c_i) D^{αi} y = g
    let lower = orders[1..]
        .iter()
        .zip(&coeffs[1..])
        .map(|(&o, &c)| FractionalTerm::new(o, type_param, -c))
        .collect::<Result<Vec<_>>>()?;
    Ok(FdeProblem::new(leading, lower, forcing, interval_end))
}

/// Caputo-type problem Σ coeffs[i]·D^{orders[i]} y = g (types all 1) with
/// initial data y^{(k)}(0) = initial[k].
pub fn solve_caputo(
    orders: &[f64],
    coeffs: &[f64],
    initial: &[f64],
    forcing: ForcingSpec,
    interval_end: f64,
) -> Result<(ExistenceReport, Option<ClosedFormSolution>)> {
    let mut p = build_linear_combination(orders, coeffs, 1.0, forcing, interval_end)?;
    let m0 = ceil_usize(orders[0]);
    if initial.len() > m0 {
        return Err(FdeError::InvalidProblem(format!(
            "leading order {} admits {} initial values, got {}",
            orders[0],
            m0,
            initial.len()
        )));
    }
    for (k, &val) in initial.iter().enumerate() {
        p.initial_values.insert((0, k), val);
    }
    solve(&p)
}

/// Riemann-Liouville-type problem (types all 0) with initial data supplied
/// as (term index, derivative index, value) triples.
pub fn solve_rl(
    orders: &[f64],
    coeffs: &[f64],
    initial: &[(usize, usize, f64)],
    forcing: ForcingSpec,
    interval_end: f64,
) -> Result<(ExistenceReport, Option<ClosedFormSolution>)> {
    let mut p = build_linear_combination(orders, coeffs, 0.0, forcing, interval_end)?;
    for &(i, k, val) in initial {
        p.initial_values.insert((i, k), val);
    }
    solve(&p)
}

fn ceil_usize(alpha: f64) -> usize {
    alpha.ceil().max(0.0) as usize
}

/// The composite fractional relaxation model
///
/// ```text
/// τ1 f'(t) + τ2^α D^{α,μ} f(t) + f(t) = 0,   f(0+) = 1,
/// I^{(1-μ)(1-α)} f(0+) = f_shift,
/// ```
///
/// with 0 < α < 1, 0 ≤ μ ≤ 1, τ1 > 0. The model is solvable iff
/// f_shift = 0, and its solution
/// f(t) = E_{(1-α,1),1}(-(τ2^α/τ1) t^{1-α}, -t/τ1) does not depend on the
/// type μ. This constructor returns that family solution on the closed
/// interval 0 ≤ μ ≤ 1. At μ = 1 exactly the extra initial condition
/// degenerates into f(0+) itself and the generic [`solve`] classifies the
/// problem as all-shifts-equal, yielding the Caputo-specific solution
/// instead; call `solve` directly when that reading is intended.
pub fn composite_relaxation(
    tau1: f64,
    tau2: f64,
    alpha: f64,
    mu: f64,
) -> Result<(ExistenceReport, Option<ClosedFormSolution>)> {
    composite_relaxation_with_data(tau1, tau2, alpha, mu, 0.0)
}

/// [`composite_relaxation`] with an explicit value for the shifted initial
/// condition; any nonzero value makes the model unsolvable.
pub fn composite_relaxation_with_data(
    tau1: f64,
    tau2: f64,
    alpha: f64,
    mu: f64,
    f_shift: f64,
) -> Result<(ExistenceReport, Option<ClosedFormSolution>)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FdeError::Domain(format!("relaxation order must be in (0,1), got {alpha}")));
    }
    if !(0.0..=1.0).contains(&mu) {
        return Err(FdeError::Domain(format!("type parameter must be in [0,1], got {mu}")));
    }
    if !(tau1 > 0.0) || !(tau2 >= 0.0) {
        return Err(FdeError::Domain(format!(
            "time constants must satisfy τ1 > 0, τ2 >= 0, got ({tau1}, {tau2})"
        )));
    }
    let a1 = -tau2.powf(alpha) / tau1;
    let a2 = -1.0 / tau1;
    let mut p = FdeProblem::new(
        FractionalTerm::new(1.0, 1.0, 1.0)?,
        vec![FractionalTerm::new(alpha, mu, a1)?, FractionalTerm::new(0.0, 1.0, a2)?],
        ForcingSpec::Zero,
        1.0,
    )
    .with_initial(0, 0, 1.0);
    let degenerate_shift = mu >= 1.0; // (1-μ)(1-α) = 0: the condition is f(0+) itself
    if !degenerate_shift {
        p = p.with_initial(1, 0, f_shift);
    }

    if f_shift != 0.0 {
        // the model's existence condition, independent of μ
        validate(&p)?;
        let report = ExistenceReport {
            verdict: Verdict::Unsolvable,
            mandatory_zero: vec![crate::problem::MandatoryZero { term: 1, k: 0, supplied: f_shift }],
            case: CaseKind::Split { l: 1, m_bound: -1 },
        };
        return Ok((report, None));
    }
    if !degenerate_shift {
        return solve(&p);
    }
    // μ = 1: build the family solution through the same split structure the
    // μ < 1 members use (l = 1, no mandatory-zero constraint active).
    let v = validate(&p)?;
    let report = ExistenceReport {
        verdict: Verdict::Solvable,
        mandatory_zero: vec![crate::problem::MandatoryZero { term: 1, k: 0, supplied: 0.0 }],
        case: CaseKind::Split { l: 1, m_bound: -1 },
    };
    Ok((report, Some(build_solution(&v, Some(1)))))
}
