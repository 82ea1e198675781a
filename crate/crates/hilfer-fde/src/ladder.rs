//! Power-term bookkeeping around the origin.
//!
//! Solutions live in the class x^p·(continuous), p > -1, so near 0 they
//! expand in real powers. The fixed-point form of the equation,
//!
//! ```text
//! y = y_{α0,β0} - Σ a_i I^{α0-αi} y_{αi,βi} + I^{α0} g + Σ a_i I^{α0-αi} y,
//! ```
//!
//! reproduces that expansion one power at a time: applying I^ν to x^e gives
//! Γ(e+1)/Γ(e+1+ν)·x^{e+ν}. Peeling the known low-exponent part lets the
//! quadrature-based machinery (time stepper, residual instrument) work on a
//! smooth remainder instead of a singular or merely Hölder head.

use crate::error::{FdeError, Result};
use crate::problem::Validated;
use crate::specfun::{gamma_fn, ln_gamma, recip_gamma};

/// coeff · x^exponent
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

/// Exponents closer than this are the same rung.
const EXP_TOL: f64 = 1e-11;

/// A finite sum of real powers of x, merged by exponent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PowerSum {
    terms: Vec<PowerTerm>,
}

impl PowerSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, coeff: f64, exponent: f64) {
        if coeff == 0.0 {
            return;
        }
        for t in &mut self.terms {
            if (t.exponent - exponent).abs() <= EXP_TOL {
                t.coeff += coeff;
                return;
            }
        }
        self.terms.push(PowerTerm { coeff, exponent });
        self.terms.sort_by(|a, b| a.exponent.partial_cmp(&b.exponent).unwrap());
    }

    pub fn add_scaled(&mut self, other: &PowerSum, factor: f64) {
        for t in other.terms() {
            self.push(t.coeff * factor, t.exponent);
        }
    }

    /// I^ν applied term by term: c·x^e ↦ c·Γ(e+1)/Γ(e+1+ν)·x^{e+ν}.
    pub fn apply_rl(&self, nu: f64) -> PowerSum {
        debug_assert!(nu >= 0.0);
        if nu == 0.0 {
            return self.clone();
        }
        let mut out = PowerSum::new();
        for t in &self.terms {
            out.push(t.coeff * rl_power_factor(t.exponent, nu), t.exponent + nu);
        }
        out
    }

    /// Value at x > 0 (or x = 0 when no negative exponents are present).
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            if x == 0.0 {
                if t.exponent == 0.0 {
                    acc += t.coeff;
                } else if t.exponent < 0.0 {
                    return f64::INFINITY * t.coeff.signum();
                }
            } else {
                acc += t.coeff * x.powf(t.exponent);
            }
        }
        acc
    }

    pub fn min_exponent(&self) -> Option<f64> {
        self.terms.first().map(|t| t.exponent)
    }
}

/// Γ(e+1)/Γ(e+1+ν), the power-rule factor of I^ν, computed stably for
/// large arguments.
pub fn rl_power_factor(e: f64, nu: f64) -> f64 {
    debug_assert!(e > -1.0 && nu > 0.0);
    let a = e + 1.0;
    let b = e + 1.0 + nu;
    if b < 170.0 {
        gamma_fn(a).unwrap() * recip_gamma(b)
    } else {
        (ln_gamma(a) - ln_gamma(b)).exp()
    }
}

/// Hilfer derivative of a power: D^{α,β} x^e.
///
/// Returns `None` when the power is annihilated, i.e. when e + (1-β)(m-α)
/// is an integer in 0..m (the kernel powers of the operator); otherwise the
/// usual Γ(e+1)/Γ(e+1-α)·x^{e-α}, where the reciprocal-gamma pole structure
/// also zeroes the polynomial cases of the Caputo type automatically.
pub fn hilfer_power(coeff: f64, e: f64, alpha: f64, beta: f64) -> Option<PowerTerm> {
    debug_assert!(e > -1.0);
    if alpha == 0.0 {
        return Some(PowerTerm { coeff, exponent: e });
    }
    let m = alpha.ceil();
    let nu1 = (1.0 - beta) * (m - alpha);
    let shifted = e + nu1;
    let r = shifted.round();
    if (shifted - r).abs() < 1e-9 && r >= 0.0 && r <= m - 1.0 {
        return None;
    }
    let c = coeff * gamma_fn(e + 1.0).unwrap() * recip_gamma(e + 1.0 - alpha);
    Some(PowerTerm { coeff: c, exponent: e - alpha })
}

/// The initial-value function of one term: Σ_k y_{k-γi}·x^{k-γi}/Γ(k-γi+1)
/// for k = 0..m_i-1 (empty for order-0 terms and all-zero data).
pub fn initial_power_sum(v: &Validated, i: usize) -> PowerSum {
    let idx = v.indices();
    let gamma = idx.gamma[i];
    let mut out = PowerSum::new();
    for k in 0..idx.m[i] {
        let val = v.effective_initial(i, k);
        if val != 0.0 {
            let e = k as f64 - gamma;
            out.push(val * recip_gamma(e + 1.0), e);
        }
    }
    out
}

/// How the forcing entered the expansion.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingHead {
    /// I^{α0} g entered exactly (zero or pure power forcing).
    Exact,
    /// The Taylor polynomial with these coefficients entered; the remainder
    /// g - poly must still go through quadrature.
    Taylor(Vec<f64>),
    /// No analytic head available (tabulated data); all of g is left to
    /// quadrature.
    None,
}

/// The known power expansion of the solution split at `cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    /// Exponents < cap: the rough head to peel before quadrature.
    pub below: PowerSum,
    /// Exponents ≥ cap generated by the same recursion (part of the known
    /// forcing term of the peeled fixed-point equation).
    pub above: PowerSum,
    /// The part of the forcing whose fractional integral is already inside
    /// `below`/`above`.
    pub forcing_head: ForcingHead,
}

/// Neumann-expand the fixed-point equation until every known power of the
/// solution with exponent < `cap` has been collected.
///
/// Each rung below the cap, when fed back through Σ a_i I^{α0-αi}, produces
/// rungs with exponents raised by at least min_i(α0-αi) > 0, so the
/// recursion terminates. Tabulated forcing has no analytic head and is left
/// to the quadrature (flagged through `forcing_expanded`).
pub fn neumann_ladder(v: &Validated, cap: f64) -> Result<Ladder> {
    let p = v.problem();
    let n = p.n_lower();
    let alpha0 = p.leading.order;

    // seed: T = y_{α0,β0} - Σ a_i I^{α0-αi} y_{αi,βi} + I^{α0} g_analytic
    let mut seed = initial_power_sum(v, 0);
    for i in 1..=n {
        let term = &p.lower[i - 1];
        let yi = initial_power_sum(v, i);
        if !yi.is_empty() {
            seed.add_scaled(&yi.apply_rl(alpha0 - term.order), -term.coefficient);
        }
    }
    let mut forcing_head = ForcingHead::Exact;
    if let Some((scale, e)) = p.forcing.power_part() {
        if scale != 0.0 {
            seed.push(scale * rl_power_factor(e, alpha0), e + alpha0);
        }
    } else if !p.forcing.is_zero() {
        // enough Taylor terms of g so that k + α0 reaches the cap
        let count = (cap - alpha0).max(0.0).ceil() as usize + 1;
        match p.forcing.taylor(count) {
            Some(coeffs) => {
                for (k, &c) in coeffs.iter().enumerate() {
                    if c != 0.0 {
                        let e = k as f64;
                        seed.push(c * rl_power_factor(e, alpha0), e + alpha0);
                    }
                }
                forcing_head = ForcingHead::Taylor(coeffs);
            }
            None => forcing_head = ForcingHead::None,
        }
    }

    let mut below = PowerSum::new();
    let mut above = PowerSum::new();
    let mut work = PowerSum::new();
    for t in seed.terms() {
        work.push(t.coeff, t.exponent);
    }
    let mut guard = 0usize;
    while let Some(&head) = work.terms().first() {
        guard += 1;
        if guard > 200_000 {
            return Err(FdeError::InvalidProblem(
                "power-expansion ladder did not terminate (orders too closely spaced)".into(),
            ));
        }
        work.terms.remove(0);
        if head.coeff == 0.0 || head.coeff.abs() < 1e-280 {
            continue;
        }
        if head.exponent >= cap {
            above.push(head.coeff, head.exponent);
            continue;
        }
        below.push(head.coeff, head.exponent);
        for term in &p.lower {
            if term.coefficient == 0.0 {
                continue;
            }
            let nu = alpha0 - term.order;
            let child_c = term.coefficient * head.coeff * rl_power_factor(head.exponent, nu);
            let child_e = head.exponent + nu;
            if child_e >= cap {
                above.push(child_c, child_e);
            } else {
                work.push(child_c, child_e);
            }
        }
    }
    Ok(Ladder { below, above, forcing_head })
}
