//! Problem definition and index bookkeeping for the multi-term equation
//!
//! ```text
//! D^{α0,β0} y - Σ_{i=1..n} a_i D^{αi,βi} y = g,
//! (d/dx)^k I^{(1-βi)(mi-αi)} y(0+) = y_{k-γi},  k = 0..mi-1,
//! ```
//!
//! where m_i is the integer envelope m_i - 1 < α_i ≤ m_i and
//! γ_i = (1-β_i)(m_i-α_i) ∈ [0,1) the shift of the natural initial
//! conditions. Validation sorts the lower terms so m_i - γ_i is
//! non-increasing, classifies the problem by whether all γ_i coincide, and
//! computes the split bookkeeping (l, M, l_k) the solution formulas need.

use std::collections::BTreeMap;

use crate::config;
use crate::error::{FdeError, Result};
use crate::fracops::{GridSpec, SampledFunction};

/// One derivative term D^{α,β} with its coefficient.
///
/// The leading term of a problem has implicit coefficient 1 after
/// normalization; lower-term coefficients are the a_i of the canonical form
/// `D^{α0,β0} y - Σ a_i D^{αi,βi} y = g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalTerm {
    pub order: f64,
    pub type_param: f64,
    pub coefficient: f64,
}

impl FractionalTerm {
    pub fn new(order: f64, type_param: f64, coefficient: f64) -> Result<Self> {
        let t = Self { order, type_param, coefficient };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        if !self.order.is_finite() || self.order < 0.0 {
            return Err(FdeError::InvalidProblem(format!(
                "order must be >= 0, got {}",
                self.order
            )));
        }
        if !self.type_param.is_finite() || !(0.0..=1.0).contains(&self.type_param) {
            return Err(FdeError::InvalidProblem(format!(
                "type parameter must be in [0,1], got {}",
                self.type_param
            )));
        }
        if !self.coefficient.is_finite() {
            return Err(FdeError::InvalidProblem("coefficient must be finite".into()));
        }
        Ok(())
    }

    /// Integer envelope m with m-1 < order ≤ m (0 for order 0).
    pub fn envelope(&self) -> usize {
        self.order.ceil() as usize
    }

    /// Initial-condition shift γ = (1-β)(m-α) ∈ [0,1).
    pub fn gamma_shift(&self) -> f64 {
        (1.0 - self.type_param) * (self.envelope() as f64 - self.order)
    }
}

/// Smallest integer m with m-1 < alpha ≤ m; 0 exactly at alpha = 0.
pub fn ceil_order(alpha: f64) -> Result<usize> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(FdeError::Domain(format!("order must be >= 0, got {alpha}")));
    }
    Ok(alpha.ceil() as usize)
}

/// γ = (1-beta)(ceil_order(alpha) - alpha) ∈ [0,1).
pub fn gamma_index(alpha: f64, beta: f64) -> Result<f64> {
    if !beta.is_finite() || !(0.0..=1.0).contains(&beta) {
        return Err(FdeError::Domain(format!("type parameter must be in [0,1], got {beta}")));
    }
    let m = ceil_order(alpha)?;
    Ok((1.0 - beta) * (m as f64 - alpha))
}

/// Interpolation rule for tabulated forcing data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpOrder {
    /// Piecewise constant (left sample).
    Constant,
    /// Piecewise linear.
    Linear,
}

/// Right-hand side g(x).
///
/// The theory asks g to lie in x^p·(continuous) with p > -1, and one
/// notch smoother when the leading order is non-integer. Zero, power
/// (exponent > -1), exponential and sinusoid variants satisfy that by
/// construction; for tabulated data it is the caller's responsibility —
/// it is not machine-checkable and is not enforced here.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingSpec {
    Zero,
    /// scale · x^exponent with exponent > -1 (integrable singularity allowed).
    Power { scale: f64, exponent: f64 },
    /// scale · e^{rate·x}
    Exponential { scale: f64, rate: f64 },
    /// scale · sin(angular_freq·x + phase)
    Sinusoid { scale: f64, angular_freq: f64, phase: f64 },
    /// Sampled data interpolated onto quadrature nodes.
    Tabulated { samples: SampledFunction, interp: InterpOrder },
}

impl ForcingSpec {
    /// Constant forcing c (a power with exponent 0).
    pub fn constant(c: f64) -> Self {
        ForcingSpec::Power { scale: c, exponent: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ForcingSpec::Zero => Ok(()),
            ForcingSpec::Power { scale, exponent } => {
                if !scale.is_finite() || !exponent.is_finite() || *exponent <= -1.0 {
                    return Err(FdeError::InvalidProblem(format!(
                        "power forcing needs finite scale and exponent > -1, got {scale}·x^{exponent}"
                    )));
                }
                Ok(())
            }
            ForcingSpec::Exponential { scale, rate } => {
                if !scale.is_finite() || !rate.is_finite() {
                    return Err(FdeError::InvalidProblem("exponential forcing needs finite parameters".into()));
                }
                Ok(())
            }
            ForcingSpec::Sinusoid { scale, angular_freq, phase } => {
                if !scale.is_finite() || !angular_freq.is_finite() || !phase.is_finite() {
                    return Err(FdeError::InvalidProblem("sinusoid forcing needs finite parameters".into()));
                }
                Ok(())
            }
            ForcingSpec::Tabulated { samples, interp: _ } => {
                if samples.values().len() < 2 {
                    return Err(FdeError::InvalidProblem("tabulated forcing needs at least 2 samples".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ForcingSpec::Zero)
            || matches!(self, ForcingSpec::Power { scale, .. } if *scale == 0.0)
    }

    /// Pointwise value. Power forcing with negative exponent diverges at 0;
    /// grid sampling handles that node separately.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ForcingSpec::Zero => 0.0,
            ForcingSpec::Power { scale, exponent } => {
                if *exponent == 0.0 {
                    *scale
                } else if x <= 0.0 {
                    if *exponent > 0.0 {
                        0.0
                    } else {
                        f64::INFINITY * scale.signum()
                    }
                } else {
                    scale * x.powf(*exponent)
                }
            }
            ForcingSpec::Exponential { scale, rate } => scale * (rate * x).exp(),
            ForcingSpec::Sinusoid { scale, angular_freq, phase } => {
                scale * (angular_freq * x + phase).sin()
            }
            ForcingSpec::Tabulated { samples, interp } => match interp {
                InterpOrder::Linear => samples.interp_linear(x),
                InterpOrder::Constant => {
                    let n = samples.values().len() - 1;
                    let j = ((x / samples.step()).floor().max(0.0) as usize).min(n);
                    samples.values()[j]
                }
            },
        }
    }

    /// Sample onto a grid. For a power forcing with a singular origin the
    /// node-0 value is replaced by the average preserving the first-panel
    /// integral under linear interpolation.
    pub fn sample(&self, grid: &GridSpec) -> Result<SampledFunction> {
        self.validate()?;
        if let ForcingSpec::Tabulated { samples, .. } = self {
            let covered = samples.interval_end() + samples.step() * 1e-9;
            if covered < grid.interval_end() {
                return Err(FdeError::Domain(format!(
                    "tabulated forcing covers [0, {}], grid needs [0, {}]",
                    samples.interval_end(),
                    grid.interval_end()
                )));
            }
        }
        let n = grid.points();
        let mut v: Vec<f64> = (0..=n).map(|j| self.eval(grid.node(j))).collect();
        if let ForcingSpec::Power { scale, exponent } = self {
            if *exponent < 0.0 {
                let h = grid.step();
                v[0] = scale * h.powf(*exponent) * (1.0 - exponent) / (1.0 + exponent);
            }
        }
        SampledFunction::new(grid.step(), v)
    }

    /// Rescaled forcing factor·g.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            ForcingSpec::Zero => ForcingSpec::Zero,
            ForcingSpec::Power { scale, exponent } => {
                ForcingSpec::Power { scale: scale * factor, exponent: *exponent }
            }
            ForcingSpec::Exponential { scale, rate } => {
                ForcingSpec::Exponential { scale: scale * factor, rate: *rate }
            }
            ForcingSpec::Sinusoid { scale, angular_freq, phase } => ForcingSpec::Sinusoid {
                scale: scale * factor,
                angular_freq: *angular_freq,
                phase: *phase,
            },
            ForcingSpec::Tabulated { samples, interp } => {
                let v = samples.values().iter().map(|x| x * factor).collect();
                ForcingSpec::Tabulated {
                    samples: SampledFunction::new(samples.step(), v).expect("rescale keeps validity"),
                    interp: *interp,
                }
            }
        }
    }

    /// Taylor coefficients of g at 0 up to x^{count-1} for analytic variants
    /// (used to peel the smooth head of the solution near the origin).
    pub fn taylor(&self, count: usize) -> Option<Vec<f64>> {
        let mut c = vec![0.0; count];
        match self {
            ForcingSpec::Zero => Some(c),
            ForcingSpec::Power { scale, exponent } => {
                let e = *exponent;
                if e >= 0.0 && e.fract() == 0.0 && (e as usize) < count {
                    c[e as usize] = *scale;
                    Some(c)
                } else {
                    None
                }
            }
            ForcingSpec::Exponential { scale, rate } => {
                let mut term = *scale;
                for (k, slot) in c.iter_mut().enumerate() {
                    *slot = term;
                    term *= rate / (k as f64 + 1.0);
                }
                Some(c)
            }
            ForcingSpec::Sinusoid { scale, angular_freq, phase } => {
                let mut fact = 1.0;
                for (k, slot) in c.iter_mut().enumerate() {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    *slot = scale * angular_freq.powi(k as i32)
                        * (phase + k as f64 * std::f64::consts::FRAC_PI_2).sin()
                        / fact;
                }
                Some(c)
            }
            ForcingSpec::Tabulated { .. } => None,
        }
    }

    /// The (scale, exponent) pair of a pure power forcing.
    pub fn power_part(&self) -> Option<(f64, f64)> {
        match self {
            ForcingSpec::Power { scale, exponent } => Some((*scale, *exponent)),
            _ => None,
        }
    }
}

/// The initial value problem. Initial values are keyed by
/// (term index i, derivative index k) and carry y_{k-γi}; missing keys
/// default to zero (homogeneous conditions are the base case).
#[derive(Debug, Clone, PartialEq)]
pub struct FdeProblem {
    pub leading: FractionalTerm,
    pub lower: Vec<FractionalTerm>,
    pub initial_values: BTreeMap<(usize, usize), f64>,
    pub forcing: ForcingSpec,
    pub interval_end: f64,
}

impl FdeProblem {
    pub fn new(
        leading: FractionalTerm,
        lower: Vec<FractionalTerm>,
        forcing: ForcingSpec,
        interval_end: f64,
    ) -> Self {
        Self { leading, lower, initial_values: BTreeMap::new(), forcing, interval_end }
    }

    pub fn with_initial(mut self, term: usize, k: usize, value: f64) -> Self {
        self.initial_values.insert((term, k), value);
        self
    }

    /// Number of lower-order terms n.
    pub fn n_lower(&self) -> usize {
        self.lower.len()
    }

    fn term(&self, i: usize) -> &FractionalTerm {
        if i == 0 {
            &self.leading
        } else {
            &self.lower[i - 1]
        }
    }
}

/// Classification of the shift pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// γ_0 = γ_1 = … = γ_n: unconditionally solvable.
    AllGammaEqual,
    /// γ_0 = … = γ_{l-1} ≠ γ_l with l minimal. Initial values of terms
    /// i ≥ l must vanish, as must the shared-shift values with derivative
    /// index k ≤ m_bound (no constraint there when m_bound < 0).
    Split { l: usize, m_bound: i64 },
}

/// Index quantities derived by validation: integer envelopes, shifts, the
/// case split, and the table k ↦ l_k selecting which lower terms join each
/// initial-value mode in the solution.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedIndices {
    pub m: Vec<usize>,
    pub gamma: Vec<f64>,
    pub case: CaseKind,
    pub lk_table: Vec<usize>,
}

impl DerivedIndices {
    /// Upper index of the l_k scan: n when all shifts coincide, l-1 after a
    /// split.
    pub fn range_top(&self) -> usize {
        match self.case {
            CaseKind::AllGammaEqual => self.m.len() - 1,
            CaseKind::Split { l, .. } => l - 1,
        }
    }
}

/// A validated, normalized problem: leading coefficient 1, lower terms
/// sorted so m_i - γ_i is non-increasing, initial-value keys checked, and
/// the shared-shift values resolved per derivative index.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    problem: FdeProblem,
    indices: DerivedIndices,
    leading_values: Vec<f64>,
}

impl Validated {
    pub fn problem(&self) -> &FdeProblem {
        &self.problem
    }

    pub fn indices(&self) -> &DerivedIndices {
        &self.indices
    }

    /// y_{k-γ0} for k = 0..m0-1, resolved across all terms sharing γ0
    /// (missing values are zero).
    pub fn leading_values(&self) -> &[f64] {
        &self.leading_values
    }

    /// Initial value for key (i, k), defaulting to zero.
    pub fn initial_value(&self, i: usize, k: usize) -> f64 {
        self.problem.initial_values.get(&(i, k)).copied().unwrap_or(0.0)
    }

    /// The value the solution formulas see for (i, k): terms sharing the
    /// leading shift read the resolved shared value, everything else its own
    /// entry.
    pub fn effective_initial(&self, i: usize, k: usize) -> f64 {
        let idx = &self.indices;
        let group_end = match idx.case {
            CaseKind::AllGammaEqual => idx.m.len(),
            CaseKind::Split { l, .. } => l,
        };
        if i < group_end && idx.gamma[i] == idx.gamma[0] {
            self.leading_values.get(k).copied().unwrap_or(0.0)
        } else {
            self.initial_value(i, k)
        }
    }
}

fn floor_snapped(v: f64) -> i64 {
    let r = v.round();
    if (v - r).abs() < 1e-10 {
        r as i64
    } else {
        v.floor() as i64
    }
}

/// The integer l_k with m_{l_k} ≥ k+1 and m_{l_k+1} ≤ k, scanned over
/// indices 0..=range_top of the (non-increasing) envelope list: the largest
/// qualifying index, range_top when all qualify, 0 when none do.
pub fn compute_lk(k: usize, m: &[usize], range_top: usize) -> usize {
    let mut lk = 0usize;
    for (j, &mj) in m.iter().enumerate().take(range_top + 1) {
        if mj >= k + 1 {
            lk = j;
        }
    }
    lk
}

/// Validate and normalize a problem; computes all derived index quantities.
pub fn validate(problem: &FdeProblem) -> Result<Validated> {
    problem.leading.check()?;
    for t in &problem.lower {
        t.check()?;
    }
    problem.forcing.validate()?;
    if !problem.interval_end.is_finite() || problem.interval_end <= 0.0 {
        return Err(FdeError::InvalidProblem(format!(
            "interval end must be positive, got {}",
            problem.interval_end
        )));
    }
    let c0 = problem.leading.coefficient;
    if c0 == 0.0 {
        return Err(FdeError::InvalidProblem("leading coefficient must be nonzero".into()));
    }

    // normalized copy: leading coefficient 1
    let mut p = problem.clone();
    p.leading.coefficient = 1.0;
    if c0 != 1.0 {
        for t in &mut p.lower {
            t.coefficient /= c0;
        }
        p.forcing = p.forcing.scaled(1.0 / c0);
    }

    // stable sort of lower terms by m - γ, descending; remap initial keys
    let nl = p.lower.len();
    let mut order: Vec<usize> = (0..nl).collect();
    let key = |t: &FractionalTerm| t.envelope() as f64 - t.gamma_shift();
    order.sort_by(|&a, &b| key(&p.lower[b]).partial_cmp(&key(&p.lower[a])).unwrap());
    if order.iter().enumerate().any(|(pos, &old)| pos != old) {
        let sorted: Vec<FractionalTerm> = order.iter().map(|&i| p.lower[i]).collect();
        let mut new_index = vec![0usize; nl];
        for (pos, &old) in order.iter().enumerate() {
            new_index[old] = pos;
        }
        let remapped: BTreeMap<(usize, usize), f64> = p
            .initial_values
            .iter()
            .map(|(&(i, k), &v)| {
                let ni = if i == 0 || i > nl { i } else { new_index[i - 1] + 1 };
                ((ni, k), v)
            })
            .collect();
        p.lower = sorted;
        p.initial_values = remapped;
    }

    // leading order strictly dominant
    for t in &p.lower {
        if t.order >= p.leading.order {
            return Err(FdeError::InvalidProblem(format!(
                "leading order not dominant: {} vs lower-term order {}",
                p.leading.order, t.order
            )));
        }
    }

    let n = p.lower.len();
    let mut m = Vec::with_capacity(n + 1);
    let mut gamma = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = p.term(i);
        m.push(t.envelope());
        gamma.push(t.gamma_shift());
    }
    // snap near-equal shifts onto the leading one before classifying
    let g0 = gamma[0];
    for g in gamma.iter_mut().skip(1) {
        if (*g - g0).abs() <= config::GAMMA_SNAP {
            *g = g0;
        }
    }

    // the ordering must hold including the leading term
    for i in 0..n {
        let a = m[i] as f64 - gamma[i];
        let b = m[i + 1] as f64 - gamma[i + 1];
        if b > a + 1e-12 {
            return Err(FdeError::InvalidProblem(format!(
                "ordering violated: m-γ increases from {a} (term {i}) to {b} (term {})",
                i + 1
            )));
        }
    }

    let split = gamma.iter().skip(1).position(|&g| g != gamma[0]).map(|pos| pos + 1);
    let case = match split {
        None => CaseKind::AllGammaEqual,
        Some(l) => {
            let v = m[l] as f64 - gamma[l] - 1.0 + gamma[0];
            CaseKind::Split { l, m_bound: floor_snapped(v) }
        }
    };
    let range_top = match case {
        CaseKind::AllGammaEqual => n,
        CaseKind::Split { l, .. } => l - 1,
    };
    let lk_table = (0..m[0]).map(|k| compute_lk(k, &m, range_top)).collect();

    // initial-value keys must exist for their term
    for (&(i, k), &v) in &p.initial_values {
        if i > n || k >= m[i] {
            return Err(FdeError::InvalidProblem(format!(
                "invalid initial-value index ({i},{k}): term {i} admits k in 0..{}",
                if i <= n { m[i] } else { 0 }
            )));
        }
        if !v.is_finite() {
            return Err(FdeError::InvalidProblem(format!("initial value ({i},{k}) must be finite")));
        }
    }

    // resolve the shared-shift values y_{k-γ0}; terms sharing γ0 must agree
    let group: Vec<usize> = (0..=n)
        .filter(|&i| gamma[i] == gamma[0] && i < match case {
            CaseKind::AllGammaEqual => n + 1,
            CaseKind::Split { l, .. } => l,
        })
        .collect();
    let mut leading_values = vec![0.0; m[0]];
    for (k, slot) in leading_values.iter_mut().enumerate() {
        let mut found: Option<(usize, f64)> = None;
        for &i in &group {
            if k < m[i] {
                if let Some(&v) = p.initial_values.get(&(i, k)) {
                    match found {
                        None => found = Some((i, v)),
                        Some((i0, v0)) if v0 != v => {
                            return Err(FdeError::InvalidProblem(format!(
                                "conflicting initial values for shared shift (k = {k}): term {i0} gives {v0}, term {i} gives {v}"
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        *slot = found.map(|(_, v)| v).unwrap_or(0.0);
    }

    let indices = DerivedIndices { m, gamma, case, lk_table };
    Ok(Validated { problem: p, indices, leading_values })
}

/// Solvability verdict for the supplied initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solvable,
    Unsolvable,
}

/// One mandatory-zero slot and the value the user supplied for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MandatoryZero {
    pub term: usize,
    pub k: usize,
    pub supplied: f64,
}

/// Outcome of the existence check: which initial values must vanish and
/// whether the supplied data satisfy that.
#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport {
    pub verdict: Verdict,
    pub mandatory_zero: Vec<MandatoryZero>,
    pub case: CaseKind,
}

impl ExistenceReport {
    pub fn offending(&self) -> Vec<&MandatoryZero> {
        self.mandatory_zero.iter().filter(|z| z.supplied != 0.0).collect()
    }
}

/// Existence conditions for the validated problem.
///
/// With all shifts equal the problem is unconditionally solvable. After a
/// split at l, every initial value of terms i ≥ l must vanish, and so must
/// the shared-shift values with k ≤ m_bound. The zero test is exact: the
/// conditions are algebraic, and fuzzy acceptance would silently produce
/// non-solutions.
pub fn existence_report(v: &Validated) -> ExistenceReport {
    let idx = v.indices();
    match idx.case {
        CaseKind::AllGammaEqual => ExistenceReport {
            verdict: Verdict::Solvable,
            mandatory_zero: Vec::new(),
            case: idx.case,
        },
        CaseKind::Split { l, m_bound } => {
            let n = idx.m.len() - 1;
            let mut mandatory = Vec::new();
            for i in l..=n {
                for k in 0..idx.m[i] {
                    mandatory.push(MandatoryZero { term: i, k, supplied: v.initial_value(i, k) });
                }
            }
            if m_bound >= 0 {
                let kmax = m_bound as usize;
                for i in 0..l {
                    for k in 0..=kmax.min(idx.m[i].saturating_sub(1)) {
                        if idx.m[i] > 0 {
                            mandatory
                                .push(MandatoryZero { term: i, k, supplied: v.initial_value(i, k) });
                        }
                    }
                }
            }
            let verdict = if mandatory.iter().any(|z| z.supplied != 0.0) {
                Verdict::Unsolvable
            } else {
                Verdict::Solvable
            };
            ExistenceReport { verdict, mandatory_zero: mandatory, case: idx.case }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// D^{0.7,0} y - D^{0.5,0} y = 0 with I^{0.3}y(0) = c0, I^{0.5}y(0) = c1.
    pub fn intro_problem(c0: f64, c1: f64) -> FdeProblem {
        FdeProblem::new(
            FractionalTerm::new(0.7, 0.0, 1.0).unwrap(),
            vec![FractionalTerm::new(0.5, 0.0, 1.0).unwrap()],
            ForcingSpec::Zero,
            1.0,
        )
        .with_initial(0, 0, c0)
        .with_initial(1, 0, c1)
    }

    #[test]
    fn ceil_order_examples() {
        assert_eq!(ceil_order(0.5).unwrap(), 1);
        assert_eq!(ceil_order(1.0).unwrap(), 1);
        assert_eq!(ceil_order(0.0).unwrap(), 0);
        assert_eq!(ceil_order(1.3).unwrap(), 2);
        assert!(ceil_order(-0.1).is_err());
    }

    #[test]
    fn gamma_index_examples() {
        assert!((gamma_index(0.7, 0.0).unwrap() - 0.3).abs() < 1e-12);
        for &a in &[0.3, 0.9, 1.5, 2.0] {
            assert_eq!(gamma_index(a, 1.0).unwrap(), 0.0);
        }
        assert!((gamma_index(0.5, 0.5).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn validate_intro_problem() {
        let v = validate(&intro_problem(1.0, 0.5)).unwrap();
        let idx = v.indices();
        assert_eq!(idx.m, vec![1, 1]);
        assert!((idx.gamma[0] - 0.3).abs() < 1e-12);
        assert!((idx.gamma[1] - 0.5).abs() < 1e-12);
        assert_eq!(idx.case, CaseKind::Split { l: 1, m_bound: -1 });
        assert_eq!(idx.lk_table, vec![0]);
    }

    #[test]
    fn validate_caputo_is_all_equal() {
        let p = FdeProblem::new(
            FractionalTerm::new(0.6, 1.0, 1.0).unwrap(),
            vec![FractionalTerm::new(0.0, 1.0, -1.0).unwrap()],
            ForcingSpec::Zero,
            1.0,
        )
        .with_initial(0, 0, 1.0);
        let v = validate(&p).unwrap();
        assert_eq!(v.indices().case, CaseKind::AllGammaEqual);
        assert_eq!(v.indices().gamma, vec![0.0, 0.0]);
    }

    #[test]
    fn validate_single_term_trivially_all_equal() {
        let p = FdeProblem::new(
            FractionalTerm::new(0.5, 0.0, 1.0).unwrap(),
            vec![],
            ForcingSpec::constant(1.0),
            1.0,
        );
        let v = validate(&p).unwrap();
        assert_eq!(v.indices().case, CaseKind::AllGammaEqual);
    }

    #[test]
    fn validate_sorts_lower_terms_and_remaps_keys() {
        // terms supplied out of order: m-γ = 0.3 then 0.9
        let p = FdeProblem::new(
            FractionalTerm::new(0.95, 0.0, 1.0).unwrap(),
            vec![
                FractionalTerm::new(0.3, 0.0, 2.0).unwrap(),
                FractionalTerm::new(0.9, 0.0, 3.0).unwrap(),
            ],
            ForcingSpec::Zero,
            1.0,
        )
        .with_initial(2, 0, 7.0);
        let v = validate(&p).unwrap();
        assert!((v.problem().lower[0].order - 0.9).abs() < 1e-15);
        assert!((v.problem().lower[1].order - 0.3).abs() < 1e-15);
        assert_eq!(v.initial_value(1, 0), 7.0);
        assert_eq!(v.initial_value(2, 0), 0.0);
    }

    #[test]
    fn validate_is_idempotent() {
        let v1 = validate(&intro_problem(1.0, 0.0)).unwrap();
        let v2 = validate(v1.problem()).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn validate_normalizes_leading_coefficient() {
        let p = FdeProblem::new(
            FractionalTerm::new(1.0, 1.0, 2.0).unwrap(),
            vec![FractionalTerm::new(0.5, 1.0, 1.0).unwrap()],
            ForcingSpec::constant(4.0),
            1.0,
        );
        let v = validate(&p).unwrap();
        assert_eq!(v.problem().leading.coefficient, 1.0);
        assert_eq!(v.problem().lower[0].coefficient, 0.5);
        assert_eq!(v.problem().forcing, ForcingSpec::constant(2.0));
    }

    #[test]
    fn validate_rejects_non_dominant_leading() {
        let p = FdeProblem::new(
            FractionalTerm::new(0.5, 0.0, 1.0).unwrap(),
            vec![FractionalTerm::new(0.5, 0.0, 1.0).unwrap()],
            ForcingSpec::Zero,
            1.0,
        );
        assert!(matches!(validate(&p), Err(FdeError::InvalidProblem(_))));
    }

    #[test]
    fn validate_rejects_broken_ordering() {
        // leading m-γ = 1.1 but the Caputo lower term has m-γ = 2
        let p = FdeProblem::new(
            FractionalTerm::new(1.1, 0.0, 1.0).unwrap(),
            vec![FractionalTerm::new(1.05, 1.0, 1.0).unwrap()],
            ForcingSpec::Zero,
            1.0,
        );
        assert!(matches!(validate(&p), Err(FdeError::InvalidProblem(_))));
    }

    #[test]
    fn validate_rejects_out_of_range_initial_key() {
        let p = intro_problem(0.0, 0.0).with_initial(1, 1, 2.0);
        assert!(matches!(validate(&p), Err(FdeError::InvalidProblem(_))));
    }

    #[test]
    fn validate_rejects_conflicting_shared_values() {
        // both terms have γ = 0, so (0,0) and (1,0) label the same quantity
        let p = FdeProblem::new(
            FractionalTerm::new(1.0, 1.0, 1.0).unwrap(),
            vec![FractionalTerm::new(0.5, 1.0, 1.0).unwrap()],
            ForcingSpec::Zero,
            1.0,
        )
        .with_initial(0, 0, 1.0)
        .with_initial(1, 0, 2.0);
        assert!(matches!(validate(&p), Err(FdeError::InvalidProblem(_))));
    }

    #[test]
    fn compute_lk_examples() {
        assert_eq!(compute_lk(0, &[1, 1, 1], 2), 2);
        assert_eq!(compute_lk(0, &[1, 0], 1), 0);
        assert_eq!(compute_lk(2, &[3, 1], 1), 0);
        // exhaustive consistency with the defining inequalities
        let m = [3, 2, 2, 1, 0];
        for k in 0..3 {
            for top in 0..m.len() {
                let lk = compute_lk(k, &m, top);
                assert!(lk <= top);
                let all_le = m.iter().take(top + 1).all(|&mi| mi <= k);
                let all_ge = m.iter().take(top + 1).all(|&mi| mi >= k + 1);
                if all_le {
                    assert_eq!(lk, 0);
                } else if all_ge {
                    assert_eq!(lk, top);
                } else {
                    assert!(m[lk] >= k + 1);
                    if lk + 1 <= top {
                        assert!(m[lk + 1] <= k);
                    }
                }
            }
        }
    }

    #[test]
    fn existence_gate_intro_problem() {
        let v = validate(&intro_problem(2.5, 0.5)).unwrap();
        let rep = existence_report(&v);
        assert_eq!(rep.verdict, Verdict::Unsolvable);
        let off = rep.offending();
        assert_eq!(off.len(), 1);
        assert_eq!((off[0].term, off[0].k), (1, 0));

        let v = validate(&intro_problem(2.5, 0.0)).unwrap();
        let rep = existence_report(&v);
        assert_eq!(rep.verdict, Verdict::Solvable);
        // c0 unconstrained because m_bound = -1
        assert_eq!(rep.mandatory_zero.len(), 1);
    }

    #[test]
    fn existence_caputo_unconditional() {
        let p = FdeProblem::new(
            FractionalTerm::new(1.5, 1.0, 1.0).unwrap(),
            vec![FractionalTerm::new(0.5, 1.0, -2.0).unwrap()],
            ForcingSpec::Zero,
            1.0,
        )
        .with_initial(0, 0, 3.0)
        .with_initial(0, 1, -1.0);
        let v = validate(&p).unwrap();
        let rep = existence_report(&v);
        assert_eq!(rep.verdict, Verdict::Solvable);
        assert!(rep.mandatory_zero.is_empty());
    }

    #[test]
    fn forcing_taylor_heads() {
        let e = ForcingSpec::Exponential { scale: 2.0, rate: -1.0 };
        let t = e.taylor(3).unwrap();
        assert!((t[0] - 2.0).abs() < 1e-15);
        assert!((t[1] + 2.0).abs() < 1e-15);
        assert!((t[2] - 1.0).abs() < 1e-15);

        let s = ForcingSpec::Sinusoid { scale: 1.0, angular_freq: 2.0, phase: 0.0 };
        let t = s.taylor(3).unwrap();
        assert!(t[0].abs() < 1e-15);
        assert!((t[1] - 2.0).abs() < 1e-15);
        assert!(t[2].abs() < 1e-15);

        assert!(ForcingSpec::Power { scale: 1.0, exponent: 0.5 }.taylor(3).is_none());
    }
}
