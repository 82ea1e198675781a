//! Centralized defaults and thresholds. No ad-hoc magic numbers elsewhere.

/// Default number of grid intervals. Overridable through `FDE_DEFAULT_GRID`.
pub const DEFAULT_GRID: usize = 1024;

/// Default right end of the solution interval.
pub const DEFAULT_END: f64 = 1.0;

/// Default series tolerance for Mittag-Leffler evaluation.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default residual margin is `MARGIN_STEPS * h`: the endpoint singularity
/// x^{-gamma} contaminates a fixed number of boundary points.
pub const MARGIN_STEPS: usize = 10;

/// Hard cap on series layers before giving up on certification.
pub const ML_MAX_LAYERS: usize = 200_000;

/// Series evaluation degrades beyond desk scale; refuse instead of silently
/// losing accuracy.
pub const ML_MAX_ARG: f64 = 1e4;

/// Maximum number of lower-order terms the series evaluator accepts.
pub const ML_MAX_VARS: usize = 6;

/// Two gamma shifts closer than this are treated as equal when classifying
/// the equation. Keeps float noise in user-supplied orders from splitting
/// the all-equal case spuriously.
pub const GAMMA_SNAP: f64 = 1e-12;

/// `check` passes when the equation residual of the closed form stays below
/// this bound on the trusted part of the grid.
pub const CHECK_MAX_RESIDUAL: f64 = 1e-2;

/// `check` passes when closed form and time-stepped reference agree to this
/// relative error (initial boundary window skipped).
pub const CHECK_MAX_ORACLE_REL: f64 = 1e-3;

/// Points skipped at the origin when comparing against the time-stepped
/// reference (origin singularities make the first few panels unreliable).
pub const COMPARE_SKIP: usize = 10;

/// Grid intervals per derivative order required before finite differences
/// are considered meaningful.
pub const MIN_POINTS_PER_ORDER: usize = 64;

/// Resolve the default grid size, honoring the optional environment override.
pub fn default_grid() -> usize {
    std::env::var("FDE_DEFAULT_GRID")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 16)
        .unwrap_or(DEFAULT_GRID)
}
