//! Multi-term linear fractional differential equations with Hilfer
//! (generalized Riemann-Liouville) derivatives of order α and type β:
//!
//! ```text
//! D^{α0,β0} y(x) - Σ_{i=1..n} a_i D^{αi,βi} y(x) = g(x),   x in (0, X],
//! (d/dx)^k I^{(1-βi)(mi-αi)} y(0+) = y_{k-γi},              k = 0..mi-1,
//! ```
//!
//! The crate constructs the closed-form solution as a combination of power
//! terms, multivariate Mittag-Leffler terms and a singular-kernel
//! convolution with the forcing, decides solvability of the initial data,
//! and cross-checks everything against an independent time-stepping solver
//! for the equivalent weakly singular Volterra equation.
//!
//! Start with the runnable examples (`cargo run --example existence_gate`,
//! `… --example caputo_relaxation`, `… --example composite_relaxation`,
//! `… --example closed_form_vs_oracle`, `… --example mittag_leffler`,
//! `… --example fractional_quadrature`) or the `fde` command-line tool.

pub mod config;
pub mod error;
pub mod fracops;
pub mod io;
pub mod ladder;
pub mod oracle;
pub mod problem;
pub mod solver;
pub mod specfun;

pub use error::{FdeError, Result};
pub use fracops::{GridSpec, SampledFunction};
pub use problem::{
    CaseKind, DerivedIndices, ExistenceReport, FdeProblem, ForcingSpec, FractionalTerm,
    Validated, Verdict,
};
pub use solver::{ClosedFormSolution, GridSolution};
pub use specfun::{ml_eval, MlSpec, MlValue};
