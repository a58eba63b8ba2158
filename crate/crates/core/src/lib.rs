//! Numerical toolkit for probability-theoretic Hardy and Copson inequalities.
//!
//! The crate evaluates both sides of the probabilistic Hardy inequality
//! (`p > 1` with a sharpened constant `p/(p-1+alpha)`, and `0 < p < 1`),
//! the probabilistic Copson inequality, and their classic integral and
//! sequence forms, for mixed laws made of finitely many atoms and
//! uniform-density segments together with piecewise-constant integrands.
//!
//! Main pieces:
//! - [`dist`]: mixed [`Distribution`]s (CDF, left-limit CDF, quantile,
//!   sampling, integration) and [`StepFunction`]s.
//! - [`quad`]: adaptive Gauss-Legendre quadrature with dedicated handling
//!   of the power and logarithmic endpoint singularities that the
//!   inequality functionals produce.
//! - [`alpha`]: the root solver for the sharpened-constant equation and
//!   its `p = 2` closed form.
//! - [`transforms`]: decreasing rearrangement and the two atom-stretching
//!   constructions (with full de-atomization).
//! - [`functionals`]: the inequality evaluators and the limit study.
//! - [`oracle`]: exact finite-support enumeration, seeded Monte Carlo and
//!   the power-integral identity checks.
//! - [`suite`]: randomized case generation and the property suite used by
//!   the CLI and the acceptance tests.

pub mod alpha;
pub mod dist;
pub mod functionals;
pub mod oracle;
pub mod quad;
pub mod suite;
pub mod transforms;

pub use alpha::{alpha_closed_p2, solve_alpha, AlphaError, AlphaResult};
pub use dist::{Atom, DistError, Distribution, Monotonicity, PNorm, Regime, Segment, StepFunction};
pub use functionals::{
    eval_classic_integral, eval_copson, eval_discrete, eval_hardy_gt1, eval_hardy_lt1,
    eval_p1_bounds, limit_study, quantile_domain_lhs, Direction, EvalError, EvalOptions, LimitRow,
    SequenceInput, TailSpec, Theorem, VerificationReport,
};
pub use oracle::{
    exact_discrete_eval, mc_estimate, power_integral_identity, Functional, IdentityMode,
    IdentityReport, McEstimate, OracleError,
};
pub use quad::{QuadOptions, QuadResult};
pub use transforms::{
    de_atomize, decreasing_rearrangement, stretch_down, stretch_up, StretchKind, TransformError,
    TransformOutput,
};
