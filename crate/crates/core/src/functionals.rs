//! Evaluators for both sides of every inequality.
//!
//! All probabilistic functionals reduce, on the quantile scale `u = F(x)`,
//! to exact atom terms plus segment-piece integrals of one of two shapes:
//!
//! - `((a + b u) / u)^p` for the Hardy functionals (the inner integral of a
//!   step function against the law is linear in `u` on a piece), and
//! - `(c + s ln(u1 / u))^p` for the Copson functional (the inner integrand
//!   `psi / F` integrates to a logarithm on a piece).
//!
//! Pieces are the segments split at the breakpoints of `psi`, so every inner
//! accumulation is exact; only the outer piece integrals need quadrature.
//! Division-by-zero conventions: `0/0 := 0` (measure-zero convention), and a
//! positive numerator over zero mass contributes `+inf`, which keeps the
//! lower-bound inequalities trivially true instead of erroring.

use crate::alpha::{solve_alpha_from_moments, AlphaError};
use crate::dist::{Component, Distribution, Monotonicity, PNorm, Regime, StepFunction};
use crate::quad::{self, QuadOptions, QuadResult};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("{op} requires a nonnegative psi on the support")]
    NegativePsi { op: &'static str },
    #[error("{op} is not defined for p = {p}")]
    RegimeMismatch { op: &'static str, p: f64 },
    #[error("psi is not monotone in the declared direction on the support")]
    NotMonotone,
    #[error("sequence must be nonempty")]
    EmptySequence,
    #[error("sequence term {value} is negative or non-finite")]
    BadTerm { value: f64 },
    #[error("psi must be a compactly supported step on (0, inf): positive breakpoints and zero beyond the last one")]
    NonCompactSupport,
    #[error("K = {k} is smaller than the nonzero prefix needs ({needed})")]
    KTooSmall { k: u64, needed: u64 },
    #[error("upper-bound side is infinite while the right side is finite; case is inconclusive")]
    Inconclusive,
    #[error("a truncated tail bound cannot certify the 0<p<1 sequence inequality")]
    TailUnsupported,
    #[error(transparent)]
    Alpha(#[from] AlphaError),
}

/// Evaluation options shared by all operations.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Absolute quadrature tolerance target; also sets the satisfaction
    /// tolerance `5 * quad_tol + 1e-12` (relative).
    pub quad_tol: f64,
    /// Explicit terms summed before the closed-form tail bracket in the
    /// sequence inequalities.
    pub discrete_terms: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            quad_tol: 1e-10,
            discrete_terms: 1_000_000,
        }
    }
}

impl EvalOptions {
    fn quad(&self) -> QuadOptions {
        // Refine well below the reporting tolerance so that stacked
        // root-taking and margin division stay inside 5 * quad_tol.
        QuadOptions {
            tol: self.quad_tol * 1e-2,
            max_depth: 64,
        }
    }
}

/// Which inequality a report refers to. `Display` yields the CLI names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    HardyGt1,
    HardyLt1,
    Copson,
    ClassicIntegralGt1,
    ClassicIntegralLt1,
    DiscreteGt1,
    DiscreteLt1,
    P1Bounds,
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Theorem::HardyGt1 => "hardy-gt1",
            Theorem::HardyLt1 => "hardy-lt1",
            Theorem::Copson => "copson",
            Theorem::ClassicIntegralGt1 => "classic-integral-gt1",
            Theorem::ClassicIntegralLt1 => "classic-integral-lt1",
            Theorem::DiscreteGt1 => "discrete-gt1",
            Theorem::DiscreteLt1 => "discrete-lt1",
            Theorem::P1Bounds => "p1-bounds",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    UpperBound,
    LowerBound,
}

/// Outcome of one inequality evaluation.
///
/// `lhs` and the right-hand sides are in the theorem's displayed form:
/// rooted (`{E[...]}^{1/p}`) for the probabilistic and classic integral
/// inequalities, un-rooted for the two sequence inequalities.
/// `lhs_unrooted` always carries the companion `E[(...)^p]` value.
/// For the bracketed sequence `p > 1` form, `lhs` is the bracket midpoint
/// and `quad_error` its half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub p: f64,
    pub direction: Direction,
    pub lhs: f64,
    pub lhs_unrooted: f64,
    pub rhs_sharpened: Option<f64>,
    pub rhs_classic: f64,
    pub alpha: Option<f64>,
    pub satisfied: bool,
    pub margin: f64,
    pub quad_error: f64,
}

impl VerificationReport {
    /// The bound actually compared against: sharpened when present.
    pub fn rhs_effective(&self) -> f64 {
        self.rhs_sharpened.unwrap_or(self.rhs_classic)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    theorem: Theorem,
    p: f64,
    direction: Direction,
    lhs: f64,
    lhs_unrooted: f64,
    rhs_sharpened: Option<f64>,
    rhs_classic: f64,
    alpha: Option<f64>,
    quad_error: f64,
    bracket_slack: f64,
    opts: &EvalOptions,
) -> VerificationReport {
    let rhs = rhs_sharpened.unwrap_or(rhs_classic);
    let tol = 5.0 * opts.quad_tol + 1e-12 * lhs.abs().max(rhs.abs()).min(f64::MAX);
    let (satisfied, margin) = if lhs.is_infinite() && rhs.is_infinite() {
        (true, 0.0)
    } else {
        match direction {
            Direction::UpperBound => (
                lhs + bracket_slack <= rhs + tol,
                (rhs - lhs) / rhs.max(1e-300),
            ),
            Direction::LowerBound => (
                lhs - bracket_slack >= rhs - tol,
                (lhs - rhs) / rhs.max(1e-300),
            ),
        }
    };
    VerificationReport {
        theorem,
        p,
        direction,
        lhs,
        lhs_unrooted,
        rhs_sharpened,
        rhs_classic,
        alpha,
        satisfied,
        margin,
        quad_error,
    }
}

// ---------------------------------------------------------------------------
// Event decomposition
// ---------------------------------------------------------------------------

/// An atom or a segment piece on which `psi` is constant, with its
/// coordinate range and quantile range.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ev {
    pub(crate) atom: bool,
    pub(crate) x0: f64,
    pub(crate) x1: f64,
    pub(crate) u0: f64,
    pub(crate) u1: f64,
    pub(crate) psi: f64,
}

impl Ev {
    pub(crate) fn mass(&self) -> f64 {
        self.u1 - self.u0
    }
}

/// Splits the law into events: atoms as-is, segments cut at the
/// breakpoints of `psi` so that `psi` is constant on every piece interior.
pub(crate) fn decompose(d: &Distribution, psi: &StepFunction) -> Vec<Ev> {
    let mut ev = Vec::new();
    let mut cum = 0.0;
    for c in d.components() {
        match c {
            Component::Atom(a) => {
                ev.push(Ev {
                    atom: true,
                    x0: a.x,
                    x1: a.x,
                    u0: cum,
                    u1: cum + a.mass,
                    psi: psi.eval(a.x),
                });
                cum += a.mass;
            }
            Component::Segment(s) => {
                let density = s.density();
                let mut x = s.lo;
                for &b in psi.breakpoints() {
                    if b > s.lo && b < s.hi && b > x {
                        let m = density * (b - x);
                        ev.push(Ev {
                            atom: false,
                            x0: x,
                            x1: b,
                            u0: cum,
                            u1: cum + m,
                            psi: psi.eval(x),
                        });
                        cum += m;
                        x = b;
                    }
                }
                let m = density * (s.hi - x);
                ev.push(Ev {
                    atom: false,
                    x0: x,
                    x1: s.hi,
                    u0: cum,
                    u1: cum + m,
                    psi: psi.eval(x),
                });
                cum += m;
            }
        }
    }
    ev
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    HardyGt1,
    HardyLt1,
    Copson,
}

/// Un-rooted functional `E[(...)^p]` over the event list. `psi` values are
/// expected nonnegative here (callers reduce to `|psi|` first).
pub(crate) fn unrooted_functional(ev: &[Ev], p: f64, kind: Kind, q: &QuadOptions) -> QuadResult {
    let n_pieces = ev.iter().filter(|e| !e.atom).count().max(1);
    let piece_q = QuadOptions {
        tol: q.tol / n_pieces as f64,
        max_depth: q.max_depth,
    };
    match kind {
        Kind::HardyGt1 => hardy_gt1_unrooted(ev, p, &piece_q),
        Kind::HardyLt1 => hardy_lt1_unrooted(ev, p, &piece_q),
        Kind::Copson => copson_unrooted(ev, p, &piece_q),
    }
}

fn hardy_gt1_unrooted(ev: &[Ev], p: f64, q: &QuadOptions) -> QuadResult {
    let mut out = QuadResult::ZERO;
    let mut below = 0.0; // int psi dF strictly below the current event
    for e in ev {
        let own = e.psi * e.mass();
        if e.atom {
            let ratio = ((below + own) / e.u1).max(0.0);
            out.value += ratio.powf(p) * e.mass();
        } else {
            // I(u) = below + psi (u - u0) on the piece.
            let a = below - e.psi * e.u0;
            out.add(quad::ratio_pow_integral(a, e.psi, e.u0, e.u1, p, q));
        }
        below += own;
    }
    out
}

fn hardy_lt1_unrooted(ev: &[Ev], p: f64, q: &QuadOptions) -> QuadResult {
    // Suffix sums keep "nothing above" an exact zero.
    let mut t_above = vec![0.0; ev.len() + 1];
    for (k, e) in ev.iter().enumerate().rev() {
        t_above[k] = t_above[k + 1] + e.psi * e.mass();
    }
    let mut out = QuadResult::ZERO;
    for (k, e) in ev.iter().enumerate() {
        let own = e.psi * e.mass();
        let from_event = t_above[k + 1] + own; // int_{[x0, inf)} psi dF
        if e.atom {
            if e.u0 == 0.0 {
                if from_event > 0.0 {
                    out.value = f64::INFINITY;
                }
                // 0/0 := 0 otherwise
            } else {
                let ratio = from_event / e.u0;
                out.value += ratio.powf(p) * e.mass();
            }
        } else {
            // T(u) = t_top + psi (u1 - u) on the piece.
            let t_top = t_above[k + 1];
            let a = t_top + e.psi * e.u1;
            out.add(quad::ratio_pow_integral(a, -e.psi, e.u0, e.u1, p, q));
        }
    }
    out
}

fn copson_unrooted(ev: &[Ev], p: f64, q: &QuadOptions) -> QuadResult {
    let n = ev.len();
    // r_above[k] = int psi/F dF over events strictly after k. The bottom
    // event is never "above" anything, so a diverging bottom piece is safe.
    let mut r_above = vec![0.0; n];
    for k in (0..n.saturating_sub(1)).rev() {
        let e = &ev[k + 1];
        let own_r = if e.atom {
            e.psi * e.mass() / e.u1
        } else {
            e.psi * (e.u1 / e.u0).ln()
        };
        r_above[k] = r_above[k + 1] + own_r;
    }
    let mut out = QuadResult::ZERO;
    for (k, e) in ev.iter().enumerate() {
        if e.atom {
            let r = r_above[k] + e.psi * e.mass() / e.u1;
            out.value += r.max(0.0).powf(p) * e.mass();
        } else if e.u0 == 0.0 {
            out.add(quad::log_pow_integral(r_above[k], e.psi, e.u1, p, q));
        } else {
            let (c, s, u1) = (r_above[k], e.psi, e.u1);
            let g = |u: f64| (c + s * (u1 / u).ln()).max(0.0).powf(p);
            out.add(quad::adaptive(&g, e.u0, e.u1, q.tol, q.max_depth));
        }
    }
    out
}

/// Normalizes `psi` by its sup over the support, evaluates, and scales the
/// homogeneous functional back, so quadrature always runs at unit scale.
pub(crate) fn eval_unrooted_scaled(
    d: &Distribution,
    psi_nonneg: &StepFunction,
    p: f64,
    kind: Kind,
    q: &QuadOptions,
) -> QuadResult {
    let mut ev = decompose(d, psi_nonneg);
    let scale = ev.iter().fold(0.0f64, |m, e| m.max(e.psi.abs()));
    if scale == 0.0 {
        return QuadResult::ZERO;
    }
    for e in &mut ev {
        e.psi /= scale;
    }
    let mut r = unrooted_functional(&ev, p, kind, q);
    let factor = scale.powf(p);
    r.value *= factor;
    r.abs_error *= factor;
    r
}

fn rooted(un: &QuadResult, p: f64) -> (f64, f64) {
    if !un.value.is_finite() || un.value <= 0.0 {
        return (un.value.max(0.0).powf(1.0 / p), un.abs_error);
    }
    let lhs = un.value.powf(1.0 / p);
    let deriv = lhs / (p * un.value);
    (lhs, un.abs_error * deriv)
}

// ---------------------------------------------------------------------------
// Probabilistic evaluators
// ---------------------------------------------------------------------------

/// Hardy inequality for `p > 1` with the sharpened constant
/// `p/(p-1+alpha)`. Signed `psi` is reduced to `|psi|` first, which
/// dominates the displayed left side.
pub fn eval_hardy_gt1(
    d: &Distribution,
    psi: &StepFunction,
    p: PNorm,
    opts: &EvalOptions,
) -> Result<VerificationReport, EvalError> {
    if p.regime() != Regime::Gt1 {
        return Err(EvalError::RegimeMismatch {
            op: "hardy-gt1",
            p: p.p(),
        });
    }
    let pa = psi.abs();
    let pf = p.p();
    let m1 = d.moment_abs_pow(&pa, 1.0);
    let mp = d.moment_abs_pow(&pa, pf).powf(1.0 / pf);
    let un = eval_unrooted_scaled(d, &pa, pf, Kind::HardyGt1, &opts.quad());
    let (lhs, lhs_err) = rooted(&un, pf);
    if m1 == 0.0 {
        return Ok(finish_report(
            Theorem::HardyGt1,
            pf,
            Direction::UpperBound,
            0.0,
            0.0,
            None,
            0.0,
            None,
            0.0,
            0.0,
            opts,
        ));
    }
    let alpha = solve_alpha_from_moments(m1, mp, pf)?;
    let rhs_sharpened = pf / (pf - 1.0 + alpha.alpha) * mp;
    let rhs_classic = pf / (pf - 1.0) * mp;
    Ok(finish_report(
        Theorem::HardyGt1,
        pf,
        Direction::UpperBound,
        lhs,
        un.value,
        Some(rhs_sharpened),
        rhs_classic,
        Some(alpha.alpha),
        lhs_err,
        0.0,
        opts,
    ))
}

/// Hardy inequality for `0 < p < 1` (a lower bound, with `F(X-)` in the
/// denominator). A zero left-limit CDF under positive tail mass
/// contributes `+inf` and the inequality holds trivially.
pub fn eval_hardy_lt1(
    d: &Distribution,
    psi: &StepFunction,
    p: PNorm,
    opts: &EvalOptions,
) -> Result<VerificationReport, EvalError> {
    if p.regime() != Regime::Lt1 {
        return Err(EvalError::RegimeMismatch {
            op: "hardy-lt1",
            p: p.p(),
        });
    }
    if !psi.is_nonnegative_on(d) {
        return Err(EvalError::NegativePsi { op: "hardy-lt1" });
    }
    let pf = p.p();
    let mp = d.moment_abs_pow(psi, pf).powf(1.0 / pf);
    let un = eval_unrooted_scaled(d, psi, pf, Kind::HardyLt1, &opts.quad());
    let (lhs, lhs_err) = rooted(&un, pf);
    let rhs_classic = pf / (1.0 - pf) * mp;
    Ok(finish_report(
        Theorem::HardyLt1,
        pf,
        Direction::LowerBound,
        lhs,
        un.value,
        None,
        rhs_classic,
        None,
        lhs_err,
        0.0,
        opts,
    ))
}

/// Copson inequality: upper bound `p {E|psi|^p}^{1/p}` for `p >= 1`,
/// lower bound for `0 < p < 1` (where `psi >= 0` is required).
pub fn eval_copson(
    d: &Distribution,
    psi: &StepFunction,
    p: PNorm,
    opts: &EvalOptions,
) -> Result<VerificationReport, EvalError> {
    let pf = p.p();
    let (pa, direction) = match p.regime() {
        Regime::Gt1 | Regime::Eq1 => (psi.abs(), Direction::UpperBound),
        Regime::Lt1 => {
            if !psi.is_nonnegative_on(d) {
                return Err(EvalError::NegativePsi { op: "copson" });
            }
            (psi.clone(), Direction::LowerBound)
        }
    };
    let mp = d.moment_abs_pow(&pa, pf).powf(1.0 / pf);
    let un = eval_unrooted_scaled(d, &pa, pf, Kind::Copson, &opts.quad());
    let (lhs, lhs_err) = rooted(&un, pf);
    let rhs_classic = pf * mp;
    if direction == Direction::UpperBound && lhs.is_infinite() && rhs_classic.is_finite() {
        return Err(EvalError::Inconclusive);
    }
    Ok(finish_report(
        Theorem::Copson,
        pf,
        direction,
        lhs,
        un.value,
        None,
        rhs_classic,
        None,
        lhs_err,
        0.0,
        opts,
    ))
}

// ---------------------------------------------------------------------------
// Classic integral and sequence evaluators
// ---------------------------------------------------------------------------

/// Classic integral Hardy inequality on `(0, inf)` for a compactly
/// supported nonnegative step `psi`: the inner average runs from 0 when
/// `p > 1` and over the tail when `0 < p < 1`. The improper outer integral
/// beyond the last breakpoint is finished in closed form, where the
/// integrand is exactly `c x^{-p}`.
pub fn eval_classic_integral(
    psi: &StepFunction,
    p: PNorm,
    opts: &EvalOptions,
) -> Result<VerificationReport, EvalError> {
    let pf = p.p();
    if p.regime() == Regime::Eq1 {
        return Err(EvalError::RegimeMismatch {
            op: "classic-integral",
            p: pf,
        });
    }
    if psi.values().iter().any(|&v| v < 0.0) {
        return Err(EvalError::NegativePsi {
            op: "classic-integral",
        });
    }
    if *psi.values().last().unwrap() != 0.0 || psi.breakpoints().iter().any(|&b| b <= 0.0) {
        return Err(EvalError::NonCompactSupport);
    }
    let scale = psi.values().iter().fold(0.0f64, |m, &v| m.max(v));
    let theorem = match p.regime() {
        Regime::Gt1 => Theorem::ClassicIntegralGt1,
        _ => Theorem::ClassicIntegralLt1,
    };
    if scale == 0.0 {
        return Ok(finish_report(
            theorem,
            pf,
            direction_for(p.regime()),
            0.0,
            0.0,
            None,
            0.0,
            None,
            0.0,
            0.0,
            opts,
        ));
    }
    // Grid 0 = t_0 < b_1 < ... < b_m with psi == v_i on [t_i, t_{i+1}).
    let mut grid = vec![0.0];
    grid.extend_from_slice(psi.breakpoints());
    let values: Vec<f64> = psi.values().iter().map(|v| v / scale).collect();
    let m_last = *grid.last().unwrap();
    let total: f64 = grid
        .windows(2)
        .enumerate()
        .map(|(i, w)| values[i] * (w[1] - w[0]))
        .sum();
    let psi_p: f64 = grid
        .windows(2)
        .enumerate()
        .map(|(i, w)| values[i].powf(pf) * (w[1] - w[0]))
        .sum();

    let q = opts.quad();
    let piece_q = QuadOptions {
        tol: q.tol / grid.len() as f64,
        ..q
    };
    let mut un = QuadResult::ZERO;
    let mut prefix = 0.0;
    for (i, w) in grid.windows(2).enumerate() {
        let v = values[i];
        let (a, b) = match p.regime() {
            // P(x) = prefix + v (x - t_i)
            Regime::Gt1 => (prefix - v * w[0], v),
            // Q(x) = (total - prefix) - v (x - t_i)
            _ => (total - prefix + v * w[0], -v),
        };
        un.add(quad::ratio_pow_integral(a, b, w[0], w[1], pf, &piece_q));
        prefix += v * (w[1] - w[0]);
    }
    if p.regime() == Regime::Gt1 && total > 0.0 {
        // Tail: integrand is (total / x)^p beyond the last breakpoint.
        un.value += total.powf(pf) * m_last.powf(1.0 - pf) / (pf - 1.0);
    }
    let factor = scale.powf(pf);
    un.value *= factor;
    un.abs_error *= factor;
    let (lhs, lhs_err) = rooted(&un, pf);
    let coef = match p.regime() {
        Regime::Gt1 => pf / (pf - 1.0),
        _ => pf / (1.0 - pf),
    };
    let rhs_classic = coef * (psi_p * factor).powf(1.0 / pf);
    Ok(finish_report(
        theorem,
        pf,
        direction_for(p.regime()),
        lhs,
        un.value,
        None,
        rhs_classic,
        None,
        lhs_err,
        0.0,
        opts,
    ))
}

fn direction_for(r: Regime) -> Direction {
    match r {
        Regime::Gt1 | Regime::Eq1 => Direction::UpperBound,
        Regime::Lt1 => Direction::LowerBound,
    }
}

/// Declared tail behaviour of a [`SequenceInput`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSpec {
    /// All terms beyond the listed ones are zero.
    Zeros,
    /// The listed terms are a truncation; `ell1_bound` bounds the sum of
    /// the dropped terms from above.
    Truncated { ell1_bound: f64 },
}

impl Default for TailSpec {
    fn default() -> Self {
        TailSpec::Zeros
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceRaw {
    terms: Vec<f64>,
    #[serde(default)]
    tail: TailSpec,
}

impl TryFrom<SequenceRaw> for SequenceInput {
    type Error = EvalError;

    fn try_from(raw: SequenceRaw) -> Result<Self, EvalError> {
        SequenceInput::new(raw.terms, raw.tail)
    }
}

/// A finite nonnegative sequence with declared tail behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceRaw")]
pub struct SequenceInput {
    terms: Vec<f64>,
    tail: TailSpec,
}

impl SequenceInput {
    pub fn new(terms: Vec<f64>, tail: TailSpec) -> Result<Self, EvalError> {
        if terms.is_empty() {
            return Err(EvalError::EmptySequence);
        }
        if let Some(&value) = terms.iter().find(|&&t| !(t.is_finite() && t >= 0.0)) {
            return Err(EvalError::BadTerm { value });
        }
        if let TailSpec::Truncated { ell1_bound } = tail {
            if !(ell1_bound.is_finite() && ell1_bound >= 0.0) {
                return Err(EvalError::BadTerm { value: ell1_bound });
            }
        }
        Ok(SequenceInput { terms, tail })
    }

    pub fn from_json_str(json: &str) -> Result<Self, String> {
        serde_json::from_str(json).map_err(|e| e.to_string())
    }

    pub fn terms(&self) -> &[f64] {
        &self.terms
    }

    pub fn tail(&self) -> TailSpec {
        self.tail
    }
}

/// Sequence Hardy inequalities. For `p > 1` the left side
/// `sum_n (S_n / n)^p` is summed explicitly up to `opts.discrete_terms`
/// and the remainder is bracketed by integral bounds; `lhs` is the bracket
/// midpoint and `quad_error` the half-width, and satisfaction uses the
/// conservative bracket side. For `0 < p < 1` the displayed left side is a
/// finite exact sum.
pub fn eval_discrete(
    seq: &SequenceInput,
    p: PNorm,
    opts: &EvalOptions,
) -> Result<VerificationReport, EvalError> {
    let pf = p.p();
    match p.regime() {
        Regime::Eq1 => Err(EvalError::RegimeMismatch {
            op: "discrete",
            p: pf,
        }),
        Regime::Gt1 => {
            let c = seq.terms();
            let s_len: f64 = c.iter().sum();
            let s_hi = match seq.tail() {
                TailSpec::Zeros => s_len,
                TailSpec::Truncated { ell1_bound } => s_len + ell1_bound,
            };
            let n_explicit = opts.discrete_terms.max(c.len()).max(1);
            let mut lo_sum = 0.0;
            let mut hi_sum = 0.0;
            let mut prefix = 0.0;
            for n in 1..=n_explicit {
                if n <= c.len() {
                    prefix += c[n - 1];
                    let t = (prefix / n as f64).powf(pf);
                    lo_sum += t;
                    hi_sum += t;
                } else {
                    let nf = n as f64;
                    let t_lo = (s_len / nf).powf(pf);
                    lo_sum += t_lo;
                    hi_sum += if s_hi == s_len {
                        t_lo
                    } else {
                        (s_hi / nf).powf(pf)
                    };
                }
            }
            let nf = n_explicit as f64;
            let lo_tail = s_len.powf(pf) * (nf + 1.0).powf(1.0 - pf) / (pf - 1.0);
            let hi_tail = s_hi.powf(pf) * nf.powf(1.0 - pf) / (pf - 1.0);
            let lo = lo_sum + lo_tail;
            let hi = hi_sum + hi_tail;
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let rhs = (pf / (pf - 1.0)).powf(pf) * c.iter().map(|&x| x.powf(pf)).sum::<f64>();
            Ok(finish_report(
                Theorem::DiscreteGt1,
                pf,
                Direction::UpperBound,
                mid,
                mid,
                None,
                rhs,
                None,
                half,
                half,
                opts,
            ))
        }
        Regime::Lt1 => {
            if matches!(seq.tail(), TailSpec::Truncated { .. }) {
                return Err(EvalError::TailUnsupported);
            }
            let a = seq.terms();
            let total: f64 = a.iter().sum();
            let mut lhs = (1.0 + 1.0 / (1.0 - pf)) * total.powf(pf);
            let mut suffix: f64 = total - a[0];
            for j in 2..=a.len() {
                lhs += (suffix / j as f64).powf(pf);
                suffix -= a[j - 1];
            }
            let rhs = (pf / (1.0 - pf)).powf(pf) * a.iter().map(|&x| x.powf(pf)).sum::<f64>();
            Ok(finish_report(
                Theorem::DiscreteLt1,
                pf,
                Direction::LowerBound,
                lhs,
                lhs,
                None,
                rhs,
                None,
                0.0,
                0.0,
                opts,
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// p = 1 bounds
// ---------------------------------------------------------------------------

/// The `p = 1` comparison: for nonnegative monotone `psi`,
/// `E[I(X)/F(X)]` is bounded by `E[psi(X)]` from above (nondecreasing) or
/// below (nonincreasing). Monotonicity is checked exactly on the support.
pub fn eval_p1_bounds(
    d: &Distribution,
    psi: &StepFunction,
    direction: Monotonicity,
    opts: &EvalOptions,
) -> Result<VerificationReport, EvalError> {
    if !psi.is_nonnegative_on(d) {
        return Err(EvalError::NegativePsi { op: "p1-bounds" });
    }
    let actual = psi.monotonicity_on(d).ok_or(EvalError::NotMonotone)?;
    let ok = matches!(
        (direction, actual),
        (Monotonicity::Nondecreasing, Monotonicity::Nondecreasing)
            | (Monotonicity::Nonincreasing, Monotonicity::Nonincreasing)
            | (_, Monotonicity::Constant)
    );
    if !ok {
        return Err(EvalError::NotMonotone);
    }
    let un = eval_unrooted_scaled(d, psi, 1.0, Kind::HardyGt1, &opts.quad());
    let rhs = d.moment_abs_pow(psi, 1.0);
    let dir = match direction {
        Monotonicity::Nonincreasing => Direction::LowerBound,
        _ => Direction::UpperBound,
    };
    Ok(finish_report(
        Theorem::P1Bounds,
        1.0,
        dir,
        un.value,
        un.value,
        None,
        rhs,
        None,
        un.abs_error,
        0.0,
        opts,
    ))
}

/// The dual `p = 1` pair for the tail functional:
/// `(E[T(X)/F(X-)], E[psi(X)(1 - F(X))/F(X-)])`. Either may be `+inf`.
pub fn p1_tail_values(
    d: &Distribution,
    psi: &StepFunction,
    opts: &EvalOptions,
) -> Result<(f64, f64), EvalError> {
    if !psi.is_nonnegative_on(d) {
        return Err(EvalError::NegativePsi { op: "p1-bounds" });
    }
    let tail = eval_unrooted_scaled(d, psi, 1.0, Kind::HardyLt1, &opts.quad());
    // E[psi(X)(1 - F(X))/F(X-)]: psi(x)(1 - u)/u on pieces in quantile scale.
    let ev = decompose(d, psi);
    let q = opts.quad();
    let piece_q = QuadOptions {
        tol: q.tol / ev.len().max(1) as f64,
        ..q
    };
    let mut dual = QuadResult::ZERO;
    for e in &ev {
        if e.atom {
            let num = e.psi * (1.0 - e.u1);
            if e.u0 == 0.0 {
                if num > 0.0 {
                    dual.value = f64::INFINITY;
                }
            } else {
                dual.value += num / e.u0 * e.mass();
            }
        } else {
            dual.add(quad::ratio_pow_integral(
                e.psi, -e.psi, e.u0, e.u1, 1.0, &piece_q,
            ));
        }
    }
    Ok((tail.value, dual.value))
}

// ---------------------------------------------------------------------------
// Quantile-domain identity
// ---------------------------------------------------------------------------

/// Evaluates the un-rooted Hardy `p > 1` left side on the quantile scale,
///
/// `int_0^1 [ int_0^{F(F^{-1}(u))} psi(F^{-1}(v)) dv / F(F^{-1}(u)) ]^p du`,
///
/// by pointwise quantile and CDF calls. Must agree with the coordinate-scale
/// value within `2 * quad_tol`; this checks the change of variables the
/// rooted evaluators rely on.
pub fn quantile_domain_lhs(
    d: &Distribution,
    psi: &StepFunction,
    p: PNorm,
    opts: &EvalOptions,
) -> Result<QuadResult, EvalError> {
    if p.regime() != Regime::Gt1 {
        return Err(EvalError::RegimeMismatch {
            op: "quantile-domain",
            p: p.p(),
        });
    }
    let pa = psi.abs();
    let mut ev = decompose(d, &pa);
    let scale = ev.iter().fold(0.0f64, |m, e| m.max(e.psi));
    if scale == 0.0 {
        return Ok(QuadResult::ZERO);
    }
    for e in &mut ev {
        e.psi /= scale;
    }
    let pf = p.p();
    // Prefix of the v-scale step function psi(F^{-1}(v)).
    let mut j_prefix = vec![0.0];
    for e in &ev {
        j_prefix.push(j_prefix.last().unwrap() + e.psi * e.mass());
    }
    let j_at = |w: f64| -> f64 {
        let idx = ev.partition_point(|e| e.u1 <= w);
        if idx >= ev.len() {
            return j_prefix[ev.len()];
        }
        j_prefix[idx] + ev[idx].psi * (w - ev[idx].u0).max(0.0)
    };
    let scaled = d.clone();
    let integrand = |u: f64| -> f64 {
        let x = scaled.quantile(u).expect("u inside (0,1)");
        let h = scaled.cdf(x);
        (j_at(h) / h).powf(pf)
    };
    let q = opts.quad();
    let piece_tol = q.tol / ev.len().max(1) as f64;
    let mut out = QuadResult::ZERO;
    for e in &ev {
        if e.atom {
            let mid = 0.5 * (e.u0 + e.u1);
            out.value += integrand(mid) * e.mass();
        } else {
            out.add(quad::adaptive(
                &integrand,
                e.u0,
                e.u1,
                piece_tol,
                q.max_depth,
            ));
        }
    }
    let factor = scale.powf(pf);
    out.value *= factor;
    out.abs_error *= factor;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Limit study
// ---------------------------------------------------------------------------

/// One row of the limit study at grid size `K`: the K-scaled probabilistic
/// sides, the sharpened root when `p > 1`, and the distance of the scaled
/// left side from the classic sequence value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub k: u64,
    pub scaled_lhs: f64,
    pub scaled_rhs: f64,
    pub alpha: Option<f64>,
    pub gap_to_classic: f64,
}

/// Embeds the sequence into a grid law of size `K` and evaluates the
/// K-scaled probabilistic inequality: uniform on `{1, ..., K}` for
/// `p > 1`, and the ramp-plus-atoms law (mass `1/K` on `(0,1)`, atoms of
/// mass `1/K` at `2, ..., K` carrying `a_{j-1}`) for `0 < p < 1`.
pub fn limit_study(
    seq: &SequenceInput,
    p: PNorm,
    ks: &[u64],
    opts: &EvalOptions,
) -> Result<Vec<LimitRow>, EvalError> {
    use crate::dist::{Atom, Segment};
    let pf = p.p();
    if p.regime() == Regime::Eq1 {
        return Err(EvalError::RegimeMismatch {
            op: "limit-study",
            p: pf,
        });
    }
    let terms = seq.terms();
    let len = terms.len() as u64;
    let classic = eval_discrete(seq, p, opts)?.lhs;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let needed = match p.regime() {
            Regime::Gt1 => len,
            _ => len + 1,
        };
        if k < needed {
            return Err(EvalError::KTooSmall { k, needed });
        }
        let kf = k as f64;
        let row = match p.regime() {
            Regime::Gt1 => {
                let atoms: Vec<Atom> = (1..=k)
                    .map(|i| Atom {
                        x: i as f64,
                        mass: 1.0 / kf,
                    })
                    .collect();
                let d = Distribution::new(atoms, vec![]).expect("grid law is valid");
                let mut bps = vec![1.0];
                let mut vals = vec![0.0];
                for (i, &c) in terms.iter().enumerate() {
                    bps.push((i + 2) as f64);
                    vals.push(c);
                }
                vals.push(0.0);
                let psi = StepFunction::new(bps, vals).expect("grid step is valid");
                let un = eval_unrooted_scaled(&d, &psi.abs(), pf, Kind::HardyGt1, &opts.quad());
                let scaled_lhs = kf * un.value;
                let m1 = d.moment_abs_pow(&psi, 1.0);
                let mp_p = d.moment_abs_pow(&psi, pf);
                let alpha = solve_alpha_from_moments(m1, mp_p.powf(1.0 / pf), pf)?;
                let scaled_rhs = (pf / (pf - 1.0 + alpha.alpha)).powf(pf) * kf * mp_p;
                LimitRow {
                    k,
                    scaled_lhs,
                    scaled_rhs,
                    alpha: Some(alpha.alpha),
                    gap_to_classic: (classic - scaled_lhs).abs(),
                }
            }
            _ => {
                let atoms: Vec<Atom> = (2..=k)
                    .map(|j| Atom {
                        x: j as f64,
                        mass: 1.0 / kf,
                    })
                    .collect();
                let segments = vec![Segment {
                    lo: 0.0,
                    hi: 1.0,
                    mass: 1.0 / kf,
                }];
                let d = Distribution::new(atoms, segments).expect("grid law is valid");
                let mut bps = vec![2.0];
                let mut vals = vec![0.0];
                for (i, &a) in terms.iter().enumerate() {
                    bps.push((i + 3) as f64);
                    vals.push(a);
                }
                vals.push(0.0);
                let psi = StepFunction::new(bps, vals).expect("grid step is valid");
                let un = eval_unrooted_scaled(&d, &psi, pf, Kind::HardyLt1, &opts.quad());
                let scaled_lhs = kf * un.value;
                let mp_p = d.moment_abs_pow(&psi, pf);
                let scaled_rhs = (pf / (1.0 - pf)).powf(pf) * kf * mp_p;
                LimitRow {
                    k,
                    scaled_lhs,
                    scaled_rhs,
                    alpha: None,
                    gap_to_classic: (classic - scaled_lhs).abs(),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Pointwise evaluation (shared with the Monte Carlo oracle)
// ---------------------------------------------------------------------------

/// Exact pointwise inner values of the three functionals at arbitrary `x`,
/// built once per `(d, psi)` pair.
pub(crate) struct Pointwise {
    ev: Vec<Ev>,
    below: Vec<f64>,
    t_above: Vec<f64>,
    r_above: Vec<f64>,
    total: f64,
}

impl Pointwise {
    pub(crate) fn new(d: &Distribution, psi_nonneg: &StepFunction) -> Self {
        let ev = decompose(d, psi_nonneg);
        let n = ev.len();
        let mut below = vec![0.0; n + 1];
        for (i, e) in ev.iter().enumerate() {
            below[i + 1] = below[i] + e.psi * e.mass();
        }
        let mut r_above = vec![0.0; n];
        for k in (0..n.saturating_sub(1)).rev() {
            let e = &ev[k + 1];
            let own_r = if e.atom {
                e.psi * e.mass() / e.u1
            } else {
                e.psi * (e.u1 / e.u0).ln()
            };
            r_above[k] = r_above[k + 1] + own_r;
        }
        let mut t_above = vec![0.0; n + 1];
        for (k, e) in ev.iter().enumerate().rev() {
            t_above[k] = t_above[k + 1] + e.psi * e.mass();
        }
        let total = below[n];
        Pointwise {
            ev,
            below,
            t_above,
            r_above,
            total,
        }
    }

    /// Index of the last event starting at or before `x`, if any. When an
    /// atom sits exactly at a segment's lower endpoint, the atom wins.
    fn locate(&self, x: f64) -> Option<usize> {
        let idx = self.ev.partition_point(|e| e.x0 <= x).checked_sub(1)?;
        if !self.ev[idx].atom
            && self.ev[idx].x0 == x
            && idx > 0
            && self.ev[idx - 1].atom
            && self.ev[idx - 1].x0 == x
        {
            return Some(idx - 1);
        }
        Some(idx)
    }

    /// `(F(x), F(x-), I(x))` with `I(x) = int_{(-inf, x]} psi dF`.
    fn cdf_and_prefix(&self, x: f64) -> (f64, f64, f64) {
        let Some(idx) = self.locate(x) else {
            return (0.0, 0.0, 0.0);
        };
        let e = &self.ev[idx];
        if e.atom {
            if x == e.x0 {
                (e.u1, e.u0, self.below[idx] + e.psi * e.mass())
            } else {
                (e.u1, e.u1, self.below[idx + 1])
            }
        } else if x < e.x1 {
            let u = e.u0 + (e.u1 - e.u0) * (x - e.x0) / (e.x1 - e.x0);
            (u, u, self.below[idx] + e.psi * (u - e.u0))
        } else {
            (e.u1, e.u1, self.below[idx + 1])
        }
    }

    /// `I(x) / F(x)` with `0/0 := 0`.
    pub(crate) fn value_gt1(&self, x: f64) -> f64 {
        let (f, _, i) = self.cdf_and_prefix(x);
        if f == 0.0 {
            0.0
        } else {
            (i / f).max(0.0)
        }
    }

    /// `T(x) / F(x-)` with the division conventions of the `p < 1` theorem.
    pub(crate) fn value_lt1(&self, x: f64) -> f64 {
        let Some(idx) = self.locate(x) else {
            return if self.total > 0.0 { f64::INFINITY } else { 0.0 };
        };
        let e = &self.ev[idx];
        let (f_left, t) = if e.atom {
            if x == e.x0 {
                (e.u0, self.t_above[idx])
            } else {
                (e.u1, self.t_above[idx + 1])
            }
        } else if x < e.x1 {
            let u = e.u0 + (e.u1 - e.u0) * (x - e.x0) / (e.x1 - e.x0);
            (u, self.t_above[idx + 1] + e.psi * (e.u1 - u))
        } else {
            (e.u1, self.t_above[idx + 1])
        };
        let t = t.max(0.0);
        if f_left == 0.0 {
            if t > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            t / f_left
        }
    }

    /// `R(x) = int_{[x, inf)} psi / F dF`.
    pub(crate) fn value_copson(&self, x: f64) -> f64 {
        let Some(idx) = self.locate(x) else {
            let e = &self.ev[0];
            let own = if e.atom {
                e.psi * e.mass() / e.u1
            } else if e.psi > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            return self.r_above[0] + own;
        };
        let e = &self.ev[idx];
        if e.atom {
            if x == e.x0 {
                self.r_above[idx] + e.psi * e.mass() / e.u1
            } else {
                self.r_above[idx]
            }
        } else if x < e.x1 {
            let u = e.u0 + (e.u1 - e.u0) * (x - e.x0) / (e.x1 - e.x0);
            self.r_above[idx] + e.psi * (e.u1 / u).ln()
        } else {
            self.r_above[idx]
        }
    }
}
