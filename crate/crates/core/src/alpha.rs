//! Root solver for the sharpened Hardy constant.
//!
//! For `p > 1` the sharpened constant is `p / (p - 1 + alpha)` where
//! `alpha` is the unique root in `[0, 1]` of
//!
//! ```text
//! g(a) = m1 (p - 1 + a) - p mp a^{1/p},    m1 = E|psi(Y)|,  mp = {E|psi(Y)|^p}^{1/p}.
//! ```
//!
//! `g` is convex on `[0, infinity)` with `g(0) = m1 (p-1) >= 0` and
//! `g(1) = p (m1 - mp) <= 0` by the power-mean inequality, so a bracketed
//! root always exists. `g'` blows up like `a^{1/p - 1}` at `0`, so the
//! solver bisects and only accepts Newton steps that stay inside the
//! current bracket.

use crate::dist::{Distribution, PNorm, Regime, StepFunction};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlphaError {
    #[error("psi is identically zero on the support")]
    PsiZero,
    #[error("E|psi|^p is not finite")]
    MomentInfinite,
    #[error("alpha is defined for p > 1, got p = {p}")]
    NotGt1 { p: f64 },
}

/// Root of the sharpened-constant equation together with its residual and
/// the moments that define it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaResult {
    pub alpha: f64,
    pub residual: f64,
    /// `E|psi(Y)|`.
    pub m1: f64,
    /// `{E|psi(Y)|^p}^{1/p}`.
    pub mp: f64,
    pub iterations: u32,
}

fn g(a: f64, m1: f64, mp: f64, p: f64) -> f64 {
    m1 * (p - 1.0 + a) - p * mp * a.powf(1.0 / p)
}

fn g_prime(a: f64, m1: f64, mp: f64, p: f64) -> f64 {
    m1 - mp * a.powf(1.0 / p - 1.0)
}

/// Solves the root equation from the moments alone.
pub fn solve_alpha_from_moments(m1: f64, mp: f64, p: f64) -> Result<AlphaResult, AlphaError> {
    if !(m1.is_finite() && mp.is_finite()) {
        return Err(AlphaError::MomentInfinite);
    }
    if m1 <= 0.0 {
        return Err(AlphaError::PsiZero);
    }
    // Constant psi (a.s.): mp == m1 and the root is exactly 1.
    if mp - m1 < 1e-14 * m1 {
        return Ok(AlphaResult {
            alpha: 1.0,
            residual: g(1.0, m1, mp, p),
            m1,
            mp,
            iterations: 0,
        });
    }

    // The root depends on the moments only through mp/m1, so iterate on the
    // m1-normalized equation; this keeps the stopping rule scale-invariant.
    let ratio = mp / m1;
    let res_target = 5e-14;
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut x = 0.5;
    let mut fx = g(x, 1.0, ratio, p);
    let mut iterations = 0u32;
    while fx.abs() > res_target && hi - lo > 1e-16 && iterations < 300 {
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // Newton step, kept only when it lands strictly inside the bracket.
        let dg = g_prime(x, 1.0, ratio, p);
        let newton = x - fx / dg;
        x = if dg != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        fx = g(x, 1.0, ratio, p);
        iterations += 1;
    }
    Ok(AlphaResult {
        alpha: x,
        residual: g(x, m1, mp, p),
        m1,
        mp,
        iterations,
    })
}

/// Solves the root equation for `psi` under the law `d`.
pub fn solve_alpha(
    d: &Distribution,
    psi: &StepFunction,
    p: PNorm,
) -> Result<AlphaResult, AlphaError> {
    if p.regime() != Regime::Gt1 {
        return Err(AlphaError::NotGt1 { p: p.p() });
    }
    let m1 = d.moment_abs_pow(psi, 1.0);
    let mp = d.moment_abs_pow(psi, p.p()).powf(1.0 / p.p());
    solve_alpha_from_moments(m1, mp, p.p())
}

/// Closed form of the root at `p = 2`:
/// `alpha = (sqrt(E psi^2) - sqrt(var|psi|))^2 / (E|psi|)^2`.
pub fn alpha_closed_p2(d: &Distribution, psi: &StepFunction) -> Result<f64, AlphaError> {
    let m1 = d.moment_abs_pow(psi, 1.0);
    let m2sq = d.moment_abs_pow(psi, 2.0);
    if !(m1.is_finite() && m2sq.is_finite()) {
        return Err(AlphaError::MomentInfinite);
    }
    if m1 <= 0.0 {
        return Err(AlphaError::PsiZero);
    }
    // Same degenerate branch as the solver: for constant psi the computed
    // variance is a rounding remainder whose square root would skew the
    // closed form by its own square root.
    let mp = m2sq.sqrt();
    if mp - m1 < 1e-14 * m1 {
        return Ok(1.0);
    }
    let var = (m2sq - m1 * m1).max(0.0);
    let root = mp - var.sqrt();
    Ok(root * root / (m1 * m1))
}
