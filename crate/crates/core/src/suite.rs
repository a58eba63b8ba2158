//! Randomized case generation and the property suite behind `suite` runs
//! and the acceptance tests.
//!
//! Every check is deterministic in the configured seed: cases derive their
//! own generator from `seed ^ index * PRIME`, so parallel execution cannot
//! reorder results.

use crate::alpha::{alpha_closed_p2, solve_alpha, solve_alpha_from_moments};
use crate::dist::{Atom, Distribution, PNorm, Segment, StepFunction};
use crate::functionals::{
    eval_copson, eval_hardy_gt1, eval_hardy_lt1, quantile_domain_lhs, EvalOptions,
};
use crate::oracle::{self, Functional, IdentityMode};
use crate::transforms::{self, StretchKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Shape constraint for a generated law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawShape {
    Mixed,
    Continuous,
    Atomic,
}

/// Random mixed law: up to 8 atoms and 4 segments placed left to right,
/// occasionally with an atom sitting exactly on a segment endpoint.
/// Masses are normalized so the total is 1 to the last bit.
pub fn random_distribution(rng: &mut ChaCha8Rng, shape: LawShape) -> Distribution {
    let (n_atoms, n_segments) = match shape {
        LawShape::Atomic => (rng.gen_range(1..=8usize), 0usize),
        LawShape::Continuous => (0, rng.gen_range(1..=4usize)),
        LawShape::Mixed => {
            let a = rng.gen_range(0..=8usize);
            let s = rng.gen_range(0..=4usize);
            if a + s == 0 {
                (1, 1)
            } else {
                (a, s)
            }
        }
    };
    let mut tags: Vec<bool> = std::iter::repeat(true)
        .take(n_atoms)
        .chain(std::iter::repeat(false).take(n_segments))
        .collect();
    // Fisher-Yates with the case generator keeps placement deterministic.
    for i in (1..tags.len()).rev() {
        let j = rng.gen_range(0..=i);
        tags.swap(i, j);
    }
    let mut atoms = Vec::with_capacity(n_atoms);
    let mut segments = Vec::with_capacity(n_segments);
    let mut cursor = rng.gen_range(-3.0..1.0);
    let mut prev_was_segment = false;
    for tag in tags {
        if tag {
            let gap = if prev_was_segment && rng.gen_bool(0.25) {
                0.0 // atom exactly at the previous segment's upper endpoint
            } else {
                rng.gen_range(0.05..1.0)
            };
            cursor += gap;
            atoms.push(Atom {
                x: cursor,
                mass: 0.0,
            });
            prev_was_segment = false;
        } else {
            let gap = if !prev_was_segment && !atoms.is_empty() && rng.gen_bool(0.25) {
                0.0 // segment starting at the previous atom
            } else {
                rng.gen_range(0.05..1.0)
            };
            let lo = cursor + gap;
            let hi = lo + rng.gen_range(0.1..1.5);
            segments.push(Segment { lo, hi, mass: 0.0 });
            cursor = hi;
            prev_was_segment = true;
        }
    }
    let n = n_atoms + n_segments;
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut masses: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let partial: f64 = masses[..n - 1].iter().sum();
    masses[n - 1] = 1.0 - partial;
    let mut k = 0;
    for a in &mut atoms {
        a.mass = masses[k];
        k += 1;
    }
    for s in &mut segments {
        s.mass = masses[k];
        k += 1;
    }
    Distribution::new(atoms, segments).expect("generated law is valid")
}

/// Random step function with up to `max_pieces` pieces over `[lo, hi]`.
/// Degenerate windows (single-atom supports) are widened first.
pub fn random_step(
    rng: &mut ChaCha8Rng,
    max_pieces: usize,
    lo: f64,
    hi: f64,
    signed: bool,
) -> StepFunction {
    let (lo, hi) = if hi - lo < 0.1 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    };
    let pieces = rng.gen_range(1..=max_pieces);
    let mut bps: Vec<f64> = (0..pieces - 1)
        .map(|_| rng.gen_range(lo..hi))
        .collect();
    bps.sort_by(|a, b| a.total_cmp(b));
    bps.dedup();
    let values: Vec<f64> = (0..bps.len() + 1)
        .map(|_| {
            let v = rng.gen_range(0.0..10.0);
            if signed && rng.gen_bool(0.3) {
                -v
            } else {
                v
            }
        })
        .collect();
    StepFunction::new(bps, values).expect("generated step is valid")
}

fn random_nonincreasing_step(rng: &mut ChaCha8Rng, max_pieces: usize, lo: f64, hi: f64) -> StepFunction {
    let f = random_step(rng, max_pieces, lo, hi, false);
    let mut values = f.values().to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    for v in &mut values {
        *v += 0.1; // keep psi strictly positive so moments never vanish
    }
    StepFunction::new(f.breakpoints().to_vec(), values).expect("sorted values keep the shape")
}

fn random_p(rng: &mut ChaCha8Rng, regime: PRange) -> PNorm {
    let p = match regime {
        PRange::Gt1 => rng.gen_range(1.05..4.0),
        PRange::Ge1 => rng.gen_range(1.0..4.0),
        PRange::Lt1 => rng.gen_range(0.05..0.95),
        PRange::Lt1FiniteVariance => rng.gen_range(0.05..0.45),
    };
    PNorm::new(p).unwrap()
}

#[derive(Debug, Clone, Copy)]
enum PRange {
    Gt1,
    Ge1,
    Lt1,
    /// Keeps `2p < 1` so the sampled functional has finite variance and
    /// standard-error agreement bands are meaningful.
    Lt1FiniteVariance,
}

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Configuration of the property suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub quad_tol: f64,
    /// Trials per Monte Carlo agreement case.
    pub mc_n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            quad_tol: 1e-10,
            mc_n: 1_000_000,
        }
    }
}

impl SuiteConfig {
    fn eval_opts(&self) -> EvalOptions {
        EvalOptions {
            quad_tol: self.quad_tol,
            ..EvalOptions::default()
        }
    }
}

// ---------------------------------------------------------------------------
// dist checks
// ---------------------------------------------------------------------------

/// Galois inequalities and CDF monotonicity on randomized laws.
pub fn check_galois(cfg: &SuiteConfig) -> CheckResult {
    let mut failures = Vec::new();
    let cases = 1000;
    for i in 0..cases {
        let mut r = case_rng(cfg.seed, 0x6A10 + i as u64);
        let d = random_distribution(&mut r, LawShape::Mixed);
        for _ in 0..10 {
            let u = r.gen_range(f64::MIN_POSITIVE..1.0);
            let q = d.quantile(u).unwrap();
            let f = d.cdf(q);
            let f_left = d.cdf_left(q);
            if !(f >= u - 1e-12 && f_left <= u + 1e-12) {
                failures.push(format!(
                    "case {i}: u={u}, F(q)={f}, F(q-)={f_left} violate Galois"
                ));
            }
        }
        let mut xs: Vec<f64> = (0..8).map(|_| r.gen_range(-5.0..8.0)).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        for w in xs.windows(2) {
            if d.cdf(w[0]) > d.cdf(w[1]) + 1e-15 {
                failures.push(format!("case {i}: cdf not monotone at {w:?}"));
            }
        }
    }
    CheckResult {
        name: "dist::galois",
        cases,
        failures,
    }
}

/// On purely atomic laws, `moment_abs_pow` must equal the plain ascending
/// sum bit for bit.
pub fn check_atomic_integrate_exact(cfg: &SuiteConfig) -> CheckResult {
    let mut failures = Vec::new();
    let cases = 100;
    for i in 0..cases {
        let mut r = case_rng(cfg.seed, 0xA70 + i as u64);
        let d = random_distribution(&mut r, LawShape::Atomic);
        let psi = random_step(&mut r, 10, d.support_min(), d.support_max() + 0.1, true);
        let p = random_p(&mut r, PRange::Gt1).p();
        let via_dist = d.moment_abs_pow(&psi, p);
        let manual: f64 = d
            .atoms()
            .iter()
            .map(|a| psi.eval(a.x).abs().powf(p) * a.mass)
            .sum();
        if via_dist.to_bits() != manual.to_bits() {
            failures.push(format!("case {i}: {via_dist:?} != {manual:?}"));
        }
    }
    CheckResult {
        name: "dist::atomic-integrate-exact",
        cases,
        failures,
    }
}

/// Empirical CDF of a million draws stays inside the
/// Dvoretzky-Kiefer-Wolfowitz band at level 1e-3.
pub fn check_dkw(cfg: &SuiteConfig) -> CheckResult {
    let mut failures = Vec::new();
    let cases = 3;
    let n = 1_000_000usize;
    let eps = ((2.0f64 / 1e-3).ln() / (2.0 * n as f64)).sqrt();
    for i in 0..cases {
        let mut r = case_rng(cfg.seed, 0xD5 + i as u64);
        let d = random_distribution(&mut r, LawShape::Mixed);
        let mut xs = d.sample(cfg.seed + 17 + i as u64, n);
        xs.sort_by(|a, b| a.total_cmp(b));
        let nf = n as f64;
        let mut sup = 0.0f64;
        let mut k = 0usize;
        // Ties (atoms) share one empirical jump: F_n goes from k/n to j/n.
        while k < xs.len() {
            let x = xs[k];
            let mut j = k;
            while j < xs.len() && xs[j] == x {
                j += 1;
            }
            let right = (d.cdf(x) - j as f64 / nf).abs();
            let left = (d.cdf_left(x) - k as f64 / nf).abs();
            sup = sup.max(right).max(left);
            k = j;
        }
        if sup > eps {
            failures.push(format!("case {i}: sup |F_n - F| = {sup} > {eps}"));
        }
    }
    CheckResult {
        name: "dist::dkw",
        cases,
        failures,
    }
}

// ---------------------------------------------------------------------------
// transform checks
// ---------------------------------------------------------------------------

/// Rearrangement: output nonincreasing, value multiset preserved, and the
/// partial-average domination holds on a 50-point grid.
pub fn check_rearrangement(cfg: &SuiteConfig) -> CheckResult {
    let mut failures = Vec::new();
    let cases = 200;
    for i in 0..cases {
        let mut r = case_rng(cfg.seed, 0x0EA0 + i as u64);
        let chi = random_step(&mut r, 10, 0.0, 1.0, false);
        let re = match transforms::decreasing_rearrangement(&chi) {
            Ok(re) => re,
            Err(e) => {
                failures.push(format!("case {i}: {e}"));
                continue;
            }
        };
        if re.values().windows(2).any(|w| w[0] < w[1]) {
            failures.push(format!("case {i}: output not nonincreasing"));
        }
        let u01 = Distribution::new(
            vec![],
            vec![Segment {
                lo: 0.0,
                hi: 1.0,
                mass: 1.0,
            }],
        )
        .unwrap();
        for p in [1.0, 2.0, 0.5] {
            let before = u01.moment_abs_pow(&chi, p);
            let after = u01.moment_abs_pow(&re, p);
            if (before - after).abs() > 1e-10 * before.max(1.0) {
                failures.push(format!("case {i}: {p}-norm changed: {before} -> {after}"));
            }
        }
        let partial = |f: &StepFunction, u: f64| {
            let mut acc = 0.0;
            let mut x = 0.0f64;
            for &b in f.breakpoints() {
                if b < u && b > 0.0 {
                    acc += f.eval(x) * (b - x);
                    x = b;
                }
            }
            acc + f.eval(x) * (u - x)
        };
        for k in 1..=50 {
            let u = k as f64 / 50.0;
            if partial(&re, u) / u < partial(&chi, u) / u - 1e-10 {
                failures.push(format!("case {i}: domination fails at u={u}"));
                break;
            }
        }
    }
    CheckResult {
        name: "transforms::rearrangement",
        cases,
        failures,
    }
}

fn stretch_case(
    cfg: &SuiteConfig,
    i: usize,
    kind: StretchKind,
    failures: &mut Vec<String>,
) {
    let tag = match kind {
        StretchKind::Up => 0x5717_0000u64,
        StretchKind::Down => 0x5717_1111u64,
    };
    let mut r = case_rng(cfg.seed, tag + i as u64);
    let d = loop {
        let d = random_distribution(&mut r, LawShape::Mixed);
        if !d.atoms().is_empty() {
            break d;
        }
    };
    let psi = match kind {
        StretchKind::Up => {
            random_nonincreasing_step(&mut r, 8, d.support_min() - 0.5, d.support_max() + 0.5)
        }
        StretchKind::Down => {
            random_step(&mut r, 8, d.support_min() - 0.5, d.support_max() + 0.5, false)
        }
    };
    let pick = r.gen_range(0..d.atoms().len());
    let a = d.atoms()[pick].x;
    let p = match kind {
        StretchKind::Up => random_p(&mut r, PRange::Gt1),
        StretchKind::Down => random_p(&mut r, PRange::Lt1),
    };
    let out = match kind {
        StretchKind::Up => transforms::stretch_up(&d, &psi, a, p),
        StretchKind::Down => transforms::stretch_down(&d, &psi, a, p),
    };
    let out = match out {
        Ok(o) => o,
        Err(e) => {
            failures.push(format!("case {i}: {e}"));
            return;
        }
    };
    if (out.norm_before - out.norm_after).abs() > 1e-9 * out.norm_before.max(1.0) {
        failures.push(format!(
            "case {i}: p-moment drifted {} -> {}",
            out.norm_before, out.norm_after
        ));
    }
    let m1_before = d.moment_abs_pow(&psi, 1.0);
    let m1_after = out.dist.moment_abs_pow(&out.psi, 1.0);
    if (m1_before - m1_after).abs() > 1e-9 * m1_before.max(1.0) {
        failures.push(format!(
            "case {i}: first moment drifted {m1_before} -> {m1_after}"
        ));
    }
    match kind {
        StretchKind::Up => {
            if out.functional_after < out.functional_before - 1e-9 * out.functional_before.max(1.0)
            {
                failures.push(format!(
                    "case {i}: gt1 functional decreased {} -> {}",
                    out.functional_before, out.functional_after
                ));
            }
            // Both moments preserved, so the sharpened root is unchanged.
            if m1_before > 0.0 {
                let before = solve_alpha(&d, &psi, p).unwrap().alpha;
                let after = solve_alpha(&out.dist, &out.psi, p).unwrap().alpha;
                if (before - after).abs() > 1e-9 {
                    failures.push(format!("case {i}: alpha moved {before} -> {after}"));
                }
            }
        }
        StretchKind::Down => {
            if out.functional_after.is_finite()
                && out.functional_after
                    > out.functional_before + 1e-9 * out.functional_before.max(1.0)
            {
                failures.push(format!(
                    "case {i}: lt1 functional increased {} -> {}",
                    out.functional_before, out.functional_after
                ));
            }
        }
    }
}

/// 200 randomized single-atom stretches per direction.
pub fn check_stretch(cfg: &SuiteConfig, kind: StretchKind) -> CheckResult {
    let mut failures = Vec::new();
    let cases = 200;
    for i in 0..cases {
        stretch_case(cfg, i, kind, &mut failures);
    }
    CheckResult {
        name: match kind {
            StretchKind::Up => "transforms::stretch-up",
            StretchKind::Down => "transforms::stretch-down",
        },
        cases,
        failures,
    }
}

// ---------------------------------------------------------------------------
// functional checks
// ---------------------------------------------------------------------------

/// The four probabilistic inequality suites, 500 cases each.
pub fn check_inequality(cfg: &SuiteConfig, which: Functional, lt1_copson: bool) -> CheckResult {
    let opts = cfg.eval_opts();
    let cases = 500usize;
    let tag = match (which, lt1_copson) {
        (Functional::HardyGt1, _) => 0x11_0000u64,
        (Functional::HardyLt1, _) => 0x22_0000u64,
        (Functional::Copson, false) => 0x33_0000u64,
        (Functional::Copson, true) => 0x44_0000u64,
    };
    let failures: Vec<String> = (0..cases)
        .into_par_iter()
        .filter_map(|i| {
            let mut r = case_rng(cfg.seed, tag + i as u64);
            let d = random_distribution(&mut r, LawShape::Mixed);
            let signed = match which {
                Functional::HardyGt1 => true,
                Functional::HardyLt1 => false,
                Functional::Copson => !lt1_copson,
            };
            let psi = random_step(
                &mut r,
                10,
                d.support_min() - 0.5,
                d.support_max() + 0.5,
                signed,
            );
            let report = match which {
                Functional::HardyGt1 => {
                    eval_hardy_gt1(&d, &psi, random_p(&mut r, PRange::Gt1), &opts)
                }
                Functional::HardyLt1 => {
                    eval_hardy_lt1(&d, &psi, random_p(&mut r, PRange::Lt1), &opts)
                }
                Functional::Copson => {
                    let p = if lt1_copson {
                        random_p(&mut r, PRange::Lt1)
                    } else {
                        random_p(&mut r, PRange::Ge1)
                    };
                    eval_copson(&d, &psi, p, &opts)
                }
            };
            match report {
                Ok(rep) => {
                    if !rep.satisfied || rep.margin < -5.0 * cfg.quad_tol {
                        Some(format!(
                            "case {i}: violated (lhs={}, rhs={}, margin={})",
                            rep.lhs,
                            rep.rhs_effective(),
                            rep.margin
                        ))
                    } else {
                        None
                    }
                }
                Err(e) => Some(format!("case {i}: {e}")),
            }
        })
        .collect();
    CheckResult {
        name: match (which, lt1_copson) {
            (Functional::HardyGt1, _) => "functionals::hardy-gt1",
            (Functional::HardyLt1, _) => "functionals::hardy-lt1",
            (Functional::Copson, false) => "functionals::copson-ge1",
            (Functional::Copson, true) => "functionals::copson-lt1",
        },
        cases,
        failures,
    }
}

/// Sharpened bound never exceeds the classic one.
pub fn check_bound_ordering(cfg: &SuiteConfig) -> CheckResult {
    let opts = cfg.eval_opts();
    let mut failures = Vec::new();
    let cases = 500;
    for i in 0..cases {
        let mut r = case_rng(cfg.seed, 0xB0 + i as u64);
        let d = random_distribution(&mut r, LawShape::Mixed);
        let psi = random_step(&mut r, 10, d.support_min(), d.support_max(), true);
        let p = random_p(&mut r, PRange::Gt1);
        let rep = match eval_hardy_gt1(&d, &psi, p, &opts) {
            Ok(rep) => rep,
            Err(e) => {
                failures.push(format!("case {i}: {e}"));
                continue;
            }
        };
        if let (Some(alpha), Some(sharp)) = (rep.alpha, rep.rhs_sharpened) {
            if !(0.0..=1.0 + 1e-12).contains(&alpha) {
                failures.push(format!("case {i}: alpha={alpha} outside [0,1]"));
            }
            if sharp > rep.rhs_classic * (1.0 + 1e-12) {
                failures.push(format!(
                    "case {i}: sharpened {sharp} above classic {}",
                    rep.rhs_classic
                ));
            }
        }
    }
    CheckResult {
        name: "functionals::bound-ordering",
        cases,
        failures,
    }
}

/// Coordinate-scale and quantile-scale evaluations agree, and the
/// quantile-scale route stays below the classic constant (the alpha = 0
/// chain).
pub fn check_domain_identity(cfg: &SuiteConfig) -> CheckResult {
    let opts = cfg.eval_opts();
    let cases = 200usize;
    let failures: Vec<String> = (0..cases)
        .into_par_iter()
        .filter_map(|i| {
            let mut r = case_rng(cfg.seed, 0xD0_0000 + i as u64);
            let d = random_distribution(&mut r, LawShape::Mixed);
            let psi = random_step(&mut r, 10, d.support_min(), d.support_max(), true);
            let p = random_p(&mut r, PRange::Gt1);
            let x_dom = match eval_hardy_gt1(&d, &psi, p, &opts) {
                Ok(rep) => rep,
                Err(e) => return Some(format!("case {i}: {e}")),
            };
            let u_dom = match quantile_domain_lhs(&d, &psi, p, &opts) {
                Ok(v) => v,
                Err(e) => return Some(format!("case {i}: {e}")),
            };
            let scale = x_dom.lhs_unrooted.abs().max(1.0);
            if (u_dom.value - x_dom.lhs_unrooted).abs() > 2.0 * cfg.quad_tol * scale {
                return Some(format!(
                    "case {i}: u-domain {} vs x-domain {}",
                    u_dom.value, x_dom.lhs_unrooted
                ));
            }
            // alpha = 0 chain: un-rooted LHS <= (p/(p-1))^p E|psi|^p.
            let pf = p.p();
            let classic_p = (pf / (pf - 1.0)).powf(pf) * d.moment_abs_pow(&psi, pf);
            if u_dom.value > classic_p * (1.0 + 1e-9) + 5.0 * cfg.quad_tol {
                return Some(format!(
                    "case {i}: quantile-domain {} above classic bound {classic_p}",
                    u_dom.value
                ));
            }
            None
        })
        .collect();
    CheckResult {
        name: "functionals::domain-identity",
        cases,
        failures,
    }
}

/// Replacing psi by lambda psi scales both sides linearly and leaves alpha
/// and the verdict unchanged.
pub fn check_scaling(cfg: &SuiteConfig) -> CheckResult {
    let opts = cfg.eval_opts();
    let mut failures = Vec::new();
    let cases = 100;
    for i in 0..cases {
        let mut r = case_rng(cfg.seed, 0x5CA1E + i as u64);
        let d = random_distribution(&mut r, LawShape::Mixed);
        let psi = random_step(&mut r, 10, d.support_min(), d.support_max(), true);
        let p = random_p(&mut r, PRange::Gt1);
        // The root is ill-conditioned where mp ~ m1 (the derivative of the
        // defining equation vanishes); probe away from the constant case.
        let pa = psi.abs();
        let m1 = d.moment_abs_pow(&pa, 1.0);
        let mp = d.moment_abs_pow(&pa, p.p()).powf(1.0 / p.p());
        if m1 == 0.0 || mp - m1 <= 1e-3 * m1 {
            continue;
        }
        let lambda: f64 = 10f64.powf(r.gen_range(-3.0..3.0));
        let base = match eval_hardy_gt1(&d, &psi, p, &opts) {
            Ok(rep) => rep,
            Err(e) => {
                failures.push(format!("case {i}: {e}"));
                continue;
            }
        };
        let scaled = eval_hardy_gt1(&d, &psi.scale(lambda), p, &opts).unwrap();
        let tol = 1e-9 * (lambda * base.lhs).abs().max(1.0);
        if (scaled.lhs - lambda * base.lhs).abs() > tol
            || (scaled.rhs_classic - lambda * base.rhs_classic).abs() > tol
        {
            failures.push(format!("case {i}: sides not homogeneous (lambda={lambda})"));
        }
        match (scaled.alpha, base.alpha) {
            (Some(a), Some(b)) if (a - b).abs() > 1e-12 => {
                failures.push(format!("case {i}: alpha changed under scaling"));
            }
            _ => {}
        }
        if scaled.satisfied != base.satisfied {
            failures.push(format!("case {i}: verdict changed under scaling"));
        }
    }
    CheckResult {
        name: "functionals::scaling",
        cases,
        failures,
    }
}

/// For continuous laws and `p > 1`, replacing `psi o F^{-1}` by its
/// decreasing rearrangement never lowers the Hardy left side.
pub fn check_rearrangement_dominance(cfg: &SuiteConfig) -> CheckResult {
    let opts = cfg.eval_opts();
    let mut failures = Vec::new();
    let cases = 100;
    let u01 = Distribution::new(
        vec![],
        vec![Segment {
            lo: 0.0,
            hi: 1.0,
            mass: 1.0,
        }],
    )
    .unwrap();
    for i in 0..cases {
        let mut r = case_rng(cfg.seed, 0xD011 + i as u64);
        let d = random_distribution(&mut r, LawShape::Continuous);
        let psi = random_step(&mut r, 10, d.support_min(), d.support_max(), false);
        let p = random_p(&mut r, PRange::Gt1);
        let chi = transforms::psi_in_quantile_domain(&d, &psi);
        let chi_re = transforms::decreasing_rearrangement(&chi).unwrap();
        let direct = eval_hardy_gt1(&d, &psi, p, &opts).unwrap().lhs_unrooted;
        let via_chi = eval_hardy_gt1(&u01, &chi, p, &opts).unwrap().lhs_unrooted;
        let rearranged = eval_hardy_gt1(&u01, &chi_re, p, &opts).unwrap().lhs_unrooted;
        let scale = direct.abs().max(1.0);
        if (direct - via_chi).abs() > 4.0 * cfg.quad_tol * scale {
            failures.push(format!(
                "case {i}: quantile transport broke the value {direct} vs {via_chi}"
            ));
        }
        if rearranged < via_chi - 1e-9 * scale {
            failures.push(format!(
                "case {i}: rearrangement lowered the LHS {via_chi} -> {rearranged}"
            ));
        }
    }
    CheckResult {
        name: "functionals::rearrangement-dominance",
        cases,
        failures,
    }
}

// ---------------------------------------------------------------------------
// alpha checks
// ---------------------------------------------------------------------------

/// Residual bound, bracket signs, convexity probe and the p = 2 closed
/// form. Moments are normalized by `max psi`, under which the equation is
/// invariant.
pub fn check_alpha(cfg: &SuiteConfig) -> CheckResult {
    let mut failures = Vec::new();
    let mut cases = 0usize;
    // Residual + bracket on 500 random pairs.
    for i in 0..500 {
        cases += 1;
        let mut r = case_rng(cfg.seed, 0xA1FA + i as u64);
        let d = random_distribution(&mut r, LawShape::Mixed);
        let psi = random_step(&mut r, 10, d.support_min(), d.support_max(), true);
        let p = random_p(&mut r, PRange::Gt1);
        let scale = psi.abs().max_abs_on(&d);
        if scale == 0.0 {
            continue;
        }
        let unit = psi.scale(1.0 / scale);
        let m1 = d.moment_abs_pow(&unit, 1.0);
        let mp = d.moment_abs_pow(&unit, p.p()).powf(1.0 / p.p());
        if m1 == 0.0 {
            continue;
        }
        let g = |a: f64| m1 * (p.p() - 1.0 + a) - p.p() * mp * a.powf(1.0 / p.p());
        if g(0.0) < -1e-14 || g(1.0) > 1e-14 {
            failures.push(format!("case {i}: bracket signs wrong"));
        }
        let sol = solve_alpha_from_moments(m1, mp, p.p()).unwrap();
        if sol.residual.abs() > 1e-12 * m1.max(1.0) {
            failures.push(format!("case {i}: residual {}", sol.residual));
        }
        if !(0.0..=1.0).contains(&sol.alpha) {
            failures.push(format!("case {i}: alpha {} outside [0,1]", sol.alpha));
        }
        // Convexity probe: 20 triples per case, 10^4 total.
        for _ in 0..20 {
            let a1: f64 = r.gen_range(0.0..1.0);
            let a2: f64 = r.gen_range(0.0..1.0);
            let t: f64 = r.gen_range(0.0..1.0);
            let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
            let mid = t * lo + (1.0 - t) * hi;
            if g(mid) > t * g(lo) + (1.0 - t) * g(hi) + 1e-12 {
                failures.push(format!("case {i}: convexity probe failed"));
                break;
            }
        }
    }
    // Closed form vs bisection at p = 2 on 300 small atomic laws.
    for i in 0..300 {
        cases += 1;
        let mut r = case_rng(cfg.seed, 0xC105ED + i as u64);
        let n = r.gen_range(2..=5usize);
        let mut atoms = Vec::with_capacity(n);
        let mut x = 0.0;
        for _ in 0..n {
            x += r.gen_range(0.1..1.0);
            atoms.push(Atom { x, mass: 0.0 });
        }
        let weights: Vec<f64> = (0..n).map(|_| r.gen_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for (a, w) in atoms.iter_mut().zip(&weights) {
            a.mass = w / total;
        }
        let partial: f64 = atoms[..n - 1].iter().map(|a| a.mass).sum();
        atoms[n - 1].mass = 1.0 - partial;
        let d = Distribution::new(atoms, vec![]).unwrap();
        let psi = random_step(&mut r, 6, 0.0, x, false);
        if d.moment_abs_pow(&psi, 1.0) == 0.0 {
            continue;
        }
        let closed = alpha_closed_p2(&d, &psi).unwrap();
        let solved = solve_alpha(&d, &psi, PNorm::new(2.0).unwrap()).unwrap().alpha;
        if (closed - solved).abs() > 1e-10 {
            failures.push(format!("closed-form case {i}: {closed} vs {solved}"));
        }
    }
    CheckResult {
        name: "alpha::solver",
        cases,
        failures,
    }
}

// ---------------------------------------------------------------------------
// oracle checks
// ---------------------------------------------------------------------------

/// Purely atomic laws: the quadrature-path evaluation equals the naive
/// enumeration to 1e-12 relative.
pub fn check_oracle_atomic(cfg: &SuiteConfig) -> CheckResult {
    let opts = cfg.eval_opts();
    let mut failures = Vec::new();
    let cases = 200;
    for i in 0..cases {
        let mut r = case_rng(cfg.seed, 0x0AC1E + i as u64);
        let d = random_distribution(&mut r, LawShape::Atomic);
        let psi = random_step(&mut r, 10, d.support_min(), d.support_max() + 0.1, false);
        let (functional, p) = match i % 3 {
            0 => (Functional::HardyGt1, random_p(&mut r, PRange::Gt1)),
            1 => (Functional::HardyLt1, random_p(&mut r, PRange::Lt1)),
            _ => (Functional::Copson, random_p(&mut r, PRange::Ge1)),
        };
        let exact = exact_value(&d, &psi, p, functional);
        let evaluated = match functional {
            Functional::HardyGt1 => eval_hardy_gt1(&d, &psi, p, &opts).map(|r| r.lhs_unrooted),
            Functional::HardyLt1 => eval_hardy_lt1(&d, &psi, p, &opts).map(|r| r.lhs_unrooted),
            Functional::Copson => eval_copson(&d, &psi, p, &opts).map(|r| r.lhs_unrooted),
        };
        match evaluated {
            Ok(v) => {
                let agree = if exact.is_infinite() {
                    v.is_infinite()
                } else {
                    (v - exact).abs() <= 1e-12 * exact.abs().max(1.0)
                };
                if !agree {
                    failures.push(format!("case {i}: eval {v} vs enumeration {exact}"));
                }
            }
            Err(e) => failures.push(format!("case {i}: {e}")),
        }
    }
    CheckResult {
        name: "oracle::atomic-agreement",
        cases,
        failures,
    }
}

fn exact_value(d: &Distribution, psi: &StepFunction, p: PNorm, f: Functional) -> f64 {
    oracle::exact_discrete_eval(d, psi, p, f).expect("atomic laws only")
}

/// Mixed laws: quadrature within 4 standard errors of Monte Carlo in at
/// least 99% of the cases.
pub fn check_oracle_mc(cfg: &SuiteConfig) -> CheckResult {
    let opts = cfg.eval_opts();
    let cases = 200usize;
    let outcomes: Vec<Option<String>> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut r = case_rng(cfg.seed, 0x3C_0000 + i as u64);
            let d = random_distribution(&mut r, LawShape::Mixed);
            let psi = random_step(&mut r, 10, d.support_min(), d.support_max(), false);
            let (functional, p) = match i % 4 {
                0 => (Functional::HardyGt1, random_p(&mut r, PRange::Gt1)),
                1 => (Functional::HardyLt1, random_p(&mut r, PRange::Lt1FiniteVariance)),
                2 => (Functional::Copson, random_p(&mut r, PRange::Ge1)),
                _ => (Functional::Copson, random_p(&mut r, PRange::Lt1)),
            };
            let quad_value = match functional {
                Functional::HardyGt1 => {
                    eval_hardy_gt1(&d, &psi, p, &opts).map(|r| r.lhs_unrooted)
                }
                Functional::HardyLt1 => {
                    eval_hardy_lt1(&d, &psi, p, &opts).map(|r| r.lhs_unrooted)
                }
                Functional::Copson => eval_copson(&d, &psi, p, &opts).map(|r| r.lhs_unrooted),
            };
            let quad_value = match quad_value {
                Ok(v) => v,
                Err(e) => return Some(format!("case {i}: {e}")),
            };
            let mc = oracle::mc_estimate(
                &d,
                &psi,
                p,
                functional,
                cfg.seed ^ (0x3C0F + i as u64),
                cfg.mc_n,
            )
            .expect("n is large enough");
            let agree = if quad_value.is_infinite() || mc.mean.is_infinite() {
                quad_value.is_infinite() && mc.mean.is_infinite()
            } else {
                (quad_value - mc.mean).abs()
                    <= 4.0 * mc.std_error + 1e-9 * quad_value.abs().max(1.0)
            };
            if agree {
                None
            } else {
                Some(format!(
                    "case {i}: quad {quad_value} vs mc {} +- {}",
                    mc.mean, mc.std_error
                ))
            }
        })
        .collect();
    let disagreements: Vec<String> = outcomes.into_iter().flatten().collect();
    // The band is statistical: up to 1% disagreement is accepted.
    let allowed = cases / 100;
    let failures = if disagreements.len() > allowed {
        disagreements
    } else {
        Vec::new()
    };
    CheckResult {
        name: "oracle::mc-agreement",
        cases,
        failures,
    }
}

/// Power-integral identities: pass on continuous laws, fail detectably on
/// the single-atom counterexample, and pass again after de-atomization.
pub fn check_identity(cfg: &SuiteConfig) -> CheckResult {
    let mut failures = Vec::new();
    let mut cases = 0usize;
    for i in 0..100 {
        cases += 1;
        let mut r = case_rng(cfg.seed, 0x1DE + i as u64);
        let d = random_distribution(&mut r, LawShape::Continuous);
        let psi = random_step(&mut r, 10, d.support_min(), d.support_max(), false);
        let (mode, p) = if i % 2 == 0 {
            (IdentityMode::Lower, random_p(&mut r, PRange::Gt1))
        } else {
            (IdentityMode::Tail, random_p(&mut r, PRange::Lt1))
        };
        let rep = oracle::power_integral_identity(&d, &psi, p, mode).unwrap();
        let scale = rep.lhs.abs().max(1.0);
        if rep.gap > 2.0 * cfg.quad_tol * scale {
            failures.push(format!("continuous case {i}: gap {}", rep.gap));
        }
    }
    // The single-atom counterexample must fail visibly.
    cases += 1;
    let point = Distribution::new(vec![Atom { x: 0.0, mass: 1.0 }], vec![]).unwrap();
    let one = StepFunction::constant(1.0);
    let rep =
        oracle::power_integral_identity(&point, &one, PNorm::new(2.0).unwrap(), IdentityMode::Lower)
            .unwrap();
    if rep.gap < 0.5 {
        failures.push(format!("single-atom gap too small: {}", rep.gap));
    }
    // De-atomize, then the identity must hold on the output.
    for i in 0..50 {
        cases += 1;
        let mut r = case_rng(cfg.seed, 0xDEA7 + i as u64);
        let d = loop {
            let d = random_distribution(&mut r, LawShape::Mixed);
            if !d.atoms().is_empty() {
                break d;
            }
        };
        let psi = random_nonincreasing_step(&mut r, 8, d.support_min() - 0.5, d.support_max() + 0.5);
        let p = random_p(&mut r, PRange::Gt1);
        let before = oracle::power_integral_identity(&d, &psi, p, IdentityMode::Lower).unwrap();
        let out = transforms::de_atomize(&d, &psi, StretchKind::Up, p).unwrap();
        let after =
            oracle::power_integral_identity(&out.dist, &out.psi, p, IdentityMode::Lower).unwrap();
        let scale = after.lhs.abs().max(1.0);
        if after.gap > 2.0 * cfg.quad_tol * scale {
            failures.push(format!(
                "de-atomize case {i}: gap {} (was {})",
                after.gap, before.gap
            ));
        }
    }
    CheckResult {
        name: "oracle::identity",
        cases,
        failures,
    }
}

/// Runs everything.
pub fn run_full_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    vec![
        check_galois(cfg),
        check_atomic_integrate_exact(cfg),
        check_dkw(cfg),
        check_rearrangement(cfg),
        check_stretch(cfg, StretchKind::Up),
        check_stretch(cfg, StretchKind::Down),
        check_inequality(cfg, Functional::HardyGt1, false),
        check_inequality(cfg, Functional::HardyLt1, false),
        check_inequality(cfg, Functional::Copson, false),
        check_inequality(cfg, Functional::Copson, true),
        check_bound_ordering(cfg),
        check_domain_identity(cfg),
        check_scaling(cfg),
        check_rearrangement_dominance(cfg),
        check_alpha(cfg),
        check_oracle_atomic(cfg),
        check_oracle_mc(cfg),
        check_identity(cfg),
    ]
}
