//! Mixed probability laws and piecewise-constant functions.
//!
//! A [`Distribution`] is a finite list of atoms plus a finite list of
//! uniform-density segments, pairwise non-overlapping (an atom may sit at
//! a segment endpoint). This family is closed under the atom-stretching
//! transforms: a stretched atom becomes a unit-density segment and the
//! remaining components shift rigidly. General densities are out of scope.
//!
//! A [`StepFunction`] is total on the reals: `values[0]` on `(-inf, b1)`,
//! `values[i]` on `[b_i, b_{i+1})` and the last value on `[b_m, inf)`.

use crate::quad::{self, QuadOptions, QuadResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Acceptance tolerance on the total mass of a parsed or constructed law.
pub const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("total mass {total} differs from 1 by more than {MASS_TOL}")]
    MassTotal { total: f64 },
    #[error("component mass {mass} outside (0, 1]")]
    MassRange { mass: f64 },
    #[error("atom locations not strictly increasing near x = {x}")]
    UnsortedAtoms { x: f64 },
    #[error("segment [{lo}, {hi}] is degenerate or reversed")]
    DegenerateSegment { lo: f64, hi: f64 },
    #[error("segments unsorted or overlapping near [{lo}, {hi}]")]
    OverlappingSegments { lo: f64, hi: f64 },
    #[error("atom at {x} lies inside segment [{lo}, {hi}]")]
    AtomInsideSegment { x: f64, lo: f64, hi: f64 },
    #[error("distribution has no components")]
    Empty,
    #[error("non-finite coordinate or mass")]
    NonFinite,
    #[error("quantile argument {u} outside (0, 1]")]
    QuantileDomain { u: f64 },
    #[error("breakpoints not strictly increasing")]
    UnsortedBreakpoints,
    #[error("step function needs {expected} values for {breaks} breakpoints, got {got}")]
    ValueCount {
        breaks: usize,
        expected: usize,
        got: usize,
    },
    #[error("p = {p} is not a valid norm parameter")]
    BadP { p: f64 },
    #[error("no atom at location {x}")]
    NoAtomAt { x: f64 },
}

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
}

/// A uniform-density segment carrying `mass` over `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn density(&self) -> f64 {
        self.mass / self.len()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionRaw {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    segments: Vec<Segment>,
}

impl TryFrom<DistributionRaw> for Distribution {
    type Error = DistError;

    fn try_from(raw: DistributionRaw) -> Result<Self, DistError> {
        Distribution::new(raw.atoms, raw.segments)
    }
}

/// A mixed law: sorted atoms plus sorted uniform-density segments.
///
/// Invariants enforced at construction: total mass within [`MASS_TOL`] of 1,
/// strictly increasing atom locations, non-degenerate ordered segments, and
/// no overlap between components. The CDF is right-continuous and
/// nondecreasing by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRaw")]
pub struct Distribution {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

/// One component of a law in ascending coordinate order.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Component {
    Atom(Atom),
    Segment(Segment),
}

impl Component {
    pub(crate) fn start(&self) -> f64 {
        match self {
            Component::Atom(a) => a.x,
            Component::Segment(s) => s.lo,
        }
    }

    pub(crate) fn end(&self) -> f64 {
        match self {
            Component::Atom(a) => a.x,
            Component::Segment(s) => s.hi,
        }
    }

    pub(crate) fn mass(&self) -> f64 {
        match self {
            Component::Atom(a) => a.mass,
            Component::Segment(s) => s.mass,
        }
    }
}

impl Distribution {
    /// Validates and builds a mixed law. Inputs need not be sorted.
    pub fn new(mut atoms: Vec<Atom>, mut segments: Vec<Segment>) -> Result<Self, DistError> {
        if atoms.is_empty() && segments.is_empty() {
            return Err(DistError::Empty);
        }
        for a in &atoms {
            if !a.x.is_finite() || !a.mass.is_finite() {
                return Err(DistError::NonFinite);
            }
            if a.mass <= 0.0 || a.mass > 1.0 + MASS_TOL {
                return Err(DistError::MassRange { mass: a.mass });
            }
        }
        for s in &segments {
            if !s.lo.is_finite() || !s.hi.is_finite() || !s.mass.is_finite() {
                return Err(DistError::NonFinite);
            }
            if s.hi <= s.lo {
                return Err(DistError::DegenerateSegment { lo: s.lo, hi: s.hi });
            }
            if s.mass <= 0.0 || s.mass > 1.0 + MASS_TOL {
                return Err(DistError::MassRange { mass: s.mass });
            }
        }
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in atoms.windows(2) {
            if w[0].x >= w[1].x {
                return Err(DistError::UnsortedAtoms { x: w[1].x });
            }
        }
        for w in segments.windows(2) {
            if w[0].hi > w[1].lo {
                return Err(DistError::OverlappingSegments {
                    lo: w[1].lo,
                    hi: w[1].hi,
                });
            }
        }
        for a in &atoms {
            for s in &segments {
                if a.x > s.lo && a.x < s.hi {
                    return Err(DistError::AtomInsideSegment {
                        x: a.x,
                        lo: s.lo,
                        hi: s.hi,
                    });
                }
            }
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum::<f64>()
            + segments.iter().map(|s| s.mass).sum::<f64>();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(DistError::MassTotal { total });
        }
        Ok(Distribution { atoms, segments })
    }

    /// Builds a law and merges adjacent segments of equal density into one.
    /// Used by the stretch transforms to keep representations canonical.
    pub fn new_canonical(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self, DistError> {
        let d = Self::new(atoms, segments)?;
        let mut merged: Vec<Segment> = Vec::with_capacity(d.segments.len());
        for s in d.segments {
            match merged.last_mut() {
                Some(last)
                    if last.hi == s.lo
                        && (last.density() - s.density()).abs()
                            <= 1e-12 * last.density().max(s.density())
                        && !d.atoms.iter().any(|a| a.x == s.lo) =>
                {
                    last.hi = s.hi;
                    last.mass += s.mass;
                }
                _ => merged.push(s),
            }
        }
        Ok(Distribution {
            atoms: d.atoms,
            segments: merged,
        })
    }

    pub fn from_json_str(json: &str) -> Result<Self, String> {
        serde_json::from_str(json).map_err(|e| e.to_string())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_at(&self, x: f64) -> Option<Atom> {
        self.atoms.iter().copied().find(|a| a.x == x)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>()
            + self.segments.iter().map(|s| s.mass).sum::<f64>()
    }

    pub fn support_min(&self) -> f64 {
        let a = self.atoms.first().map(|a| a.x).unwrap_or(f64::INFINITY);
        let s = self.segments.first().map(|s| s.lo).unwrap_or(f64::INFINITY);
        a.min(s)
    }

    pub fn support_max(&self) -> f64 {
        let a = self.atoms.last().map(|a| a.x).unwrap_or(f64::NEG_INFINITY);
        let s = self
            .segments
            .last()
            .map(|s| s.hi)
            .unwrap_or(f64::NEG_INFINITY);
        a.max(s)
    }

    /// All components in ascending coordinate order. An atom sitting at a
    /// segment's lower endpoint precedes the segment; at the upper endpoint
    /// it follows it.
    pub(crate) fn components(&self) -> Vec<Component> {
        let mut out: Vec<Component> = self
            .atoms
            .iter()
            .map(|&a| Component::Atom(a))
            .chain(self.segments.iter().map(|&s| Component::Segment(s)))
            .collect();
        out.sort_by(|a, b| {
            a.start()
                .total_cmp(&b.start())
                .then(a.end().total_cmp(&b.end()))
        });
        out
    }

    /// Right-continuous CDF `F(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut f = 0.0;
        for a in &self.atoms {
            if a.x <= x {
                f += a.mass;
            }
        }
        for s in &self.segments {
            if x >= s.hi {
                f += s.mass;
            } else if x > s.lo {
                f += s.mass * (x - s.lo) / (s.hi - s.lo);
            }
        }
        f
    }

    /// Left-limit CDF `F(x-)`; differs from `F(x)` exactly at atoms.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let f = self.cdf(x);
        match self.atom_at(x) {
            Some(a) => f - a.mass,
            None => f,
        }
    }

    /// Left-continuous generalized inverse `F^{-1}(u) = inf { x : F(x) >= u }`.
    ///
    /// At a flat stretch of the CDF this returns the left endpoint, and both
    /// Galois inequalities `F(F^{-1}(u)) >= u` and `F(F^{-1}(u)-) <= u` hold.
    pub fn quantile(&self, u: f64) -> Result<f64, DistError> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(DistError::QuantileDomain { u });
        }
        let mut cum = 0.0;
        for c in self.components() {
            let m = c.mass();
            if u <= cum + m {
                return Ok(match c {
                    Component::Atom(a) => a.x,
                    Component::Segment(s) => s.lo + (u - cum) / m * (s.hi - s.lo),
                });
            }
            cum += m;
        }
        // u exceeded the accumulated total by rounding; the supremum of the
        // support is the smallest x with F(x) = 1.
        Ok(self.support_max())
    }

    /// Inverse-transform sampling, deterministic in `(seed, n)`.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u = 1.0 - rng.gen::<f64>(); // in (0, 1]
                self.quantile(u).expect("u in (0,1]")
            })
            .collect()
    }

    /// `\int g dF` for a pointwise integrand: exact on atoms, adaptive
    /// Gauss-Legendre on segments (split at `breaks` first).
    ///
    /// A non-finite `g` on a set of positive mass propagates to the result.
    pub fn integrate_fn(
        &self,
        g: impl Fn(f64) -> f64,
        breaks: &[f64],
        opts: &QuadOptions,
    ) -> QuadResult {
        let mut value = 0.0;
        let mut err = 0.0;
        for a in &self.atoms {
            value += g(a.x) * a.mass;
        }
        let n_seg = self.segments.len().max(1);
        for s in &self.segments {
            let density = s.density();
            let mut cuts: Vec<f64> = vec![s.lo];
            for &b in breaks {
                if b > s.lo && b < s.hi {
                    cuts.push(b);
                }
            }
            cuts.push(s.hi);
            cuts.sort_by(|a, b| a.total_cmp(b));
            let tol_piece = opts.tol / (n_seg * (cuts.len() - 1)) as f64;
            for w in cuts.windows(2) {
                let r = quad::adaptive(&|x| g(x) * density, w[0], w[1], tol_piece, opts.max_depth);
                value += r.value;
                err += r.abs_error;
            }
        }
        QuadResult {
            value,
            abs_error: err,
        }
    }

    /// Exact `\int |psi|^p dF` for a step function; no quadrature involved.
    /// Components are summed in ascending coordinate order.
    pub fn moment_abs_pow(&self, psi: &StepFunction, p: f64) -> f64 {
        let mut total = 0.0;
        for c in self.components() {
            match c {
                Component::Atom(a) => total += psi.eval(a.x).abs().powf(p) * a.mass,
                Component::Segment(s) => {
                    for (value, mass) in psi.pieces_on_segment(&s) {
                        total += value.abs().powf(p) * mass;
                    }
                }
            }
        }
        total
    }

    /// Exact signed `\int psi dF`.
    pub fn moment_signed(&self, psi: &StepFunction) -> f64 {
        let mut total = 0.0;
        for c in self.components() {
            match c {
                Component::Atom(a) => total += psi.eval(a.x) * a.mass,
                Component::Segment(s) => {
                    for (value, mass) in psi.pieces_on_segment(&s) {
                        total += value * mass;
                    }
                }
            }
        }
        total
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepFunctionRaw {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<StepFunctionRaw> for StepFunction {
    type Error = DistError;

    fn try_from(raw: StepFunctionRaw) -> Result<Self, DistError> {
        StepFunction::new(raw.breakpoints, raw.values)
    }
}

/// Direction of monotonicity of a step function over a support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Nondecreasing,
    Nonincreasing,
    Constant,
}

/// Piecewise-constant function, total on the reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionRaw")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, DistError> {
        if values.len() != breakpoints.len() + 1 {
            return Err(DistError::ValueCount {
                breaks: breakpoints.len(),
                expected: breakpoints.len() + 1,
                got: values.len(),
            });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DistError::UnsortedBreakpoints);
        }
        if breakpoints.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(DistError::NonFinite);
        }
        Ok(StepFunction {
            breakpoints,
            values,
        })
    }

    pub fn constant(c: f64) -> Self {
        StepFunction {
            breakpoints: vec![],
            values: vec![c],
        }
    }

    pub fn from_json_str(json: &str) -> Result<Self, String> {
        serde_json::from_str(json).map_err(|e| e.to_string())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        self.values[idx]
    }

    pub fn abs(&self) -> StepFunction {
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn scale(&self, lambda: f64) -> StepFunction {
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * lambda).collect(),
        }
    }

    /// Drops breakpoints whose adjacent values coincide.
    pub fn canonical(&self) -> StepFunction {
        let mut bps = Vec::with_capacity(self.breakpoints.len());
        let mut vals = vec![self.values[0]];
        for (i, &b) in self.breakpoints.iter().enumerate() {
            let v = self.values[i + 1];
            if v != *vals.last().unwrap() {
                bps.push(b);
                vals.push(v);
            }
        }
        StepFunction {
            breakpoints: bps,
            values: vals,
        }
    }

    /// Constant pieces of `psi` restricted to the open segment, as
    /// `(value, mass)` pairs in ascending order.
    pub(crate) fn pieces_on_segment(&self, s: &Segment) -> Vec<(f64, f64)> {
        let density = s.density();
        let mut out = Vec::new();
        let mut x = s.lo;
        for &b in &self.breakpoints {
            if b > s.lo && b < s.hi {
                if b > x {
                    out.push((self.eval(x), density * (b - x)));
                }
                x = b;
            }
        }
        if s.hi > x {
            out.push((self.eval(x), density * (s.hi - x)));
        }
        out
    }

    /// Values taken on the support of `d`, in ascending coordinate order.
    pub(crate) fn values_on_support(&self, d: &Distribution) -> Vec<f64> {
        let mut out = Vec::new();
        for c in d.components() {
            match c {
                Component::Atom(a) => out.push(self.eval(a.x)),
                Component::Segment(s) => {
                    out.extend(self.pieces_on_segment(&s).into_iter().map(|(v, _)| v))
                }
            }
        }
        out
    }

    pub fn is_nonnegative_on(&self, d: &Distribution) -> bool {
        self.values_on_support(d).iter().all(|&v| v >= 0.0)
    }

    pub fn max_abs_on(&self, d: &Distribution) -> f64 {
        self.values_on_support(d)
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Exact monotonicity over the support of `d` (no tolerance).
    pub fn monotonicity_on(&self, d: &Distribution) -> Option<Monotonicity> {
        let vals = self.values_on_support(d);
        let nondec = vals.windows(2).all(|w| w[0] <= w[1]);
        let noninc = vals.windows(2).all(|w| w[0] >= w[1]);
        match (nondec, noninc) {
            (true, true) => Some(Monotonicity::Constant),
            (true, false) => Some(Monotonicity::Nondecreasing),
            (false, true) => Some(Monotonicity::Nonincreasing),
            (false, false) => None,
        }
    }
}

/// Regime of the norm parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Gt1,
    Eq1,
    Lt1,
}

/// A validated norm parameter `p > 0` with its regime tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PNorm {
    p: f64,
    regime: Regime,
}

impl PNorm {
    pub fn new(p: f64) -> Result<Self, DistError> {
        if !p.is_finite() || p <= 0.0 {
            return Err(DistError::BadP { p });
        }
        let regime = if p > 1.0 {
            Regime::Gt1
        } else if p < 1.0 {
            Regime::Lt1
        } else {
            Regime::Eq1
        };
        Ok(PNorm { p, regime })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}
