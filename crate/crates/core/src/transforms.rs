//! Constructive transforms: decreasing rearrangement and atom stretching.
//!
//! Stretching replaces an atom of mass `p_a` at `a` by a unit-density
//! segment of length `p_a` and shifts the remaining mass rigidly out of the
//! way: the upward stretch moves everything above `a` right by `p_a` (the
//! new segment is `[a, a + p_a]`), the downward stretch moves everything
//! below `a` left by `p_a` (the new segment is `[a - p_a, a]`). `psi` is
//! carried along so that integrals of `psi^p` against the law are
//! preserved; the Hardy `p > 1` functional can only grow under the upward
//! stretch and the `p < 1` functional can only shrink under the downward
//! one.

use crate::dist::{Atom, DistError, Distribution, Monotonicity, PNorm, Segment, StepFunction};
use crate::functionals::{decompose, eval_unrooted_scaled, Kind};
use crate::quad::QuadOptions;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("chi takes a negative value on [0, 1]")]
    NegativeChi,
    #[error("no atom at location {x}")]
    NoAtomAt { x: f64 },
    #[error("psi must be nonincreasing on the support for the upward stretch")]
    NotNonincreasing,
    #[error("psi must be nonnegative on the support")]
    NegativePsi,
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Which stretch a de-atomization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StretchKind {
    Up,
    Down,
}

/// Result of a stretch: the transformed pair plus the `p`-moment
/// `int |psi|^p dF` and the relevant Hardy functional on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformOutput {
    pub dist: Distribution,
    pub psi: StepFunction,
    pub norm_before: f64,
    pub norm_after: f64,
    pub functional_before: f64,
    pub functional_after: f64,
}

/// Nonincreasing rearrangement of a nonnegative step function on `[0, 1]`:
/// the quantile `G^{-1}(1 - u)` of the law of `chi(U)` for uniform `U`.
/// Computed exactly by sorting the value pieces in descending order, so
/// every `p`-norm is preserved by construction.
pub fn decreasing_rearrangement(chi: &StepFunction) -> Result<StepFunction, TransformError> {
    let mut pieces: Vec<(f64, f64)> = Vec::new(); // (value, length)
    let mut x = 0.0;
    for &b in chi.breakpoints() {
        if b > 0.0 && b < 1.0 {
            if b > x {
                pieces.push((chi.eval(x), b - x));
            }
            x = b;
        }
    }
    if x < 1.0 {
        pieces.push((chi.eval(x), 1.0 - x));
    }
    if pieces.iter().any(|&(v, _)| v < 0.0) {
        return Err(TransformError::NegativeChi);
    }
    pieces.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut bps = Vec::with_capacity(pieces.len().saturating_sub(1));
    let mut vals = Vec::with_capacity(pieces.len());
    let mut cum = 0.0;
    for (v, len) in pieces {
        if !vals.is_empty() {
            bps.push(cum);
        }
        vals.push(v);
        cum += len;
    }
    Ok(StepFunction::new(bps, vals)
        .expect("sorted pieces form a valid step")
        .canonical())
}

fn shift_breakpoints(psi: &StepFunction, pivot: f64, delta: f64, below: bool) -> StepFunction {
    // Moves breakpoints on one side of the pivot; values are unchanged,
    // which realizes the stretched psi on the stretched coordinates.
    let bps = psi
        .breakpoints()
        .iter()
        .map(|&b| {
            if below {
                if b <= pivot {
                    b + delta
                } else {
                    b
                }
            } else if b > pivot {
                b + delta
            } else {
                b
            }
        })
        .collect();
    StepFunction::new(bps, psi.values().to_vec()).expect("shift preserves ordering")
}

fn functional_value(
    d: &Distribution,
    psi: &StepFunction,
    p: f64,
    kind: StretchKind,
    q: &QuadOptions,
) -> f64 {
    let k = match kind {
        StretchKind::Up => Kind::HardyGt1,
        StretchKind::Down => Kind::HardyLt1,
    };
    eval_unrooted_scaled(d, &psi.abs(), p, k, q).value
}

fn stretch(
    d: &Distribution,
    psi: &StepFunction,
    atom_location: f64,
    p: PNorm,
    kind: StretchKind,
) -> Result<TransformOutput, TransformError> {
    let atom = d
        .atom_at(atom_location)
        .ok_or(TransformError::NoAtomAt { x: atom_location })?;
    match kind {
        StretchKind::Up => {
            if !psi.is_nonnegative_on(d) {
                return Err(TransformError::NegativePsi);
            }
            match psi.monotonicity_on(d) {
                Some(Monotonicity::Nonincreasing) | Some(Monotonicity::Constant) => {}
                _ => return Err(TransformError::NotNonincreasing),
            }
        }
        StretchKind::Down => {
            if !psi.is_nonnegative_on(d) {
                return Err(TransformError::NegativePsi);
            }
        }
    }
    let pa = atom.mass;
    let a = atom.x;
    let mut atoms: Vec<Atom> = Vec::with_capacity(d.atoms().len() - 1);
    let mut segments: Vec<Segment> = Vec::with_capacity(d.segments().len() + 1);
    match kind {
        StretchKind::Up => {
            for &t in d.atoms() {
                if t.x < a {
                    atoms.push(t);
                } else if t.x > a {
                    atoms.push(Atom {
                        x: t.x + pa,
                        mass: t.mass,
                    });
                }
            }
            for &s in d.segments() {
                if s.lo >= a {
                    segments.push(Segment {
                        lo: s.lo + pa,
                        hi: s.hi + pa,
                        mass: s.mass,
                    });
                } else {
                    segments.push(s);
                }
            }
            segments.push(Segment {
                lo: a,
                hi: a + pa,
                mass: pa,
            });
        }
        StretchKind::Down => {
            for &t in d.atoms() {
                if t.x < a {
                    atoms.push(Atom {
                        x: t.x - pa,
                        mass: t.mass,
                    });
                } else if t.x > a {
                    atoms.push(t);
                }
            }
            for &s in d.segments() {
                if s.hi <= a {
                    segments.push(Segment {
                        lo: s.lo - pa,
                        hi: s.hi - pa,
                        mass: s.mass,
                    });
                } else {
                    segments.push(s);
                }
            }
            segments.push(Segment {
                lo: a - pa,
                hi: a,
                mass: pa,
            });
        }
    }
    let new_dist = Distribution::new_canonical(atoms, segments)?;
    let new_psi = match kind {
        StretchKind::Up => shift_breakpoints(psi, a, pa, false),
        StretchKind::Down => shift_breakpoints(psi, a, -pa, true),
    }
    .canonical();

    let q = QuadOptions {
        tol: 1e-12,
        max_depth: 64,
    };
    let pf = p.p();
    Ok(TransformOutput {
        norm_before: d.moment_abs_pow(psi, pf),
        norm_after: new_dist.moment_abs_pow(&new_psi, pf),
        functional_before: functional_value(d, psi, pf, kind, &q),
        functional_after: functional_value(&new_dist, &new_psi, pf, kind, &q),
        dist: new_dist,
        psi: new_psi,
    })
}

/// Upward stretch of the atom at `atom_location`: requires `psi`
/// nonnegative and nonincreasing on the support. Preserves
/// `int psi^p dF` for every `p` and never decreases the Hardy `p > 1`
/// functional.
pub fn stretch_up(
    d: &Distribution,
    psi: &StepFunction,
    atom_location: f64,
    p: PNorm,
) -> Result<TransformOutput, TransformError> {
    stretch(d, psi, atom_location, p, StretchKind::Up)
}

/// Downward stretch of the atom at `atom_location`: requires `psi`
/// nonnegative on the support. Preserves `int psi^p dF` and never
/// increases the Hardy `p < 1` functional.
pub fn stretch_down(
    d: &Distribution,
    psi: &StepFunction,
    atom_location: f64,
    p: PNorm,
) -> Result<TransformOutput, TransformError> {
    stretch(d, psi, atom_location, p, StretchKind::Down)
}

/// Applies the chosen stretch to the lowest atom, rescanning after each
/// step (stretching shifts the remaining locations), until the law is
/// continuous. Finite atom lists terminate in exactly `#atoms` steps.
pub fn de_atomize(
    d: &Distribution,
    psi: &StepFunction,
    kind: StretchKind,
    p: PNorm,
) -> Result<TransformOutput, TransformError> {
    let q = QuadOptions {
        tol: 1e-12,
        max_depth: 64,
    };
    let pf = p.p();
    let norm_before = d.moment_abs_pow(psi, pf);
    let functional_before = functional_value(d, psi, pf, kind, &q);
    let mut cur_d = d.clone();
    let mut cur_psi = psi.clone();
    while let Some(atom) = cur_d.atoms().first().copied() {
        let step = stretch(&cur_d, &cur_psi, atom.x, p, kind)?;
        cur_d = step.dist;
        cur_psi = step.psi;
    }
    Ok(TransformOutput {
        norm_before,
        norm_after: cur_d.moment_abs_pow(&cur_psi, pf),
        functional_before,
        functional_after: functional_value(&cur_d, &cur_psi, pf, kind, &q),
        dist: cur_d,
        psi: cur_psi,
    })
}

/// The step function `v -> psi(F^{-1}(v))` on `[0, 1]`, exact from the
/// event decomposition. For continuous laws the Hardy `p > 1` left side of
/// `(d, psi)` equals that of `(uniform(0,1), psi_in_quantile_domain)`.
pub fn psi_in_quantile_domain(d: &Distribution, psi: &StepFunction) -> StepFunction {
    let ev = decompose(d, psi);
    let mut bps = Vec::new();
    let mut vals = vec![ev[0].psi];
    for e in ev.iter().skip(1) {
        if e.u0 > 0.0 && e.u0 < 1.0 {
            bps.push(e.u0);
            vals.push(e.psi);
        }
    }
    StepFunction::new(bps, vals)
        .expect("event boundaries are increasing")
        .canonical()
}
