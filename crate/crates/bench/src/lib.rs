//! Shared fixtures for the evaluator benchmarks.

use hardy_core::suite::{self, LawShape};
use hardy_core::{Distribution, StepFunction};

/// A representative mixed law and step function, deterministic by seed.
pub fn fixture(seed: u64) -> (Distribution, StepFunction) {
    let mut rng = suite::rng(seed);
    let d = suite::random_distribution(&mut rng, LawShape::Mixed);
    let psi = suite::random_step(&mut rng, 8, d.support_min(), d.support_max(), false);
    (d, psi)
}

/// A continuous law (segments only), deterministic by seed.
pub fn continuous_fixture(seed: u64) -> (Distribution, StepFunction) {
    let mut rng = suite::rng(seed);
    let d = suite::random_distribution(&mut rng, LawShape::Continuous);
    let psi = suite::random_step(&mut rng, 8, d.support_min(), d.support_max(), false);
    (d, psi)
}
