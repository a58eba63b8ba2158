//! Drives every named property check with the default configuration.

use hardy_core::suite::{self, SuiteConfig};
use hardy_core::{Functional, StretchKind};

fn assert_clean(result: suite::CheckResult) {
    assert!(
        result.passed(),
        "{} failed on {}/{} cases:\n{}",
        result.name,
        result.failures.len(),
        result.cases,
        result.failures.join("\n")
    );
    println!("ok {} ({} cases)", result.name, result.cases);
}

#[test]
fn dist_galois_and_monotonicity() {
    assert_clean(suite::check_galois(&SuiteConfig::default()));
}

#[test]
fn dist_atomic_integration_is_bit_exact() {
    assert_clean(suite::check_atomic_integrate_exact(&SuiteConfig::default()));
}

#[test]
fn dist_sampling_stays_in_dkw_band() {
    assert_clean(suite::check_dkw(&SuiteConfig::default()));
}

#[test]
fn transforms_rearrangement_properties() {
    assert_clean(suite::check_rearrangement(&SuiteConfig::default()));
}

#[test]
fn transforms_stretch_up_properties() {
    assert_clean(suite::check_stretch(&SuiteConfig::default(), StretchKind::Up));
}

#[test]
fn transforms_stretch_down_properties() {
    assert_clean(suite::check_stretch(
        &SuiteConfig::default(),
        StretchKind::Down,
    ));
}

#[test]
fn inequality_hardy_gt1_500_cases() {
    assert_clean(suite::check_inequality(
        &SuiteConfig::default(),
        Functional::HardyGt1,
        false,
    ));
}

#[test]
fn inequality_hardy_lt1_500_cases() {
    assert_clean(suite::check_inequality(
        &SuiteConfig::default(),
        Functional::HardyLt1,
        false,
    ));
}

#[test]
fn inequality_copson_ge1_500_cases() {
    assert_clean(suite::check_inequality(
        &SuiteConfig::default(),
        Functional::Copson,
        false,
    ));
}

#[test]
fn inequality_copson_lt1_500_cases() {
    assert_clean(suite::check_inequality(
        &SuiteConfig::default(),
        Functional::Copson,
        true,
    ));
}

#[test]
fn functionals_bound_ordering() {
    assert_clean(suite::check_bound_ordering(&SuiteConfig::default()));
}

#[test]
fn functionals_domain_identity() {
    assert_clean(suite::check_domain_identity(&SuiteConfig::default()));
}

#[test]
fn functionals_scaling_covariance() {
    assert_clean(suite::check_scaling(&SuiteConfig::default()));
}

#[test]
fn functionals_rearrangement_dominance() {
    assert_clean(suite::check_rearrangement_dominance(&SuiteConfig::default()));
}

#[test]
fn alpha_solver_properties() {
    assert_clean(suite::check_alpha(&SuiteConfig::default()));
}

#[test]
fn oracle_atomic_agreement() {
    assert_clean(suite::check_oracle_atomic(&SuiteConfig::default()));
}

#[test]
fn oracle_mc_agreement() {
    assert_clean(suite::check_oracle_mc(&SuiteConfig::default()));
}

#[test]
fn oracle_power_integral_identities() {
    assert_clean(suite::check_identity(&SuiteConfig::default()));
}
