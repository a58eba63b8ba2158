//! Acceptance suite: one test per criterion, each printing a pass line
//! with the measured quantities. Run with
//! `cargo test -p hardy-cli --test acceptance`.

use hardy_core::suite::{self, SuiteConfig};
use hardy_core::{
    eval_copson, eval_discrete, eval_hardy_gt1, eval_hardy_lt1, limit_study, Distribution,
    EvalOptions, Functional, PNorm, Segment, SequenceInput, StepFunction, StretchKind, TailSpec,
};
use std::f64::consts::PI;
use std::time::Instant;

fn uniform01() -> Distribution {
    Distribution::new(
        vec![],
        vec![Segment {
            lo: 0.0,
            hi: 1.0,
            mass: 1.0,
        }],
    )
    .unwrap()
}

fn assert_check(result: suite::CheckResult) {
    assert!(
        result.passed(),
        "{} failed on {}/{} cases:\n{}",
        result.name,
        result.failures.len(),
        result.cases,
        result.failures.join("\n")
    );
}

#[test]
fn criterion_1_constant_psi_equality() {
    let start = Instant::now();
    let d = uniform01();
    let psi = StepFunction::constant(1.0);
    let opts = EvalOptions::default();
    for p in [1.5, 2.0, 3.0] {
        let rep = eval_hardy_gt1(&d, &psi, PNorm::new(p).unwrap(), &opts).unwrap();
        let rhs = rep.rhs_sharpened.unwrap();
        assert!(
            (rep.lhs - rhs).abs() <= 1e-9,
            "p={p}: |lhs - rhs_sharpened| = {}",
            (rep.lhs - rhs).abs()
        );
        let alpha = rep.alpha.unwrap();
        assert!((alpha - 1.0).abs() <= 1e-12, "p={p}: alpha = {alpha}");
        assert!(rep.satisfied);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 1: equality holds for p in {{1.5, 2, 3}} in {elapsed:?}");
}

#[test]
fn criterion_2_randomized_inequality_suite() {
    let start = Instant::now();
    let cfg = SuiteConfig::default();
    assert_check(suite::check_inequality(&cfg, Functional::HardyGt1, false));
    assert_check(suite::check_inequality(&cfg, Functional::HardyLt1, false));
    assert_check(suite::check_inequality(&cfg, Functional::Copson, false));
    assert_check(suite::check_inequality(&cfg, Functional::Copson, true));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("criterion 2: 2000 randomized cases, zero violations, in {elapsed:?}");
}

#[test]
fn criterion_3_alpha_solver() {
    // Residual bound and brackets on 500 cases, p = 2 closed form on 300,
    // and 10^4 convexity triples.
    assert_check(suite::check_alpha(&SuiteConfig::default()));
    println!("criterion 3: alpha residuals, closed form and convexity probes pass");
}

#[test]
fn criterion_4_derived_constants() {
    let d = uniform01();
    let psi = StepFunction::constant(1.0);
    let opts = EvalOptions::default();

    // int_0^1 (-ln x)^2 dx = 2
    let sq = eval_copson(&d, &psi, PNorm::new(2.0).unwrap(), &opts).unwrap();
    assert!((sq.lhs_unrooted - 2.0).abs() <= 1e-8, "{}", sq.lhs_unrooted);

    // int_0^1 sqrt(-ln x) dx = sqrt(pi)/2
    let rt = eval_copson(&d, &psi, PNorm::new(0.5).unwrap(), &opts).unwrap();
    assert!(
        (rt.lhs_unrooted - PI.sqrt() / 2.0).abs() <= 1e-8,
        "{}",
        rt.lhs_unrooted
    );

    // int_0^1 sqrt((1-x)/x) dx = pi/2
    let beta = eval_hardy_lt1(&d, &psi, PNorm::new(0.5).unwrap(), &opts).unwrap();
    assert!(
        (beta.lhs_unrooted - PI / 2.0).abs() <= 1e-8,
        "{}",
        beta.lhs_unrooted
    );
    println!(
        "criterion 4: Gamma(3)={:.10}, Gamma(3/2)={:.10}, Beta(3/2,1/2)={:.10}",
        sq.lhs_unrooted, rt.lhs_unrooted, beta.lhs_unrooted
    );
}

#[test]
fn criterion_5_discrete_hardy_desk_check() {
    let start = Instant::now();
    let seq = SequenceInput::new(vec![1.0], TailSpec::Zeros).unwrap();
    let opts = EvalOptions::default(); // 10^6 explicit terms
    let rep = eval_discrete(&seq, PNorm::new(2.0).unwrap(), &opts).unwrap();
    let basel = PI * PI / 6.0;
    assert!(
        (rep.lhs - basel).abs() <= rep.quad_error,
        "bracket {} +- {} misses pi^2/6",
        rep.lhs,
        rep.quad_error
    );
    assert!(rep.quad_error < 1e-6, "bracket width {}", rep.quad_error);
    assert_eq!(rep.rhs_classic, 4.0);
    assert!(rep.satisfied);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 5: bracket {} +- {:.2e} contains pi^2/6, rhs = 4, in {elapsed:?}",
        rep.lhs, rep.quad_error
    );
}

#[test]
fn criterion_6_limit_study() {
    let opts = EvalOptions::default();

    // p > 1: alpha_K strictly decreasing, scaled LHS within 1/K of classic.
    let seq = SequenceInput::new(vec![1.0], TailSpec::Zeros).unwrap();
    let rows = limit_study(&seq, PNorm::new(2.0).unwrap(), &[10, 100, 1000], &opts).unwrap();
    let mut prev = f64::INFINITY;
    for row in &rows {
        let alpha = row.alpha.expect("p > 1 rows carry alpha");
        assert!(alpha < prev, "alpha_K not strictly decreasing: {rows:?}");
        assert!(
            row.gap_to_classic < 1.0 / row.k as f64,
            "K={}: gap {} >= 1/K",
            row.k,
            row.gap_to_classic
        );
        prev = alpha;
    }

    // 0 < p < 1: the K = 1000 row agrees with the sequence form's left side.
    let seq = SequenceInput::new(vec![1.0, 0.5, 0.25], TailSpec::Zeros).unwrap();
    let p = PNorm::new(0.5).unwrap();
    let rows_lt1 = limit_study(&seq, p, &[1000], &opts).unwrap();
    let classic = eval_discrete(&seq, p, &opts).unwrap().lhs;
    assert!(
        (rows_lt1[0].scaled_lhs - classic).abs() <= 1e-3,
        "{} vs {}",
        rows_lt1[0].scaled_lhs,
        classic
    );
    println!(
        "criterion 6: alpha_K = {:?}, lt1 row {} vs classic {}",
        rows.iter().map(|r| r.alpha.unwrap()).collect::<Vec<_>>(),
        rows_lt1[0].scaled_lhs,
        classic
    );
}

#[test]
fn criterion_7_transform_invariants() {
    let cfg = SuiteConfig::default();
    assert_check(suite::check_stretch(&cfg, StretchKind::Up));
    assert_check(suite::check_stretch(&cfg, StretchKind::Down));
    assert_check(suite::check_rearrangement(&cfg));
    println!("criterion 7: 200 up-stretches, 200 down-stretches and 200 rearrangements pass");
}

#[test]
fn criterion_8_oracle_agreement() {
    let cfg = SuiteConfig::default();
    assert_check(suite::check_oracle_atomic(&cfg));
    assert_check(suite::check_oracle_mc(&cfg));
    assert_check(suite::check_identity(&cfg));
    println!("criterion 8: enumeration, Monte Carlo and identity oracles agree");
}

#[test]
fn criterion_9_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let dist_path = dir.path().join("mixed.json");
    std::fs::write(
        &dist_path,
        r#"{"atoms":[{"x":0.0,"mass":0.25}],"segments":[{"lo":0.5,"hi":2.0,"mass":0.75}]}"#,
    )
    .unwrap();
    let psi_path = dir.path().join("psi.json");
    std::fs::write(
        &psi_path,
        r#"{"breakpoints":[0.7,1.3],"values":[3.0,1.5,0.25]}"#,
    )
    .unwrap();
    let run = || {
        std::process::Command::new(env!("CARGO_BIN_EXE_hardy"))
            .args([
                "verify",
                "--theorem",
                "copson",
                "--dist",
                dist_path.to_str().unwrap(),
                "--psi",
                psi_path.to_str().unwrap(),
                "--p",
                "1.7",
                "--mc-n",
                "50000",
                "--seed",
                "42",
            ])
            .output()
            .expect("binary runs")
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout, "reports must be byte-identical");
    println!("criterion 9: repeated runs are byte-identical ({} bytes)", a.stdout.len());
}
