//! `hardy` — numerical verification of probabilistic Hardy and Copson
//! inequalities for mixed laws and step-function integrands.
//!
//! Exit codes: 0 when the inequality is satisfied (or the command
//! succeeded), 2 when an inequality is violated beyond tolerance, 1 on
//! input errors.

mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardy_core::{
    de_atomize, decreasing_rearrangement, eval_classic_integral, eval_copson, eval_discrete,
    eval_hardy_gt1, eval_hardy_lt1, eval_p1_bounds, limit_study, mc_estimate,
    power_integral_identity, solve_alpha, stretch_down, stretch_up, suite, Distribution,
    EvalOptions, Functional, IdentityMode, Monotonicity, PNorm, Regime, SequenceInput,
    StepFunction, StretchKind, VerificationReport,
};
use report::McBlock;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hardy",
    version,
    about = "Evaluate probabilistic Hardy and Copson inequalities, their classic forms, and the constructive transforms behind them"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one inequality and emit a JSON report
    Verify(VerifyArgs),
    /// Solve the sharpened-constant root equation
    Alpha(AlphaArgs),
    /// Apply a constructive transform (stretch, de-atomize, rearrange)
    Transform(TransformArgs),
    /// Check a power-integral identity
    Identity(IdentityArgs),
    /// Embed a sequence into grid laws of growing size K and tabulate
    LimitStudy(LimitStudyArgs),
    /// Run the randomized property suite
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoremFlag {
    HardyGt1,
    HardyLt1,
    Copson,
    ClassicIntegralGt1,
    ClassicIntegralLt1,
    DiscreteGt1,
    DiscreteLt1,
    P1Bounds,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which inequality to evaluate
    #[arg(long, value_enum)]
    theorem: TheoremFlag,
    /// Distribution JSON file
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Step-function JSON file
    #[arg(long)]
    psi: Option<PathBuf>,
    /// Sequence JSON file
    #[arg(long)]
    seq: Option<PathBuf>,
    /// Norm parameter p; defaults to 1 for p1-bounds
    #[arg(long)]
    p: Option<f64>,
    /// Absolute quadrature tolerance
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    /// RNG seed for the Monte Carlo cross-check
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo trials; 0 skips the cross-check
    #[arg(long, default_value_t = 0)]
    mc_n: usize,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AlphaArgs {
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    psi: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformKind {
    StretchUp,
    StretchDown,
    DeatomizeUp,
    DeatomizeDown,
    Rearrange,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    kind: TransformKind,
    /// Distribution JSON file (not used by rearrange)
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Step-function JSON file (the chi on [0,1] for rearrange)
    #[arg(long)]
    psi: PathBuf,
    /// Norm parameter for the reported moments and functionals
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Atom location for stretch-up / stretch-down
    #[arg(long)]
    atom: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IdentityModeFlag {
    Lower,
    Tail,
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    psi: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, value_enum)]
    mode: IdentityModeFlag,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LimitStudyArgs {
    #[arg(long)]
    seq: PathBuf,
    #[arg(long)]
    p: f64,
    /// Comma-separated grid sizes, e.g. 10,100,1000
    #[arg(long, value_delimiter = ',')]
    k: Vec<u64>,
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    /// Trials per Monte Carlo agreement case
    #[arg(long, default_value_t = 1_000_000)]
    mc_n: usize,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Verify(args) => run_verify(args),
        Cmd::Alpha(args) => run_alpha(args),
        Cmd::Transform(args) => run_transform(args),
        Cmd::Identity(args) => run_identity(args),
        Cmd::LimitStudy(args) => run_limit_study(args),
        Cmd::Suite(args) => run_suite(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))
}

fn load_dist(path: &Path) -> Result<Distribution, InputError> {
    Distribution::from_json_str(&read_to_string(path)?)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_psi(path: &Path) -> Result<StepFunction, InputError> {
    StepFunction::from_json_str(&read_to_string(path)?)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_seq(path: &Path) -> Result<SequenceInput, InputError> {
    SequenceInput::from_json_str(&read_to_string(path)?)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<(), InputError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| InputError(format!("cannot write {}: {e}", path.display()))),
    }
}

fn require<T>(opt: Option<T>, what: &str, theorem: TheoremFlag) -> Result<T, InputError> {
    opt.ok_or_else(|| InputError(format!("--{what} is required for {theorem:?}")))
}

fn pnorm_for(theorem: TheoremFlag, p: Option<f64>) -> Result<PNorm, InputError> {
    let p = match (theorem, p) {
        (TheoremFlag::P1Bounds, None) => 1.0,
        (_, Some(p)) => p,
        (_, None) => return Err(InputError("--p is required".to_string())),
    };
    let pn = PNorm::new(p)?;
    let ok = match theorem {
        TheoremFlag::HardyGt1
        | TheoremFlag::ClassicIntegralGt1
        | TheoremFlag::DiscreteGt1 => pn.regime() == Regime::Gt1,
        TheoremFlag::HardyLt1
        | TheoremFlag::ClassicIntegralLt1
        | TheoremFlag::DiscreteLt1 => pn.regime() == Regime::Lt1,
        TheoremFlag::Copson => true,
        TheoremFlag::P1Bounds => pn.regime() == Regime::Eq1,
    };
    if !ok {
        return Err(InputError(format!(
            "p = {p} is outside the regime of {theorem:?}"
        )));
    }
    Ok(pn)
}

fn run_verify(args: VerifyArgs) -> Result<u8, InputError> {
    let p = pnorm_for(args.theorem, args.p)?;
    let opts = EvalOptions {
        quad_tol: args.quad_tol,
        ..EvalOptions::default()
    };
    let mut mc_functional: Option<Functional> = None;
    let report: VerificationReport = match args.theorem {
        TheoremFlag::HardyGt1 | TheoremFlag::HardyLt1 | TheoremFlag::Copson => {
            let dist = load_dist(&require(args.dist.as_deref(), "dist", args.theorem)?)?;
            let psi = load_psi(&require(args.psi.as_deref(), "psi", args.theorem)?)?;
            let (rep, functional) = match args.theorem {
                TheoremFlag::HardyGt1 => {
                    (eval_hardy_gt1(&dist, &psi, p, &opts)?, Functional::HardyGt1)
                }
                TheoremFlag::HardyLt1 => {
                    (eval_hardy_lt1(&dist, &psi, p, &opts)?, Functional::HardyLt1)
                }
                _ => (eval_copson(&dist, &psi, p, &opts)?, Functional::Copson),
            };
            mc_functional = Some(functional);
            if args.mc_n > 0 {
                let estimate = mc_estimate(
                    &dist,
                    &psi,
                    p,
                    mc_functional.unwrap(),
                    args.seed,
                    args.mc_n,
                )?;
                let agrees = if rep.lhs_unrooted.is_infinite() || estimate.mean.is_infinite() {
                    rep.lhs_unrooted.is_infinite() && estimate.mean.is_infinite()
                } else {
                    (rep.lhs_unrooted - estimate.mean).abs()
                        <= 4.0 * estimate.std_error + 1e-9 * rep.lhs_unrooted.abs().max(1.0)
                };
                let block = McBlock { estimate, agrees };
                return finish_verify(&rep, Some(block), &args.out);
            }
            rep
        }
        TheoremFlag::ClassicIntegralGt1 | TheoremFlag::ClassicIntegralLt1 => {
            let psi = load_psi(&require(args.psi.as_deref(), "psi", args.theorem)?)?;
            eval_classic_integral(&psi, p, &opts)?
        }
        TheoremFlag::DiscreteGt1 | TheoremFlag::DiscreteLt1 => {
            let seq = load_seq(&require(args.seq.as_deref(), "seq", args.theorem)?)?;
            eval_discrete(&seq, p, &opts)?
        }
        TheoremFlag::P1Bounds => {
            let dist = load_dist(&require(args.dist.as_deref(), "dist", args.theorem)?)?;
            let psi = load_psi(&require(args.psi.as_deref(), "psi", args.theorem)?)?;
            let direction = match psi.monotonicity_on(&dist) {
                Some(Monotonicity::Nonincreasing) => Monotonicity::Nonincreasing,
                Some(_) => Monotonicity::Nondecreasing,
                None => {
                    return Err(InputError(
                        "psi is not monotone on the support; p1-bounds needs a monotone psi"
                            .to_string(),
                    ))
                }
            };
            eval_p1_bounds(&dist, &psi, direction, &opts)?
        }
    };
    if args.mc_n > 0 && mc_functional.is_none() {
        return Err(InputError(format!(
            "--mc-n applies only to the probabilistic theorems, not {:?}",
            args.theorem
        )));
    }
    finish_verify(&report, None, &args.out)
}

fn finish_verify(
    report: &VerificationReport,
    mc: Option<McBlock>,
    out: &Option<PathBuf>,
) -> Result<u8, InputError> {
    write_out(out, &report::render_report(report, mc.as_ref()))?;
    Ok(if report.satisfied { 0 } else { 2 })
}

fn run_alpha(args: AlphaArgs) -> Result<u8, InputError> {
    let dist = load_dist(&args.dist)?;
    let psi = load_psi(&args.psi)?;
    let p = PNorm::new(args.p)?;
    let result = solve_alpha(&dist, &psi, p)?;
    let text = format!
        (
        "{{\n  \"alpha\": {},\n  \"residual\": {},\n  \"m1\": {},\n  \"mp\": {},\n  \"iterations\": {}\n}}\n",
        report::fmt_f64(result.alpha),
        report::fmt_f64(result.residual),
        report::fmt_f64(result.m1),
        report::fmt_f64(result.mp),
        result.iterations
    );
    write_out(&args.out, &text)?;
    Ok(0)
}

fn run_transform(args: TransformArgs) -> Result<u8, InputError> {
    let psi = load_psi(&args.psi)?;
    if args.kind == TransformKind::Rearrange {
        let rearranged = decreasing_rearrangement(&psi)?;
        let text = format!(
            "{{\n  \"psi\": {}\n}}\n",
            serde_json::to_string(&rearranged).expect("step serializes")
        );
        write_out(&args.out, &text)?;
        return Ok(0);
    }
    let dist = load_dist(
        &args
            .dist
            .ok_or_else(|| InputError("--dist is required for stretches".to_string()))?,
    )?;
    let p = PNorm::new(args.p)?;
    let output = match args.kind {
        TransformKind::StretchUp | TransformKind::StretchDown => {
            let atom = args
                .atom
                .ok_or_else(|| InputError("--atom is required for single stretches".to_string()))?;
            match args.kind {
                TransformKind::StretchUp => stretch_up(&dist, &psi, atom, p)?,
                _ => stretch_down(&dist, &psi, atom, p)?,
            }
        }
        TransformKind::DeatomizeUp => de_atomize(&dist, &psi, StretchKind::Up, p)?,
        TransformKind::DeatomizeDown => de_atomize(&dist, &psi, StretchKind::Down, p)?,
        TransformKind::Rearrange => unreachable!(),
    };
    let text = format!(
        "{{\n  \"dist\": {},\n  \"psi\": {},\n  \"norm_before\": {},\n  \"norm_after\": {},\n  \"functional_before\": {},\n  \"functional_after\": {}\n}}\n",
        serde_json::to_string(&output.dist).expect("dist serializes"),
        serde_json::to_string(&output.psi).expect("step serializes"),
        report::fmt_f64(output.norm_before),
        report::fmt_f64(output.norm_after),
        report::fmt_f64(output.functional_before),
        report::fmt_f64(output.functional_after),
    );
    write_out(&args.out, &text)?;
    Ok(0)
}

fn run_identity(args: IdentityArgs) -> Result<u8, InputError> {
    let dist = load_dist(&args.dist)?;
    let psi = load_psi(&args.psi)?;
    let p = PNorm::new(args.p)?;
    let mode = match args.mode {
        IdentityModeFlag::Lower => IdentityMode::Lower,
        IdentityModeFlag::Tail => IdentityMode::Tail,
    };
    let rep = power_integral_identity(&dist, &psi, p, mode)?;
    let text = format!(
        "{{\n  \"lhs\": {},\n  \"rhs\": {},\n  \"gap\": {}\n}}\n",
        report::fmt_f64(rep.lhs),
        report::fmt_f64(rep.rhs),
        report::fmt_f64(rep.gap)
    );
    write_out(&args.out, &text)?;
    Ok(0)
}

fn run_limit_study(args: LimitStudyArgs) -> Result<u8, InputError> {
    if args.k.is_empty() {
        return Err(InputError("--k needs at least one grid size".to_string()));
    }
    let seq = load_seq(&args.seq)?;
    let p = PNorm::new(args.p)?;
    if p.regime() == Regime::Eq1 {
        return Err(InputError("limit-study needs p != 1".to_string()));
    }
    let opts = EvalOptions {
        quad_tol: args.quad_tol,
        ..EvalOptions::default()
    };
    let rows = limit_study(&seq, p, &args.k, &opts)?;
    write_out(&args.out, &report::render_limit_csv(&rows))?;
    Ok(0)
}

fn run_suite(args: SuiteArgs) -> Result<u8, InputError> {
    let cfg = suite::SuiteConfig {
        seed: args.seed,
        quad_tol: args.quad_tol,
        mc_n: args.mc_n,
    };
    let results = suite::run_full_suite(&cfg);
    let mut any_failed = false;
    for check in &results {
        if check.passed() {
            println!("ok   {} ({} cases)", check.name, check.cases);
        } else {
            any_failed = true;
            println!(
                "FAIL {} ({} failures / {} cases)",
                check.name,
                check.failures.len(),
                check.cases
            );
            for f in check.failures.iter().take(5) {
                println!("     {f}");
            }
        }
    }
    Ok(if any_failed { 2 } else { 0 })
}
