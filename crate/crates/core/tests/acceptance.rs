//! Acceptance criteria, one PASS/FAIL line each. Tolerances are pinned here.

use std::f64::consts::FRAC_PI_8;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nlcert::certify::{guessing_epsilon, measurement_disturbance, theorem_inequality, CheckOptions};
use nlcert::discrimination::{check_dual, dist_iterative, helstrom_value, DiscriminationInstance};
use nlcert::games::{chsh, classical_value, score};
use nlcert::linalg::{tensor, Complex64, ComplexMatrix, DensityOperator, HermitianOperator};
use nlcert::random::{random_density_any_rank, trial_rng};
use nlcert::strategies::{achieved_correlation, angle_measurement, chsh_optimal_strategy};
use nlcert::sweep::{run_sweep, Check, DimRange, SweepConfig};
use nlcert::tolerances::DEFAULT_DIST_MAX_ITERS;
use rand::Rng;

const SEED: u64 = 20_240_601;
const SLACK: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sweep(check: Check, trials: u64, rhs_scale: f64) -> nlcert::sweep::SweepSummary {
    let mut config = SweepConfig::new(check, trials, SEED);
    config.dims = DimRange { min: 2, max: 4 };
    config.rhs_scale = rhs_scale;
    config.options = CheckOptions { slack: SLACK, ..CheckOptions::default() };
    run_sweep(&config).unwrap()
}

fn criterion_1() -> Outcome {
    let g = chsh();
    let start = Instant::now();
    let v = classical_value(&g).unwrap();
    let elapsed = start.elapsed();
    outcome(
        v.value == 0.75 && elapsed < Duration::from_millis(1),
        format!("classical value {} in {:?}", v.value, elapsed),
    )
}

fn criterion_2() -> Outcome {
    let s = score(&chsh(), &achieved_correlation(&chsh_optimal_strategy()).unwrap()).unwrap();
    let expected = FRAC_PI_8.cos().powi(2);
    outcome(
        (s - expected).abs() <= 1e-7 && (s - 0.8535533906).abs() <= 1e-7,
        format!("score {s:.12}, cos^2(pi/8) = {expected:.12}"),
    )
}

fn criterion_3() -> Outcome {
    let c = nlcert::certify::c_g(&chsh()).unwrap();
    outcome((c - 3.0).abs() <= 1e-12, format!("C_G = {c:.15}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let ga = guessing_epsilon(&chsh(), &chsh_optimal_strategy(), 1e-7).unwrap();
    let elapsed = start.elapsed();
    let expected = 1.0 - FRAC_PI_8.cos().powi(2);
    let err = (ga.epsilon - expected).abs() + ga.dist_gap_budget;
    outcome(
        err <= 1e-5 && (ga.epsilon - 0.1464466).abs() <= 1e-5 && elapsed < Duration::from_secs(5),
        format!("epsilon {:.9} (gap budget {:.1e}) in {:?}", ga.epsilon, ga.dist_gap_budget, elapsed),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let opts = CheckOptions { slack: SLACK, ..CheckOptions::default() };
    let t = theorem_inequality(&chsh(), &chsh_optimal_strategy(), &opts).unwrap();
    // gap = cos²(π/8) − 3/4 and bound = 3√ε = 3 sin(π/8).
    let canonical = t.bound_holds
        && (t.gap - (FRAC_PI_8.cos().powi(2) - 0.75)).abs() < 1e-9
        && (t.bound - 3.0 * FRAC_PI_8.sin()).abs() < 1e-5;
    let s = sweep(Check::Theorem, 200, 1.0);
    let elapsed = start.elapsed();
    outcome(
        canonical && s.failed == 0 && s.config.trials >= 200 && elapsed < Duration::from_secs(120),
        format!("optimal {:.5} <= {:.5}; {s}; {:?}", t.gap, t.bound, elapsed),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityOperator::pure(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap();
    let lambda = DensityOperator::from_matrix(tensor(plus.matrix(), &ComplexMatrix::diag_real(&[0.5, 0.5])).unwrap()).unwrap();
    let r = measurement_disturbance(&lambda, (2, 2), &angle_measurement(0.0), &CheckOptions::default()).unwrap();
    let example = (r.delta - 0.5).abs() <= 1e-9 && (r.disturbance - 1.0).abs() <= 1e-9;
    let s = sweep(Check::Disturbance, 1000, 1.0);
    let elapsed = start.elapsed();
    outcome(
        example && s.failed == 0 && elapsed < Duration::from_secs(120),
        format!("product example delta {:.12} disturbance {:.12}; {s}; {:?}", r.delta, r.disturbance, elapsed),
    )
}

fn criterion_7() -> Outcome {
    let s = sweep(Check::Declassical, 500, 1.0);
    // The sweep marks a trial failed if either the distance bound or the
    // classicality of the declassicalized correlation fails.
    outcome(s.failed == 0, format!("{s}"))
}

fn criterion_8() -> Outcome {
    let mut worst_diff = 0.0f64;
    let mut worst_violation = 0.0f64;
    let mut worst_gap = 0.0f64;
    for t in 0..500 {
        let mut rng = trial_rng(SEED, t);
        let w: f64 = rng.gen_range(0.05..0.95);
        let states: Vec<HermitianOperator> = [w, 1.0 - w]
            .iter()
            .map(|wi| random_density_any_rank(2, &mut rng).op().scale(*wi))
            .collect();
        let closed = helstrom_value(&states[0], &states[1]).unwrap();
        let inst = DiscriminationInstance::new(states).unwrap();
        let r = dist_iterative(&inst, 1e-7, DEFAULT_DIST_MAX_ITERS).unwrap();
        worst_diff = worst_diff.max((r.value - closed).abs());
        worst_violation = worst_violation.max(check_dual(&inst, &r.dual_certificate).unwrap().max_violation);
        worst_gap = worst_gap.max(r.primal_dual_gap);
    }
    outcome(
        worst_diff <= 1e-6 && worst_violation <= 1e-8 && worst_gap <= 1e-7,
        format!("max |iterative - closed form| {worst_diff:.2e}, max dual violation {worst_violation:.2e}, max gap {worst_gap:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for check in [Check::Disturbance, Check::Declassical, Check::Theorem] {
        let s = sweep(check, 1000, 0.5);
        pass &= s.failed > 0;
        parts.push(format!(
            "{check}: {} counterexamples, worst margin {:.3e}",
            s.failed,
            s.worst_margin.unwrap_or(f64::NAN)
        ));
    }
    outcome(pass, format!("halved bounds; {}", parts.join("; ")))
}

fn criterion_10() -> Outcome {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_nlcert"))
            .arg("analyze")
            .arg(fixtures.join("chsh.json"))
            .arg(fixtures.join("chsh_opt.json"))
            .args(["--seed", "42", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        (status.code(), std::fs::read(out).unwrap_or_default())
    };
    let (c1, a) = run("first.json");
    let (c2, b) = run("second.json");
    outcome(
        c1 == Some(0) && c2 == Some(0) && !a.is_empty() && a == b,
        format!("{} bytes, identical = {}", a.len(), a == b),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("classical value of CHSH", criterion_1),
        ("optimal CHSH score", criterion_2),
        ("C_G for CHSH", criterion_3),
        ("epsilon for the optimal CHSH strategy", criterion_4),
        ("score-gap inequality", criterion_5),
        ("measurement-disturbance inequality", criterion_6),
        ("declassicalization inequality and classicality", criterion_7),
        ("discrimination solver", criterion_8),
        ("mutation self-test", criterion_9),
        ("determinism of analyze", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("criterion {}: {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
