//! Seeded randomized sweeps of the three bound checks.
//!
//! Trial `i` draws its instance from `trial_rng(seed, i)`, so a sweep is
//! reproducible for a given seed regardless of thread count. Trials run on the
//! rayon pool and are collected in index order.
//!
//! `rhs_scale` multiplies every bound before comparison. It exists so that a
//! deliberately weakened checker (scale < 1) can be shown to catch failures.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::certify::{
    declassicalize, measurement_disturbance, theorem_inequality_with, CheckOptions, CLASSICALITY_TOL,
};
use crate::error::{Error, Result};
use crate::games::{chsh, classical_value, Alphabets};
use crate::io::{matrix_to_json, write_canonical, GameFile, StrategyFile};
use crate::linalg::{tensor, DensityOperator};
use crate::random::{
    perturbed_chsh_strategy, random_density_any_rank, random_game, random_projective, random_pure_vector,
    random_strategy, trial_rng,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Disturbance,
    Declassical,
    Theorem,
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disturbance" => Ok(Self::Disturbance),
            "declassical" => Ok(Self::Declassical),
            "theorem" => Ok(Self::Theorem),
            other => Err(Error::Parse(format!(
                "unknown check {other:?}; expected disturbance, declassical or theorem"
            ))),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Disturbance => "disturbance",
            Self::Declassical => "declassical",
            Self::Theorem => "theorem",
        })
    }
}

/// Inclusive range of local dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DimRange {
    pub min: usize,
    pub max: usize,
}

impl Default for DimRange {
    fn default() -> Self {
        Self { min: 2, max: 4 }
    }
}

impl DimRange {
    fn sample(&self, rng: &mut impl Rng) -> usize {
        rng.gen_range(self.min..=self.max)
    }
}

/// Accepts `N`, `M..N` or `M..=N` (both inclusive).
impl FromStr for DimRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid dimension range {s:?}; expected N or M..N"));
        let (min, max) = match s.split_once("..") {
            Some((lo, hi)) => {
                let hi = hi.strip_prefix('=').unwrap_or(hi);
                (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?)
            }
            None => {
                let n: usize = s.trim().parse().map_err(|_| bad())?;
                (n, n)
            }
        };
        if min < 2 || min > max {
            return Err(Error::Parse(format!("dimension range {s:?} must satisfy 2 ≤ min ≤ max")));
        }
        Ok(Self { min, max })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub check: Check,
    pub trials: u64,
    pub seed: u64,
    pub dims: DimRange,
    pub rhs_scale: f64,
    pub options: CheckOptions,
}

impl SweepConfig {
    pub fn new(check: Check, trials: u64, seed: u64) -> Self {
        Self {
            check,
            trials,
            seed,
            dims: DimRange::default(),
            rhs_scale: 1.0,
            options: CheckOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub trial: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub reason: String,
    pub instance: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub config: SweepConfig,
    pub passed: u64,
    pub failed: u64,
    /// Smallest `rhs·scale + slack − lhs` over all trials.
    pub worst_margin: Option<f64>,
    pub worst_trial: Option<u64>,
    pub counterexamples: Vec<Counterexample>,
    pub warnings: Vec<String>,
}

impl SweepSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// Writes the counterexamples (if any) to `<dir>/counterexamples-<check>.json`.
    pub fn write_counterexamples(&self, dir: &Path) -> Result<Option<PathBuf>> {
        if self.counterexamples.is_empty() {
            return Ok(None);
        }
        let path = dir.join(format!("counterexamples-{}.json", self.config.check));
        write_canonical(
            &path,
            &json!({
                "check": self.config.check,
                "seed": self.config.seed,
                "rhs_scale": self.config.rhs_scale,
                "options": self.config.options,
                "counterexamples": self.counterexamples,
            }),
        )?;
        Ok(Some(path))
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        write!(
            f,
            "{}: {}/{} passed",
            self.config.check, self.passed, self.config.trials
        )?;
        if let (Some(m), Some(t)) = (self.worst_margin, self.worst_trial) {
            write!(f, ", worst margin {m:.6e} (trial {t})")?;
        }
        Ok(())
    }
}

struct TrialResult {
    lhs: f64,
    rhs: f64,
    margin: f64,
    failure: Option<String>,
    instance: Value,
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepSummary> {
    let mut warnings = Vec::new();
    if config.trials == 0 {
        warnings.push("0 trials requested; the sweep passes vacuously".to_string());
    }
    // ω_c of CHSH is needed by every theorem trial; compute it once.
    let chsh_value = classical_value(&chsh())?.value;
    let results: Vec<Result<TrialResult>> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, i);
            match config.check {
                Check::Disturbance => disturbance_trial(i, config, &mut rng),
                Check::Declassical => declassical_trial(i, config, &mut rng),
                Check::Theorem => theorem_trial(i, config, chsh_value, &mut rng),
            }
        })
        .collect();

    let mut summary = SweepSummary {
        config: config.clone(),
        passed: 0,
        failed: 0,
        worst_margin: None,
        worst_trial: None,
        counterexamples: Vec::new(),
        warnings,
    };
    for (i, r) in results.into_iter().enumerate() {
        let r = r?;
        let trial = i as u64;
        if summary.worst_margin.is_none_or(|w| r.margin < w) {
            summary.worst_margin = Some(r.margin);
            summary.worst_trial = Some(trial);
        }
        match r.failure {
            None => summary.passed += 1,
            Some(reason) => {
                summary.failed += 1;
                summary.counterexamples.push(Counterexample {
                    trial,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    margin: r.margin,
                    reason,
                    instance: r.instance,
                });
            }
        }
    }
    Ok(summary)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("instances serialize")
}

/// Mixed, pure entangled and pure-product states in rotation; the product family
/// sits close to equality in the disturbance bound.
fn disturbance_trial(i: u64, config: &SweepConfig, rng: &mut impl Rng) -> Result<TrialResult> {
    let da = config.dims.sample(rng);
    let db = config.dims.sample(rng);
    let n = rng.gen_range(2..=da);
    let lambda = match i % 3 {
        0 => random_density_any_rank(da * db, rng),
        1 => DensityOperator::pure(&random_pure_vector(da * db, rng))?,
        _ => {
            let a = DensityOperator::pure(&random_pure_vector(da, rng))?;
            let b = random_density_any_rank(db, rng);
            DensityOperator::from_matrix(tensor(a.matrix(), b.matrix())?)?
        }
    };
    let f = random_projective(da, n, rng);
    let r = measurement_disturbance(&lambda, (da, db), &f, &config.options)?;
    let margin = r.margin(config.rhs_scale, config.options.slack);
    Ok(TrialResult {
        lhs: r.disturbance,
        rhs: r.bound * config.rhs_scale,
        margin,
        failure: (margin < 0.0).then(|| "disturbance exceeds bound".to_string()),
        instance: json!({
            "dims": [da, db],
            "lambda": matrix_to_json(lambda.matrix()),
            "f": f.iter().map(|p| matrix_to_json(p.matrix())).collect::<Vec<_>>(),
            "delta": r.delta,
            "solver_gap": r.solver_gap,
        }),
    })
}

/// Random games with random projective-Alice strategies, alternating with
/// noisy CHSH strategies on the CHSH game.
fn declassical_trial(i: u64, config: &SweepConfig, rng: &mut impl Rng) -> Result<TrialResult> {
    let sizes = Alphabets::binary();
    let (game, strategy) = if i.is_multiple_of(2) {
        let game = random_game(sizes, rng);
        let (dd, de) = (config.dims.sample(rng), config.dims.sample(rng));
        (game, random_strategy(sizes, dd, de, true, rng)?)
    } else {
        (chsh(), perturbed_chsh_strategy(rng)?)
    };
    let omega_c = classical_value(&game)?.value;
    let d = declassicalize(&game, &strategy, &config.options)?;
    let margin = d.margin(config.rhs_scale, config.options.slack);
    let mut failure = (margin < 0.0).then(|| "declassicalized distance exceeds bound".to_string());
    if d.pbar_score > omega_c + CLASSICALITY_TOL {
        failure = Some(format!(
            "declassicalized score {} exceeds classical value {omega_c}",
            d.pbar_score
        ));
    }
    Ok(TrialResult {
        lhs: d.distance,
        rhs: d.bound * config.rhs_scale,
        margin,
        failure,
        instance: json!({
            "game": to_value(&GameFile::from_game(&game)),
            "strategy": to_value(&StrategyFile::from_strategy(&strategy)),
            "delta": d.delta.delta,
            "pbar_score": d.pbar_score,
            "omega_c": omega_c,
        }),
    })
}

/// CHSH with arbitrary random strategies (general POVMs allowed) alternating with
/// near-optimal noisy ones.
fn theorem_trial(i: u64, config: &SweepConfig, omega_c: f64, rng: &mut impl Rng) -> Result<TrialResult> {
    let game = chsh();
    let strategy = if i.is_multiple_of(2) {
        let (dd, de) = (config.dims.sample(rng), config.dims.sample(rng));
        let projective = rng.gen_bool(0.5);
        random_strategy(game.sizes(), dd, de, projective, rng)?
    } else {
        perturbed_chsh_strategy(rng)?
    };
    let t = theorem_inequality_with(&game, &strategy, omega_c, &config.options)?;
    let margin = t.margin(config.rhs_scale, config.options.slack);
    Ok(TrialResult {
        lhs: t.gap,
        rhs: t.bound * config.rhs_scale,
        margin,
        failure: (margin < 0.0).then(|| "score gap exceeds bound".to_string()),
        instance: json!({
            "game": to_value(&GameFile::from_game(&game)),
            "strategy": to_value(&StrategyFile::from_strategy(&strategy)),
            "epsilon": t.guessing.epsilon,
            "score": t.score,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_range_parsing() {
        assert_eq!("2..4".parse::<DimRange>().unwrap(), DimRange { min: 2, max: 4 });
        assert_eq!("2..=3".parse::<DimRange>().unwrap(), DimRange { min: 2, max: 3 });
        assert_eq!("3".parse::<DimRange>().unwrap(), DimRange { min: 3, max: 3 });
        assert!("4..2".parse::<DimRange>().is_err());
        assert!("1..3".parse::<DimRange>().is_err());
        assert!("x".parse::<DimRange>().is_err());
    }

    #[test]
    fn zero_trials_warn() {
        let s = run_sweep(&SweepConfig::new(Check::Theorem, 0, 1)).unwrap();
        assert!(s.all_passed());
        assert!(s.warnings[0].contains("0 trials"));
        assert!(s.to_string().contains("0/0 passed"));
    }

    #[test]
    fn small_sweeps_pass_and_repeat() {
        for check in [Check::Disturbance, Check::Declassical, Check::Theorem] {
            let config = SweepConfig::new(check, 12, 5);
            let a = run_sweep(&config).unwrap();
            let b = run_sweep(&config).unwrap();
            assert!(a.all_passed(), "{check}: {a}");
            assert_eq!(a.worst_margin.unwrap().to_bits(), b.worst_margin.unwrap().to_bits());
        }
    }

    #[test]
    fn halved_disturbance_bound_fails() {
        let mut config = SweepConfig::new(Check::Disturbance, 60, 9);
        config.rhs_scale = 0.5;
        let s = run_sweep(&config).unwrap();
        assert!(s.failed > 0);
        let dir = tempfile::tempdir().unwrap();
        let path = s.write_counterexamples(dir.path()).unwrap().unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.contains("\"counterexamples\""));
    }
}
