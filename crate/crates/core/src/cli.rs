//! Command-line front end. The `nlcert` binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 every check holds, 1 a bound check failed, 2 unreadable or
//! invalid input, 3 shape or alphabet mismatch, 4 dimension or enumeration
//! budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::certify::{declassical_if_within_budget, theorem_gap_check_with_mode, CheckOptions, GuessBoundMode, CLASSICALITY_TOL};
use crate::discrimination::{dist, DiscriminationInstance};
use crate::error::{Error, Result};
use crate::games::classical_value;
use crate::io::{self, to_canonical_string, CorrelationFile};
use crate::strategies::{PovmResiduals, Strategy};
use crate::sweep::{run_sweep, Check, DimRange, SweepConfig};
use crate::tolerances::{DEFAULT_DIST_TOL, DEFAULT_MAX_DIM};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SHAPE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "nlcert", version, about = "Certified local randomness for nonlocal games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical value of a game and a maximizing deterministic strategy.
    ClassicalValue {
        game: PathBuf,
    },
    /// Full certification report for a game and strategy.
    Analyze {
        game: PathBuf,
        strategy: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "theorem")]
        fg_mode: GuessBoundMode,
    },
    /// Randomized sweep of one bound check.
    Sweep {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value = "2..4")]
        dims: DimRange,
        #[arg(long)]
        check: Check,
        #[command(flatten)]
        common: Common,
        /// Multiplies every bound before comparison (self-test of the checker).
        #[arg(long, default_value_t = 1.0, hide = true)]
        rhs_scale: f64,
    },
    /// Copy Alice's outcomes into classical registers and compare correlations.
    Declassicalize {
        game: PathBuf,
        strategy: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal discrimination of the states in an instance file.
    Dist {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DIST_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Relative primal-dual gap for every discrimination solve.
    #[arg(long, default_value_t = DEFAULT_DIST_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (analyze, declassicalize) or counterexample directory (sweep).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    pub max_dim: usize,
}

impl Common {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            dist_tol: self.tol,
            max_dim: self.max_dim,
            ..CheckOptions::default()
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Io(_)
        | Error::InvalidDensity(_)
        | Error::InvalidGame(_)
        | Error::InvalidCorrelation(_)
        | Error::InvalidPovm(_)
        | Error::InvalidStrategy(_)
        | Error::NotHermitian(_)
        | Error::NotPsd(_)
        | Error::DegenerateInstance(_) => EXIT_PARSE,
        Error::Shape(_) | Error::Mismatch(_) | Error::IncompleteSupport { .. } | Error::NotProjective => EXIT_SHAPE,
        Error::Sizing { .. } | Error::EnumerationBudget { .. } => EXIT_BUDGET,
        Error::Numerical { .. } => EXIT_CHECK_FAILED,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::ClassicalValue { game } => classical_value_cmd(&game),
        Command::Analyze {
            game,
            strategy,
            common,
            fg_mode,
        } => analyze_cmd(&game, &strategy, &common, fg_mode),
        Command::Sweep {
            trials,
            dims,
            check,
            common,
            rhs_scale,
        } => sweep_cmd(trials, dims, check, &common, rhs_scale),
        Command::Declassicalize { game, strategy, common } => declassicalize_cmd(&game, &strategy, &common),
        Command::Dist { instance, tol, out } => dist_cmd(&instance, tol, out.as_deref()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn classical_value_cmd(game: &Path) -> Result<i32> {
    let g = io::load_game(game)?;
    let v = classical_value(&g)?;
    println!("omega_c = {}", v.value);
    println!("alice = {:?}", v.alice);
    println!("bob = {:?}", v.bob);
    Ok(EXIT_OK)
}

fn report_residuals(who: &str, r: &PovmResiduals) {
    if r.completeness > 0.0 || r.negativity > 0.0 {
        eprintln!(
            "{who}: completeness residual {:.3e}, negativity {:.3e}, projectivity {:.3e}",
            r.completeness, r.negativity, r.projectivity
        );
    }
}

fn load_pair(game: &Path, strategy: &Path) -> Result<(crate::games::Game, Strategy)> {
    let g = io::load_game(game)?;
    let loaded = io::load_strategy(strategy)?;
    report_residuals("R", &loaded.alice_residuals);
    report_residuals("S", &loaded.bob_residuals);
    Ok((g, loaded.strategy))
}

/// Dimension of the copied-register state for `s`, after projectivizing Alice if needed.
fn declassical_dim(s: &Strategy) -> usize {
    let sizes = s.sizes();
    let registers = sizes.x.saturating_pow(sizes.a as u32);
    let alice = if s.alice().is_projective() {
        s.dim_alice()
    } else {
        s.dim_alice().saturating_mul(registers)
    };
    alice.saturating_mul(registers).saturating_mul(s.dim_bob())
}

fn analyze_cmd(game: &Path, strategy: &Path, common: &Common, mode: GuessBoundMode) -> Result<i32> {
    let (g, s) = load_pair(game, strategy)?;
    let opts = common.options();
    let mut report = theorem_gap_check_with_mode(&g, &s, &opts, mode)?;
    if report.declassical.is_none() {
        return Err(Error::Sizing {
            requested: declassical_dim(&s),
            max_dim: opts.max_dim,
        });
    }
    report.seed = Some(common.seed);
    emit(&to_canonical_string(&report)?, common.out.as_deref())?;
    Ok(if report.all_checks_pass() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn sweep_cmd(trials: u64, dims: DimRange, check: Check, common: &Common, rhs_scale: f64) -> Result<i32> {
    let config = SweepConfig {
        check,
        trials,
        seed: common.seed,
        dims,
        rhs_scale,
        options: common.options(),
    };
    let summary = run_sweep(&config)?;
    println!("{summary}");
    if let Some(path) = summary.write_counterexamples(common.out.as_deref().unwrap_or(Path::new(".")))? {
        println!("{} counterexamples written to {}", summary.failed, path.display());
    }
    Ok(if summary.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn declassicalize_cmd(game: &Path, strategy: &Path, common: &Common) -> Result<i32> {
    let (g, s) = load_pair(game, strategy)?;
    let opts = common.options();
    let omega_c = classical_value(&g)?.value;
    let Some((d, projectivized, alice_dim)) = declassical_if_within_budget(&g, &s, &opts)? else {
        return Err(Error::Sizing {
            requested: declassical_dim(&s),
            max_dim: opts.max_dim,
        });
    };
    let classical = d.pbar_score <= omega_c + CLASSICALITY_TOL;
    let doc = json!({
        "distance": d.distance,
        "bound": d.bound,
        "bound_holds": d.bound_holds,
        "delta": d.delta,
        "pbar": CorrelationFile::from_correlation(&d.pbar),
        "pbar_score": d.pbar_score,
        "pbar_classical": classical,
        "omega_c": omega_c,
        "projectivized": projectivized,
        "alice_dim": alice_dim,
        "options": opts,
    });
    emit(&to_canonical_string(&doc)?, common.out.as_deref())?;
    Ok(if d.bound_holds && classical { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn dist_cmd(instance: &Path, tol: f64, out: Option<&Path>) -> Result<i32> {
    let states = io::load_dist(instance)?;
    let inst = DiscriminationInstance::new(states)?;
    let r = dist(&inst, tol)?;
    let doc = json!({
        "value": r.value,
        "upper_bound": r.upper_bound(),
        "primal_dual_gap": r.primal_dual_gap,
        "certified": r.certified,
        "iterations": r.iterations,
        "method": format!("{:?}", r.method).to_lowercase(),
        "povm": io::DistFile::from_states(&r.povm).states,
        "dual_certificate": io::matrix_to_json(r.dual_certificate.matrix()),
    });
    emit(&to_canonical_string(&doc)?, out)?;
    Ok(if r.certified { EXIT_OK } else { EXIT_CHECK_FAILED })
}
