//! Certified local-randomness quantities and the inequalities that bound them.
//!
//! * [`guessing_epsilon`] / [`uniform_delta`]: Bob's failure to guess Alice's
//!   output from his post-measurement state, weighted by the game's inputs or
//!   uniformly.
//! * [`c_g`]: the game constant in the score-gap bound.
//! * [`measurement_disturbance`]: how far a projective measurement moves
//!   Alice's reduced state, against `2√δ + δ`.
//! * [`declassicalize`]: copies Alice's outcomes for every input into classical
//!   registers, giving a classical correlation close to the original one.
//! * [`theorem_gap_check`]: score − ω_c against `C_G √ε`, bundled into a
//!   [`CertificationReport`].
//!
//! Every bound is checked with the discrimination solver's certification gap
//! added to δ or ε before taking square roots, plus an explicit slack.

use rayon::prelude::*;
use serde::Serialize;

use crate::discrimination::{dist, DiscriminationInstance};
use crate::error::{Error, Result};
use crate::games::{classical_value, score, Alphabets, Correlation, Game};
use crate::linalg::{partial_trace, tensor, trace_norm, ComplexMatrix, DensityOperator, HermitianOperator};
use crate::strategies::{
    achieved_correlation, projectivize_with_limit, second_player_states, PovmFamily, Strategy,
};
use crate::tolerances::{DEFAULT_DIST_TOL, DEFAULT_MAX_DIM};

/// Slack added to the right-hand side of every bound check.
pub const DEFAULT_CHECK_SLACK: f64 = 1e-6;
/// Tolerance for the classicality witness score(p̄) ≤ ω_c.
pub const CLASSICALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOptions {
    /// Relative primal-dual gap requested from each discrimination solve.
    pub dist_tol: f64,
    /// Additive slack on bound checks.
    pub slack: f64,
    pub max_dim: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            dist_tol: DEFAULT_DIST_TOL,
            slack: DEFAULT_CHECK_SLACK,
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

/// C_G = (3/2) √(Σ_ab q(b) / P_q(a|b)), with P_q(a|b) = q(a,b)/q(b).
pub fn c_g(g: &Game) -> Result<f64> {
    g.require_complete_support()?;
    let s = g.sizes();
    let mut total = 0.0;
    for b in 0..s.b {
        let qb = g.q_bob(b);
        for a in 0..s.a {
            let conditional = g.q(a, b) / qb;
            total += qb / conditional;
        }
    }
    Ok(1.5 * total.sqrt())
}

/// δ_ab = 1 − Σ_y Dist{ρ_ab^xy : x} for every input pair.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaTable {
    pub sizes: Alphabets,
    /// `delta[a·|B| + b]`.
    pub delta: Vec<f64>,
    /// Σ_y of the solver gaps behind each δ_ab.
    pub gap: Vec<f64>,
    /// Whether every solve met its tolerance.
    pub certified: bool,
}

impl DeltaTable {
    pub fn delta(&self, a: usize, b: usize) -> f64 {
        self.delta[a * self.sizes.b + b]
    }

    /// (Σ w_ab δ_ab, Σ w_ab gap_ab).
    fn weighted(&self, weight: impl Fn(usize, usize) -> f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut gap = 0.0;
        for a in 0..self.sizes.a {
            for b in 0..self.sizes.b {
                let w = weight(a, b);
                value += w * self.delta(a, b);
                gap += w * self.gap[a * self.sizes.b + b];
            }
        }
        (value, gap)
    }
}

pub fn delta_table(s: &Strategy, dist_tol: f64) -> Result<DeltaTable> {
    let sizes = s.sizes();
    let states = second_player_states(s)?;
    let pairs: Vec<(usize, usize)> = (0..sizes.a)
        .flat_map(|a| (0..sizes.b).map(move |b| (a, b)))
        .collect();
    let solved: Vec<Result<(f64, f64, bool)>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut guessed = 0.0;
            let mut gap = 0.0;
            let mut certified = true;
            for y in 0..sizes.y {
                let inst = DiscriminationInstance::new(states.over_alice_outputs(a, b, y))?;
                let r = dist(&inst, dist_tol)?;
                guessed += r.value;
                gap += r.primal_dual_gap;
                certified &= r.certified;
            }
            Ok((1.0 - guessed, gap, certified))
        })
        .collect();
    let mut delta = Vec::with_capacity(pairs.len());
    let mut gap = Vec::with_capacity(pairs.len());
    let mut certified = true;
    for r in solved {
        let (d, g, c) = r?;
        delta.push(d);
        gap.push(g);
        certified &= c;
    }
    Ok(DeltaTable {
        sizes,
        delta,
        gap,
        certified,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GuessingAnalysis {
    /// ε = 1 − Σ_ab q(a,b) Σ_y Dist{ρ_ab^xy : x}.
    pub epsilon: f64,
    /// δ_ab, indexed `a·|B| + b`.
    pub per_input_delta: Vec<f64>,
    /// Σ_ab q(a,b) · (solver gaps behind δ_ab); the true ε may be lower by this much.
    pub dist_gap_budget: f64,
    pub certified: bool,
}

pub fn guessing_epsilon(g: &Game, s: &Strategy, dist_tol: f64) -> Result<GuessingAnalysis> {
    g.require_complete_support()?;
    require_same_alphabets(g.sizes(), s.sizes())?;
    let table = delta_table(s, dist_tol)?;
    let (epsilon, budget) = table.weighted(|a, b| g.q(a, b));
    Ok(GuessingAnalysis {
        epsilon,
        per_input_delta: table.delta,
        dist_gap_budget: budget,
        certified: table.certified,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformDelta {
    /// δ = 1 − (1/(|A||B|)) Σ_aby Dist{ρ_ab^xy : x}.
    pub delta: f64,
    pub dist_gap_budget: f64,
    pub certified: bool,
}

pub fn uniform_delta(s: &Strategy, dist_tol: f64) -> Result<UniformDelta> {
    let table = delta_table(s, dist_tol)?;
    Ok(uniform_from_table(&table))
}

fn uniform_from_table(table: &DeltaTable) -> UniformDelta {
    let w = 1.0 / table.sizes.inputs() as f64;
    let (delta, budget) = table.weighted(|_, _| w);
    UniformDelta {
        delta,
        dist_gap_budget: budget,
        certified: table.certified,
    }
}

/// Outcome of a measurement-disturbance check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisturbanceCheck {
    /// 1 − Dist of the induced states on the guessing side.
    pub delta: f64,
    pub solver_gap: f64,
    /// ‖Σ_i F_i Λ^A F_i − Λ^A‖₁.
    pub disturbance: f64,
    /// 2√δ' + δ' with δ' = δ + solver gap.
    pub bound: f64,
    pub bound_holds: bool,
}

impl DisturbanceCheck {
    /// `bound · scale + slack − disturbance`; negative means the scaled bound fails.
    pub fn margin(&self, scale: f64, slack: f64) -> f64 {
        self.bound * scale + slack - self.disturbance
    }
}

fn require_projective(f: &[HermitianOperator]) -> Result<PovmFamily> {
    let fam = PovmFamily::new(vec![f.to_vec()])?;
    if !fam.is_projective() {
        return Err(Error::InvalidPovm("measurement must be projective".into()));
    }
    Ok(fam)
}

/// Superoperator X ↦ Σ_i P_i X P_i.
pub fn pinch(projectors: &[HermitianOperator], beta: &HermitianOperator) -> HermitianOperator {
    let dim = beta.dim();
    projectors
        .iter()
        .fold(HermitianOperator::zeros(dim), |acc, p| acc.add(&beta.conjugate_by(p.matrix())))
}

/// ‖Φ(β) − β‖₁: the smallest ε for which Φ is ε-commutative with β.
pub fn commutativity_defect(phi_beta: &HermitianOperator, beta: &HermitianOperator) -> Result<f64> {
    trace_norm(&phi_beta.sub(beta))
}

/// Measures A of Λ ∈ L(A ⊗ B) with projective `f`, computes how well B guesses the
/// outcome (δ = 1 − Dist{Tr_A((F_i ⊗ I)Λ(F_i ⊗ I))}) and how much the pinching moves Λ^A.
pub fn measurement_disturbance(
    lambda: &DensityOperator,
    dims: (usize, usize),
    f: &[HermitianOperator],
    opts: &CheckOptions,
) -> Result<DisturbanceCheck> {
    classical_register_disturbance(lambda, [dims.0, dims.1, 1], f, opts)
}

/// Same check on Λ ∈ L(A ⊗ B ⊗ C): the guess uses B and C jointly, and the pinching
/// F_i ⊗ I_C is compared against Λ^{AC}. With `dims[2] = 1` this is the plain check.
pub fn classical_register_disturbance(
    lambda: &DensityOperator,
    dims: [usize; 3],
    f: &[HermitianOperator],
    opts: &CheckOptions,
) -> Result<DisturbanceCheck> {
    let [da, db, dc] = dims;
    if lambda.dim() != da * db * dc {
        return Err(Error::Shape(format!(
            "state has dimension {}, factors {dims:?} need {}",
            lambda.dim(),
            da * db * dc
        )));
    }
    let fam = require_projective(f)?;
    if fam.dim() != da {
        return Err(Error::Shape(format!(
            "measurement acts on dimension {}, first factor has {da}",
            fam.dim()
        )));
    }
    let rest = ComplexMatrix::identity(db * dc);
    let induced: Vec<HermitianOperator> = f
        .iter()
        .map(|fi| {
            let lifted = tensor(fi.matrix(), &rest)?;
            let m = lambda.matrix().conjugate_by(&lifted);
            Ok(HermitianOperator::from_hermitian_part(&partial_trace(&m, &[da, db * dc], &[1])?))
        })
        .collect::<Result<_>>()?;
    let r = dist(&DiscriminationInstance::new(induced)?, opts.dist_tol)?;
    let delta = 1.0 - r.value;

    let reduced = HermitianOperator::from_hermitian_part(&partial_trace(lambda.matrix(), &[da, db, dc], &[0, 2])?);
    let c_identity = ComplexMatrix::identity(dc);
    let lifted: Vec<HermitianOperator> = f
        .iter()
        .map(|fi| Ok(HermitianOperator::from_hermitian_part(&tensor(fi.matrix(), &c_identity)?)))
        .collect::<Result<_>>()?;
    let disturbance = commutativity_defect(&pinch(&lifted, &reduced), &reduced)?;

    let effective = (delta + r.primal_dual_gap).max(0.0);
    let bound = 2.0 * effective.sqrt() + effective;
    Ok(DisturbanceCheck {
        delta,
        solver_gap: r.primal_dual_gap,
        disturbance,
        bound,
        bound_holds: disturbance <= bound + opts.slack,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Declassicalization {
    /// Classical correlation read from the copied registers and Bob's measurements.
    #[serde(skip)]
    pub pbar: Correlation,
    /// (1/(|A||B|)) Σ_abxy |p − p̄|.
    pub distance: f64,
    pub delta: UniformDelta,
    /// √(3δ') · |A| with δ' = δ + solver gaps.
    pub bound: f64,
    pub bound_holds: bool,
    /// score(G, p̄); at most ω_c because p̄ is classical.
    pub pbar_score: f64,
}

impl Declassicalization {
    pub fn margin(&self, scale: f64, slack: f64) -> f64 {
        self.bound * scale + slack - self.distance
    }
}

/// Applies Alice's projective measurements for every input in declared order, each
/// copying its outcome into a fresh classical register V_a, then reads Alice's answer
/// to input a from V_a and lets Bob measure E as usual.
///
/// The copied registers stay diagonal, so the state is tracked branch by branch:
/// for outcome string x⃗ the unnormalized branch is K γ K† with
/// K = (R_{n−1}^{x_{n−1}} ⋯ R_0^{x_0}) ⊗ I_E.
pub fn declassicalize(g: &Game, s: &Strategy, opts: &CheckOptions) -> Result<Declassicalization> {
    require_same_alphabets(g.sizes(), s.sizes())?;
    if !s.alice().is_projective() {
        return Err(Error::NotProjective);
    }
    let sizes = s.sizes();
    let registers = (0..sizes.a).try_fold(1usize, |acc, _| acc.checked_mul(sizes.x));
    let needed = registers.and_then(|r| r.checked_mul(s.dim_alice() * s.dim_bob()));
    match needed {
        Some(n) if n <= opts.max_dim => {}
        _ => {
            return Err(Error::Sizing {
                requested: needed.unwrap_or(usize::MAX),
                max_dim: opts.max_dim,
            })
        }
    }
    let delta = uniform_delta(s, opts.dist_tol)?;
    let pbar = declassicalized_correlation(s)?;
    let p = achieved_correlation(s)?;
    let distance = p.average_l1_distance(&pbar)?;
    let effective = (delta.delta + delta.dist_gap_budget).max(0.0);
    let bound = (3.0 * effective).sqrt() * sizes.a as f64;
    Ok(Declassicalization {
        pbar_score: score(g, &pbar)?,
        distance,
        delta,
        bound,
        bound_holds: distance <= bound + opts.slack,
        pbar,
    })
}

fn declassicalized_correlation(s: &Strategy) -> Result<Correlation> {
    let sizes = s.sizes();
    let (d, e) = (s.dim_alice(), s.dim_bob());
    let identity_e = ComplexMatrix::identity(e);
    let lifted: Vec<Vec<ComplexMatrix>> = s
        .alice()
        .settings()
        .iter()
        .map(|setting| setting.iter().map(|r| tensor(r.matrix(), &identity_e)).collect())
        .collect::<Result<_>>()?;

    let mut branches: Vec<(Vec<usize>, ComplexMatrix)> = vec![(Vec::new(), s.gamma().matrix().clone())];
    for projectors in &lifted {
        let mut next = Vec::with_capacity(branches.len() * sizes.x);
        for (outcomes, state) in &branches {
            for (x, proj) in projectors.iter().enumerate() {
                let branch = state.conjugate_by(proj);
                if branch.max_abs() == 0.0 {
                    continue;
                }
                let mut o = outcomes.clone();
                o.push(x);
                next.push((o, branch));
            }
        }
        branches = next;
    }

    let mut pbar = vec![0.0; sizes.len()];
    for (outcomes, state) in &branches {
        let bob_state = partial_trace(state, &[d, e], &[1])?;
        for b in 0..sizes.b {
            for y in 0..sizes.y {
                let w = s.bob().element(b, y).trace_product(&bob_state).re.max(0.0);
                for (a, &x) in outcomes.iter().enumerate() {
                    pbar[sizes.index(a, b, x, y)] += w;
                }
            }
        }
    }
    Correlation::new(sizes, pbar)
}

/// score − ω_c against C_G √(ε + budget).
#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub score: f64,
    pub omega_c: f64,
    pub c_g: f64,
    pub guessing: GuessingAnalysis,
    /// score − ω_c.
    pub gap: f64,
    /// C_G √(ε + budget).
    pub bound: f64,
    pub bound_holds: bool,
}

impl TheoremCheck {
    pub fn margin(&self, scale: f64, slack: f64) -> f64 {
        self.bound * scale + slack - self.gap
    }
}

pub fn theorem_inequality(g: &Game, s: &Strategy, opts: &CheckOptions) -> Result<TheoremCheck> {
    let omega_c = classical_value(g)?.value;
    theorem_inequality_with(g, s, omega_c, opts)
}

/// As [`theorem_inequality`] with a precomputed classical value.
pub fn theorem_inequality_with(g: &Game, s: &Strategy, omega_c: f64, opts: &CheckOptions) -> Result<TheoremCheck> {
    let c_g = c_g(g)?;
    let guessing = guessing_epsilon(g, s, opts.dist_tol)?;
    let score = score(g, &achieved_correlation(s)?)?;
    let gap = score - omega_c;
    let bound = c_g * (guessing.epsilon + guessing.dist_gap_budget).max(0.0).sqrt();
    Ok(TheoremCheck {
        score,
        omega_c,
        c_g,
        gap,
        bound,
        bound_holds: gap <= bound + opts.slack,
        guessing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GuessBoundMode {
    /// 1 − ((w − ω_c)/C_G)²: inverts the score-gap bound.
    #[default]
    Theorem,
    /// 1 − (w − ω_c)²/C_G, the alternative convention dividing by C_G once.
    Literal,
}

impl std::str::FromStr for GuessBoundMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem" => Ok(Self::Theorem),
            "literal" => Ok(Self::Literal),
            other => Err(Error::Parse(format!("unknown guess-bound mode {other:?}"))),
        }
    }
}

/// Upper bound on Bob's probability of guessing Alice's output given a score `w`.
pub fn guess_bound(g: &Game, w: f64, mode: GuessBoundMode) -> Result<f64> {
    let omega_c = classical_value(g)?.value;
    Ok(guess_bound_from(omega_c, c_g(g)?, w, mode))
}

pub fn guess_bound_from(omega_c: f64, c_g: f64, w: f64, mode: GuessBoundMode) -> f64 {
    if w < omega_c {
        return 1.0;
    }
    let gap = w - omega_c;
    match mode {
        GuessBoundMode::Theorem => 1.0 - (gap / c_g).powi(2),
        GuessBoundMode::Literal => 1.0 - gap * gap / c_g,
    }
}

/// Summary of the declassicalization step inside a report.
#[derive(Debug, Clone, Serialize)]
pub struct DeclassicalSummary {
    pub distance: f64,
    pub bound: f64,
    pub bound_holds: bool,
    pub delta: f64,
    pub delta_gap_budget: f64,
    pub pbar_score: f64,
    /// score(p̄) ≤ ω_c + 1e-9.
    pub pbar_classical: bool,
    /// Whether Alice's measurements were dilated before copying.
    pub projectivized: bool,
    pub alice_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub alphabets: Alphabets,
    pub score: f64,
    pub omega_c: f64,
    pub c_g: f64,
    pub epsilon: f64,
    pub epsilon_gap_budget: f64,
    pub per_input_delta: Vec<f64>,
    pub dist_certified: bool,
    pub theorem_gap: f64,
    pub theorem_bound: f64,
    pub theorem_bound_holds: bool,
    pub guess_bound: f64,
    pub guess_bound_mode: GuessBoundMode,
    /// `None` when the copied-register state would exceed the dimension budget.
    pub declassical_distance: Option<f64>,
    pub declassical_bound_holds: Option<bool>,
    pub declassical: Option<DeclassicalSummary>,
    pub options: CheckOptions,
    pub seed: Option<u64>,
}

impl CertificationReport {
    /// Every bound check that ran holds.
    pub fn all_checks_pass(&self) -> bool {
        self.theorem_bound_holds
            && self
                .declassical
                .as_ref()
                .is_none_or(|d| d.bound_holds && d.pbar_classical)
    }
}

pub fn theorem_gap_check(g: &Game, s: &Strategy, opts: &CheckOptions) -> Result<CertificationReport> {
    theorem_gap_check_with_mode(g, s, opts, GuessBoundMode::Theorem)
}

pub fn theorem_gap_check_with_mode(
    g: &Game,
    s: &Strategy,
    opts: &CheckOptions,
    mode: GuessBoundMode,
) -> Result<CertificationReport> {
    let theorem = theorem_inequality(g, s, opts)?;
    let declassical = declassical_if_within_budget(g, s, opts)?;
    let declassical = declassical.map(|(d, projectivized, alice_dim)| DeclassicalSummary {
        distance: d.distance,
        bound: d.bound,
        bound_holds: d.bound_holds,
        delta: d.delta.delta,
        delta_gap_budget: d.delta.dist_gap_budget,
        pbar_score: d.pbar_score,
        pbar_classical: d.pbar_score <= theorem.omega_c + CLASSICALITY_TOL,
        projectivized,
        alice_dim,
    });
    Ok(CertificationReport {
        alphabets: g.sizes(),
        score: theorem.score,
        omega_c: theorem.omega_c,
        c_g: theorem.c_g,
        epsilon: theorem.guessing.epsilon,
        epsilon_gap_budget: theorem.guessing.dist_gap_budget,
        per_input_delta: theorem.guessing.per_input_delta.clone(),
        dist_certified: theorem.guessing.certified,
        theorem_gap: theorem.gap,
        theorem_bound: theorem.bound,
        theorem_bound_holds: theorem.bound_holds,
        guess_bound: guess_bound_from(theorem.omega_c, theorem.c_g, theorem.score, mode),
        guess_bound_mode: mode,
        declassical_distance: declassical.as_ref().map(|d| d.distance),
        declassical_bound_holds: declassical.as_ref().map(|d| d.bound_holds),
        declassical,
        options: *opts,
        seed: None,
    })
}

/// Projectivizes when needed and declassicalizes, or returns `None` if the
/// register state would exceed `opts.max_dim`.
pub fn declassical_if_within_budget(
    g: &Game,
    s: &Strategy,
    opts: &CheckOptions,
) -> Result<Option<(Declassicalization, bool, usize)>> {
    let projectivized = !s.alice().is_projective();
    let owned;
    let strategy = if projectivized {
        match projectivize_with_limit(s, opts.max_dim) {
            Ok(p) => {
                owned = p;
                &owned
            }
            Err(Error::Sizing { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    } else {
        s
    };
    match declassicalize(g, strategy, opts) {
        Ok(d) => Ok(Some((d, projectivized, strategy.dim_alice()))),
        Err(Error::Sizing { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn require_same_alphabets(game: Alphabets, strategy: Alphabets) -> Result<()> {
    if game != strategy {
        return Err(Error::Mismatch(format!(
            "game alphabets {game:?} do not match strategy alphabets {strategy:?}"
        )));
    }
    Ok(())
}
