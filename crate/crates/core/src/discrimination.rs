//! Minimum-error discrimination of subnormalized states.
//!
//! `Dist{ρ_i} = max Σ_i Tr(T_i ρ_i)` over POVMs `{T_i}`. Every result carries a
//! primal POVM (a lower bound) and a dual operator `Y` with `Y ⪰ ρ_i` for all
//! `i` (an upper bound `Tr Y`), so the reported gap bounds the error.

use crate::error::{Error, Result};
use crate::linalg::{psd_inv_sqrt, ComplexMatrix, HermitianOperator};
use crate::tolerances::{CERTIFICATE_TOL, DEFAULT_DIST_MAX_ITERS, PSD_TOL};

#[derive(Debug, Clone)]
pub struct DiscriminationInstance {
    states: Vec<HermitianOperator>,
    total_trace: f64,
}

impl DiscriminationInstance {
    pub fn new(states: Vec<HermitianOperator>) -> Result<Self> {
        let dim = states
            .first()
            .map(HermitianOperator::dim)
            .ok_or_else(|| Error::DegenerateInstance("no states given".into()))?;
        for (i, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::Shape(format!(
                    "state {i} has dimension {}, state 0 has {dim}",
                    s.dim()
                )));
            }
            let min = s.min_eigenvalue()?;
            if min < -PSD_TOL {
                return Err(Error::NotPsd(min));
            }
        }
        let total_trace = states.iter().map(HermitianOperator::trace_re).sum();
        Ok(Self { states, total_trace })
    }

    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn total_trace(&self) -> f64 {
        self.total_trace
    }

    /// Σ_i Tr(T_i ρ_i).
    pub fn success(&self, povm: &[HermitianOperator]) -> f64 {
        self.states.iter().zip(povm).map(|(r, t)| r.inner(t)).sum()
    }

    fn gap_target(&self, tol: f64) -> f64 {
        tol * self.total_trace.max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistMethod {
    /// One state: the trivial measurement.
    Single,
    /// Two states: Helstrom projectors.
    Helstrom,
    /// Fixed-point iteration started from the pretty-good measurement.
    FixedPoint,
}

#[derive(Debug, Clone)]
pub struct DiscriminationResult {
    /// Σ_i Tr(T_i ρ_i) for the returned POVM.
    pub value: f64,
    pub povm: Vec<HermitianOperator>,
    /// Y with Y − ρ_i ⪰ 0 for every i.
    pub dual_certificate: HermitianOperator,
    /// Tr(Y) − value.
    pub primal_dual_gap: f64,
    /// Whether the gap met the requested tolerance.
    pub certified: bool,
    pub iterations: usize,
    pub method: DistMethod,
}

impl DiscriminationResult {
    pub fn upper_bound(&self) -> f64 {
        self.dual_certificate.trace_re()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualCheck {
    pub feasible: bool,
    /// max_i max(0, −λ_min(Y − ρ_i)).
    pub max_violation: f64,
    /// Tr Y, an upper bound on Dist when feasible.
    pub bound: f64,
}

/// Checks `y − ρ_i ⪰ 0` for every state within [`CERTIFICATE_TOL`].
pub fn check_dual(inst: &DiscriminationInstance, y: &HermitianOperator) -> Result<DualCheck> {
    if y.dim() != inst.dim() {
        return Err(Error::Shape(format!(
            "dual operator has dimension {}, states have {}",
            y.dim(),
            inst.dim()
        )));
    }
    let max_violation = dual_violation(inst, y)?;
    Ok(DualCheck {
        feasible: max_violation <= CERTIFICATE_TOL,
        max_violation,
        bound: y.trace_re(),
    })
}

fn dual_violation(inst: &DiscriminationInstance, y: &HermitianOperator) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in &inst.states {
        worst = worst.max(-y.sub(s).min_eigenvalue()?);
    }
    Ok(worst)
}

/// Shifts `y` by its worst violation so that `y − ρ_i ⪰ 0` holds for all states.
fn inflate(inst: &DiscriminationInstance, y: HermitianOperator) -> Result<HermitianOperator> {
    let v = dual_violation(inst, &y)?;
    if v > 0.0 {
        // A few ulps of headroom so the shifted certificate survives re-diagonalization.
        let pad = v + 4.0 * f64::EPSILON * y.max_abs().max(1.0);
        Ok(y.add(&HermitianOperator::identity(inst.dim()).scale(pad)))
    } else {
        Ok(y)
    }
}

/// Computes Dist to tolerance `tol` (relative to max(1, Σ Tr ρ_i)).
pub fn dist(inst: &DiscriminationInstance, tol: f64) -> Result<DiscriminationResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Numerical {
            message: "discrimination tolerance must be positive".into(),
            residual: tol,
        });
    }
    match inst.len() {
        1 => single(inst, tol),
        2 => helstrom(inst, tol),
        _ => dist_iterative(inst, tol, DEFAULT_DIST_MAX_ITERS),
    }
}

fn single(inst: &DiscriminationInstance, tol: f64) -> Result<DiscriminationResult> {
    let povm = vec![HermitianOperator::identity(inst.dim())];
    let value = inst.success(&povm);
    let y = inflate(inst, inst.states[0].clone())?;
    finish(inst, tol, povm, value, y, 0, DistMethod::Single)
}

/// Two-state optimum: T_1 projects onto the positive eigenspace of ρ_1 − ρ_2, and
/// Y = ρ_2 + (ρ_1 − ρ_2)_+ is a matching dual certificate.
fn helstrom(inst: &DiscriminationInstance, tol: f64) -> Result<DiscriminationResult> {
    let (r1, r2) = (&inst.states[0], &inst.states[1]);
    let diff = r1.sub(r2);
    let e = diff.eig()?;
    let t1 = HermitianOperator::from_hermitian_part(&e.spectral_projector(|l| l > 0.0));
    let t2 = HermitianOperator::identity(inst.dim()).sub(&t1);
    let positive = HermitianOperator::from_hermitian_part(&e.apply(|l| l.max(0.0)));
    let povm = vec![t1, t2];
    let value = inst.success(&povm);
    let y = inflate(inst, r2.add(&positive))?;
    finish(inst, tol, povm, value, y, 0, DistMethod::Helstrom)
}

/// (Tr ρ_1 + Tr ρ_2 + ‖ρ_1 − ρ_2‖₁)/2.
pub fn helstrom_value(r1: &HermitianOperator, r2: &HermitianOperator) -> Result<f64> {
    let norm = crate::linalg::trace_norm(&r1.sub(r2))?;
    Ok((r1.trace_re() + r2.trace_re() + norm) / 2.0)
}

fn finish(
    inst: &DiscriminationInstance,
    tol: f64,
    povm: Vec<HermitianOperator>,
    value: f64,
    y: HermitianOperator,
    iterations: usize,
    method: DistMethod,
) -> Result<DiscriminationResult> {
    let gap = (y.trace_re() - value).max(0.0);
    Ok(DiscriminationResult {
        value,
        povm,
        dual_certificate: y,
        primal_dual_gap: gap,
        certified: gap <= inst.gap_target(tol),
        iterations,
        method,
    })
}

/// Fixed-point iteration T_i ← L^{-1/2} ρ_i T_i ρ_i L^{-1/2}, L = Σ_j ρ_j T_j ρ_j,
/// started from the pretty-good measurement (or the trivial guess of the heaviest
/// state, whichever is better). Any part of the space outside the
/// support of L is assigned to outcome 0 so the update stays a POVM.
///
/// Dual candidates are L^{1/2} and the Hermitian part of Σ_i T_i ρ_i, each shifted
/// into feasibility; the best primal and best dual seen so far are kept, and the
/// loop stops once their gap meets the tolerance.
pub fn dist_iterative(inst: &DiscriminationInstance, tol: f64, max_iters: usize) -> Result<DiscriminationResult> {
    let dim = inst.dim();
    let scale = inst
        .states
        .iter()
        .map(|s| s.max_abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        let mut povm = vec![HermitianOperator::zeros(dim); inst.len()];
        povm[0] = HermitianOperator::identity(dim);
        return finish(inst, tol, povm, 0.0, HermitianOperator::zeros(dim), 0, DistMethod::FixedPoint);
    }
    let target = inst.gap_target(tol);
    let (_, mut povm) = pgm_lower_bound(inst)?;
    let mut best_value = inst.success(&povm);
    let mut best_povm = povm.clone();
    // Always guessing the heaviest state is a valid measurement too.
    let (heaviest, heaviest_trace) = inst
        .states
        .iter()
        .map(HermitianOperator::trace_re)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, t)| if t > acc.1 { (i, t) } else { acc });
    if heaviest_trace > best_value {
        best_value = heaviest_trace;
        best_povm = vec![HermitianOperator::zeros(dim); inst.len()];
        best_povm[heaviest] = HermitianOperator::identity(dim);
    }
    let mut best_dual = inflate(inst, HermitianOperator::sum(dim, &inst.states))?;
    let mut iterations = 0;

    while iterations < max_iters && best_dual.trace_re() - best_value > target {
        iterations += 1;
        let sandwiches: Vec<HermitianOperator> = inst
            .states
            .iter()
            .zip(&povm)
            .map(|(r, t)| t.conjugate_by(r.matrix()))
            .collect();
        let l = HermitianOperator::sum(dim, &sandwiches);

        let root = inflate(inst, psd_sqrt_clamped(&l)?)?;
        if root.trace_re() < best_dual.trace_re() {
            best_dual = root;
        }

        let cutoff = l.max_abs() * 1e-14;
        let (inv_root, support) = psd_inv_sqrt(&l, cutoff)?;
        let remainder = HermitianOperator::identity(dim).sub(&support);
        povm = sandwiches
            .iter()
            .map(|s| s.conjugate_by(inv_root.matrix()))
            .collect();
        povm[0] = povm[0].add(&remainder);
        renormalize(&mut povm);

        let value = inst.success(&povm);
        if value > best_value {
            best_value = value;
            best_povm = povm.clone();
        }
        let mixed = steering_operator(inst, &povm);
        let candidate = inflate(inst, mixed)?;
        if candidate.trace_re() < best_dual.trace_re() {
            best_dual = candidate;
        }
    }
    finish(inst, tol, best_povm, best_value, best_dual, iterations, DistMethod::FixedPoint)
}

fn psd_sqrt_clamped(l: &HermitianOperator) -> Result<HermitianOperator> {
    let e = l.eig()?;
    Ok(HermitianOperator::from_hermitian_part(&e.apply(|v| v.max(0.0).sqrt())))
}

/// Hermitian part of Σ_i T_i ρ_i.
fn steering_operator(inst: &DiscriminationInstance, povm: &[HermitianOperator]) -> HermitianOperator {
    let dim = inst.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (t, r) in povm.iter().zip(&inst.states) {
        acc = &acc + &(t.matrix() * r.matrix());
    }
    HermitianOperator::from_hermitian_part(&acc)
}

/// Removes drift from Σ T_i = I by conjugating with (Σ T_i)^{-1/2}.
fn renormalize(povm: &mut [HermitianOperator]) {
    let dim = povm[0].dim();
    let sum = HermitianOperator::sum(dim, povm.iter());
    if sum.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-13 {
        return;
    }
    if let Ok((inv_root, _)) = psd_inv_sqrt(&sum, 0.5) {
        for t in povm.iter_mut() {
            *t = t.conjugate_by(inv_root.matrix());
        }
    }
}

/// Pretty-good measurement T_i = S^{-1/2} ρ_i S^{-1/2} with S = Σ ρ_i (pseudo-inverse on
/// the support of S; the complement goes to outcome 0). Returns its success value.
pub fn pgm_lower_bound(inst: &DiscriminationInstance) -> Result<(f64, Vec<HermitianOperator>)> {
    let dim = inst.dim();
    let total = HermitianOperator::sum(dim, &inst.states);
    let e = total.eig()?;
    if e.max() <= PSD_TOL {
        return Err(Error::DegenerateInstance(
            "all states are zero; the pretty-good measurement is undefined".into(),
        ));
    }
    let (inv_root, support) = psd_inv_sqrt(&total, e.max() * 1e-12)?;
    let mut povm: Vec<HermitianOperator> = inst
        .states
        .iter()
        .map(|s| s.conjugate_by(inv_root.matrix()))
        .collect();
    povm[0] = povm[0].add(&HermitianOperator::identity(dim).sub(&support));
    Ok((inst.success(&povm), povm))
}

/// Worst of the completeness residual and element negativity of a measurement.
pub fn povm_residual(povm: &[HermitianOperator]) -> Result<f64> {
    let dim = povm[0].dim();
    let sum = HermitianOperator::sum(dim, povm.iter());
    let mut worst = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    for t in povm {
        worst = worst.max(-t.min_eigenvalue()?);
    }
    Ok(worst)
}
