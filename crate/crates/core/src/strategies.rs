//! Quantum strategies: POVM families on each player's space, a shared state,
//! the correlation they achieve, Bob's post-measurement states, and a Naimark
//! dilation that makes Alice's measurements projective.

use std::f64::consts::FRAC_PI_4;
use std::f64::consts::FRAC_PI_8;

use crate::error::{Error, Result};
use crate::games::{Alphabets, Correlation};
use crate::linalg::{
    partial_trace, psd_sqrt, tensor, Complex64, ComplexMatrix, DensityOperator, HermitianOperator,
    ONE, ZERO,
};
use crate::tolerances::{DEFAULT_MAX_DIM, POVM_COMPLETENESS_TOL, PROJECTIVE_TOL, PSD_TOL};

/// Worst-case constraint residuals of a POVM family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmResiduals {
    /// max over settings of ‖Σ_x E_x − I‖_max.
    pub completeness: f64,
    /// max over elements of max(0, −λ_min).
    pub negativity: f64,
    /// max of ‖E² − E‖_max and ‖E_x E_x'‖_max (x ≠ x').
    pub projectivity: f64,
}

/// One POVM per setting, all on the same space and with the same outcome count.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmFamily {
    dim: usize,
    n_outcomes: usize,
    settings: Vec<Vec<HermitianOperator>>,
    residuals: PovmResiduals,
    projective: bool,
}

impl PovmFamily {
    pub fn new(settings: Vec<Vec<HermitianOperator>>) -> Result<Self> {
        let first = settings
            .first()
            .and_then(|s| s.first())
            .ok_or_else(|| Error::InvalidPovm("a POVM family needs at least one element".into()))?;
        let dim = first.dim();
        let n_outcomes = settings[0].len();
        for (k, setting) in settings.iter().enumerate() {
            if setting.len() != n_outcomes {
                return Err(Error::InvalidPovm(format!(
                    "setting {k} has {} outcomes, setting 0 has {n_outcomes}",
                    setting.len()
                )));
            }
            if let Some(e) = setting.iter().find(|e| e.dim() != dim) {
                return Err(Error::InvalidPovm(format!(
                    "setting {k} has a {}-dimensional element on a {dim}-dimensional space",
                    e.dim()
                )));
            }
        }
        let residuals = measure_residuals(dim, &settings)?;
        if residuals.negativity > PSD_TOL {
            return Err(Error::InvalidPovm(format!(
                "element has eigenvalue {:e}",
                -residuals.negativity
            )));
        }
        if residuals.completeness > POVM_COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to the identity only within {:e}",
                residuals.completeness
            )));
        }
        Ok(Self {
            dim,
            n_outcomes,
            projective: residuals.projectivity <= PROJECTIVE_TOL,
            settings,
            residuals,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_settings(&self) -> usize {
        self.settings.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    pub fn residuals(&self) -> PovmResiduals {
        self.residuals
    }

    pub fn element(&self, setting: usize, outcome: usize) -> &HermitianOperator {
        &self.settings[setting][outcome]
    }

    pub fn setting(&self, setting: usize) -> &[HermitianOperator] {
        &self.settings[setting]
    }

    pub fn settings(&self) -> &[Vec<HermitianOperator>] {
        &self.settings
    }

    /// Square roots of every element, in the same layout.
    pub fn sqrt_elements(&self) -> Result<Vec<Vec<HermitianOperator>>> {
        self.settings
            .iter()
            .map(|s| s.iter().map(psd_sqrt).collect())
            .collect()
    }
}

fn measure_residuals(dim: usize, settings: &[Vec<HermitianOperator>]) -> Result<PovmResiduals> {
    let identity = ComplexMatrix::identity(dim);
    let mut r = PovmResiduals {
        completeness: 0.0,
        negativity: 0.0,
        projectivity: 0.0,
    };
    for setting in settings {
        let sum = HermitianOperator::sum(dim, setting);
        r.completeness = r.completeness.max(sum.max_abs_diff(&identity));
        for (i, e) in setting.iter().enumerate() {
            r.negativity = r.negativity.max(-e.min_eigenvalue()?);
            let sq = e.matrix() * e.matrix();
            r.projectivity = r.projectivity.max(sq.max_abs_diff(e.matrix()));
            for f in &setting[i + 1..] {
                r.projectivity = r.projectivity.max((e.matrix() * f.matrix()).max_abs());
            }
        }
    }
    Ok(r)
}

/// `(D, E, {R_a^x}, {S_b^y}, γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    alice: PovmFamily,
    bob: PovmFamily,
    gamma: DensityOperator,
}

impl Strategy {
    pub fn new(alice: PovmFamily, bob: PovmFamily, gamma: DensityOperator) -> Result<Self> {
        if gamma.dim() != alice.dim() * bob.dim() {
            return Err(Error::InvalidStrategy(format!(
                "shared state has dimension {}, expected {}·{}",
                gamma.dim(),
                alice.dim(),
                bob.dim()
            )));
        }
        Ok(Self { alice, bob, gamma })
    }

    /// Both players answer deterministically: `alice[a]`, `bob[b]`.
    ///
    /// Uses D = C^|X|, E = C^|Y|, γ = |00⟩⟨00| and computational-basis projectors
    /// shifted so that measuring |0⟩ yields the prescribed answer.
    pub fn deterministic(sizes: Alphabets, alice: &[usize], bob: &[usize]) -> Result<Self> {
        if alice.len() != sizes.a || bob.len() != sizes.b {
            return Err(Error::Shape("deterministic strategy length mismatch".into()));
        }
        if alice.iter().any(|&x| x >= sizes.x) || bob.iter().any(|&y| y >= sizes.y) {
            return Err(Error::Shape("deterministic answer out of range".into()));
        }
        let shifted = |n: usize, answers: &[usize]| -> Vec<Vec<HermitianOperator>> {
            answers
                .iter()
                .map(|&ans| {
                    (0..n)
                        .map(|x| {
                            let mut d = vec![0.0; n];
                            d[(x + n - ans) % n] = 1.0;
                            HermitianOperator::from_hermitian_part(&ComplexMatrix::diag_real(&d))
                        })
                        .collect()
                })
                .collect()
        };
        let mut ket = vec![ZERO; sizes.x * sizes.y];
        ket[0] = ONE;
        Self::new(
            PovmFamily::new(shifted(sizes.x, alice))?,
            PovmFamily::new(shifted(sizes.y, bob))?,
            DensityOperator::pure(&ket)?,
        )
    }

    pub fn alice(&self) -> &PovmFamily {
        &self.alice
    }

    pub fn bob(&self) -> &PovmFamily {
        &self.bob
    }

    pub fn gamma(&self) -> &DensityOperator {
        &self.gamma
    }

    pub fn dim_alice(&self) -> usize {
        self.alice.dim()
    }

    pub fn dim_bob(&self) -> usize {
        self.bob.dim()
    }

    pub fn sizes(&self) -> Alphabets {
        Alphabets {
            a: self.alice.n_settings(),
            b: self.bob.n_settings(),
            x: self.alice.n_outcomes(),
            y: self.bob.n_outcomes(),
        }
    }

    /// Tr_D[(K ⊗ I) γ (K ⊗ I)†] for an operator K on D.
    pub(crate) fn bob_conditional(&self, k: &ComplexMatrix) -> Result<HermitianOperator> {
        let lifted = tensor(k, &ComplexMatrix::identity(self.dim_bob()))?;
        let m = self.gamma.matrix().conjugate_by(&lifted);
        let reduced = partial_trace(&m, &[self.dim_alice(), self.dim_bob()], &[1])?;
        Ok(HermitianOperator::from_hermitian_part(&reduced))
    }
}

/// p_ab^xy = Tr[(R_a^x ⊗ S_b^y) γ].
pub fn achieved_correlation(s: &Strategy) -> Result<Correlation> {
    let sizes = s.sizes();
    let d = s.dim_alice();
    let e = s.dim_bob();
    let mut p = vec![0.0; sizes.len()];
    for a in 0..sizes.a {
        for x in 0..sizes.x {
            // Tr_D[(R ⊗ I) γ]: Bob's unnormalized conditional operator.
            let lifted = tensor(s.alice.element(a, x), &ComplexMatrix::identity(e))?;
            let rg = &lifted * s.gamma.matrix();
            let cond = partial_trace(&rg, &[d, e], &[1])?;
            for b in 0..sizes.b {
                for y in 0..sizes.y {
                    let v = s.bob.element(b, y).trace_product(&cond).re;
                    p[sizes.index(a, b, x, y)] = v.max(0.0);
                }
            }
        }
    }
    Correlation::new(sizes, p)
}

/// Bob's subnormalized states after both players measure.
#[derive(Debug, Clone)]
pub struct SecondPlayerStates {
    sizes: Alphabets,
    /// Indexed by [`Alphabets::index`].
    rho: Vec<HermitianOperator>,
    /// `rho_pre[a·|X| + x]`: Bob's state after Alice alone measures.
    rho_pre: Vec<HermitianOperator>,
    /// Tr_D γ.
    rho_bob: HermitianOperator,
}

impl SecondPlayerStates {
    pub fn sizes(&self) -> Alphabets {
        self.sizes
    }

    /// ρ_ab^xy.
    pub fn rho(&self, a: usize, b: usize, x: usize, y: usize) -> &HermitianOperator {
        &self.rho[self.sizes.index(a, b, x, y)]
    }

    /// ρ_a^x.
    pub fn rho_pre(&self, a: usize, x: usize) -> &HermitianOperator {
        &self.rho_pre[a * self.sizes.x + x]
    }

    /// ρ = Tr_D γ.
    pub fn rho_bob(&self) -> &HermitianOperator {
        &self.rho_bob
    }

    /// The states {ρ_ab^xy : x ∈ X} for fixed (a, b, y).
    pub fn over_alice_outputs(&self, a: usize, b: usize, y: usize) -> Vec<HermitianOperator> {
        (0..self.sizes.x).map(|x| self.rho(a, b, x, y).clone()).collect()
    }
}

/// ρ_ab^xy = Tr_D[√(R_a^x ⊗ S_b^y) γ √(R_a^x ⊗ S_b^y)].
///
/// Computed as √S ρ_a^x √S with ρ_a^x = Tr_D[(√R ⊗ I) γ (√R ⊗ I)], since √(R ⊗ S) = √R ⊗ √S
/// and conjugation on E commutes with the trace over D.
pub fn second_player_states(s: &Strategy) -> Result<SecondPlayerStates> {
    let sizes = s.sizes();
    let sqrt_r = s.alice.sqrt_elements()?;
    let sqrt_s = s.bob.sqrt_elements()?;
    let mut rho_pre = Vec::with_capacity(sizes.a * sizes.x);
    for row in &sqrt_r {
        for root in row {
            rho_pre.push(s.bob_conditional(root.matrix())?);
        }
    }
    let mut rho = Vec::with_capacity(sizes.len());
    for a in 0..sizes.a {
        for b in 0..sizes.b {
            for x in 0..sizes.x {
                let pre = &rho_pre[a * sizes.x + x];
                for root in &sqrt_s[b] {
                    rho.push(pre.conjugate_by(root.matrix()));
                }
            }
        }
    }
    let rho_bob = HermitianOperator::from_hermitian_part(&partial_trace(
        s.gamma.matrix(),
        &[s.dim_alice(), s.dim_bob()],
        &[1],
    )?);
    Ok(SecondPlayerStates {
        sizes,
        rho,
        rho_pre,
        rho_bob,
    })
}

/// Naimark dilation of Alice's POVMs, with dimension limit [`DEFAULT_MAX_DIM`].
pub fn projectivize(s: &Strategy) -> Result<Strategy> {
    projectivize_with_limit(s, DEFAULT_MAX_DIM)
}

/// Replaces Alice's space D by D ⊗ V_0 ⊗ … ⊗ V_{|A|−1}, one |X|-dimensional ancilla per
/// setting prepared in |0⟩. Setting `a` applies a unitary U_a on D ⊗ V_a extending the
/// isometry |ψ⟩|0⟩ ↦ Σ_x (√R_a^x |ψ⟩)|x⟩ and reads V_a in the computational basis, so
/// its projectors are U_a† (I ⊗ |x⟩⟨x|) U_a. Bob is unchanged.
pub fn projectivize_with_limit(s: &Strategy, max_dim: usize) -> Result<Strategy> {
    let sizes = s.sizes();
    let d = s.dim_alice();
    let e = s.dim_bob();
    let ancilla_dim = (0..sizes.a).try_fold(1usize, |acc, _| acc.checked_mul(sizes.x));
    let new_d = ancilla_dim.and_then(|k| k.checked_mul(d));
    let total = new_d.and_then(|nd| nd.checked_mul(e));
    let (k_dim, new_d) = match (ancilla_dim, new_d, total) {
        (Some(k), Some(nd), Some(t)) if t <= max_dim => (k, nd),
        _ => {
            return Err(Error::Sizing {
                requested: total.unwrap_or(usize::MAX),
                max_dim,
            })
        }
    };

    let sqrt_r = s.alice.sqrt_elements()?;
    let mut settings = Vec::with_capacity(sizes.a);
    for (a, roots) in sqrt_r.iter().enumerate() {
        let u = dilation_unitary(roots, d, sizes.x)?;
        // Stride of ancilla `a` inside the composite ancilla index (ancilla 0 most significant).
        let stride = sizes.x.pow((sizes.a - 1 - a) as u32);
        let mut elements = Vec::with_capacity(sizes.x);
        for x in 0..sizes.x {
            let local = local_projector(&u, d, sizes.x, x);
            elements.push(HermitianOperator::from_hermitian_part(&lift_to_ancillas(
                &local, d, sizes.x, k_dim, stride,
            )));
        }
        settings.push(elements);
    }

    let old = s.gamma.matrix();
    let mut gamma = ComplexMatrix::zeros(new_d * e, new_d * e);
    for d1 in 0..d {
        for e1 in 0..e {
            for d2 in 0..d {
                for e2 in 0..e {
                    gamma[(d1 * k_dim * e + e1, d2 * k_dim * e + e2)] = old[(d1 * e + e1, d2 * e + e2)];
                }
            }
        }
    }
    let gamma = DensityOperator::new(HermitianOperator::from_hermitian_part(&gamma))?;
    Strategy::new(PovmFamily::new(settings)?, s.bob.clone(), gamma)
}

/// Unitary on D ⊗ V (index d·|X| + k) whose columns (d, 0) are Σ_x √R^x|d⟩|x⟩; remaining
/// columns come from Gram–Schmidt over standard basis vectors in index order.
fn dilation_unitary(roots: &[HermitianOperator], d: usize, n_x: usize) -> Result<ComplexMatrix> {
    let n = d * n_x;
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for col in 0..d {
        let mut v = vec![ZERO; n];
        for (x, root) in roots.iter().enumerate() {
            for row in 0..d {
                v[row * n_x + x] = root[(row, col)];
            }
        }
        if !orthonormalize_into(&mut basis, v, 1e-6) {
            return Err(Error::Numerical {
                message: "POVM square roots do not form an isometry".into(),
                residual: 1.0,
            });
        }
    }
    let isometry_cols = basis.len();
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![ZERO; n];
        v[k] = ONE;
        orthonormalize_into(&mut basis, v, 1e-6);
    }
    if basis.len() != n {
        return Err(Error::Numerical {
            message: "Gram-Schmidt completion failed".into(),
            residual: (n - basis.len()) as f64,
        });
    }
    let mut u = ComplexMatrix::zeros(n, n);
    let mut completion = basis[isometry_cols..].iter();
    for col_d in 0..d {
        for k in 0..n_x {
            let col = col_d * n_x + k;
            let vec = if k == 0 {
                &basis[col_d]
            } else {
                completion.next().expect("completion vectors fill the rest")
            };
            for (row, z) in vec.iter().enumerate() {
                u[(row, col)] = *z;
            }
        }
    }
    Ok(u)
}

/// Modified Gram–Schmidt step (applied twice); pushes the normalized remainder
/// when its norm exceeds `min_norm`.
fn orthonormalize_into(basis: &mut Vec<Vec<Complex64>>, mut v: Vec<Complex64>, min_norm: f64) -> bool {
    let start: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..2 {
        for q in basis.iter() {
            let c: Complex64 = q.iter().zip(&v).map(|(qi, vi)| qi.conj() * vi).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= min_norm * start.max(1.0) {
        return false;
    }
    for z in v.iter_mut() {
        *z /= norm;
    }
    basis.push(v);
    true
}

/// U† (I_D ⊗ |x⟩⟨x|) U.
fn local_projector(u: &ComplexMatrix, d: usize, n_x: usize, x: usize) -> ComplexMatrix {
    let n = d * n_x;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for dd in 0..d {
                let r = dd * n_x + x;
                acc += u[(r, i)].conj() * u[(r, j)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Lifts an operator on D ⊗ V_a to D ⊗ V_0 ⊗ … ⊗ V_{n−1} (identity on the other ancillas).
fn lift_to_ancillas(local: &ComplexMatrix, d: usize, n_x: usize, k_dim: usize, stride: usize) -> ComplexMatrix {
    let n = d * k_dim;
    let mut out = ComplexMatrix::zeros(n, n);
    for d1 in 0..d {
        for d2 in 0..d {
            for k in 0..k_dim {
                let digit = (k / stride) % n_x;
                let rest = k - digit * stride;
                for digit2 in 0..n_x {
                    let v = local[(d1 * n_x + digit, d2 * n_x + digit2)];
                    if v == ZERO {
                        continue;
                    }
                    let k2 = rest + digit2 * stride;
                    out[(d1 * k_dim + k, d2 * k_dim + k2)] = v;
                }
            }
        }
    }
    out
}

/// Two-outcome projective measurement onto cos θ|0⟩ + sin θ|1⟩ (outcome 0) and its complement.
pub fn angle_measurement(theta: f64) -> Vec<HermitianOperator> {
    let v = [Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0)];
    let p0 = ComplexMatrix::projector(&v);
    let p1 = &ComplexMatrix::identity(2) - &p0;
    vec![
        HermitianOperator::from_hermitian_part(&p0),
        HermitianOperator::from_hermitian_part(&p1),
    ]
}

/// |Φ⁺⟩ = (|00⟩ + |11⟩)/√2.
pub fn phi_plus() -> DensityOperator {
    DensityOperator::pure(&[ONE, ZERO, ZERO, ONE]).expect("nonzero vector")
}

/// Maximally entangled qubit pair with Alice at angles {0, π/4} and Bob at {π/8, −π/8}.
pub fn chsh_optimal_strategy() -> Strategy {
    let alice = PovmFamily::new(vec![angle_measurement(0.0), angle_measurement(FRAC_PI_4)])
        .expect("valid measurements");
    let bob = PovmFamily::new(vec![angle_measurement(FRAC_PI_8), angle_measurement(-FRAC_PI_8)])
        .expect("valid measurements");
    Strategy::new(alice, bob, phi_plus()).expect("consistent dimensions")
}
