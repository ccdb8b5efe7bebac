//! Seeded random instances: unitaries, states, measurements, strategies, games.
//!
//! Unitaries come from Gram–Schmidt on complex Gaussian matrices, density
//! operators from normalized Wishart matrices, projective measurements from
//! conjugated coordinate projectors.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::games::{Alphabets, Game};
use crate::linalg::{psd_inv_sqrt, Complex64, ComplexMatrix, DensityOperator, HermitianOperator};
use crate::strategies::{angle_measurement, phi_plus, PovmFamily, Strategy};

/// Generator for trial `index` of a run seeded with `seed`; independent across indices.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("finite gaussian entries")
}

pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let c: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

pub fn random_pure_vector(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// G G† / Tr(G G†) with G a dim × rank Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = gaussian_matrix(dim, rank.max(1), rng);
    let w = &g * &g.adjoint();
    let t = w.trace().re;
    DensityOperator::from_matrix(w.scale(1.0 / t).hermitian_part()).expect("Wishart matrices are states")
}

/// Density operator with a uniformly chosen rank in 1..=dim.
pub fn random_density_any_rank(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let rank = rng.gen_range(1..=dim);
    random_density(dim, rank, rng)
}

/// Projective measurement U diag(1_{S_x}) U† for a random partition {S_x} of the
/// coordinates; every outcome gets at least one coordinate when `n_outcomes ≤ dim`.
pub fn random_projective(dim: usize, n_outcomes: usize, rng: &mut impl Rng) -> Vec<HermitianOperator> {
    let u = random_unitary(dim, rng);
    let mut coords: Vec<usize> = (0..dim).collect();
    coords.shuffle(rng);
    let mut owner = vec![0usize; dim];
    for (k, &c) in coords.iter().enumerate() {
        owner[c] = if k < n_outcomes { k } else { rng.gen_range(0..n_outcomes) };
    }
    (0..n_outcomes)
        .map(|x| {
            let diag: Vec<f64> = owner.iter().map(|&o| if o == x { 1.0 } else { 0.0 }).collect();
            HermitianOperator::new(ComplexMatrix::diag_real(&diag).conjugate_by(&u).hermitian_part())
                .expect("conjugated projector is Hermitian")
        })
        .collect()
}

/// General POVM E_x = S^{-1/2} G_x S^{-1/2} from random positive G_x. The last G_x
/// has full rank so that S = Σ G_x is invertible.
pub fn random_povm(dim: usize, n_outcomes: usize, rng: &mut impl Rng) -> Vec<HermitianOperator> {
    let raw: Vec<HermitianOperator> = (0..n_outcomes)
        .map(|x| {
            let rank = if x + 1 == n_outcomes { dim } else { rng.gen_range(1..=dim) };
            let g = gaussian_matrix(dim, rank, rng);
            HermitianOperator::new((&g * &g.adjoint()).hermitian_part()).expect("Hermitian")
        })
        .collect();
    let sum = HermitianOperator::sum(dim, &raw);
    let (inv_root, _) = psd_inv_sqrt(&sum, 0.0).expect("eigendecomposition");
    raw.iter().map(|g| g.conjugate_by(inv_root.matrix())).collect()
}

pub fn random_measurement(dim: usize, n_outcomes: usize, projective: bool, rng: &mut impl Rng) -> Vec<HermitianOperator> {
    if projective {
        random_projective(dim, n_outcomes, rng)
    } else {
        random_povm(dim, n_outcomes, rng)
    }
}

/// Strategy with the given alphabets and local dimensions. Alice is projective when
/// `projective_alice`; Bob's measurements are projective or general at random.
pub fn random_strategy(
    sizes: Alphabets,
    dim_alice: usize,
    dim_bob: usize,
    projective_alice: bool,
    rng: &mut impl Rng,
) -> Result<Strategy> {
    let alice = (0..sizes.a)
        .map(|_| random_measurement(dim_alice, sizes.x, projective_alice, rng))
        .collect();
    let bob_projective = rng.gen_bool(0.5);
    let bob = (0..sizes.b)
        .map(|_| random_measurement(dim_bob, sizes.y, bob_projective, rng))
        .collect();
    let gamma = random_density_any_rank(dim_alice * dim_bob, rng);
    Strategy::new(PovmFamily::new(alice)?, PovmFamily::new(bob)?, gamma)
}

/// Binary CHSH-style strategy near the optimum: jittered angles, a maximally entangled
/// pair mixed with white-ish noise, embedded in qubits.
pub fn perturbed_chsh_strategy(rng: &mut impl Rng) -> Result<Strategy> {
    let jitter = rng.gen_range(0.0..0.3);
    let mut angle = |base: f64| base + jitter * rng.sample::<f64, _>(StandardNormal);
    let alice = vec![angle_measurement(angle(0.0)), angle_measurement(angle(std::f64::consts::FRAC_PI_4))];
    let bob = vec![
        angle_measurement(angle(std::f64::consts::FRAC_PI_8)),
        angle_measurement(angle(-std::f64::consts::FRAC_PI_8)),
    ];
    let noise = rng.gen_range(0.0..0.5);
    let mixed = random_density(4, 4, rng);
    let gamma = &phi_plus().matrix().scale(1.0 - noise) + &mixed.matrix().scale(noise);
    Strategy::new(
        PovmFamily::new(alice)?,
        PovmFamily::new(bob)?,
        DensityOperator::from_matrix(gamma.hermitian_part())?,
    )
}

/// Complete-support game: q bounded away from zero, scores either 0/1 or uniform in [0, 1].
pub fn random_game(sizes: Alphabets, rng: &mut impl Rng) -> Game {
    let raw: Vec<f64> = (0..sizes.inputs()).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut q: Vec<f64> = raw.iter().map(|v| v / total).collect();
    // Fold rounding into the largest entry so Σ q = 1 to the last bit that matters.
    let drift = 1.0 - q.iter().sum::<f64>();
    if let Some(max) = q.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *max += drift;
    }
    let binary = rng.gen_bool(0.5);
    let h = (0..sizes.len())
        .map(|_| if binary { f64::from(u8::from(rng.gen_bool(0.5))) } else { rng.gen_range(0.0..=1.0) })
        .collect();
    Game::new(sizes, q, h).expect("random game is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = trial_rng(7, 0);
        let u = random_unitary(5, &mut rng);
        assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(5)) < 1e-12);
    }

    #[test]
    fn measurements_are_valid() {
        let mut rng = trial_rng(7, 1);
        for dim in 1..=4 {
            for n in 1..=4 {
                let p = PovmFamily::new(vec![random_projective(dim, n, &mut rng)]).unwrap();
                assert!(p.is_projective());
                PovmFamily::new(vec![random_povm(dim, n, &mut rng)]).unwrap();
            }
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = random_density(3, 2, &mut trial_rng(11, 4));
        let b = random_density(3, 2, &mut trial_rng(11, 4));
        let c = random_density(3, 2, &mut trial_rng(11, 5));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_games_have_complete_support() {
        let mut rng = trial_rng(3, 0);
        for _ in 0..20 {
            assert!(random_game(Alphabets::new(3, 2, 2, 3).unwrap(), &mut rng).complete_support());
        }
    }
}
