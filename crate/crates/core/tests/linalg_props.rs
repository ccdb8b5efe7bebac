use nlcert::linalg::{herm_eig, partial_trace, psd_sqrt, tensor, trace_norm, ComplexMatrix, HermitianOperator};
use nlcert::random::{gaussian_matrix, random_density, random_unitary, trial_rng};
use proptest::prelude::*;

fn random_hermitian(dim: usize, seed: u64) -> HermitianOperator {
    let g = gaussian_matrix(dim, dim, &mut trial_rng(seed, 0));
    HermitianOperator::new(g.hermitian_part()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_trace_is_multiplicative(m in 1usize..5, n in 1usize..5, seed: u64) {
        let mut rng = trial_rng(seed, 1);
        let a = gaussian_matrix(m, m, &mut rng);
        let b = gaussian_matrix(n, n, &mut rng);
        let t = tensor(&a, &b).unwrap();
        prop_assert!((t.trace() - a.trace() * b.trace()).norm() <= 1e-10);
    }

    #[test]
    fn partial_trace_of_product(m in 1usize..5, n in 1usize..5, seed: u64) {
        let mut rng = trial_rng(seed, 2);
        let rho = random_density(m, m, &mut rng);
        let sigma = gaussian_matrix(n, n, &mut rng);
        let t = tensor(rho.matrix(), &sigma).unwrap();
        let kept = partial_trace(&t, &[m, n], &[0]).unwrap();
        prop_assert!(kept.max_abs_diff(&rho.matrix().scale_complex(sigma.trace())) <= 1e-9);
    }

    #[test]
    fn psd_sqrt_squares_back(dim in 1usize..=32, rank in 1usize..=32, seed: u64) {
        let p = random_density(dim, rank.min(dim), &mut trial_rng(seed, 3)).op().scale(dim as f64);
        let r = psd_sqrt(&p).unwrap();
        prop_assert!((r.matrix() * r.matrix()).max_abs_diff(p.matrix()) <= 1e-8);
    }

    #[test]
    fn eigendecomposition_reconstructs(dim in 1usize..=16, seed: u64) {
        let h = random_hermitian(dim, seed);
        let e = herm_eig(&h).unwrap();
        let v = &e.vectors;
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let recon = &(v * &ComplexMatrix::diag_real(&e.values)) * &v.adjoint();
        prop_assert!(recon.max_abs_diff(h.matrix()) <= 1e-9);
        prop_assert!((&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(dim)) <= 1e-9);
    }

    #[test]
    fn trace_norm_is_unitarily_invariant(dim in 1usize..=8, seed: u64) {
        let h = random_hermitian(dim, seed);
        let u = random_unitary(dim, &mut trial_rng(seed, 4));
        let rotated = h.conjugate_by(&u);
        prop_assert!((trace_norm(&rotated).unwrap() - trace_norm(&h).unwrap()).abs() <= 1e-9);
    }
}
