use nlcert::discrimination::{check_dual, dist, dist_iterative, helstrom_value, DiscriminationInstance};
use nlcert::linalg::HermitianOperator;
use nlcert::random::{random_density_any_rank, random_unitary, trial_rng};
use proptest::prelude::*;
use rand::Rng;

fn instance(n: usize, dim: usize, seed: u64) -> Vec<HermitianOperator> {
    let mut rng = trial_rng(seed, 0);
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter()
        .map(|wi| random_density_any_rank(dim, &mut rng).op().scale(wi / total))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn value_between_trivial_bounds(n in 1usize..=4, dim in 1usize..=4, seed: u64) {
        let inst = DiscriminationInstance::new(instance(n, dim, seed)).unwrap();
        let r = dist(&inst, 1e-7).unwrap();
        let best_single = inst.states().iter().map(|s| s.trace_re()).fold(0.0, f64::max);
        prop_assert!(best_single <= r.value + 1e-9);
        prop_assert!(r.value <= inst.total_trace().min(r.upper_bound()) + 1e-9);
        prop_assert!(check_dual(&inst, &r.dual_certificate).unwrap().max_violation <= 1e-8);
    }

    #[test]
    fn iterative_matches_closed_form(dim in 2usize..=3, seed: u64) {
        let states = instance(2, dim, seed);
        let closed = helstrom_value(&states[0], &states[1]).unwrap();
        let inst = DiscriminationInstance::new(states).unwrap();
        let it = dist_iterative(&inst, 1e-8, 20_000).unwrap();
        prop_assert!((it.value - closed).abs() <= 1e-6, "{} vs {closed}", it.value);
    }

    #[test]
    fn unitary_invariance(n in 2usize..=4, dim in 1usize..=4, seed: u64) {
        let states = instance(n, dim, seed);
        let u = random_unitary(dim, &mut trial_rng(seed, 9));
        let rotated: Vec<_> = states.iter().map(|s| s.conjugate_by(&u)).collect();
        let a = dist(&DiscriminationInstance::new(states).unwrap(), 1e-9).unwrap();
        let b = dist(&DiscriminationInstance::new(rotated).unwrap(), 1e-9).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-8);
    }

    #[test]
    fn appending_zero_changes_nothing(n in 2usize..=3, dim in 1usize..=3, seed: u64) {
        let states = instance(n, dim, seed);
        let mut padded = states.clone();
        padded.push(HermitianOperator::zeros(dim));
        let a = dist(&DiscriminationInstance::new(states).unwrap(), 1e-11).unwrap();
        let b = dist(&DiscriminationInstance::new(padded).unwrap(), 1e-11).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-10, "{} vs {}", a.value, b.value);
    }
}
