mod common;

use std::collections::HashMap;

use approx::assert_abs_diff_eq;
use ntic_core::process::{
    count, count_log_prob, enumerate_counts, inverse_count_cardinality, trajectory_log_prob,
};
use ntic_core::{Alphabet, CategoricalParam, CountVector};
use num_bigint::BigUint;
use proptest::prelude::*;

use common::{all_trajectories, phi_strategy, sized_trajectory, trajectory_prob, xi_strategy};

/// Groups brute-force trajectories by count vector.
fn brute_force_by_count(phi: &CategoricalParam, t: usize) -> HashMap<CountVector, (u64, f64)> {
    let mut groups: HashMap<CountVector, (u64, f64)> = HashMap::new();
    for traj in all_trajectories(phi.alphabet().size(), t) {
        let slot = groups.entry(count(&traj)).or_insert((0, 0.0));
        slot.0 += 1;
        slot.1 += trajectory_prob(phi, &traj);
    }
    groups
}

#[test]
fn count_pmf_matches_trajectory_enumeration() {
    let params = [
        vec![0.5, 0.5],
        vec![0.2, 0.8],
        vec![0.2, 0.3, 0.5],
        vec![0.6, 0.0, 0.4],
        vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    ];
    for p in params {
        let phi = CategoricalParam::new(p).unwrap();
        for t in 0..=8 {
            let groups = brute_force_by_count(&phi, t);
            for c in enumerate_counts(phi.alphabet(), t as u64) {
                let (n, prob) = groups[&c];
                assert_eq!(inverse_count_cardinality(&c), BigUint::from(n), "{c:?}");
                let closed = count_log_prob(&phi, &c).unwrap().exp();
                assert_abs_diff_eq!(closed, prob, epsilon = 1e-12);
            }
            assert_eq!(
                groups.len(),
                enumerate_counts(phi.alphabet(), t as u64).count()
            );
        }
    }
}

#[test]
fn count_pmf_normalizes() {
    for p in [vec![0.3, 0.7], vec![0.1, 0.2, 0.7], vec![0.25; 4]] {
        let phi = CategoricalParam::new(p).unwrap();
        for t in [0u64, 1, 5, 20, 70] {
            let total: f64 = enumerate_counts(phi.alphabet(), t)
                .map(|c| count_log_prob(&phi, &c).unwrap().exp())
                .sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        }
    }
}

proptest! {
    #[test]
    fn count_total_equals_length((_, traj) in sized_trajectory(0, 30)) {
        let c = count(&traj);
        prop_assert_eq!(c.total() as usize, traj.len());
    }

    #[test]
    fn sequential_update_equals_batch_counts(
        (k, traj) in sized_trajectory(0, 20),
        seed in 0u64..1000,
    ) {
        let xi0 = ntic_core::Hyperparameter::new(
            (0..k).map(|i| 0.3 + ((seed + i as u64) % 7) as f64 * 0.9).collect()
        ).unwrap();
        let mut sequential = xi0.clone();
        for &x in traj.symbols() {
            sequential = sequential.update(x).unwrap();
        }
        prop_assert_eq!(&sequential, &xi0.add_counts(&count(&traj)).unwrap());
        prop_assert_eq!(sequential, xi0.update_all(&traj).unwrap());
    }

    #[test]
    fn trajectory_log_prob_is_sum_of_symbols(phi in phi_strategy(3), len in 0usize..12, seed in 0u64..500) {
        let traj = ntic_core::process::sample_trajectory(&phi, len, seed);
        let direct = trajectory_prob(&phi, &traj).ln();
        let got = trajectory_log_prob(&phi, &traj).unwrap();
        prop_assert!((got - direct).abs() <= 1e-12);
    }

    #[test]
    fn posterior_hyperparameters_stay_positive(xi0 in xi_strategy(3), (_, traj) in sized_trajectory(0, 10)) {
        if traj.alphabet().size() == 3 {
            let post = xi0.update_all(&traj).unwrap();
            prop_assert!(post.alpha().iter().all(|a| *a > 0.0));
            prop_assert!((post.total() - xi0.total() - traj.len() as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn sampling_is_seed_deterministic_and_seed_sensitive() {
    let phi = CategoricalParam::new(vec![0.2, 0.3, 0.5]).unwrap();
    let a = ntic_core::process::sample_trajectory(&phi, 200, 42);
    let b = ntic_core::process::sample_trajectory(&phi, 200, 42);
    let c = ntic_core::process::sample_trajectory(&phi, 200, 43);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.alphabet(), Alphabet::new(3).unwrap());
}
