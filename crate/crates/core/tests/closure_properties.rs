mod common;

use approx::assert_abs_diff_eq;
use ntic_core::closure::{
    empirical_distribution, ntic, one_step_ntic, one_step_pointwise_ntic, pointwise_ntic,
};
use ntic_core::process::trajectory_log_prob;
use ntic_core::{CategoricalParam, Trajectory};
use proptest::prelude::*;

use common::{all_trajectories, phi_strategy, sized_trajectory, trajectory_prob};

fn phis() -> Vec<CategoricalParam> {
    [
        vec![0.5, 0.5],
        vec![0.2, 0.8],
        vec![1.0, 0.0],
        vec![0.2, 0.3, 0.5],
        vec![0.7, 0.0, 0.3],
        vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    ]
    .into_iter()
    .map(|p| CategoricalParam::new(p).unwrap())
    .collect()
}

#[test]
fn ntic_is_expectation_of_pointwise_ntic() {
    for phi in phis() {
        for t in 1..=8 {
            let mut expectation = 0.0;
            for traj in all_trajectories(phi.alphabet().size(), t) {
                if trajectory_log_prob(&phi, &traj).unwrap() == f64::NEG_INFINITY {
                    continue;
                }
                expectation += trajectory_prob(&phi, &traj) * pointwise_ntic(&phi, &traj).unwrap();
            }
            let closed = ntic(&phi, t as u64).unwrap().value;
            assert_abs_diff_eq!(closed, expectation, epsilon = 1e-10);
        }
    }
}

#[test]
fn one_step_ntic_matches_trajectory_enumeration() {
    for phi in phis() {
        for t in 1..=8 {
            let brute: f64 = all_trajectories(phi.alphabet().size(), t)
                .iter()
                .map(|traj| {
                    let p = trajectory_prob(&phi, traj);
                    if p == 0.0 {
                        0.0
                    } else {
                        p * one_step_pointwise_ntic(traj).unwrap()
                    }
                })
                .sum();
            let closed = one_step_ntic(&phi, t as u64).unwrap();
            assert_abs_diff_eq!(closed, brute, epsilon = 1e-12);
        }
    }
}

#[test]
fn ntic_grows_strictly_while_transfer_entropy_stays_constant() {
    for phi in phis().into_iter().filter(|p| p.is_nondegenerate()) {
        let reports: Vec<_> = (1..=12).map(|t| ntic(&phi, t).unwrap()).collect();
        for w in reports.windows(2) {
            assert!(
                w[1].value > w[0].value,
                "{phi:?}: {} !> {}",
                w[1].value,
                w[0].value
            );
            assert_eq!(w[1].te_term, w[0].te_term);
        }
        assert_abs_diff_eq!(reports[0].value, 0.0, epsilon = 1e-12);
    }
}

#[test]
fn report_decomposes() {
    for phi in phis() {
        for t in 1..=10 {
            let r = ntic(&phi, t).unwrap();
            assert_abs_diff_eq!(r.value, r.mi_term - r.te_term, epsilon = 1e-12);
            assert_eq!(r.t, t);
        }
    }
}

#[test]
fn report_serializes_with_units() {
    let phi = CategoricalParam::new(vec![0.5, 0.5]).unwrap();
    let rec = ntic(&phi, 2).unwrap().in_units(ntic_core::Units::Bits);
    let json = serde_json::to_value(rec).unwrap();
    assert_eq!(json["t"], 2);
    assert_eq!(json["units"], "bits");
    for key in ["value", "mi_term", "te_term"] {
        assert!(json[key].is_number(), "{key}");
    }
}

fn permute_prefix(traj: &Trajectory, rotation: usize) -> Trajectory {
    let n = traj.len();
    let mut symbols = traj.symbols().to_vec();
    if n > 1 {
        symbols[..n - 1].rotate_left(rotation % (n - 1));
        symbols[..n - 1].reverse();
    }
    Trajectory::new(traj.alphabet(), symbols).unwrap()
}

proptest! {
    #[test]
    fn one_step_pointwise_depends_only_on_counts_and_last(
        (_, traj) in sized_trajectory(1, 14),
        rotation in 0usize..20,
    ) {
        let permuted = permute_prefix(&traj, rotation);
        prop_assert_eq!(
            one_step_pointwise_ntic(&traj).unwrap(),
            one_step_pointwise_ntic(&permuted).unwrap()
        );
    }

    #[test]
    fn one_step_pointwise_is_nonpositive((_, traj) in sized_trajectory(1, 14)) {
        let v = one_step_pointwise_ntic(&traj).unwrap();
        prop_assert!(v <= 0.0);
        let constant = traj.symbols().iter().all(|&x| Some(x) == traj.last());
        prop_assert_eq!(v == 0.0, constant);
    }

    #[test]
    fn empirical_distribution_reads_one_step_pointwise((_, traj) in sized_trajectory(1, 14)) {
        let q = empirical_distribution(&traj).unwrap();
        prop_assert!((q.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(one_step_pointwise_ntic(&traj).unwrap(), q.prob(traj.last().unwrap()).ln());
    }

    #[test]
    fn pointwise_ntic_of_first_step_vanishes(phi in phi_strategy(3), x in 0usize..3) {
        let traj = Trajectory::new(phi.alphabet(), vec![x]).unwrap();
        prop_assert!(pointwise_ntic(&phi, &traj).unwrap().abs() <= 1e-15);
    }
}
