#![allow(dead_code)]

use ntic_core::{Alphabet, CategoricalParam, Hyperparameter, Trajectory};
use proptest::prelude::*;

/// Every length-`t` trajectory over `k` symbols, by odometer.
pub fn all_trajectories(k: usize, t: usize) -> Vec<Trajectory> {
    let alphabet = Alphabet::new(k).unwrap();
    let mut out = Vec::new();
    let mut digits = vec![0usize; t];
    loop {
        out.push(Trajectory::new(alphabet, digits.clone()).unwrap());
        let mut i = t;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < k {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Brute-force probability of a trajectory as a plain product.
pub fn trajectory_prob(phi: &CategoricalParam, traj: &Trajectory) -> f64 {
    traj.symbols().iter().map(|&x| phi.probs()[x]).product()
}

pub fn phi_strategy(k: usize) -> impl Strategy<Value = CategoricalParam> {
    prop::collection::vec(0.05f64..1.0, k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        CategoricalParam::new(w.iter().map(|x| x / s).collect()).unwrap()
    })
}

pub fn xi_strategy(k: usize) -> impl Strategy<Value = Hyperparameter> {
    prop::collection::vec(0.1f64..10.0, k).prop_map(|a| Hyperparameter::new(a).unwrap())
}

pub fn trajectory_strategy(
    k: usize,
    min_len: usize,
    max_len: usize,
) -> impl Strategy<Value = Trajectory> {
    prop::collection::vec(0..k, min_len..=max_len)
        .prop_map(move |s| Trajectory::new(Alphabet::new(k).unwrap(), s).unwrap())
}

/// `(k, trajectory)` with `k` in `2..=3`.
pub fn sized_trajectory(
    min_len: usize,
    max_len: usize,
) -> impl Strategy<Value = (usize, Trajectory)> {
    (2usize..=3).prop_flat_map(move |k| (Just(k), trajectory_strategy(k, min_len, max_len)))
}
