//! Non-trivial informational closure of the hyperparameter counter.
//!
//! Full past: `NTIC_t = I(X_{<t} : Xi_t) - I(Xi_t : X_{t-1} | Xi_{t-1})`,
//! which for this chain reduces to `H(C_t | phi) - H(X | phi)`. One step:
//! the mutual-information term uses only `X_{t-1}`, and the pointwise value
//! collapses to the log relative frequency of the last symbol.
//!
//! Expectations are exact sums over count space, which grows polynomially in
//! `t` for a fixed alphabet.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::{
    count, count_log_prob, count_space_size, enumerate_counts, log_multinomial, symbol_log_prob,
    trajectory_log_prob, CategoricalParam, Trajectory,
};
use crate::units::{PairwiseSum, Units};

/// Default cap on the number of count vectors an exact expectation may visit.
pub const DEFAULT_COUNT_SPACE_CAP: u128 = 10_000_000;

/// Full-past NTIC at time `t` with both constituent terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NticReport {
    pub t: u64,
    pub value: f64,
    pub mi_term: f64,
    pub te_term: f64,
}

/// `NticReport` as emitted by the CLI: values converted, unit attached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NticRecord {
    pub t: u64,
    pub value: f64,
    pub mi_term: f64,
    pub te_term: f64,
    pub units: Units,
}

impl NticReport {
    pub fn in_units(&self, units: Units) -> NticRecord {
        NticRecord {
            t: self.t,
            value: units.convert(self.value),
            mi_term: units.convert(self.mi_term),
            te_term: units.convert(self.te_term),
            units,
        }
    }
}

/// Relative frequencies `c_x / |c|` of a nonempty trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    probs: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }
}

fn check_count_space(k: usize, t: u64, cap: u128) -> Result<()> {
    let required = count_space_size(k, t);
    if required > cap {
        return Err(Error::Resource {
            required,
            cap,
            hint: "use Monte Carlo mode (--samples) for this horizon",
        });
    }
    Ok(())
}

/// `H(X | phi)` with `0 ln 0 = 0`.
pub fn symbol_entropy(phi: &CategoricalParam) -> f64 {
    -phi.probs()
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// `H(C_t | phi)`, summed exactly over count space.
pub fn count_entropy(phi: &CategoricalParam, t: u64) -> Result<f64> {
    count_entropy_with_cap(phi, t, DEFAULT_COUNT_SPACE_CAP)
}

pub fn count_entropy_with_cap(phi: &CategoricalParam, t: u64, cap: u128) -> Result<f64> {
    check_count_space(phi.alphabet().size(), t, cap)?;
    let mut sum = PairwiseSum::new();
    for c in enumerate_counts(phi.alphabet(), t) {
        let lp = count_log_prob(phi, &c)?;
        if lp.is_finite() {
            sum.add(-lp.exp() * lp);
        }
    }
    // The sum is an entropy; tiny negative residue only appears when H = 0.
    Ok(sum.total().max(0.0))
}

/// Full-past NTIC, `H(C_t | phi) - H(X | phi)`. Does not depend on `xi_0`.
pub fn ntic(phi: &CategoricalParam, t: u64) -> Result<NticReport> {
    ntic_with_cap(phi, t, DEFAULT_COUNT_SPACE_CAP)
}

pub fn ntic_with_cap(phi: &CategoricalParam, t: u64, cap: u128) -> Result<NticReport> {
    if t == 0 {
        return Err(Error::Domain("NTIC is defined for t >= 1".into()));
    }
    let mi_term = count_entropy_with_cap(phi, t, cap)?;
    let te_term = symbol_entropy(phi);
    Ok(NticReport {
        t,
        value: mi_term - te_term,
        mi_term,
        te_term,
    })
}

/// Pointwise full-past NTIC, `ln p(x_{t-1} | phi) - ln p(c(x_{<t}) | phi)`.
pub fn pointwise_ntic(phi: &CategoricalParam, traj: &Trajectory) -> Result<f64> {
    let last = traj
        .last()
        .ok_or_else(|| Error::Domain("pointwise NTIC needs a nonempty trajectory".into()))?;
    if trajectory_log_prob(phi, traj)? == f64::NEG_INFINITY {
        return Err(Error::Domain(
            "trajectory has zero probability under phi".into(),
        ));
    }
    Ok(symbol_log_prob(phi, last)? - count_log_prob(phi, &count(traj))?)
}

/// `ln(c(x_{<t})_{x_{t-1}} / t)`: the log relative frequency of the last
/// symbol. Independent of both `phi` and `xi_0`.
pub fn one_step_pointwise_ntic(traj: &Trajectory) -> Result<f64> {
    let last = traj.last().ok_or_else(|| {
        Error::Domain("one-step pointwise NTIC needs a nonempty trajectory".into())
    })?;
    let occurrences = traj.symbols().iter().filter(|&&x| x == last).count();
    Ok((occurrences as f64 / traj.len() as f64).ln())
}

/// Expected one-step NTIC `sum_x p(x_{<t} | phi) ln(c_{x_{t-1}} / t)`.
///
/// Trajectories are grouped by count `c` and last symbol `x`; there are
/// `|c^{-1}(c - delta_x)|` of them whenever `c_x >= 1`.
pub fn one_step_ntic(phi: &CategoricalParam, t: u64) -> Result<f64> {
    one_step_ntic_with_cap(phi, t, DEFAULT_COUNT_SPACE_CAP)
}

pub fn one_step_ntic_with_cap(phi: &CategoricalParam, t: u64, cap: u128) -> Result<f64> {
    if t == 0 {
        return Err(Error::Domain("one-step NTIC is defined for t >= 1".into()));
    }
    check_count_space(phi.alphabet().size(), t, cap)?;
    let log_phi: Vec<f64> = phi.probs().iter().map(|p| p.ln()).collect();
    let mut sum = PairwiseSum::new();
    for c in enumerate_counts(phi.alphabet(), t) {
        let mut log_weight = 0.0;
        let mut feasible = true;
        for (&cx, &lp) in c.counts().iter().zip(&log_phi) {
            if cx > 0 {
                if lp == f64::NEG_INFINITY {
                    feasible = false;
                    break;
                }
                log_weight += cx as f64 * lp;
            }
        }
        if !feasible {
            continue;
        }
        for (x, &cx) in c.counts().iter().enumerate() {
            if cx == 0 || cx == t {
                // cx == t contributes ln 1 = 0.
                continue;
            }
            let before = c.remove_one(x).expect("cx >= 1");
            let p = (log_multinomial(&before) + log_weight).exp();
            sum.add(p * (cx as f64 / t as f64).ln());
        }
    }
    Ok(sum.total())
}

pub fn empirical_distribution(traj: &Trajectory) -> Result<EmpiricalDistribution> {
    if traj.is_empty() {
        return Err(Error::Domain(
            "empirical distribution of an empty trajectory".into(),
        ));
    }
    let n = traj.len() as f64;
    let probs = count(traj).counts().iter().map(|&c| c as f64 / n).collect();
    Ok(EmpiricalDistribution { probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Alphabet;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn phi(p: &[f64]) -> CategoricalParam {
        CategoricalParam::new(p.to_vec()).unwrap()
    }

    fn traj(k: usize, xs: &[usize]) -> Trajectory {
        Trajectory::new(Alphabet::new(k).unwrap(), xs.to_vec()).unwrap()
    }

    #[test]
    fn symbol_entropy_examples() {
        assert_abs_diff_eq!(symbol_entropy(&phi(&[0.5, 0.5])), LN_2, epsilon = 1e-15);
        assert_eq!(symbol_entropy(&phi(&[1.0, 0.0])), 0.0);
        let expected = -0.25 * 0.25f64.ln() - 0.75 * 0.75f64.ln();
        assert_abs_diff_eq!(
            symbol_entropy(&phi(&[0.25, 0.75])),
            expected,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(expected, 0.5623, epsilon = 1e-4);
    }

    #[test]
    fn count_entropy_examples() {
        assert_eq!(count_entropy(&phi(&[0.3, 0.7]), 0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            count_entropy(&phi(&[0.5, 0.5]), 1).unwrap(),
            LN_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            count_entropy(&phi(&[0.5, 0.5]), 2).unwrap(),
            1.5 * LN_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn count_entropy_respects_cap() {
        let err = count_entropy_with_cap(&phi(&[0.2, 0.3, 0.5]), 100, 1000).unwrap_err();
        assert!(matches!(
            err,
            Error::Resource {
                required: 5151,
                cap: 1000,
                ..
            }
        ));
    }

    #[test]
    fn ntic_examples() {
        let r = ntic(&phi(&[0.5, 0.5]), 1).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-15);
        for t in 1..=10 {
            assert_eq!(ntic(&phi(&[1.0, 0.0]), t).unwrap().value, 0.0);
        }
        let r = ntic(&phi(&[0.5, 0.5]), 2).unwrap();
        assert_abs_diff_eq!(r.value, 0.5 * LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(r.value, r.mi_term - r.te_term, epsilon = 0.0);
        assert!(ntic(&phi(&[0.5, 0.5]), 0).is_err());
    }

    #[test]
    fn ntic_report_units() {
        let rec = ntic(&phi(&[0.5, 0.5]), 2).unwrap().in_units(Units::Bits);
        assert_abs_diff_eq!(rec.value, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rec.te_term, 1.0, epsilon = 1e-15);
        assert_eq!(rec.units, Units::Bits);
    }

    #[test]
    fn pointwise_ntic_examples() {
        assert_eq!(
            pointwise_ntic(&phi(&[1.0, 0.0]), &traj(2, &[0, 0, 0])).unwrap(),
            0.0
        );
        assert_abs_diff_eq!(
            pointwise_ntic(&phi(&[0.5, 0.5]), &traj(2, &[0])).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            pointwise_ntic(&phi(&[0.5, 0.5]), &traj(2, &[0, 1])).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            pointwise_ntic(&phi(&[1.0, 0.0]), &traj(2, &[0, 1])),
            Err(Error::Domain(_))
        ));
        assert!(pointwise_ntic(&phi(&[0.5, 0.5]), &traj(2, &[])).is_err());
    }

    #[test]
    fn one_step_pointwise_examples() {
        assert_eq!(one_step_pointwise_ntic(&traj(2, &[0])).unwrap(), 0.0);
        assert_abs_diff_eq!(
            one_step_pointwise_ntic(&traj(2, &[0, 1, 0])).unwrap(),
            (2.0f64 / 3.0).ln()
        );
        assert_abs_diff_eq!(
            one_step_pointwise_ntic(&traj(2, &[0, 0, 1])).unwrap(),
            (1.0f64 / 3.0).ln()
        );
        assert!(one_step_pointwise_ntic(&traj(2, &[])).is_err());
    }

    #[test]
    fn one_step_ntic_examples() {
        for t in 1..=6 {
            assert_eq!(one_step_ntic(&phi(&[1.0, 0.0]), t).unwrap(), 0.0);
        }
        assert_eq!(one_step_ntic(&phi(&[0.2, 0.3, 0.5]), 1).unwrap(), 0.0);
        assert_abs_diff_eq!(
            one_step_ntic(&phi(&[0.5, 0.5]), 2).unwrap(),
            -0.5 * LN_2,
            epsilon = 1e-15
        );
        assert!(one_step_ntic(&phi(&[0.5, 0.5]), 0).is_err());
    }

    #[test]
    fn empirical_distribution_examples() {
        assert_eq!(
            empirical_distribution(&traj(2, &[0, 0])).unwrap().probs(),
            &[1.0, 0.0]
        );
        assert_eq!(
            empirical_distribution(&traj(2, &[0, 1])).unwrap().probs(),
            &[0.5, 0.5]
        );
        assert_eq!(
            empirical_distribution(&traj(3, &[0, 1, 1, 2]))
                .unwrap()
                .probs(),
            &[0.25, 0.5, 0.25]
        );
        assert!(empirical_distribution(&traj(3, &[])).is_err());
        let t = traj(3, &[2, 0, 1, 2, 2]);
        let q = empirical_distribution(&t).unwrap();
        assert_eq!(one_step_pointwise_ntic(&t).unwrap(), q.prob(2).ln());
    }
}
