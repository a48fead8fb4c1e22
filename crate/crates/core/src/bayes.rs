//! Dirichlet beliefs carried by the hyperparameter: posterior predictive,
//! marginal and hindsight surprise, and information gain.
//!
//! Because `xi_t = xi_0 + c(x_{<t})`, the hyperparameter is exactly the
//! concentration of the Dirichlet posterior after `x_{<t}` under prior
//! `Dirichlet(xi_0)`.

use serde::Serialize;

use crate::closure::one_step_pointwise_ntic;
use crate::error::{Error, Result};
use crate::process::{count, Hyperparameter, Trajectory};
use crate::special::{digamma, log_gamma};
use crate::units::Units;

/// Rounding slack below zero that KL results are clamped from.
pub const KL_ROUNDING_SLACK: f64 = 1e-12;

/// Minimum `|IG_a - IG_b|` for the divergence witness to count as a success.
pub const WITNESS_MIN_GAP: f64 = 1e-12;

/// A Dirichlet belief `q(phi_hat | xi)` over model parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletBelief {
    xi: Hyperparameter,
}

impl DirichletBelief {
    pub fn new(xi: Hyperparameter) -> Self {
        DirichletBelief { xi }
    }

    /// The belief after observing `traj` from prior `xi0`.
    pub fn posterior(xi0: &Hyperparameter, traj: &Trajectory) -> Result<Self> {
        Ok(DirichletBelief::new(xi0.add_counts(&count(traj))?))
    }

    pub fn concentration(&self) -> &Hyperparameter {
        &self.xi
    }

    pub fn predictive(&self, symbol: usize) -> Result<f64> {
        posterior_predictive(&self.xi, symbol)
    }

    pub fn expected_log_prob(&self, symbol: usize) -> Result<f64> {
        expected_log_predictive(&self.xi, symbol)
    }

    /// `ln q(phi_hat | xi)` at an interior point of the simplex.
    pub fn log_density(&self, point: &[f64]) -> Result<f64> {
        let alpha = self.xi.alpha();
        if point.len() != alpha.len() {
            return Err(Error::AlphabetMismatch {
                expected: alpha.len(),
                found: point.len(),
            });
        }
        let mut acc = log_gamma(self.xi.total())?;
        for (&a, &p) in alpha.iter().zip(point) {
            acc += (a - 1.0) * p.ln() - log_gamma(a)?;
        }
        Ok(acc)
    }

    /// `KL[self || other]` in closed form.
    pub fn kl_divergence(&self, other: &DirichletBelief) -> Result<f64> {
        let a = self.xi.alpha();
        let b = other.xi.alpha();
        if a.len() != b.len() {
            return Err(Error::AlphabetMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let total_a = self.xi.total();
        let psi_total = digamma(total_a)?;
        let mut kl = log_gamma(total_a)? - log_gamma(other.xi.total())?;
        for (&ai, &bi) in a.iter().zip(b) {
            kl += log_gamma(bi)? - log_gamma(ai)?;
            if ai != bi {
                kl += (ai - bi) * (digamma(ai)? - psi_total);
            }
        }
        clamp_kl(kl)
    }
}

fn clamp_kl(kl: f64) -> Result<f64> {
    if kl >= 0.0 {
        Ok(kl)
    } else if kl > -KL_ROUNDING_SLACK {
        Ok(0.0)
    } else {
        Err(Error::InternalConsistency(format!(
            "KL divergence evaluated to {kl}"
        )))
    }
}

/// One-step information gain with its decomposition into the marginal
/// surprise of `x_{t-1}` before it was seen and the expected hindsight
/// surprise after.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoGainReport {
    pub value: f64,
    pub surprise_term: f64,
    pub expected_hindsight_term: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoGainRecord {
    pub value: f64,
    pub surprise_term: f64,
    pub expected_hindsight_term: f64,
    pub units: Units,
}

impl InfoGainReport {
    pub fn in_units(&self, units: Units) -> InfoGainRecord {
        InfoGainRecord {
            value: units.convert(self.value),
            surprise_term: units.convert(self.surprise_term),
            expected_hindsight_term: units.convert(self.expected_hindsight_term),
            units,
        }
    }
}

/// `(xi)_x / |xi|`.
pub fn posterior_predictive(xi: &Hyperparameter, symbol: usize) -> Result<f64> {
    Ok(xi.component(symbol)? / xi.total())
}

/// `-ln q(x | x_{<t}, xi_0)`. With `x` equal to the last symbol of `traj`
/// this is the hindsight marginal surprise.
pub fn marginal_surprise(xi0: &Hyperparameter, traj: &Trajectory, symbol: usize) -> Result<f64> {
    let posterior = xi0.add_counts(&count(traj))?;
    Ok(-posterior_predictive(&posterior, symbol)?.ln())
}

/// `-ln q_hat(x_{t-1})`, the surprise of the last symbol under the
/// empirical distribution that already includes it.
pub fn hindsight_empirical_surprise(traj: &Trajectory) -> Result<f64> {
    Ok(0.0 - one_step_pointwise_ntic(traj)?)
}

/// `E_xi[ln q(x | phi_hat)] = Ψ(xi_x) - Ψ(|xi|)`.
pub fn expected_log_predictive(xi: &Hyperparameter, symbol: usize) -> Result<f64> {
    Ok(digamma(xi.component(symbol)?)? - digamma(xi.total())?)
}

/// Information gain from the last observation of `traj`:
/// `KL[Dir(xi_t) || Dir(xi_{t-1})]`.
pub fn one_step_info_gain(xi0: &Hyperparameter, traj: &Trajectory) -> Result<InfoGainReport> {
    let last = traj.last().ok_or_else(|| {
        Error::Domain("one-step information gain needs a nonempty trajectory".into())
    })?;
    let c = count(traj);
    let posterior = xi0.add_counts(&c)?;
    let t = traj.len() as f64;
    let numerator = xi0.alpha()[last] - 1.0 + c.get(last) as f64;
    let denominator = xi0.total() - 1.0 + t;
    let surprise_term = -(numerator / denominator).ln();
    let expected_hindsight_term = -expected_log_predictive(&posterior, last)?;
    let value = clamp_kl(surprise_term - expected_hindsight_term)?;
    Ok(InfoGainReport {
        value,
        surprise_term,
        expected_hindsight_term,
    })
}

/// `KL[Dir(xi_0 + c(x_{<t})) || Dir(xi_0)]` via log-gamma and digamma.
pub fn full_past_info_gain(xi0: &Hyperparameter, traj: &Trajectory) -> Result<f64> {
    let c = count(traj);
    let posterior = xi0.add_counts(&c)?;
    let total_post = posterior.total();
    let psi_total = digamma(total_post)?;
    // ln g(x_{<t}, xi_0)
    let mut kl = log_gamma(total_post)? - log_gamma(xi0.total())?;
    for (&prior, &cx) in xi0.alpha().iter().zip(c.counts()) {
        if cx == 0 {
            continue;
        }
        let post = prior + cx as f64;
        kl += log_gamma(prior)? - log_gamma(post)?;
        kl += cx as f64 * (digamma(post)? - psi_total);
    }
    clamp_kl(kl)
}

/// Same one-step pointwise NTIC, different one-step information gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceWitness {
    pub one_step_pointwise_ntic: f64,
    pub info_gain_a: InfoGainReport,
    pub info_gain_b: InfoGainReport,
    pub gap: f64,
}

/// Evaluates both priors on `traj` and succeeds when the information gains
/// differ while the (prior-free) one-step pointwise NTIC cannot.
pub fn ntic_ig_divergence_witness(
    traj: &Trajectory,
    xi0_a: &Hyperparameter,
    xi0_b: &Hyperparameter,
) -> Result<DivergenceWitness> {
    let ntic = one_step_pointwise_ntic(traj)?;
    let info_gain_a = one_step_info_gain(xi0_a, traj)?;
    let info_gain_b = one_step_info_gain(xi0_b, traj)?;
    let gap = (info_gain_a.value - info_gain_b.value).abs();
    if gap <= WITNESS_MIN_GAP {
        return Err(Error::WitnessFailed {
            gain_a: info_gain_a.value,
            gain_b: info_gain_b.value,
        });
    }
    Ok(DivergenceWitness {
        one_step_pointwise_ntic: ntic,
        info_gain_a,
        info_gain_b,
        gap,
    })
}
