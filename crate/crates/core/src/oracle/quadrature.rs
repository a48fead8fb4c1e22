//! Double-exponential (tanh-sinh) quadrature on `(0, 1)` and the Beta
//! integrals built on it.
//!
//! Abscissae cluster doubly exponentially at the endpoints and are never
//! placed on them, so the algebraic and logarithmic endpoint singularities of
//! Beta densities are integrated without special handling. Each abscissa is
//! produced together with its distance to 1, which keeps `ln(1 - x)` accurate
//! near the right endpoint. Normalizing constants are integrated as well, so
//! nothing here depends on the special-function module.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::process::Hyperparameter;

/// Absolute accuracy target of `oracle_kl_quadrature`.
pub const KL_QUADRATURE_TARGET: f64 = 1e-8;

/// `|tau|` beyond which abscissae sit closer than ~1e-270 to an endpoint.
const TAU_MAX: f64 = 6.0;
const MAX_LEVEL: u32 = 12;
const MIN_LEVEL: u32 = 4;

/// Result of a tanh-sinh integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error_estimate: f64,
    pub levels: u32,
    pub evaluations: usize,
}

/// Integrates `f(x, 1 - x)` over `(0, 1)` until two successive step halvings
/// agree to `tolerance` (absolute).
pub fn tanh_sinh<F>(f: F, tolerance: f64) -> Result<Quadrature>
where
    F: Fn(f64, f64) -> f64,
{
    let mut evaluations = 0usize;
    let mut node = |tau: f64| -> Result<f64> {
        let u = FRAC_PI_2 * tau.sinh();
        let e = (-2.0 * u.abs()).exp();
        let near = e / (1.0 + e);
        let far = 1.0 / (1.0 + e);
        let (x, xc) = if tau >= 0.0 { (far, near) } else { (near, far) };
        if x == 0.0 || xc == 0.0 {
            return Ok(0.0);
        }
        // dx/dtau = pi cosh(tau) x (1 - x)
        let weight = PI * tau.cosh() * x * xc;
        evaluations += 1;
        let term = f(x, xc) * weight;
        if term.is_finite() {
            Ok(term)
        } else {
            Err(Error::Numerical(format!(
                "non-finite integrand at x = {x:e} (1 - x = {xc:e})"
            )))
        }
    };

    // Level 0: step 1, nodes at integers.
    let mut sum = node(0.0)?;
    let mut edge = 0.0f64;
    let mut k = 1.0;
    while k <= TAU_MAX {
        let pair = node(k)? + node(-k)?;
        sum += pair;
        edge = pair.abs();
        k += 1.0;
    }
    let mut step = 1.0;
    let mut previous = sum * step;
    let mut last_diff = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        step *= 0.5;
        let mut tau = step;
        while tau <= TAU_MAX {
            let pair = node(tau)? + node(-tau)?;
            sum += pair;
            tau += 2.0 * step;
        }
        let current = sum * step;
        last_diff = (current - previous).abs();
        if level >= MIN_LEVEL && last_diff <= tolerance {
            if edge * step > tolerance {
                return Err(Error::Numerical(format!(
                    "tanh-sinh tail term {:e} exceeds tolerance {tolerance:e}",
                    edge * step
                )));
            }
            return Ok(Quadrature {
                value: current,
                error_estimate: last_diff,
                levels: level,
                evaluations,
            });
        }
        previous = current;
    }
    Err(Error::Numerical(format!(
        "tanh-sinh did not converge after {MAX_LEVEL} levels: last change {last_diff:e}, \
         tolerance {tolerance:e}, {evaluations} evaluations"
    )))
}

/// Unnormalized Beta log density `(a-1) ln x + (b-1) ln(1-x)`.
fn beta_kernel(a: f64, b: f64, x: f64, xc: f64) -> f64 {
    let mut acc = 0.0;
    if a != 1.0 {
        acc += (a - 1.0) * x.ln();
    }
    if b != 1.0 {
        acc += (b - 1.0) * xc.ln();
    }
    acc
}

fn beta_params(xi: &Hyperparameter) -> Result<(f64, f64)> {
    match xi.alpha() {
        &[a, b] => Ok((a, b)),
        other => Err(Error::InvalidParameter(format!(
            "Beta quadrature needs a two-symbol hyperparameter, got {} components",
            other.len()
        ))),
    }
}

const INNER_TOLERANCE: f64 = 1e-13;

/// `ln ∫ x^{a-1} (1-x)^{b-1} dx` by quadrature.
pub fn log_beta_quadrature(a: f64, b: f64) -> Result<f64> {
    let q = tanh_sinh(|x, xc| beta_kernel(a, b, x, xc).exp(), INNER_TOLERANCE)?;
    Ok(q.value.ln())
}

/// `KL[Beta(post) || Beta(prior)]` by direct integration of the
/// definition, normalizers included.
pub fn oracle_kl_quadrature(xi_post: &Hyperparameter, xi_prior: &Hyperparameter) -> Result<f64> {
    let (a1, b1) = beta_params(xi_post)?;
    let (a0, b0) = beta_params(xi_prior)?;
    let log_z1 = log_beta_quadrature(a1, b1)?;
    let log_z0 = log_beta_quadrature(a0, b0)?;
    let cross = tanh_sinh(
        |x, xc| {
            let log_post = beta_kernel(a1, b1, x, xc);
            let log_ratio = log_post - beta_kernel(a0, b0, x, xc);
            (log_post - log_z1).exp() * log_ratio
        },
        INNER_TOLERANCE,
    )?;
    let kl = cross.value - log_z1 + log_z0;
    if !kl.is_finite() {
        return Err(Error::Numerical(format!(
            "KL quadrature produced {kl} (log normalizers {log_z1}, {log_z0})"
        )));
    }
    Ok(kl)
}

/// `E_xi[ln phi_hat_x]` by integrating against the Beta marginal
/// `Beta(xi_x, |xi| - xi_x)` of component `x`.
pub fn oracle_expected_log_prob(xi: &Hyperparameter, symbol: usize) -> Result<f64> {
    let a = xi.component(symbol)?;
    let b = xi.total() - a;
    if b <= 0.0 {
        // Single-symbol alphabet: the component is 1 almost surely.
        return Ok(0.0);
    }
    let log_z = log_beta_quadrature(a, b)?;
    let q = tanh_sinh(
        |x, xc| (beta_kernel(a, b, x, xc) - log_z).exp() * x.ln(),
        INNER_TOLERANCE,
    )?;
    Ok(q.value)
}
