//! Exact information measures for a Bayesian hyperparameter that counts IID
//! categorical observations.
//!
//! The hyperparameter `xi_t = xi_0 + c(x_{<t})` of a Dirichlet belief is a
//! deterministic Markov chain driven by the observations. This crate computes
//! its non-trivial informational closure (full-past and one-step, expected
//! and pointwise), the marginal and hindsight surprises of its beliefs, and
//! their information gain, all in closed form. The [`oracle`] module
//! recomputes the same quantities from their definitions by exhaustive
//! enumeration and quadrature.
//!
//! All values are natural-log (nats) unless converted with [`Units`].
//!
//! ```
//! use ntic_core::{closure, CategoricalParam};
//!
//! let phi = CategoricalParam::new(vec![0.5, 0.5]).unwrap();
//! let report = closure::ntic(&phi, 2).unwrap();
//! assert!((report.value - 0.5 * std::f64::consts::LN_2).abs() < 1e-12);
//! ```

pub mod bayes;
pub mod closure;
pub mod error;
pub mod oracle;
pub mod process;
pub mod special;
pub mod units;

pub use bayes::{DirichletBelief, DivergenceWitness, InfoGainReport};
pub use closure::{EmpiricalDistribution, NticReport};
pub use error::{Error, Result};
pub use process::{Alphabet, CategoricalParam, CountVector, Hyperparameter, Trajectory};
pub use units::Units;
