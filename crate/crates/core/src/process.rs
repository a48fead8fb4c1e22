//! The IID categorical data process and the hyperparameter counter chain.
//!
//! Observations `x_0, x_1, ...` are drawn independently from a categorical
//! parameter `phi`. The hyperparameter starts at `xi_0` and after every
//! observation the component of the observed symbol is incremented by one, so
//! `xi_t = xi_0 + c(x_{<t})` where `c` counts symbol occurrences. Everything
//! downstream only needs counts, multinomial coefficients and the
//! enumeration of count vectors, which live here too.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::log_gamma;

/// Tolerance on `sum(phi) == 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Above this total the log multinomial coefficient switches from the exact
/// integer to log-gamma.
const EXACT_LOG_MULTINOMIAL_MAX_TOTAL: u64 = 64;

/// A finite alphabet `{0, .., size - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter(
                "alphabet must contain at least one symbol".into(),
            ));
        }
        Ok(Alphabet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn check_symbol(&self, symbol: usize) -> Result<()> {
        if symbol < self.size {
            Ok(())
        } else {
            Err(Error::SymbolOutOfRange {
                symbol,
                size: self.size,
            })
        }
    }

    fn check_same(&self, other: Alphabet) -> Result<()> {
        if self.size == other.size {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                expected: self.size,
                found: other.size,
            })
        }
    }
}

/// The environment parameter `phi`: a probability vector over the alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoricalParam {
    probs: Vec<f64>,
}

impl CategoricalParam {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter(
                "categorical parameter needs at least one component".into(),
            ));
        }
        if let Some(p) = probs
            .iter()
            .find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0)
        {
            return Err(Error::InvalidParameter(format!(
                "probability {p} is not in [0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(CategoricalParam { probs })
    }

    /// The uniform parameter over `size` symbols.
    pub fn uniform(size: usize) -> Result<Self> {
        Alphabet::new(size)?;
        Self::new(vec![1.0 / size as f64; size])
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet {
            size: self.probs.len(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> Result<f64> {
        self.alphabet().check_symbol(symbol)?;
        Ok(self.probs[symbol])
    }

    /// True when at least two symbols have nonzero probability.
    pub fn is_nondegenerate(&self) -> bool {
        self.probs.iter().filter(|p| **p > 0.0).count() >= 2
    }
}

/// A Dirichlet concentration vector `xi` with strictly positive components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperparameter {
    alpha: Vec<f64>,
}

impl Hyperparameter {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidParameter(
                "hyperparameter needs at least one component".into(),
            ));
        }
        if let Some(a) = alpha.iter().find(|a| !a.is_finite() || **a <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hyperparameter component {a} is not strictly positive"
            )));
        }
        Ok(Hyperparameter { alpha })
    }

    /// `lambda * (1, .., 1)`.
    pub fn symmetric(size: usize, lambda: f64) -> Result<Self> {
        Alphabet::new(size)?;
        Self::new(vec![lambda; size])
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet {
            size: self.alpha.len(),
        }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn component(&self, symbol: usize) -> Result<f64> {
        self.alphabet().check_symbol(symbol)?;
        Ok(self.alpha[symbol])
    }

    /// `|xi|`, the sum of all components.
    pub fn total(&self) -> f64 {
        self.alpha.iter().sum()
    }

    /// The counter step: component `symbol` grows by one.
    pub fn update(&self, symbol: usize) -> Result<Self> {
        self.alphabet().check_symbol(symbol)?;
        let mut alpha = self.alpha.clone();
        alpha[symbol] += 1.0;
        Ok(Hyperparameter { alpha })
    }

    /// Applies `update` once per symbol of `traj`, in order.
    pub fn update_all(&self, traj: &Trajectory) -> Result<Self> {
        self.alphabet().check_same(traj.alphabet())?;
        let mut alpha = self.alpha.clone();
        for &x in traj.symbols() {
            alpha[x] += 1.0;
        }
        Ok(Hyperparameter { alpha })
    }

    /// `xi + c`, the batch form of the counter.
    ///
    /// Components are incremented one unit at a time so the result is
    /// bit-identical to replaying `update` (`(a + 1) + 1` and `a + 2` can
    /// round differently for non-integer `a`).
    pub fn add_counts(&self, counts: &CountVector) -> Result<Self> {
        self.alphabet().check_same(counts.alphabet())?;
        let alpha = self
            .alpha
            .iter()
            .zip(counts.counts())
            .map(|(&a, &c)| (0..c).fold(a, |acc, _| acc + 1.0))
            .collect();
        Ok(Hyperparameter { alpha })
    }
}

/// A finite observation sequence `x_{<t}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Trajectory {
    #[serde(skip)]
    alphabet: Alphabet,
    symbols: Vec<usize>,
}

impl Trajectory {
    pub fn new(alphabet: Alphabet, symbols: Vec<usize>) -> Result<Self> {
        for &x in &symbols {
            alphabet.check_symbol(x)?;
        }
        Ok(Trajectory { alphabet, symbols })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Trajectory {
            alphabet,
            symbols: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.symbols.last().copied()
    }

    /// The first `len` symbols.
    pub fn prefix(&self, len: usize) -> Trajectory {
        Trajectory {
            alphabet: self.alphabet,
            symbols: self.symbols[..len.min(self.symbols.len())].to_vec(),
        }
    }

    pub fn counts(&self) -> CountVector {
        count(self)
    }
}

/// Occurrence counts per symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CountVector {
    counts: Vec<u64>,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidParameter(
                "count vector needs at least one component".into(),
            ));
        }
        Ok(CountVector { counts })
    }

    pub fn zeros(alphabet: Alphabet) -> Self {
        CountVector {
            counts: vec![0; alphabet.size()],
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet {
            size: self.counts.len(),
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, symbol: usize) -> u64 {
        self.counts[symbol]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `c - delta_symbol`, or `None` when that component is already zero.
    pub fn remove_one(&self, symbol: usize) -> Option<CountVector> {
        let mut counts = self.counts.clone();
        let slot = counts.get_mut(symbol)?;
        *slot = slot.checked_sub(1)?;
        Some(CountVector { counts })
    }
}

/// `ln p(x | phi)`, `-inf` for a zero-probability symbol.
pub fn symbol_log_prob(phi: &CategoricalParam, symbol: usize) -> Result<f64> {
    Ok(phi.prob(symbol)?.ln())
}

/// `ln p(x_{<t} | phi)`, the sum of the per-symbol log probabilities.
pub fn trajectory_log_prob(phi: &CategoricalParam, traj: &Trajectory) -> Result<f64> {
    phi.alphabet().check_same(traj.alphabet())?;
    Ok(traj.symbols().iter().map(|&x| phi.probs[x].ln()).sum())
}

pub fn count(traj: &Trajectory) -> CountVector {
    let mut counts = vec![0u64; traj.alphabet().size()];
    for &x in traj.symbols() {
        counts[x] += 1;
    }
    CountVector { counts }
}

/// Number of trajectories whose count vector is `c`: the multinomial
/// coefficient `(sum c)! / prod(c_x!)`, exact.
pub fn inverse_count_cardinality(c: &CountVector) -> BigUint {
    let mut result = BigUint::one();
    let mut running = 0u64;
    for &cx in c.counts() {
        // Each partial product is result * binomial(running + j, j), an integer.
        for j in 1..=cx {
            running += 1;
            result *= running;
            result /= j;
        }
    }
    result
}

/// `ln |c^{-1}(c)|`.
pub fn log_multinomial(c: &CountVector) -> f64 {
    let total = c.total();
    if total <= EXACT_LOG_MULTINOMIAL_MAX_TOTAL {
        // At most 64! < 2^300, so the conversion is finite and correctly rounded.
        inverse_count_cardinality(c)
            .to_f64()
            .expect("multinomial of total <= 64 fits in f64")
            .ln()
    } else {
        let mut acc = log_gamma(total as f64 + 1.0).expect("positive argument");
        for &cx in c.counts() {
            acc -= log_gamma(cx as f64 + 1.0).expect("positive argument");
        }
        acc
    }
}

/// `ln p(C_t = c | phi)`, the multinomial pmf in log domain.
pub fn count_log_prob(phi: &CategoricalParam, c: &CountVector) -> Result<f64> {
    phi.alphabet().check_same(c.alphabet())?;
    let mut acc = 0.0;
    for (&p, &cx) in phi.probs().iter().zip(c.counts()) {
        if cx == 0 {
            continue;
        }
        if p == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc += cx as f64 * p.ln();
    }
    Ok(acc + log_multinomial(c))
}

/// Number of count vectors of total `t` over `k` symbols,
/// `binomial(t + k - 1, k - 1)`, saturating at `u128::MAX`.
pub fn count_space_size(k: usize, t: u64) -> u128 {
    if k == 0 {
        return 0;
    }
    let n = BigUint::from(t) + BigUint::from(k as u64 - 1);
    num_integer::binomial(n, BigUint::from(k as u64 - 1))
        .to_u128()
        .unwrap_or(u128::MAX)
}

/// Iterator over every count vector of total `t` over `k` symbols, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct CountCompositions {
    current: Option<Vec<u64>>,
    total: u64,
}

impl Iterator for CountCompositions {
    type Item = CountVector;

    fn next(&mut self) -> Option<CountVector> {
        let out = self.current.clone()?;
        self.advance();
        Some(CountVector { counts: out })
    }
}

impl CountCompositions {
    fn advance(&mut self) {
        let Some(parts) = self.current.as_mut() else {
            return;
        };
        let k = parts.len();
        let mut prefix: u64 = 0;
        let prefix_sums: Vec<u64> = parts[..k - 1]
            .iter()
            .map(|&p| {
                prefix += p;
                prefix
            })
            .collect();
        for i in (0..k.saturating_sub(1)).rev() {
            if prefix_sums[i] < self.total {
                parts[i] += 1;
                for p in &mut parts[i + 1..k - 1] {
                    *p = 0;
                }
                parts[k - 1] = self.total - (prefix_sums[i] + 1);
                return;
            }
        }
        self.current = None;
    }
}

pub fn enumerate_counts(alphabet: Alphabet, t: u64) -> CountCompositions {
    let mut first = vec![0u64; alphabet.size()];
    first[alphabet.size() - 1] = t;
    CountCompositions {
        current: Some(first),
        total: t,
    }
}

/// Draws `t` IID symbols from `phi` by inverse-CDF sampling on a ChaCha8
/// stream seeded with `seed`.
pub fn sample_trajectory(phi: &CategoricalParam, t: usize, seed: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(phi, t, &mut rng)
}

pub(crate) fn sample_with<R: Rng>(phi: &CategoricalParam, t: usize, rng: &mut R) -> Trajectory {
    let last_supported = phi
        .probs()
        .iter()
        .rposition(|p| *p > 0.0)
        .expect("normalized parameter has a nonzero component");
    let symbols = (0..t)
        .map(|_| {
            let u: f64 = rng.gen();
            let mut cumulative = 0.0;
            for (x, &p) in phi.probs().iter().enumerate() {
                cumulative += p;
                if u < cumulative {
                    return x;
                }
            }
            // Rounding left the cumulative sum just short of one.
            last_supported
        })
        .collect();
    Trajectory {
        alphabet: phi.alphabet(),
        symbols,
    }
}
