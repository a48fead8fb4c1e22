//! Exhaustive joint over `(x_{<t}, xi_{t-1}, xi_t)` and the definitional
//! information sums on top of it.
//!
//! Nothing here uses counts or multinomial coefficients: hyperparameters are
//! produced by replaying the counter update along each trajectory and all
//! marginals are accumulated by grouping on the resulting states.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::{CategoricalParam, Hyperparameter, Trajectory};

/// Default cap on `K^t` for the exhaustive joint.
pub const DEFAULT_JOINT_CAP: u128 = 1_000_000;

/// Allowed gap between the full-past and last-symbol transfer entropies.
pub const TE_FORMS_TOLERANCE: f64 = 1e-10;

/// Which past the mutual-information term conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfoMode {
    /// `I(X_{<t} : Xi_t)`
    FullPast,
    /// `I(X_{t-1} : Xi_t)`
    OneStep,
}

/// Interned hyperparameter state.
type StateId = u32;

/// One nonzero-probability trajectory of the joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointEntry {
    /// Base-`K` code of the trajectory, `x_0` most significant.
    pub code: u64,
    pub prob: f64,
    pub last: Option<usize>,
    pub xi_prev: StateId,
    pub xi_t: StateId,
}

/// The joint `p(x_{<t}, xi_{t-1}, xi_t | xi_0, phi)`, keyed by trajectory.
#[derive(Debug, Clone)]
pub struct JointTable {
    phi: CategoricalParam,
    xi0: Hyperparameter,
    t: usize,
    entries: Vec<JointEntry>,
    states: Vec<Hyperparameter>,
}

struct StateInterner {
    ids: HashMap<Vec<u64>, StateId>,
    states: Vec<Hyperparameter>,
}

impl StateInterner {
    fn intern(&mut self, xi: &Hyperparameter) -> StateId {
        // Keys are exact bit patterns; every trajectory with the same counts
        // performs the same sequence of additions per component.
        let key: Vec<u64> = xi.alpha().iter().map(|a| a.to_bits()).collect();
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.states.len() as StateId;
        self.states.push(xi.clone());
        self.ids.insert(key, id);
        id
    }
}

pub fn build_joint(phi: &CategoricalParam, xi0: &Hyperparameter, t: usize) -> Result<JointTable> {
    build_joint_with_cap(phi, xi0, t, DEFAULT_JOINT_CAP)
}

pub fn build_joint_with_cap(
    phi: &CategoricalParam,
    xi0: &Hyperparameter,
    t: usize,
    cap: u128,
) -> Result<JointTable> {
    let k = phi.alphabet().size();
    if xi0.alphabet() != phi.alphabet() {
        return Err(Error::AlphabetMismatch {
            expected: k,
            found: xi0.alphabet().size(),
        });
    }
    let required = (k as u128)
        .checked_pow(t as u32)
        .filter(|_| t <= u32::MAX as usize)
        .unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::Resource {
            required,
            cap,
            hint: "reduce t or the alphabet size for exhaustive enumeration",
        });
    }

    let mut interner = StateInterner {
        ids: HashMap::new(),
        states: Vec::new(),
    };
    let mut entries = Vec::new();

    // Depth-first over the trajectory tree; frame = (code, prob, xi, xi_prev, last, depth).
    struct Frame {
        code: u64,
        prob: f64,
        xi: Hyperparameter,
        xi_prev: Hyperparameter,
        last: Option<usize>,
        depth: usize,
    }
    let mut stack = vec![Frame {
        code: 0,
        prob: 1.0,
        xi: xi0.clone(),
        xi_prev: xi0.clone(),
        last: None,
        depth: 0,
    }];
    while let Some(frame) = stack.pop() {
        if frame.depth == t {
            let xi_prev = interner.intern(&frame.xi_prev);
            let xi_t = interner.intern(&frame.xi);
            entries.push(JointEntry {
                code: frame.code,
                prob: frame.prob,
                last: frame.last,
                xi_prev,
                xi_t,
            });
            continue;
        }
        // Reverse push keeps output in increasing code order.
        for x in (0..k).rev() {
            let p = phi.probs()[x];
            if p == 0.0 {
                continue;
            }
            stack.push(Frame {
                code: frame.code * k as u64 + x as u64,
                prob: frame.prob * p,
                xi: frame.xi.update(x)?,
                xi_prev: frame.xi.clone(),
                last: Some(x),
                depth: frame.depth + 1,
            });
        }
    }

    Ok(JointTable {
        phi: phi.clone(),
        xi0: xi0.clone(),
        t,
        entries,
        states: interner.states,
    })
}

impl JointTable {
    pub fn phi(&self) -> &CategoricalParam {
        &self.phi
    }

    pub fn xi0(&self) -> &Hyperparameter {
        &self.xi0
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn entries(&self) -> &[JointEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn state(&self, id: StateId) -> &Hyperparameter {
        &self.states[id as usize]
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.prob).sum()
    }

    pub fn trajectory(&self, entry: &JointEntry) -> Trajectory {
        let k = self.phi.alphabet().size() as u64;
        let mut symbols = vec![0usize; self.t];
        let mut code = entry.code;
        for slot in symbols.iter_mut().rev() {
            *slot = (code % k) as usize;
            code /= k;
        }
        Trajectory::new(self.phi.alphabet(), symbols).expect("decoded symbols are in range")
    }

    fn encode(&self, traj: &Trajectory) -> Result<u64> {
        if traj.alphabet() != self.phi.alphabet() {
            return Err(Error::AlphabetMismatch {
                expected: self.phi.alphabet().size(),
                found: traj.alphabet().size(),
            });
        }
        if traj.len() != self.t {
            return Err(Error::Domain(format!(
                "trajectory of length {} queried in a joint of depth {}",
                traj.len(),
                self.t
            )));
        }
        let k = self.phi.alphabet().size() as u64;
        Ok(traj
            .symbols()
            .iter()
            .fold(0u64, |acc, &x| acc * k + x as u64))
    }

    /// Entry for `traj`, or `None` when it has zero probability.
    pub fn find(&self, traj: &Trajectory) -> Result<Option<&JointEntry>> {
        let code = self.encode(traj)?;
        Ok(self
            .entries
            .binary_search_by_key(&code, |e| e.code)
            .ok()
            .map(|i| &self.entries[i]))
    }

    /// Accumulates every marginal the definitional sums need.
    pub fn analyze(&self) -> JointAnalysis<'_> {
        let mut xi_t = HashMap::new();
        let mut xi_prev = HashMap::new();
        let mut last = HashMap::new();
        let mut last_xi_t = HashMap::new();
        let mut xi_t_prev = HashMap::new();
        let mut last_prev = HashMap::new();
        let mut xi_t_last_prev = HashMap::new();
        for e in &self.entries {
            *xi_t.entry(e.xi_t).or_insert(0.0) += e.prob;
            *xi_prev.entry(e.xi_prev).or_insert(0.0) += e.prob;
            *last.entry(e.last).or_insert(0.0) += e.prob;
            *last_xi_t.entry((e.last, e.xi_t)).or_insert(0.0) += e.prob;
            *xi_t_prev.entry((e.xi_t, e.xi_prev)).or_insert(0.0) += e.prob;
            *last_prev.entry((e.last, e.xi_prev)).or_insert(0.0) += e.prob;
            *xi_t_last_prev
                .entry((e.xi_t, e.last, e.xi_prev))
                .or_insert(0.0) += e.prob;
        }
        JointAnalysis {
            joint: self,
            xi_t,
            xi_prev,
            last,
            last_xi_t,
            xi_t_prev,
            last_prev,
            xi_t_last_prev,
        }
    }
}

/// Marginals of a `JointTable`, with pointwise and averaged measures.
#[derive(Debug)]
pub struct JointAnalysis<'a> {
    joint: &'a JointTable,
    xi_t: HashMap<StateId, f64>,
    xi_prev: HashMap<StateId, f64>,
    last: HashMap<Option<usize>, f64>,
    last_xi_t: HashMap<(Option<usize>, StateId), f64>,
    xi_t_prev: HashMap<(StateId, StateId), f64>,
    last_prev: HashMap<(Option<usize>, StateId), f64>,
    xi_t_last_prev: HashMap<(StateId, Option<usize>, StateId), f64>,
}

impl JointAnalysis<'_> {
    pub fn joint(&self) -> &JointTable {
        self.joint
    }

    fn require_step(&self) -> Result<()> {
        if self.joint.t == 0 {
            return Err(Error::Domain(
                "transfer entropy needs at least one observation".into(),
            ));
        }
        Ok(())
    }

    /// `ln p(xi_t | x_{<t}) / p(xi_t)` for one entry.
    pub fn pointwise_mi_full_past(&self, e: &JointEntry) -> f64 {
        // p(xi_t | x_{<t}) is 1: the trajectory fixes xi_t.
        -self.xi_t[&e.xi_t].ln()
    }

    /// `ln p(x_{t-1}, xi_t) / (p(x_{t-1}) p(xi_t))` for one entry.
    pub fn pointwise_mi_one_step(&self, e: &JointEntry) -> f64 {
        let joint = self.last_xi_t[&(e.last, e.xi_t)];
        (joint / (self.last[&e.last] * self.xi_t[&e.xi_t])).ln()
    }

    /// `ln p(x_{t-1} | xi_t, xi_{t-1}) / p(x_{t-1} | xi_{t-1})` for one entry.
    pub fn pointwise_te(&self, e: &JointEntry) -> f64 {
        let full = self.xi_t_last_prev[&(e.xi_t, e.last, e.xi_prev)];
        let numerator = full / self.xi_t_prev[&(e.xi_t, e.xi_prev)];
        let denominator = self.last_prev[&(e.last, e.xi_prev)] / self.xi_prev[&e.xi_prev];
        (numerator / denominator).ln()
    }

    /// Same as `pointwise_te` but conditioning on the whole trajectory
    /// instead of only its last symbol.
    pub fn pointwise_te_full_past(&self, e: &JointEntry) -> f64 {
        // p(x_{<t}, xi_{t-1}) = p(x_{<t}, xi_t, xi_{t-1}) = e.prob.
        let numerator = e.prob / self.xi_t_prev[&(e.xi_t, e.xi_prev)];
        let denominator = e.prob / self.xi_prev[&e.xi_prev];
        (numerator / denominator).ln()
    }

    pub fn pointwise_ntic(&self, e: &JointEntry, mode: InfoMode) -> Result<f64> {
        self.require_step()?;
        let mi = match mode {
            InfoMode::FullPast => self.pointwise_mi_full_past(e),
            InfoMode::OneStep => self.pointwise_mi_one_step(e),
        };
        Ok(mi - self.pointwise_te(e))
    }

    fn expectation(&self, f: impl Fn(&JointEntry) -> f64) -> f64 {
        self.joint.entries.iter().map(|e| e.prob * f(e)).sum()
    }

    pub fn mutual_information(&self, mode: InfoMode) -> f64 {
        match mode {
            InfoMode::FullPast => self.expectation(|e| self.pointwise_mi_full_past(e)),
            InfoMode::OneStep => self.expectation(|e| self.pointwise_mi_one_step(e)),
        }
    }

    /// `I(Xi_t : X_{t-1} | Xi_{t-1})`, after confirming it equals
    /// `I(Xi_t : X_{<t} | Xi_{t-1})`.
    pub fn transfer_entropy(&self) -> Result<f64> {
        let (last_symbol, full_past) = self.transfer_entropy_forms()?;
        if (last_symbol - full_past).abs() > TE_FORMS_TOLERANCE {
            return Err(Error::InternalConsistency(format!(
                "transfer entropy forms disagree: last symbol {last_symbol}, full past {full_past}"
            )));
        }
        Ok(last_symbol)
    }

    /// Both transfer-entropy forms, `(last symbol, full past)`.
    pub fn transfer_entropy_forms(&self) -> Result<(f64, f64)> {
        self.require_step()?;
        Ok((
            self.expectation(|e| self.pointwise_te(e)),
            self.expectation(|e| self.pointwise_te_full_past(e)),
        ))
    }

    pub fn ntic(&self, mode: InfoMode) -> Result<f64> {
        Ok(self.mutual_information(mode) - self.transfer_entropy()?)
    }
}

pub fn oracle_mutual_information(joint: &JointTable, mode: InfoMode) -> f64 {
    joint.analyze().mutual_information(mode)
}

pub fn oracle_transfer_entropy(joint: &JointTable) -> Result<f64> {
    joint.analyze().transfer_entropy()
}

pub fn oracle_ntic(
    phi: &CategoricalParam,
    xi0: &Hyperparameter,
    t: usize,
    mode: InfoMode,
) -> Result<f64> {
    if t == 0 {
        return Err(Error::Domain("NTIC is defined for t >= 1".into()));
    }
    build_joint(phi, xi0, t)?.analyze().ntic(mode)
}
