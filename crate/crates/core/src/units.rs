use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Reporting unit for information quantities. Everything is computed in nats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    /// Converts a value in nats to this unit.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        })
    }
}

impl FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            other => Err(Error::InvalidParameter(format!(
                "unknown unit {other:?}, expected nats or bits"
            ))),
        }
    }
}

/// Fixed-shape pairwise summation.
///
/// Values are folded in a binary-counter tree, so the result depends only on
/// the sequence of inputs and not on how the caller batches them.
#[derive(Debug, Default, Clone)]
pub struct PairwiseSum {
    // stack[i] holds the sum of a complete block of 2^levels[i] inputs.
    stack: Vec<(u32, f64)>,
}

impl PairwiseSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let mut level = 0u32;
        let mut acc = value;
        while let Some(&(top_level, top)) = self.stack.last() {
            if top_level != level {
                break;
            }
            self.stack.pop();
            acc += top;
            level += 1;
        }
        self.stack.push((level, acc));
    }

    pub fn total(&self) -> f64 {
        self.stack.iter().rev().fold(0.0, |acc, &(_, v)| acc + v)
    }
}

impl FromIterator<f64> for PairwiseSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut sum = PairwiseSum::new();
        for v in iter {
            sum.add(v);
        }
        sum
    }
}
