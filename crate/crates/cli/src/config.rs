//! Run configuration: JSON config file overlaid by command-line flags.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ntic_core::{Alphabet, CategoricalParam, Hyperparameter, Trajectory, Units};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Quantities `curve` can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Ntic,
    OneStepNtic,
    Pointwise,
    InfoGain,
    Surprise,
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ntic" => Ok(Quantity::Ntic),
            "one_step_ntic" => Ok(Quantity::OneStepNtic),
            "pointwise" => Ok(Quantity::Pointwise),
            "info_gain" => Ok(Quantity::InfoGain),
            "surprise" => Ok(Quantity::Surprise),
            other => Err(format!(
                "unknown quantity {other:?} (expected ntic, one_step_ntic, pointwise, info_gain, surprise)"
            )),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Ntic => "ntic",
            Quantity::OneStepNtic => "one_step_ntic",
            Quantity::Pointwise => "pointwise",
            Quantity::InfoGain => "info_gain",
            Quantity::Surprise => "surprise",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Every field optional; used for both the config file and the flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub phi: Option<Vec<f64>>,
    pub xi0: Option<Vec<f64>>,
    #[serde(alias = "t_max")]
    pub tmax: Option<u64>,
    #[serde(alias = "trajectory")]
    pub traj: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub units: Option<Units>,
    #[serde(alias = "output_format")]
    pub format: Option<OutputFormat>,
    #[serde(alias = "output_path")]
    pub out: Option<PathBuf>,
    pub quantities: Option<Vec<Quantity>>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage {
            field: "config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage {
            field: "config".into(),
            message: format!("{}: {e}", path.display()),
        })
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            phi: over.phi.or(self.phi),
            xi0: over.xi0.or(self.xi0),
            tmax: over.tmax.or(self.tmax),
            traj: over.traj.or(self.traj),
            seed: over.seed.or(self.seed),
            samples: over.samples.or(self.samples),
            units: over.units.or(self.units),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            quantities: over.quantities.or(self.quantities),
        }
    }
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub phi: CategoricalParam,
    pub xi0: Hyperparameter,
    pub t_max: u64,
    pub trajectory: Option<Trajectory>,
    pub quantities: BTreeSet<Quantity>,
    pub seed: u64,
    pub samples: u64,
    pub units: Units,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

pub const DEFAULT_T_MAX: u64 = 10;

fn usage(field: &str, err: impl fmt::Display) -> CliError {
    CliError::Usage {
        field: field.into(),
        message: err.to_string(),
    }
}

impl RunConfig {
    pub fn resolve(partial: PartialConfig) -> Result<Self, CliError> {
        // Alphabet size: phi, then xi0, then the trajectory, then binary.
        let k = partial
            .phi
            .as_ref()
            .map(Vec::len)
            .or_else(|| partial.xi0.as_ref().map(Vec::len))
            .or_else(|| {
                partial
                    .traj
                    .as_ref()
                    .and_then(|t| t.iter().max())
                    .map(|m| (m + 1).max(2))
            })
            .unwrap_or(2);
        let alphabet = Alphabet::new(k).map_err(|e| usage("phi", e))?;

        let phi = match partial.phi {
            Some(p) => CategoricalParam::new(p).map_err(|e| usage("phi", e))?,
            None => CategoricalParam::uniform(k).map_err(|e| usage("phi", e))?,
        };
        let xi0 = match partial.xi0 {
            Some(a) => Hyperparameter::new(a).map_err(|e| usage("xi0", e))?,
            None => Hyperparameter::symmetric(k, 1.0).map_err(|e| usage("xi0", e))?,
        };
        if xi0.alphabet() != phi.alphabet() {
            return Err(usage(
                "xi0",
                format!(
                    "xi0 has {} components but phi has {}",
                    xi0.alphabet().size(),
                    phi.alphabet().size()
                ),
            ));
        }
        let t_max = partial.tmax.unwrap_or(DEFAULT_T_MAX);
        if t_max < 1 {
            return Err(usage("tmax", "tmax must be at least 1"));
        }
        let trajectory = partial
            .traj
            .map(|s| Trajectory::new(alphabet, s).map_err(|e| usage("traj", e)))
            .transpose()?;
        let quantities: BTreeSet<Quantity> = partial
            .quantities
            .map(|q| q.into_iter().collect())
            .unwrap_or_else(|| {
                [Quantity::Ntic, Quantity::OneStepNtic]
                    .into_iter()
                    .collect()
            });
        if quantities.is_empty() {
            return Err(usage("quantities", "at least one quantity is required"));
        }
        Ok(RunConfig {
            phi,
            xi0,
            t_max,
            trajectory,
            quantities,
            seed: partial.seed.unwrap_or(0),
            samples: partial.samples.unwrap_or(0),
            units: partial.units.unwrap_or_default(),
            output_format: partial.format.unwrap_or_default(),
            output_path: partial.out,
        })
    }
}

/// Parses `0.5,0.5`-style lists.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            item.trim()
                .parse::<T>()
                .map_err(|e| format!("cannot parse {item:?}: {e}"))
        })
        .collect()
}
