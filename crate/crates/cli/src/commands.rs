//! The four subcommands. Each returns its report; writing is left to the
//! caller.

use ntic_core::bayes::{
    full_past_info_gain, hindsight_empirical_surprise, marginal_surprise,
    ntic_ig_divergence_witness, one_step_info_gain,
};
use ntic_core::closure::{
    ntic_with_cap, one_step_ntic_with_cap, one_step_pointwise_ntic, pointwise_ntic, symbol_entropy,
};
use ntic_core::oracle::{run_conformance, ConformanceSummary, GridOptions};
use ntic_core::process::{count_space_size, sample_trajectory};
use ntic_core::units::PairwiseSum;
use ntic_core::{CategoricalParam, Hyperparameter, Trajectory, Units};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Quantity, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, MeasureReport};

/// Largest count space evaluated exactly; beyond it `curve` samples.
pub const EXACT_COUNT_SPACE_CAP: u128 = 1_000_000;

pub const METHOD_EXACT: &str = "exact";
pub const METHOD_MONTE_CARLO: &str = "monte-carlo";

fn columns_for(q: Quantity) -> &'static [&'static str] {
    match q {
        Quantity::Ntic => &["ntic", "ntic_mi_term", "ntic_te_term"],
        Quantity::OneStepNtic => &["one_step_ntic"],
        Quantity::Pointwise => &["pointwise_ntic", "one_step_pointwise_ntic"],
        Quantity::InfoGain => &["info_gain_one_step", "info_gain_full_past"],
        Quantity::Surprise => &[
            "marginal_surprise_next",
            "hindsight_marginal_surprise",
            "hindsight_empirical_surprise",
        ],
    }
}

/// Surprise about the last symbol under the posterior that already saw it,
/// paired with the same surprise under the empirical distribution.
fn hindsight_surprise_parts(
    xi0: &Hyperparameter,
    prefix: &Trajectory,
) -> Result<(f64, f64), CliError> {
    let last = prefix.last().ok_or_else(|| CliError::Usage {
        field: "traj".into(),
        message: "hindsight surprise needs a nonempty trajectory".into(),
    })?;
    Ok((
        marginal_surprise(xi0, prefix, last)?,
        hindsight_empirical_surprise(prefix)?,
    ))
}

/// SplitMix64 finalizer; decorrelates per-(t, sample) seeds.
fn derive_seed(seed: u64, t: u64, sample: u64) -> u64 {
    let mut z =
        seed ^ t.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ sample.wrapping_mul(0xD1B5_4A32_D192_ED69);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Expected {
    ntic: f64,
    mi_term: f64,
    te_term: f64,
    one_step: f64,
}

/// Plug-in estimate: average of exact pointwise values over sampled
/// trajectories.
fn monte_carlo(
    phi: &CategoricalParam,
    t: u64,
    seed: u64,
    samples: u64,
) -> Result<Expected, CliError> {
    let mut full = PairwiseSum::new();
    let mut one = PairwiseSum::new();
    for i in 0..samples {
        let traj = sample_trajectory(phi, t as usize, derive_seed(seed, t, i));
        full.add(pointwise_ntic(phi, &traj)?);
        one.add(one_step_pointwise_ntic(&traj)?);
    }
    let n = samples as f64;
    let te_term = symbol_entropy(phi);
    let ntic = full.total() / n;
    Ok(Expected {
        ntic,
        mi_term: ntic + te_term,
        te_term,
        one_step: one.total() / n,
    })
}

fn curve_row(cfg: &RunConfig, traj: Option<&Trajectory>, t: u64) -> Result<Vec<Cell>, CliError> {
    let units = cfg.units;
    let wants_expected =
        cfg.quantities.contains(&Quantity::Ntic) || cfg.quantities.contains(&Quantity::OneStepNtic);
    let exact = count_space_size(cfg.phi.alphabet().size(), t) <= EXACT_COUNT_SPACE_CAP;
    let expected = if !wants_expected {
        None
    } else if exact {
        let report = ntic_with_cap(&cfg.phi, t, u128::MAX)?;
        let one_step = if cfg.quantities.contains(&Quantity::OneStepNtic) {
            one_step_ntic_with_cap(&cfg.phi, t, u128::MAX)?
        } else {
            f64::NAN
        };
        Some(Expected {
            ntic: report.value,
            mi_term: report.mi_term,
            te_term: report.te_term,
            one_step,
        })
    } else if cfg.samples == 0 {
        return Err(ntic_core::Error::Resource {
            required: count_space_size(cfg.phi.alphabet().size(), t),
            cap: EXACT_COUNT_SPACE_CAP,
            hint: "pass --samples N to switch to Monte Carlo mode",
        }
        .into());
    } else {
        Some(monte_carlo(&cfg.phi, t, cfg.seed, cfg.samples)?)
    };

    let method = if wants_expected && !exact {
        METHOD_MONTE_CARLO
    } else {
        METHOD_EXACT
    };
    let mut row = vec![Cell::Int(t), Cell::Text(method.into())];
    let num = |v: f64| Cell::Num(Some(units.convert(v)));
    let prefix = traj
        .filter(|tr| tr.len() as u64 >= t)
        .map(|tr| tr.prefix(t as usize));

    for q in &cfg.quantities {
        match q {
            Quantity::Ntic => {
                let e = expected.as_ref().expect("computed above");
                row.extend([num(e.ntic), num(e.mi_term), num(e.te_term)]);
            }
            Quantity::OneStepNtic => {
                row.push(num(expected.as_ref().expect("computed above").one_step))
            }
            Quantity::Pointwise => match &prefix {
                Some(p) => {
                    let pw = pointwise_ntic(&cfg.phi, p).ok().map(|v| units.convert(v));
                    row.push(Cell::Num(pw));
                    row.push(num(one_step_pointwise_ntic(p)?));
                }
                None => row.extend([Cell::Num(None), Cell::Num(None)]),
            },
            Quantity::InfoGain => match &prefix {
                Some(p) => {
                    row.push(num(one_step_info_gain(&cfg.xi0, p)?.value));
                    row.push(num(full_past_info_gain(&cfg.xi0, p)?));
                }
                None => row.extend([Cell::Num(None), Cell::Num(None)]),
            },
            Quantity::Surprise => match &prefix {
                Some(p) => {
                    let full = traj.expect("prefix implies trajectory");
                    let next = full
                        .symbols()
                        .get(t as usize)
                        .map(|&x| marginal_surprise(&cfg.xi0, p, x))
                        .transpose()?
                        .map(|v| units.convert(v));
                    let (hindsight_marginal, hindsight_empirical) =
                        hindsight_surprise_parts(&cfg.xi0, p)?;
                    row.push(Cell::Num(next));
                    row.push(num(hindsight_marginal));
                    row.push(num(hindsight_empirical));
                }
                None => row.extend([Cell::Num(None), Cell::Num(None), Cell::Num(None)]),
            },
        }
    }
    Ok(row)
}

fn inputs_metadata(cfg: &RunConfig, command: &str) -> serde_json::Value {
    json!({
        "command": command,
        "phi": cfg.phi.probs(),
        "xi0": cfg.xi0.alpha(),
        "t_max": cfg.t_max,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "units": cfg.units,
        "quantities": cfg.quantities.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
    })
}

/// NTIC curves over `t = 1..=t_max`.
pub fn curve(cfg: &RunConfig) -> Result<MeasureReport, CliError> {
    let needs_traj = cfg.quantities.iter().any(|q| {
        matches!(
            q,
            Quantity::Pointwise | Quantity::InfoGain | Quantity::Surprise
        )
    });
    let traj = match (&cfg.trajectory, needs_traj) {
        (Some(t), _) => Some(t.clone()),
        // One extra symbol so the surprise about the next observation exists.
        (None, true) => Some(sample_trajectory(
            &cfg.phi,
            cfg.t_max as usize + 1,
            cfg.seed,
        )),
        (None, false) => None,
    };

    let rows: Vec<Vec<Cell>> = (1..=cfg.t_max)
        .into_par_iter()
        .map(|t| curve_row(cfg, traj.as_ref(), t))
        .collect::<Result<_, _>>()?;

    let monte_carlo_rows = rows
        .iter()
        .filter(|r| r[1] == Cell::Text(METHOD_MONTE_CARLO.into()))
        .count();
    let mut metadata = inputs_metadata(cfg, "curve");
    metadata["exact_count_space_cap"] = json!(EXACT_COUNT_SPACE_CAP as u64);
    metadata["rows_exact"] = json!(rows.len() - monte_carlo_rows);
    metadata["rows_monte_carlo"] = json!(monte_carlo_rows);
    metadata["trajectory"] = json!(traj.as_ref().map(|t| t.symbols().to_vec()));

    let mut columns = vec!["t".to_string(), "method".to_string()];
    for q in &cfg.quantities {
        columns.extend(columns_for(*q).iter().map(|c| c.to_string()));
    }
    Ok(MeasureReport {
        metadata,
        columns,
        rows,
    })
}

pub const TRAJECTORY_COLUMNS: [&str; 10] = [
    "t",
    "symbol",
    "pointwise_ntic",
    "one_step_pointwise_ntic",
    "hindsight_empirical_surprise",
    "hindsight_marginal_surprise",
    "marginal_surprise_last",
    "marginal_surprise_next",
    "info_gain_one_step",
    "info_gain_full_past",
];

/// Per-prefix pointwise quantities of an explicit trajectory.
pub fn trajectory(cfg: &RunConfig) -> Result<MeasureReport, CliError> {
    let traj = cfg.trajectory.as_ref().ok_or_else(|| CliError::Usage {
        field: "traj".into(),
        message: "the trajectory command needs --traj".into(),
    })?;
    let units = cfg.units;
    let num = |v: f64| Cell::Num(Some(units.convert(v)));
    let mut rows = Vec::with_capacity(traj.len());
    for t in 1..=traj.len() {
        let prefix = traj.prefix(t);
        let last = traj.symbols()[t - 1];
        let gain = one_step_info_gain(&cfg.xi0, &prefix)?;
        let next = traj
            .symbols()
            .get(t)
            .map(|&x| marginal_surprise(&cfg.xi0, &prefix, x))
            .transpose()?
            .map(|v| units.convert(v));
        let (hindsight_marginal, hindsight_empirical) =
            hindsight_surprise_parts(&cfg.xi0, &prefix)?;
        rows.push(vec![
            Cell::Int(t as u64),
            Cell::Int(last as u64),
            Cell::Num(
                pointwise_ntic(&cfg.phi, &prefix)
                    .ok()
                    .map(|v| units.convert(v)),
            ),
            num(one_step_pointwise_ntic(&prefix)?),
            num(hindsight_empirical),
            num(hindsight_marginal),
            num(gain.surprise_term),
            next.map_or(Cell::Num(None), |v| Cell::Num(Some(v))),
            num(gain.value),
            num(full_past_info_gain(&cfg.xi0, &prefix)?),
        ]);
    }
    let mut metadata = inputs_metadata(cfg, "trajectory");
    metadata["trajectory"] = json!(traj.symbols());
    Ok(MeasureReport {
        metadata,
        columns: TRAJECTORY_COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

/// Human-readable demonstration that one trajectory has one one-step
/// pointwise NTIC but prior-dependent information gain.
pub fn witness(
    traj: &Trajectory,
    xi0_a: &Hyperparameter,
    xi0_b: &Hyperparameter,
    units: Units,
) -> Result<String, CliError> {
    let w = ntic_ig_divergence_witness(traj, xi0_a, xi0_b)?;
    let u = |v: f64| format!("{:.10} {units}", units.convert(v));
    let mut text = String::new();
    text.push_str(&format!("trajectory            {:?}\n", traj.symbols()));
    text.push_str(&format!(
        "one-step pointwise NTIC  {}  (same for every prior)\n",
        u(w.one_step_pointwise_ntic)
    ));
    for (name, xi, ig) in [("a", xi0_a, &w.info_gain_a), ("b", xi0_b, &w.info_gain_b)] {
        text.push_str(&format!(
            "prior {name} {:?}: one-step information gain {}  (surprise {} - expected hindsight {})\n",
            xi.alpha(),
            u(ig.value),
            u(ig.surprise_term),
            u(ig.expected_hindsight_term)
        ));
    }
    text.push_str(&format!(
        "information gains differ by {}: the one-step pointwise NTIC does not determine the information gain\n",
        u(w.gap)
    ));
    Ok(text)
}

pub fn conformance(opts: &GridOptions) -> Result<ConformanceSummary, CliError> {
    Ok(run_conformance(opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PartialConfig;

    fn cfg(p: PartialConfig) -> RunConfig {
        RunConfig::resolve(p).unwrap()
    }

    fn nums(report: &MeasureReport, column: &str) -> Vec<Option<f64>> {
        let i = report.columns.iter().position(|c| c == column).unwrap();
        report
            .rows
            .iter()
            .map(|r| match &r[i] {
                Cell::Num(v) => *v,
                other => panic!("{other:?}"),
            })
            .collect()
    }

    #[test]
    fn curve_deterministic_phi_is_flat() {
        let r = curve(&cfg(PartialConfig {
            phi: Some(vec![1.0, 0.0]),
            quantities: Some(vec![Quantity::Ntic]),
            tmax: Some(10),
            ..Default::default()
        }))
        .unwrap();
        assert_eq!(r.rows.len(), 10);
        assert!(nums(&r, "ntic").iter().all(|v| *v == Some(0.0)));
    }

    #[test]
    fn curve_binary_uniform() {
        let r = curve(&cfg(PartialConfig {
            phi: Some(vec![0.5, 0.5]),
            tmax: Some(2),
            ..Default::default()
        }))
        .unwrap();
        let v = nums(&r, "ntic");
        assert!(v[0].unwrap().abs() < 1e-15);
        assert!((v[1].unwrap() - 0.5 * std::f64::consts::LN_2).abs() < 1e-15);

        let r = curve(&cfg(PartialConfig {
            phi: Some(vec![0.5, 0.5]),
            tmax: Some(1),
            quantities: Some(vec![Quantity::OneStepNtic]),
            ..Default::default()
        }))
        .unwrap();
        assert_eq!(nums(&r, "one_step_ntic"), vec![Some(0.0)]);
    }

    #[test]
    fn curve_switches_to_monte_carlo_beyond_cap() {
        // K = 200, t = 3 has binomial(202, 3) = 1_353_400 count vectors.
        let base = PartialConfig {
            xi0: Some(vec![1.0; 200]),
            tmax: Some(3),
            quantities: Some(vec![Quantity::Ntic, Quantity::OneStepNtic]),
            ..Default::default()
        };
        let err = curve(&cfg(base.clone())).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::exit::RESOURCE_CAP);

        let sampled = curve(&cfg(PartialConfig {
            samples: Some(200),
            seed: Some(3),
            ..base
        }))
        .unwrap();
        let methods: Vec<&Cell> = sampled.rows.iter().map(|r| &r[1]).collect();
        assert_eq!(methods[1], &Cell::Text(METHOD_EXACT.into()));
        assert_eq!(methods[2], &Cell::Text(METHOD_MONTE_CARLO.into()));
        assert!(nums(&sampled, "ntic")[2].unwrap() >= 0.0);
        assert!(nums(&sampled, "one_step_ntic")[2].unwrap() <= 0.0);
    }

    #[test]
    fn trajectory_table() {
        let r = trajectory(&cfg(PartialConfig {
            traj: Some(vec![0, 1, 0]),
            xi0: Some(vec![1.0, 1.0]),
            ..Default::default()
        }))
        .unwrap();
        assert_eq!(r.rows.len(), 3);
        let one = nums(&r, "one_step_pointwise_ntic");
        assert!((one[2].unwrap() - (2.0f64 / 3.0).ln()).abs() < 1e-15);
        let ig = nums(&r, "info_gain_one_step");
        assert!((ig[0].unwrap() - (std::f64::consts::LN_2 - 0.5)).abs() < 1e-14);
        assert_eq!(nums(&r, "marginal_surprise_next")[2], None);

        let empty = trajectory(&cfg(PartialConfig {
            traj: Some(vec![]),
            ..Default::default()
        }))
        .unwrap();
        assert!(empty.rows.is_empty());
        assert!(trajectory(&cfg(PartialConfig::default())).is_err());
    }

    #[test]
    fn witness_text_and_failure() {
        let alphabet = ntic_core::Alphabet::new(2).unwrap();
        let traj = Trajectory::new(alphabet, vec![0]).unwrap();
        let a = Hyperparameter::new(vec![1.0, 1.0]).unwrap();
        let b = Hyperparameter::new(vec![10.0, 10.0]).unwrap();
        let text = witness(&traj, &a, &b, Units::Nats).unwrap();
        assert!(text.contains("differ"));
        let err = witness(&traj, &a, &a, Units::Nats).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::exit::WITNESS_FAILED);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(0, 1, 0), derive_seed(0, 1, 1));
        assert_ne!(derive_seed(0, 1, 0), derive_seed(0, 2, 0));
        assert_eq!(derive_seed(5, 3, 2), derive_seed(5, 3, 2));
    }
}
