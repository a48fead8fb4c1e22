//! Argument parsing and dispatch. `run` returns the process exit code.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use ntic_core::oracle::GridOptions;
use ntic_core::{Alphabet, Hyperparameter, Trajectory, Units};

use crate::commands;
use crate::config::{parse_list, OutputFormat, PartialConfig, Quantity, RunConfig};
use crate::error::{exit, CliError};
use crate::output::MeasureReport;

#[derive(Debug, Parser)]
#[command(
    name = "ntic",
    version,
    about = "Closure and information-gain measures for a Dirichlet-categorical observer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected NTIC (and optional pointwise quantities) for t = 1..=tmax.
    Curve(RunArgs),
    /// Per-prefix pointwise quantities of one trajectory.
    Trajectory(RunArgs),
    /// Show that equal one-step pointwise NTIC admits different information gains.
    Witness(WitnessArgs),
    /// Compare closed forms with the enumeration and quadrature oracles.
    Conformance(ConformanceArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Generating distribution, e.g. 0.5,0.5.
    #[arg(long)]
    pub phi: Option<String>,
    /// Prior Dirichlet hyperparameter, e.g. 1,1.
    #[arg(long)]
    pub xi0: Option<String>,
    #[arg(long)]
    pub tmax: Option<u64>,
    /// Explicit trajectory, e.g. 0,1,1,0.
    #[arg(long, allow_hyphen_values = true)]
    pub traj: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo samples used when the count space exceeds the exact cap.
    #[arg(long)]
    pub samples: Option<u64>,
    /// nats or bits.
    #[arg(long)]
    pub units: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma list of ntic, one_step_ntic, pointwise, info_gain, surprise.
    #[arg(long)]
    pub quantities: Option<String>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long, default_value = "0")]
    pub traj: String,
    #[arg(long, default_value = "1,1")]
    pub xi0: String,
    #[arg(long = "xi0-b", default_value = "10,10")]
    pub xi0_b: String,
    #[arg(long, default_value = "nats")]
    pub units: String,
}

#[derive(Debug, Args)]
pub struct ConformanceArgs {
    #[arg(long = "max-k", default_value_t = 3)]
    pub max_k: usize,
    #[arg(long = "max-t", default_value_t = 5)]
    pub max_t: usize,
    #[arg(long, default_value_t = ntic_core::oracle::conformance::EXACT_REFERENCE_TOLERANCE)]
    pub tolerance: f64,
    /// Write every comparison record as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn list<T: std::str::FromStr>(
    field: &str,
    value: Option<String>,
) -> Result<Option<Vec<T>>, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .map(|s| {
            parse_list(&s).map_err(|message| CliError::Usage {
                field: field.into(),
                message,
            })
        })
        .transpose()
}

fn parse_one<T: std::str::FromStr>(
    field: &str,
    value: Option<String>,
) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .map(|s| {
            s.parse().map_err(|e: T::Err| CliError::Usage {
                field: field.into(),
                message: e.to_string(),
            })
        })
        .transpose()
}

impl RunArgs {
    /// Config file (if any) overlaid by the flags.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => PartialConfig::from_file(path)?,
            None => PartialConfig::default(),
        };
        let flags = PartialConfig {
            phi: list("phi", self.phi)?,
            xi0: list("xi0", self.xi0)?,
            tmax: self.tmax,
            traj: list("traj", self.traj)?,
            seed: self.seed,
            samples: self.samples,
            units: parse_one::<Units>("units", self.units)?,
            format: parse_one::<OutputFormat>("format", self.format)?,
            out: self.out,
            quantities: list::<Quantity>("quantities", self.quantities)?,
        };
        RunConfig::resolve(base.overlay(flags))
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(report: &MeasureReport, cfg: &RunConfig) -> Result<(), CliError> {
    let mut out = open_output(cfg.output_path.as_deref())?;
    report.write(cfg.output_format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_witness(args: WitnessArgs) -> Result<(), CliError> {
    let usage = |field: &'static str| {
        move |message: String| CliError::Usage {
            field: field.into(),
            message,
        }
    };
    let a: Vec<f64> = parse_list(&args.xi0).map_err(usage("xi0"))?;
    let b: Vec<f64> = parse_list(&args.xi0_b).map_err(usage("xi0-b"))?;
    let symbols: Vec<usize> = parse_list(&args.traj).map_err(usage("traj"))?;
    let units: Units = parse_one("units", Some(args.units))?.expect("value given");
    let field_err = |field: &'static str| {
        move |e: ntic_core::Error| CliError::Usage {
            field: field.into(),
            message: e.to_string(),
        }
    };
    let xi_a = Hyperparameter::new(a).map_err(field_err("xi0"))?;
    let xi_b = Hyperparameter::new(b).map_err(field_err("xi0-b"))?;
    let alphabet = Alphabet::new(xi_a.alphabet().size()).map_err(field_err("xi0"))?;
    let traj = Trajectory::new(alphabet, symbols).map_err(field_err("traj"))?;
    let text = commands::witness(&traj, &xi_a, &xi_b, units)?;
    print!("{text}");
    Ok(())
}

fn run_conformance(args: ConformanceArgs) -> Result<(), CliError> {
    if args.max_k < 2 {
        return Err(CliError::Usage {
            field: "max-k".into(),
            message: "must be at least 2".into(),
        });
    }
    if args.max_t < 1 {
        return Err(CliError::Usage {
            field: "max-t".into(),
            message: "must be at least 1".into(),
        });
    }
    if args.tolerance.is_nan() || args.tolerance <= 0.0 {
        return Err(CliError::Usage {
            field: "tolerance".into(),
            message: "must be positive".into(),
        });
    }
    let opts = GridOptions {
        max_k: args.max_k,
        max_t: args.max_t,
        tolerance: args.tolerance,
        ..GridOptions::default()
    };
    let summary = commands::conformance(&opts)?;
    for point in &summary.skipped {
        eprintln!("warning: skipped {point} (joint exceeds the enumeration cap)");
    }
    for r in summary.records.iter().filter(|r| !r.pass) {
        println!(
            "FAIL {} [{}]: closed form {:e}, oracle {:e}, |diff| {:e}{}",
            r.quantity,
            r.case,
            r.closed_form,
            r.oracle,
            r.abs_diff,
            if r.tolerance_induced {
                " (tolerance tighter than the oracle's reference accuracy)"
            } else {
                ""
            }
        );
    }
    println!(
        "conformance: {} passed, {} failed, {} skipped (tolerance {:e})",
        summary.passed(),
        summary.failed(),
        summary.skipped.len(),
        args.tolerance
    );
    if let Some(path) = &args.out {
        let mut out = open_output(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &summary).map_err(io::Error::from)?;
        writeln!(out)?;
        out.flush()?;
    }
    if summary.failed() > 0 {
        return Err(CliError::ConformanceFailed {
            failed: summary.failed(),
            total: summary.records.len(),
        });
    }
    Ok(())
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Curve(args) => {
            let cfg = args.into_config()?;
            emit(&commands::curve(&cfg)?, &cfg)
        }
        Command::Trajectory(args) => {
            let cfg = args.into_config()?;
            emit(&commands::trajectory(&cfg)?, &cfg)
        }
        Command::Witness(args) => run_witness(args),
        Command::Conformance(args) => run_conformance(args),
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::USAGE,
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Core(ntic_core::Error::Resource { hint, .. }) = &e {
                eprintln!("hint: {hint}");
            }
            if let CliError::Core(ntic_core::Error::WitnessFailed { .. }) = &e {
                eprintln!("hint: choose priors further apart, e.g. --xi0 1,1 --xi0-b 10,10");
            }
            e.exit_code()
        }
    }
}
