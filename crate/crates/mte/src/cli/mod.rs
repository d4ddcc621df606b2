//! Command-line front end: file I/O, subcommand dispatch, and report
//! serialization. Exit codes: 0 success, 1 validation or input error, 2
//! internal invariant violation (the cross-check finding a disagreement).

pub mod schema;

use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::core::{Rational, MAX_POPULATION};
use crate::error::Error;
use crate::estimator::{median_estimate, read_response_csv};
use crate::oracle::oracle_variability;
use crate::sim;
use crate::variability::{min_median_width, variability};
use schema::FloatPolicy;

/// Denominator cap for `--allow-float` conversions.
const FLOAT_MAX_DEN: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "mte",
    version,
    about = "Exact variability, minimum median width, and median-estimator toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Accept floats in probability positions, converting them to rationals
    /// with denominator at most 10^6
    #[arg(long, global = true)]
    allow_float: bool,

    /// Write the report to this path instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format; csv is available for per-r and per-trial tables
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Variability pair (nu_lower, nu_upper) at one candidate effect
    Variability {
        /// Marginal-pair JSON file
        #[arg(long)]
        marginals: PathBuf,
        /// Candidate effect in -(k-1)..=(k-1)
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
    },
    /// Widths of all candidate effects and the minimum median width
    Width {
        #[arg(long)]
        marginals: PathBuf,
    },
    /// Median estimate and width from observed responses
    Estimate {
        /// CSV file with header unit,group,outcome
        #[arg(long)]
        responses: PathBuf,
        /// Number of outcome values
        #[arg(long)]
        k: usize,
        /// Slack parameter as a rational, e.g. "1/20"
        #[arg(long, default_value = "1/20")]
        beta: String,
    },
    /// Variability pair via the linear-programming oracle
    Oracle {
        #[arg(long)]
        marginals: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        /// Also run the greedy solver and exit nonzero on any mismatch
        #[arg(long)]
        check: bool,
    },
    /// Hard-instance marginals and the width bound for a given k
    Extremal {
        #[arg(long)]
        k: usize,
    },
    /// Seeded Monte Carlo experiments
    Simulate {
        #[command(subcommand)]
        experiment: Experiment,
    },
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// Band coverage of the estimator over repeated designs
    Coverage {
        /// Joint-distribution JSON file
        #[arg(long)]
        joint: PathBuf,
        #[command(flatten)]
        params: ExperimentParams,
    },
    /// Output-law comparison for two joints sharing the same marginals
    Indist {
        #[arg(long)]
        joint1: PathBuf,
        #[arg(long)]
        joint2: PathBuf,
        #[command(flatten)]
        params: ExperimentParams,
    },
}

#[derive(Debug, Args)]
struct ExperimentParams {
    /// Population size per trial
    #[arg(long)]
    n: usize,
    /// Slack parameter as a rational, e.g. "1/20"
    #[arg(long, default_value = "1/20")]
    beta: String,
    /// Number of trials
    #[arg(long)]
    trials: usize,
    /// Master seed; trial t uses ChaCha streams 2t and 2t+1
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum CliError {
    /// Bad input or flags: exit code 1.
    Validation(String),
    /// A cross-check found an internal disagreement: exit code 2.
    Invariant(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments, runs the subcommand, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("invariant violation: {msg}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let policy = if cli.allow_float {
        FloatPolicy::Approximate {
            max_den: FLOAT_MAX_DEN,
        }
    } else {
        FloatPolicy::Reject
    };
    let report = match &cli.command {
        Command::Variability { marginals, r } => {
            require_json(cli, "variability")?;
            let (a, b) = load_marginals(marginals, policy)?;
            let pair = variability(*r, &a, &b)?;
            Output::Json(schema::variability_pair_value(a.k(), &pair))
        }
        Command::Width { marginals } => {
            let (a, b) = load_marginals(marginals, policy)?;
            let report = min_median_width(&a, &b)?;
            match cli.format {
                Format::Json => Output::Json(schema::width_report_value(&report)),
                Format::Csv => Output::Csv(schema::width_report_csv(&report)),
            }
        }
        Command::Estimate { responses, k, beta } => {
            require_json(cli, "estimate")?;
            let beta = parse_beta(beta, cli.allow_float)?;
            let file = fs::File::open(responses).map_err(|e| open_error(responses, e))?;
            let data = read_response_csv(BufReader::new(file), *k)?;
            let result = median_estimate(&data, &beta)?;
            Output::Json(schema::estimate_value(&result))
        }
        Command::Oracle {
            marginals,
            r,
            check,
        } => {
            require_json(cli, "oracle")?;
            let (a, b) = load_marginals(marginals, policy)?;
            let oracle_pair = oracle_variability(*r, &a, &b)?;
            if *check {
                let greedy_pair = variability(*r, &a, &b)?;
                let matches = greedy_pair == oracle_pair;
                let doc = serde_json::json!({
                    "greedy": schema::variability_pair_value(a.k(), &greedy_pair),
                    "oracle": schema::variability_pair_value(a.k(), &oracle_pair),
                    "match": matches,
                });
                if !matches {
                    emit(cli, Output::Json(doc))?;
                    return Err(CliError::Invariant(format!(
                        "greedy and oracle disagree at r = {r}"
                    )));
                }
                Output::Json(doc)
            } else {
                Output::Json(schema::variability_pair_value(a.k(), &oracle_pair))
            }
        }
        Command::Extremal { k } => {
            require_json(cli, "extremal")?;
            let (a, b) = sim::extremal_marginals(*k)?;
            let bound = sim::psi(*k)?;
            let mut doc = schema::marginal_pair_value(&a, &b);
            let obj = doc.as_object_mut().expect("marginal pair is an object");
            obj.insert("psi".into(), Value::String(bound.to_string()));
            obj.insert("psi_float".into(), serde_json::json!(bound.to_f64()));
            Output::Json(doc)
        }
        Command::Simulate { experiment } => match experiment {
            Experiment::Coverage { joint, params } => {
                let j = load_joint(joint, policy)?;
                let (beta, trials) = validate_params(params, cli.allow_float)?;
                let report = sim::coverage_experiment(&j, params.n, &beta, trials, params.seed)?;
                match cli.format {
                    Format::Json => Output::Json(schema::experiment_report_value(&report)),
                    Format::Csv => Output::Csv(schema::experiment_report_csv(&report)),
                }
            }
            Experiment::Indist {
                joint1,
                joint2,
                params,
            } => {
                let j1 = load_joint(joint1, policy)?;
                let j2 = load_joint(joint2, policy)?;
                let (beta, trials) = validate_params(params, cli.allow_float)?;
                let report = sim::indistinguishability_experiment(
                    &j1,
                    &j2,
                    params.n,
                    &beta,
                    trials,
                    params.seed,
                )?;
                match cli.format {
                    Format::Json => Output::Json(schema::indist_report_value(&report)),
                    Format::Csv => Output::Csv(schema::indist_report_csv(&report)),
                }
            }
        },
    };
    emit(cli, report)
}

enum Output {
    Json(Value),
    Csv(String),
}

fn emit(cli: &Cli, output: Output) -> CliResult<()> {
    let text = match output {
        Output::Json(value) => {
            let mut s = serde_json::to_string_pretty(&value)
                .map_err(|e| CliError::Validation(format!("serialization failed: {e}")))?;
            s.push('\n');
            s
        }
        Output::Csv(s) => s,
    };
    match &cli.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Validation(format!("cannot write to stdout: {e}")))
        }
    }
}

fn require_json(cli: &Cli, subcommand: &str) -> CliResult<()> {
    if cli.format == Format::Csv {
        return Err(CliError::Validation(format!(
            "--format csv is not available for `{subcommand}`; it applies to per-r and per-trial tables"
        )));
    }
    Ok(())
}

fn open_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Validation(format!("cannot open {}: {e}", path.display()))
}

fn load_value(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| open_error(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: invalid JSON: {e}", path.display())))
}

fn load_marginals(
    path: &Path,
    policy: FloatPolicy,
) -> CliResult<(crate::core::Marginal, crate::core::Marginal)> {
    let value = load_value(path)?;
    schema::parse_marginal_pair(&value, policy)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn load_joint(path: &Path, policy: FloatPolicy) -> CliResult<crate::core::Joint> {
    let value = load_value(path)?;
    schema::parse_joint(&value, policy)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn parse_beta(text: &str, allow_float: bool) -> CliResult<Rational> {
    let beta = match text.parse::<Rational>() {
        Ok(b) => b,
        Err(e) if allow_float => match text.parse::<f64>() {
            Ok(f) => Rational::approx_from_f64(f, FLOAT_MAX_DEN)?,
            Err(_) => return Err(CliError::Validation(e.to_string())),
        },
        Err(e) => return Err(CliError::Validation(e.to_string())),
    };
    if !beta.is_positive() {
        return Err(CliError::Validation(format!(
            "beta must be positive (got {beta})"
        )));
    }
    Ok(beta)
}

fn validate_params(params: &ExperimentParams, allow_float: bool) -> CliResult<(Rational, usize)> {
    if params.n < 2 {
        return Err(CliError::Validation(
            "need a population of at least 2 units".into(),
        ));
    }
    if params.n > MAX_POPULATION {
        return Err(CliError::Validation(format!(
            "population {} exceeds the supported maximum {MAX_POPULATION}",
            params.n
        )));
    }
    if params.trials < 1 {
        return Err(CliError::Validation("need at least one trial".into()));
    }
    let beta = parse_beta(&params.beta, allow_float)?;
    Ok((beta, params.trials))
}
