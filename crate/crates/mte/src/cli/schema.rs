//! JSON and CSV encodings of inputs and reports.
//!
//! Marginal pairs are `{"k": 2, "a": ["1/3", "2/3"], "b": ["2/3", "1/3"]}`
//! and joints `{"k": 2, "m": [["1/3", "0"], ["1/3", "1/3"]]}` with row index
//! = treatment outcome and column index = control outcome. Probabilities are
//! `"p/q"` strings or bare integers; floats are rejected unless explicitly
//! converted. Emitted JSON always has lexicographically sorted keys and
//! lowest-terms rationals, so identical inputs produce identical bytes.

use serde_json::{json, Value};

use crate::core::{Joint, Marginal, Rational};
use crate::error::{Error, Result};
use crate::estimator::EstimateResult;
use crate::sim::{ExperimentReport, IndistinguishabilityReport, TrialRecord};
use crate::variability::{VariabilityPair, WidthReport};

/// How to treat floating-point numbers in probability positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloatPolicy {
    /// Refuse them: exactness is the contract.
    Reject,
    /// Convert through continued fractions with a bounded denominator.
    Approximate { max_den: u64 },
}

pub fn rational_from_value(v: &Value, policy: FloatPolicy, context: &str) -> Result<Rational> {
    match v {
        Value::String(s) => s
            .parse::<Rational>()
            .map_err(|e| Error::Parse(format!("{context}: {e}"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i))
            } else if let Some(f) = n.as_f64() {
                match policy {
                    FloatPolicy::Reject => Err(Error::Parse(format!(
                        "{context}: float {f} is not exact; write it as \"p/q\" or pass --allow-float"
                    ))),
                    FloatPolicy::Approximate { max_den } => Rational::approx_from_f64(f, max_den),
                }
            } else {
                Err(Error::Parse(format!("{context}: unsupported number {n}")))
            }
        }
        other => Err(Error::Parse(format!(
            "{context}: expected a rational string or integer, got {other}"
        ))),
    }
}

fn get_k(v: &Value, context: &str) -> Result<usize> {
    v.get("k")
        .and_then(Value::as_u64)
        .map(|k| k as usize)
        .ok_or_else(|| Error::Parse(format!("{context}: missing integer field \"k\"")))
}

fn rational_array(v: &Value, policy: FloatPolicy, context: &str) -> Result<Vec<Rational>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{context}: expected an array")))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| rational_from_value(x, policy, &format!("{context}[{i}]")))
        .collect()
}

/// Parses a marginal-pair document. Unknown keys are ignored so that any
/// emitted superset (for example the hard-instance output, which adds the
/// width bound) reads back cleanly.
pub fn parse_marginal_pair(v: &Value, policy: FloatPolicy) -> Result<(Marginal, Marginal)> {
    let k = get_k(v, "marginals")?;
    let a = rational_array(
        v.get("a")
            .ok_or_else(|| Error::Parse("marginals: missing field \"a\"".into()))?,
        policy,
        "marginals.a",
    )?;
    let b = rational_array(
        v.get("b")
            .ok_or_else(|| Error::Parse("marginals: missing field \"b\"".into()))?,
        policy,
        "marginals.b",
    )?;
    Ok((Marginal::new(k, a)?, Marginal::new(k, b)?))
}

pub fn parse_joint(v: &Value, policy: FloatPolicy) -> Result<Joint> {
    let k = get_k(v, "joint")?;
    let m_val = v
        .get("m")
        .ok_or_else(|| Error::Parse("joint: missing field \"m\"".into()))?;
    let rows = m_val
        .as_array()
        .ok_or_else(|| Error::Parse("joint.m: expected an array of rows".into()))?;
    let m = rows
        .iter()
        .enumerate()
        .map(|(x, row)| rational_array(row, policy, &format!("joint.m[{x}]")))
        .collect::<Result<Vec<_>>>()?;
    Joint::new(k, m)
}

fn rational_strings(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(|v| json!(v.to_string())).collect())
}

pub fn marginal_pair_value(a: &Marginal, b: &Marginal) -> Value {
    json!({
        "k": a.k(),
        "a": rational_strings(a.probs()),
        "b": rational_strings(b.probs()),
    })
}

pub fn joint_value(j: &Joint) -> Value {
    let rows: Vec<Value> = j.rows().iter().map(|row| rational_strings(row)).collect();
    json!({ "k": j.k(), "m": rows })
}

pub fn variability_pair_value(k: usize, pair: &VariabilityPair) -> Value {
    json!({
        "k": k,
        "r": pair.r,
        "nu_lower": pair.nu_lower.to_string(),
        "nu_lower_float": pair.nu_lower.to_f64(),
        "nu_upper": pair.nu_upper.to_string(),
        "nu_upper_float": pair.nu_upper.to_f64(),
    })
}

fn width_rows(report: &WidthReport) -> Value {
    Value::Array(
        report
            .entries
            .iter()
            .map(|e| {
                json!({
                    "r": e.r,
                    "nu_lower": e.nu_lower.to_string(),
                    "nu_upper": e.nu_upper.to_string(),
                    "width": e.width.to_string(),
                })
            })
            .collect(),
    )
}

pub fn width_report_value(report: &WidthReport) -> Value {
    json!({
        "k": report.k,
        "argmin_r": report.argmin_r,
        "min_width": report.min_width.to_string(),
        "min_width_float": report.min_width.to_f64(),
        "widths": width_rows(report),
    })
}

pub fn width_report_csv(report: &WidthReport) -> String {
    let mut out = String::from("r,nu_lower,nu_upper,width\n");
    for e in &report.entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.r, e.nu_lower, e.nu_upper, e.width
        ));
    }
    out
}

pub fn estimate_value(est: &EstimateResult) -> Value {
    json!({
        "m_hat": est.m_hat,
        "epsilon": est.epsilon.to_string(),
        "epsilon_float": est.epsilon.to_f64(),
        "beta": est.beta.to_string(),
        "delta": est.delta,
        "n_a": est.n_a,
        "n_b": est.n_b,
        "widths": width_rows(&est.width_report),
    })
}

fn trial_record_value(rec: &TrialRecord) -> Value {
    json!({
        "trial": rec.trial,
        "sample_stream": rec.sample_stream,
        "assign_stream": rec.assign_stream,
        "m_hat": rec.m_hat,
        "epsilon": rec.epsilon.to_string(),
        "epsilon_float": rec.epsilon.to_f64(),
        "covered": rec.covered,
    })
}

pub fn experiment_report_value(report: &ExperimentReport) -> Value {
    json!({
        "config": {
            "joint": joint_value(&report.config.joint),
            "n": report.config.n,
            "beta": report.config.beta.to_string(),
            "trials": report.config.trials,
            "seed": report.config.seed,
        },
        "trials": report.trials,
        "coverage_rate": report.coverage_rate,
        "mean_epsilon": report.mean_epsilon,
        "delta_bound": report.delta_bound,
        "epsilon_star": report.epsilon_star.to_string(),
        "width_floor_minus_tail": report.width_floor_minus_tail,
        "width_floor_plus_tail": report.width_floor_plus_tail,
        "records": Value::Array(report.records.iter().map(trial_record_value).collect()),
    })
}

pub const TRIAL_CSV_HEADER: &str =
    "trial,sample_stream,assign_stream,m_hat,epsilon,epsilon_float,covered";

fn trial_csv_row(rec: &TrialRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        rec.trial,
        rec.sample_stream,
        rec.assign_stream,
        rec.m_hat,
        rec.epsilon,
        rec.epsilon.to_f64(),
        rec.covered
    )
}

pub fn experiment_report_csv(report: &ExperimentReport) -> String {
    let mut out = format!("{TRIAL_CSV_HEADER}\n");
    for rec in &report.records {
        out.push_str(&trial_csv_row(rec));
        out.push('\n');
    }
    out
}

pub fn indist_report_value(report: &IndistinguishabilityReport) -> Value {
    json!({
        "tv_distance": report.tv_distance,
        "tv_bin_width": report.tv_bin_width.to_string(),
        "first": experiment_report_value(&report.first),
        "second": experiment_report_value(&report.second),
    })
}

pub fn indist_report_csv(report: &IndistinguishabilityReport) -> String {
    let mut out = format!("arm,{TRIAL_CSV_HEADER}\n");
    for (arm, records) in [(1, &report.first.records), (2, &report.second.records)] {
        for rec in records {
            out.push_str(&format!("{arm},{}\n", trial_csv_row(rec)));
        }
    }
    out
}
