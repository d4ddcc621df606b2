//! The median estimator over observed responses.
//!
//! From one observed response per unit (treatment or control, never both),
//! the estimator forms the empirical outcome distribution of each group,
//! evaluates the width of every candidate effect, and reports the minimizer
//! together with a width that accounts for sampling slack.

use std::collections::HashSet;
use std::io::BufRead;

use crate::core::{Marginal, Rational, MAX_POPULATION};
use crate::error::{Error, Result};
use crate::variability::{min_median_width, WidthReport};

/// Which arm a unit was observed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Treatment,
    Control,
}

impl Group {
    /// Short label used in CSV files: `a` for treatment, `b` for control.
    pub fn label(&self) -> &'static str {
        match self {
            Group::Treatment => "a",
            Group::Control => "b",
        }
    }

    pub fn parse(s: &str) -> Option<Group> {
        match s {
            "a" => Some(Group::Treatment),
            "b" => Some(Group::Control),
            _ => None,
        }
    }
}

/// One observed response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResponseRecord {
    pub unit: u32,
    pub group: Group,
    pub outcome: u8,
}

/// Observed responses for a whole population: exactly one record per unit,
/// units numbered `1..=n`, outcomes in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseData {
    k: usize,
    n: usize,
    records: Vec<ResponseRecord>,
}

impl ResponseData {
    pub fn new(k: usize, records: Vec<ResponseRecord>) -> Result<Self> {
        crate::core::OutcomeSpace::new(k)?;
        let n = records.len();
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        if n > MAX_POPULATION {
            return Err(Error::PopulationTooLarge {
                n,
                max: MAX_POPULATION,
            });
        }
        let mut seen = vec![false; n + 1];
        for rec in &records {
            let unit = rec.unit as usize;
            if unit == 0 || unit > n {
                return Err(Error::UnitOutOfRange {
                    unit: u64::from(rec.unit),
                    n,
                });
            }
            if seen[unit] {
                return Err(Error::DuplicateUnit {
                    unit: u64::from(rec.unit),
                });
            }
            seen[unit] = true;
            if usize::from(rec.outcome) >= k {
                return Err(Error::OutcomeOutOfRange {
                    outcome: i64::from(rec.outcome),
                    k,
                });
            }
        }
        Ok(ResponseData { k, n, records })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn records(&self) -> &[ResponseRecord] {
        &self.records
    }
}

/// Empirical outcome distributions of the two groups, each normalized by
/// its realized size so both are exact simplex points.
pub fn empirical_marginals(data: &ResponseData) -> Result<(Marginal, Marginal)> {
    let k = data.k();
    let mut counts_a = vec![0i64; k];
    let mut counts_b = vec![0i64; k];
    for rec in data.records() {
        match rec.group {
            Group::Treatment => counts_a[usize::from(rec.outcome)] += 1,
            Group::Control => counts_b[usize::from(rec.outcome)] += 1,
        }
    }
    let n_a: i64 = counts_a.iter().sum();
    let n_b: i64 = counts_b.iter().sum();
    if n_a == 0 {
        return Err(Error::EmptyGroup { group: "treatment" });
    }
    if n_b == 0 {
        return Err(Error::EmptyGroup { group: "control" });
    }
    let rho_a = Marginal::new(k, counts_a.iter().map(|&c| Rational::new(c, n_a)).collect())?;
    let rho_b = Marginal::new(k, counts_b.iter().map(|&c| Rational::new(c, n_b)).collect())?;
    Ok((rho_a, rho_b))
}

/// Output of the median estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    /// Candidate effect with the smallest width.
    pub m_hat: i64,
    /// Reported width `min(1/2, min_width + 2k*beta)`, exact.
    pub epsilon: Rational,
    /// Slack parameter used for the width inflation.
    pub beta: Rational,
    /// Failure-probability bound `2k * exp(-2 beta^2 n)`, for reporting only.
    pub delta: f64,
    pub width_report: WidthReport,
    pub n_a: usize,
    pub n_b: usize,
}

/// Runs the estimator: empirical marginals, widths of all candidate
/// effects, and the minimizer inflated by `2k * beta` (clipped at 1/2, the
/// largest meaningful width). O(n + k^2) total.
pub fn median_estimate(data: &ResponseData, beta: &Rational) -> Result<EstimateResult> {
    if !beta.is_positive() {
        return Err(Error::BadBeta(beta.to_string()));
    }
    let (rho_a, rho_b) = empirical_marginals(data)?;
    let n_a = data
        .records()
        .iter()
        .filter(|r| r.group == Group::Treatment)
        .count();
    let n_b = data.n() - n_a;
    let report = min_median_width(&rho_a, &rho_b)?;
    let k = data.k();
    let slack = &Rational::from_integer(2 * k as i64) * beta;
    let epsilon = (&report.min_width + &slack).min(Rational::one_half());
    let delta = delta_bound(k, beta, data.n());
    Ok(EstimateResult {
        m_hat: report.argmin_r,
        epsilon,
        beta: beta.clone(),
        delta,
        width_report: report,
        n_a,
        n_b,
    })
}

/// `2k * exp(-2 beta^2 n)`, the estimator's failure-probability bound.
pub fn delta_bound(k: usize, beta: &Rational, n: usize) -> f64 {
    let b = beta.to_f64();
    2.0 * k as f64 * (-2.0 * b * b * n as f64).exp()
}

/// Reads `unit,group,outcome` CSV into validated response data.
///
/// `group` must be `a` (treatment) or `b` (control); units must be exactly
/// `1..=n` with no duplicates. Errors carry the offending line number.
pub fn read_response_csv<R: BufRead>(reader: R, k: usize) -> Result<ResponseData> {
    let mut records = Vec::new();
    let mut seen: HashSet<u32> = HashSet::new();
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty responses file".into()))?;
    let header = header.map_err(|e| Error::Parse(format!("line 1: {e}")))?;
    if header.trim() != "unit,group,outcome" {
        return Err(Error::Parse(format!(
            "line 1: expected header \"unit,group,outcome\", got {header:?}"
        )));
    }
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse(format!("line {line_no}: {e}")))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (unit_s, group_s, outcome_s) = match (fields.next(), fields.next(), fields.next()) {
            (Some(u), Some(g), Some(o)) if fields.next().is_none() => (u, g, o),
            _ => {
                return Err(Error::Parse(format!(
                    "line {line_no}: expected 3 fields \"unit,group,outcome\""
                )))
            }
        };
        let unit: u32 = unit_s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {line_no}: invalid unit {unit_s:?}")))?;
        let group = Group::parse(group_s.trim()).ok_or_else(|| {
            Error::Parse(format!(
                "line {line_no}: group must be \"a\" or \"b\", got {group_s:?}"
            ))
        })?;
        let outcome: u8 = outcome_s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {line_no}: invalid outcome {outcome_s:?}")))?;
        if usize::from(outcome) >= k {
            return Err(Error::Parse(format!(
                "line {line_no}: outcome {outcome} outside 0..{k}"
            )));
        }
        if !seen.insert(unit) {
            return Err(Error::Parse(format!(
                "line {line_no}: duplicate unit {unit}"
            )));
        }
        records.push(ResponseRecord {
            unit,
            group,
            outcome,
        });
    }
    ResponseData::new(k, records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn rec(unit: u32, group: Group, outcome: u8) -> ResponseRecord {
        ResponseRecord {
            unit,
            group,
            outcome,
        }
    }

    /// Six units observed so that the treated outcomes are (0,1,1) and the
    /// control outcomes (0,0,1): the realized empirical marginals are
    /// exactly (1/3, 2/3) and (2/3, 1/3).
    fn running_fixture() -> ResponseData {
        ResponseData::new(
            2,
            vec![
                rec(1, Group::Treatment, 0),
                rec(2, Group::Treatment, 1),
                rec(3, Group::Treatment, 1),
                rec(4, Group::Control, 0),
                rec(5, Group::Control, 0),
                rec(6, Group::Control, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empirical_marginals_count_per_group() {
        let data = ResponseData::new(
            2,
            vec![
                rec(1, Group::Treatment, 1),
                rec(2, Group::Treatment, 1),
                rec(3, Group::Control, 0),
                rec(4, Group::Control, 1),
            ],
        )
        .unwrap();
        let (a, b) = empirical_marginals(&data).unwrap();
        assert_eq!(a.probs(), &[Rational::zero(), Rational::one()]);
        assert_eq!(b.probs(), &[r(1, 2), r(1, 2)]);
    }

    #[test]
    fn all_treatment_is_an_empty_control_group() {
        let data = ResponseData::new(
            2,
            vec![rec(1, Group::Treatment, 0), rec(2, Group::Treatment, 1)],
        )
        .unwrap();
        assert!(matches!(
            empirical_marginals(&data),
            Err(Error::EmptyGroup { group: "control" })
        ));
    }

    #[test]
    fn balanced_sample_recovers_the_running_marginals() {
        let (a, b) = empirical_marginals(&running_fixture()).unwrap();
        assert_eq!(a.probs(), &[r(1, 3), r(2, 3)]);
        assert_eq!(b.probs(), &[r(2, 3), r(1, 3)]);
    }

    #[test]
    fn estimate_on_running_fixture() {
        let result = median_estimate(&running_fixture(), &r(1, 100)).unwrap();
        assert_eq!(result.m_hat, 0);
        // 1/6 + 2*2*(1/100) = 31/150
        assert_eq!(result.epsilon, r(31, 150));
        assert_eq!(result.n_a, 3);
        assert_eq!(result.n_b, 3);
        assert_eq!(result.width_report.min_width, r(1, 6));
    }

    #[test]
    fn constant_outcomes_give_zero_width_at_zero() {
        let data = ResponseData::new(
            3,
            vec![
                rec(1, Group::Treatment, 2),
                rec(2, Group::Treatment, 2),
                rec(3, Group::Control, 2),
                rec(4, Group::Control, 2),
            ],
        )
        .unwrap();
        let beta = r(1, 50);
        let result = median_estimate(&data, &beta).unwrap();
        assert_eq!(result.m_hat, 0);
        // epsilon = 0 + 2k*beta with k = 3
        assert_eq!(result.epsilon, r(6, 50));
        assert_eq!(result.width_report.min_width, Rational::zero());
    }

    #[test]
    fn epsilon_is_clipped_at_one_half() {
        let result = median_estimate(&running_fixture(), &r(2, 10)).unwrap();
        // 1/6 + 4*(2/10) = 29/30 clips to 1/2
        assert_eq!(result.epsilon, Rational::one_half());
    }

    #[test]
    fn beta_must_be_positive() {
        assert!(matches!(
            median_estimate(&running_fixture(), &Rational::zero()),
            Err(Error::BadBeta(_))
        ));
        assert!(matches!(
            median_estimate(&running_fixture(), &r(-1, 10)),
            Err(Error::BadBeta(_))
        ));
    }

    #[test]
    fn response_data_validates_units() {
        let dup = ResponseData::new(
            2,
            vec![rec(1, Group::Treatment, 0), rec(1, Group::Control, 0)],
        );
        assert!(matches!(dup, Err(Error::DuplicateUnit { unit: 1 })));
        let gap = ResponseData::new(
            2,
            vec![rec(1, Group::Treatment, 0), rec(3, Group::Control, 0)],
        );
        assert!(matches!(gap, Err(Error::UnitOutOfRange { unit: 3, n: 2 })));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let good = "unit,group,outcome\n1,a,0\n2,b,1\n";
        let data = read_response_csv(Cursor::new(good), 2).unwrap();
        assert_eq!(data.n(), 2);
        assert_eq!(data.records()[0], rec(1, Group::Treatment, 0));

        let dup = "unit,group,outcome\n1,a,0\n1,b,1\n";
        let err = read_response_csv(Cursor::new(dup), 2).unwrap_err();
        assert!(err.to_string().contains("duplicate unit 1"), "{err}");

        let bad_group = "unit,group,outcome\n1,c,0\n";
        let err = read_response_csv(Cursor::new(bad_group), 2).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");

        let bad_outcome = "unit,group,outcome\n1,a,7\n";
        assert!(read_response_csv(Cursor::new(bad_outcome), 2).is_err());

        let bad_header = "id,arm,value\n1,a,0\n";
        assert!(read_response_csv(Cursor::new(bad_header), 2).is_err());
    }

    proptest! {
        // Unit identities and record order are irrelevant: only the multiset
        // of (group, outcome) pairs matters.
        #[test]
        fn estimate_depends_only_on_observation_multiset(
            outcomes in prop::collection::vec((0u8..2, any::<bool>()), 2..40),
            seed in any::<u64>(),
        ) {
            // ensure both groups are nonempty
            let mut obs: Vec<(u8, Group)> = outcomes
                .iter()
                .map(|&(o, t)| (o, if t { Group::Treatment } else { Group::Control }))
                .collect();
            obs.push((0, Group::Treatment));
            obs.push((1, Group::Control));

            let records: Vec<ResponseRecord> = obs
                .iter()
                .enumerate()
                .map(|(i, &(o, g))| rec(i as u32 + 1, g, o))
                .collect();
            let data = ResponseData::new(2, records).unwrap();

            // shuffle deterministically and relabel units by new position
            let mut shuffled = obs.clone();
            let mut state = seed | 1;
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            let records2: Vec<ResponseRecord> = shuffled
                .iter()
                .enumerate()
                .map(|(i, &(o, g))| rec(i as u32 + 1, g, o))
                .collect();
            let data2 = ResponseData::new(2, records2).unwrap();

            let beta = Rational::new(1, 20);
            let r1 = median_estimate(&data, &beta).unwrap();
            let r2 = median_estimate(&data2, &beta).unwrap();
            prop_assert_eq!(r1.m_hat, r2.m_hat);
            prop_assert_eq!(r1.epsilon, r2.epsilon);
            prop_assert_eq!(r1.width_report, r2.width_report);
        }
    }
}
