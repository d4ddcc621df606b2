//! Samplers, deterministic typical samples, hard instances, and the
//! coverage / indistinguishability experiment harnesses.
//!
//! All randomness flows through ChaCha8 with explicit 64-bit seeds, so every
//! experiment is reproducible bit for bit. Draws from rational distributions
//! use integer thresholding on scaled uniform integers; no floating point
//! touches the sampling path.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::{in_quantile_band, Joint, Marginal, OutcomeVectorPair, Rational, MAX_POPULATION};
use crate::error::{Error, Result};
use crate::estimator::{delta_bound, median_estimate, Group, ResponseData, ResponseRecord};
use crate::variability::min_median_width;

/// One i.i.d. sample of `n` outcome pairs from a joint distribution,
/// reproducible from the seed.
pub fn sample_joint(j: &Joint, n: usize, seed: u64) -> OutcomeVectorPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_joint_with(j, n, &mut rng)
}

fn sample_joint_with(j: &Joint, n: usize, rng: &mut ChaCha8Rng) -> OutcomeVectorPair {
    assert!(n >= 1, "sample size must be at least 1");
    assert!(n <= MAX_POPULATION, "sample size exceeds {MAX_POPULATION}");
    let k = j.k();
    // Scale every cell to an integer weight over a common denominator, then
    // draw uniform integers below the total and walk the cumulative table.
    let mut scale = BigInt::one();
    for (_, _, mass) in j.cells() {
        scale = scale.lcm(mass.denom());
    }
    let cells: Vec<(u8, u8)> = (0..k)
        .flat_map(|x| (0..k).map(move |y| (x as u8, y as u8)))
        .collect();
    let cumulative: Vec<BigUint> = {
        let mut acc = BigUint::zero();
        j.cells()
            .map(|(_, _, mass)| {
                let units = (mass.numer() * (&scale / mass.denom()))
                    .to_biguint()
                    .expect("joint masses are nonnegative");
                acc += units;
                acc.clone()
            })
            .collect()
    };
    let total = cumulative.last().expect("k >= 2").clone();
    debug_assert_eq!(BigInt::from(total.clone()), scale);

    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    if let Some(total64) = total.to_u64() {
        let cum64: Vec<u64> = cumulative
            .iter()
            .map(|c| c.to_u64().expect("bounded by total"))
            .collect();
        for _ in 0..n {
            let u = rng.random_range(0..total64);
            let idx = cum64.partition_point(|c| *c <= u);
            let (x, y) = cells[idx];
            a.push(x);
            b.push(y);
        }
    } else {
        for _ in 0..n {
            let u = uniform_biguint_below(rng, &total);
            let idx = cumulative.partition_point(|c| *c <= u);
            let (x, y) = cells[idx];
            a.push(x);
            b.push(y);
        }
    }
    OutcomeVectorPair::new(k, a, b).expect("sampled outcomes are in range")
}

/// Unbiased uniform integer in `[0, bound)` by rejection on the bit length.
fn uniform_biguint_below(rng: &mut ChaCha8Rng, bound: &BigUint) -> BigUint {
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_mask: u32 = if bits.is_multiple_of(32) {
        u32::MAX
    } else {
        (1u32 << (bits % 32)) - 1
    };
    loop {
        let mut chunks = vec![0u32; words];
        for c in chunks.iter_mut() {
            *c = rng.random();
        }
        chunks[words - 1] &= top_mask;
        let candidate = BigUint::new(chunks);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// The deterministic sample whose empirical cell frequencies equal the joint
/// exactly: cell `(x, y)` contributes `n * mass(x, y)` units, laid out in
/// row-major blocks. Fails with `NotIntegral` when any cell count is not a
/// whole number.
pub fn typical_sample(j: &Joint, n: usize) -> Result<OutcomeVectorPair> {
    assert!(n >= 1, "sample size must be at least 1");
    if n > MAX_POPULATION {
        return Err(Error::PopulationTooLarge {
            n,
            max: MAX_POPULATION,
        });
    }
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for (x, y, mass) in j.cells() {
        let scaled = mass * &Rational::from_integer(n as i64);
        if !scaled.is_integer() {
            return Err(Error::NotIntegral {
                x,
                y,
                mass: mass.to_string(),
                n,
            });
        }
        let count = scaled
            .floor_int()
            .to_u64()
            .expect("cell count is within 0..=n");
        for _ in 0..count {
            a.push(x as u8);
            b.push(y as u8);
        }
    }
    debug_assert_eq!(a.len(), n);
    OutcomeVectorPair::new(j.k(), a, b)
}

/// Assigns each unit independently to treatment or control with probability
/// 1/2, revealing exactly one of its two potential outcomes.
pub fn bernoulli_observe(pair: &OutcomeVectorPair, seed: u64) -> ResponseData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bernoulli_observe_with(pair, &mut rng)
}

fn bernoulli_observe_with(pair: &OutcomeVectorPair, rng: &mut ChaCha8Rng) -> ResponseData {
    assert!(pair.n() >= 2, "need at least two units to observe");
    let records: Vec<ResponseRecord> = (0..pair.n())
        .map(|i| {
            let treated: bool = rng.random();
            ResponseRecord {
                unit: (i + 1) as u32,
                group: if treated {
                    Group::Treatment
                } else {
                    Group::Control
                },
                outcome: if treated {
                    pair.treatment()[i]
                } else {
                    pair.control()[i]
                },
            }
        })
        .collect();
    ResponseData::new(pair.k(), records).expect("observation preserves validity")
}

/// The marginal pair that makes the minimum median width as large as it can
/// ever be: treatment mass `(1 + [r > 0]) / (2k - 1)` and control mass
/// `(1 + [r < k-1]) / (2k - 1)` on outcome `r`.
pub fn extremal_marginals(k: usize) -> Result<(Marginal, Marginal)> {
    if k < 2 {
        return Err(Error::BadK { k });
    }
    let den = 2 * k as i64 - 1;
    let a = (0..k)
        .map(|r| Rational::new(if r > 0 { 2 } else { 1 }, den))
        .collect();
    let b = (0..k)
        .map(|r| Rational::new(if r < k - 1 { 2 } else { 1 }, den))
        .collect();
    Ok((Marginal::new(k, a)?, Marginal::new(k, b)?))
}

/// The universal upper bound `(2k - 3) / (2 (2k - 1))` on the minimum median
/// width of any marginal pair over k-ary outcomes.
pub fn psi(k: usize) -> Result<Rational> {
    if k < 2 {
        return Err(Error::BadK { k });
    }
    Ok(Rational::new(2 * k as i64 - 3, 2 * (2 * k as i64 - 1)))
}

/// Per-trial outcome of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    /// ChaCha stream used for outcome sampling in this trial.
    pub sample_stream: u64,
    /// ChaCha stream used for group assignment in this trial.
    pub assign_stream: u64,
    pub m_hat: i64,
    pub epsilon: Rational,
    pub covered: bool,
}

/// Inputs echoed into every report.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub joint: Joint,
    pub n: usize,
    pub beta: Rational,
    pub trials: usize,
    pub seed: u64,
}

/// Aggregated result of repeated sample-observe-estimate trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub trials: usize,
    pub coverage_rate: f64,
    pub mean_epsilon: f64,
    /// Failure-probability bound `2k exp(-2 beta^2 n)` for one trial.
    pub delta_bound: f64,
    /// Minimum median width of the true marginals, the instance floor that
    /// mean width is compared against.
    pub epsilon_star: Rational,
    /// `(eps* - beta)(1 - 2k delta)` with the vanishing tail term
    /// `2k exp(-2 beta^2 n)` subtracted; the conservative reading of the
    /// instance floor on expected width.
    pub width_floor_minus_tail: f64,
    /// Same floor with the tail term added instead.
    pub width_floor_plus_tail: f64,
    pub records: Vec<TrialRecord>,
    pub config: ExperimentConfig,
}

/// Runs `trials` rounds of: sample a population from the joint, observe one
/// arm per unit under the Bernoulli design, estimate, and check whether the
/// estimate landed inside its own reported quantile band of the withheld
/// effect vector. Trial `t` draws from ChaCha streams `2t` (sampling) and
/// `2t + 1` (assignment), so trials are independent and order-free.
pub fn coverage_experiment(
    j: &Joint,
    n: usize,
    beta: &Rational,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    assert!(trials >= 1, "need at least one trial");
    let records: Vec<TrialRecord> = (0..trials)
        .map(|trial| run_trial(j, n, beta, seed, trial))
        .collect::<Result<_>>()?;
    let config = ExperimentConfig {
        joint: j.clone(),
        n,
        beta: beta.clone(),
        trials,
        seed,
    };
    Ok(aggregate(records, config))
}

fn run_trial(j: &Joint, n: usize, beta: &Rational, seed: u64, trial: usize) -> Result<TrialRecord> {
    let sample_stream = 2 * trial as u64;
    let assign_stream = 2 * trial as u64 + 1;
    let mut sample_rng = ChaCha8Rng::seed_from_u64(seed);
    sample_rng.set_stream(sample_stream);
    let pair = sample_joint_with(j, n, &mut sample_rng);
    let mut assign_rng = ChaCha8Rng::seed_from_u64(seed);
    assign_rng.set_stream(assign_stream);
    let data = bernoulli_observe_with(&pair, &mut assign_rng);
    let estimate = median_estimate(&data, beta)?;
    let lo = &Rational::one_half() - &estimate.epsilon;
    let hi = &Rational::one_half() + &estimate.epsilon;
    let covered = in_quantile_band(
        &Rational::from_integer(estimate.m_hat),
        &pair.effects(),
        &lo,
        &hi,
    )?;
    Ok(TrialRecord {
        trial,
        sample_stream,
        assign_stream,
        m_hat: estimate.m_hat,
        epsilon: estimate.epsilon,
        covered,
    })
}

fn aggregate(records: Vec<TrialRecord>, config: ExperimentConfig) -> ExperimentReport {
    let trials = records.len();
    let covered = records.iter().filter(|r| r.covered).count();
    let mean_epsilon = records.iter().map(|r| r.epsilon.to_f64()).sum::<f64>() / trials as f64;
    let k = config.joint.k();
    let delta = delta_bound(k, &config.beta, config.n);
    let (eta_a, eta_b) = config.joint.marginals();
    let epsilon_star = min_median_width(&eta_a, &eta_b)
        .expect("marginals of a joint always share a dimension")
        .min_width;
    let base = (epsilon_star.to_f64() - config.beta.to_f64()) * (1.0 - 2.0 * k as f64 * delta);
    ExperimentReport {
        trials,
        coverage_rate: covered as f64 / trials as f64,
        mean_epsilon,
        delta_bound: delta,
        epsilon_star,
        width_floor_minus_tail: base - delta,
        width_floor_plus_tail: base + delta,
        records,
        config,
    }
}

/// Result of running paired coverage pipelines on two joints with the same
/// marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct IndistinguishabilityReport {
    pub first: ExperimentReport,
    pub second: ExperimentReport,
    /// Total-variation distance between the empirical distributions of the
    /// two arms' `(m_hat, epsilon)` outputs, with epsilon binned at
    /// `tv_bin_width` resolution.
    pub tv_distance: f64,
    pub tv_bin_width: Rational,
}

/// Runs the coverage pipeline on both joints with paired per-trial streams
/// and measures how far apart the two output distributions look.
///
/// Joints sharing their marginals induce identical output laws, so the
/// distance only reflects finite-trial fluctuation. Widths are compared at
/// resolution `beta` (the estimator's own slack; finer differences carry no
/// signal), which keeps the empirical support small enough for the distance
/// estimate to be meaningful at desk-scale trial counts.
pub fn indistinguishability_experiment(
    j1: &Joint,
    j2: &Joint,
    n: usize,
    beta: &Rational,
    trials: usize,
    seed: u64,
) -> Result<IndistinguishabilityReport> {
    if j1.k() != j2.k() {
        return Err(Error::DimensionMismatch {
            left: j1.k(),
            right: j2.k(),
        });
    }
    if j1.marginals() != j2.marginals() {
        return Err(Error::MarginalsDiffer);
    }
    let first = coverage_experiment(j1, n, beta, trials, seed)?;
    let second = coverage_experiment(j2, n, beta, trials, seed)?;
    let tv_distance = tv_distance_binned(&first.records, &second.records, beta);
    Ok(IndistinguishabilityReport {
        first,
        second,
        tv_distance,
        tv_bin_width: beta.clone(),
    })
}

/// Exact total-variation distance between the empirical laws of
/// `(m_hat, floor(epsilon / bin))` on the two record sets.
fn tv_distance_binned(first: &[TrialRecord], second: &[TrialRecord], bin: &Rational) -> f64 {
    use std::collections::BTreeMap;
    let mut counts: BTreeMap<(i64, BigInt), (i64, i64)> = BTreeMap::new();
    for rec in first {
        let key = (rec.m_hat, (&rec.epsilon / bin).floor_int());
        counts.entry(key).or_default().0 += 1;
    }
    for rec in second {
        let key = (rec.m_hat, (&rec.epsilon / bin).floor_int());
        counts.entry(key).or_default().1 += 1;
    }
    let trials = first.len() as i64;
    let mut total_diff = Rational::zero();
    for (c1, c2) in counts.values() {
        total_diff += &Rational::new((c1 - c2).abs(), trials);
    }
    (&total_diff * &Rational::one_half()).to_f64()
}
