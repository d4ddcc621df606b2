//! Shared fixtures and instance generators for the integration suites.

use mte::core::{Joint, Marginal, Rational};
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

/// The running-example joint with median effect 0.
pub fn mu1() -> Joint {
    Joint::from_fractions(2, &[&[(1, 3), (0, 1)], &[(1, 3), (1, 3)]]).unwrap()
}

/// The running-example joint with the same marginals and median effect 1.
pub fn mu2() -> Joint {
    Joint::from_fractions(2, &[&[(0, 1), (1, 3)], &[(2, 3), (0, 1)]]).unwrap()
}

/// A uniformly chosen simplex point with a common denominator at most 12.
pub fn random_marginal(k: usize, rng: &mut ChaCha8Rng) -> Marginal {
    let den = rng.random_range(1..=12i64);
    // split `den` units into k nonnegative parts via sorted cut points
    let mut cuts: Vec<i64> = (0..k - 1).map(|_| rng.random_range(0..=den)).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for &c in &cuts {
        parts.push(c - prev);
        prev = c;
    }
    parts.push(den - prev);
    Marginal::new(
        k,
        parts.into_iter().map(|p| Rational::new(p, den)).collect(),
    )
    .expect("parts sum to den")
}

/// A random joint whose cell masses are all multiples of 1/n; returns the
/// joint together with that n.
#[allow(dead_code)]
pub fn random_integral_joint(k: usize, rng: &mut ChaCha8Rng) -> (Joint, usize) {
    let n = rng.random_range(4..=60usize);
    let cells = k * k;
    let mut counts = vec![0i64; cells];
    for _ in 0..n {
        counts[rng.random_range(0..cells)] += 1;
    }
    let m: Vec<Vec<Rational>> = (0..k)
        .map(|x| {
            (0..k)
                .map(|y| Rational::new(counts[x * k + y], n as i64))
                .collect()
        })
        .collect();
    (Joint::new(k, m).expect("counts sum to n"), n)
}

/// The marginal with its probability vector reversed.
#[allow(dead_code)]
pub fn reversed(m: &Marginal) -> Marginal {
    let mut probs = m.probs().to_vec();
    probs.reverse();
    Marginal::new(m.k(), probs).expect("reversal preserves the simplex")
}
