//! Outcome spaces and full potential-outcome tables.

use crate::error::{Error, Result};

/// Largest supported number of outcome values.
pub const MAX_K: usize = 64;

/// Largest supported population size.
pub const MAX_POPULATION: usize = 10_000_000;

/// The space of k-ary outcomes `{0, ..., k-1}`.
///
/// Individual treatment effects over this space lie in
/// `{-(k-1), ..., k-1}`, a set of `2k - 1` integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeSpace {
    k: usize,
}

impl OutcomeSpace {
    pub fn new(k: usize) -> Result<Self> {
        if !(2..=MAX_K).contains(&k) {
            return Err(Error::BadDimension(format!(
                "k must be in 2..={MAX_K} (got {k})"
            )));
        }
        Ok(OutcomeSpace { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Smallest representable treatment effect, `-(k-1)`.
    pub fn effect_min(&self) -> i64 {
        -(self.k as i64 - 1)
    }

    /// Largest representable treatment effect, `k-1`.
    pub fn effect_max(&self) -> i64 {
        self.k as i64 - 1
    }

    /// All candidate effects `-(k-1), ..., k-1` in ascending order.
    pub fn effect_range(&self) -> impl Iterator<Item = i64> {
        self.effect_min()..=self.effect_max()
    }

    /// Validates that `r` is a representable treatment effect.
    pub fn check_effect(&self, r: i64) -> Result<()> {
        if r < self.effect_min() || r > self.effect_max() {
            return Err(Error::ROutOfRange {
                r,
                lo: self.effect_min(),
                hi: self.effect_max(),
            });
        }
        Ok(())
    }
}

/// A full potential-outcome table: treatment and control values for all `n`
/// units. Only simulations ever hold both vectors; estimators see one value
/// per unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeVectorPair {
    k: usize,
    a: Vec<u8>,
    b: Vec<u8>,
}

impl OutcomeVectorPair {
    pub fn new(k: usize, a: Vec<u8>, b: Vec<u8>) -> Result<Self> {
        let space = OutcomeSpace::new(k)?;
        if a.len() != b.len() {
            return Err(Error::BadDimension(format!(
                "treatment and control vectors have lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        if a.is_empty() {
            return Err(Error::EmptyVector);
        }
        if a.len() > MAX_POPULATION {
            return Err(Error::PopulationTooLarge {
                n: a.len(),
                max: MAX_POPULATION,
            });
        }
        for &v in a.iter().chain(b.iter()) {
            if usize::from(v) >= space.k() {
                return Err(Error::OutcomeOutOfRange {
                    outcome: i64::from(v),
                    k,
                });
            }
        }
        Ok(OutcomeVectorPair { k, a, b })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn treatment(&self) -> &[u8] {
        &self.a
    }

    pub fn control(&self) -> &[u8] {
        &self.b
    }

    /// The per-unit effect vector `a - b`.
    pub fn effects(&self) -> Vec<i64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(&x, &y)| i64::from(x) - i64::from(y))
            .collect()
    }

    /// Median of `a - b`: the middle element of the sorted effect vector
    /// (the lower of the two middle elements when `n` is even).
    pub fn median_treatment_effect(&self) -> i64 {
        let mut v = self.effects();
        v.sort_unstable();
        v[(v.len() - 1) / 2]
    }
}
