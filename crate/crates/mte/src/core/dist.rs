//! Marginal and joint outcome distributions with exact probabilities.

use crate::core::outcome::OutcomeSpace;
use crate::core::rational::Rational;
use crate::error::{Error, Result};

/// A probability distribution over the `k` outcome values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marginal {
    k: usize,
    p: Vec<Rational>,
}

impl Marginal {
    /// Validates that `values` is a point of the probability simplex over
    /// `{0, ..., k-1}`: every entry nonnegative and the entries summing to
    /// exactly one.
    pub fn new(k: usize, values: Vec<Rational>) -> Result<Self> {
        OutcomeSpace::new(k)?;
        if values.len() != k {
            return Err(Error::BadDimension(format!(
                "expected {k} probabilities, got {}",
                values.len()
            )));
        }
        let mut total = Rational::zero();
        for (j, v) in values.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::NotASimplexPoint(format!(
                    "entry {j} is negative ({v})"
                )));
            }
            total += v;
        }
        if total != Rational::one() {
            return Err(Error::NotASimplexPoint(format!("entries sum to {total}")));
        }
        Ok(Marginal { k, p: values })
    }

    /// The distribution placing all mass on a single outcome.
    pub fn point_mass(k: usize, at: usize) -> Result<Self> {
        if at >= k {
            return Err(Error::OutcomeOutOfRange {
                outcome: at as i64,
                k,
            });
        }
        let p = (0..k)
            .map(|j| {
                if j == at {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Marginal::new(k, p)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn prob(&self, j: usize) -> &Rational {
        &self.p[j]
    }

    pub fn probs(&self) -> &[Rational] {
        &self.p
    }

    pub fn space(&self) -> OutcomeSpace {
        OutcomeSpace::new(self.k).expect("validated at construction")
    }
}

/// A joint distribution over outcome pairs: `entry(x, y)` is the probability
/// that treatment takes value `x` and control takes value `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Joint {
    k: usize,
    m: Vec<Vec<Rational>>,
}

impl Joint {
    pub fn new(k: usize, m: Vec<Vec<Rational>>) -> Result<Self> {
        OutcomeSpace::new(k)?;
        if m.len() != k || m.iter().any(|row| row.len() != k) {
            return Err(Error::BadDimension(format!("expected a {k}x{k} matrix")));
        }
        let mut total = Rational::zero();
        for (x, row) in m.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                if v.is_negative() {
                    return Err(Error::NotASimplexPoint(format!(
                        "entry ({x}, {y}) is negative ({v})"
                    )));
                }
                total += v;
            }
        }
        if total != Rational::one() {
            return Err(Error::NotASimplexPoint(format!("entries sum to {total}")));
        }
        Ok(Joint { k, m })
    }

    /// Convenience constructor from small integer fractions.
    pub fn from_fractions(k: usize, cells: &[&[(i64, i64)]]) -> Result<Self> {
        let m = cells
            .iter()
            .map(|row| row.iter().map(|&(p, q)| Rational::new(p, q)).collect())
            .collect();
        Joint::new(k, m)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entry(&self, x: usize, y: usize) -> &Rational {
        &self.m[x][y]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.m
    }

    /// Iterates over all cells as `(x, y, mass)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.m
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().enumerate().map(move |(y, v)| (x, y, v)))
    }

    /// Row and column sums: the treatment marginal and the control marginal.
    /// Never fails on a constructed `Joint`; both outputs are valid simplex
    /// points because the entries are nonnegative and sum to one.
    pub fn marginals(&self) -> (Marginal, Marginal) {
        let mut row_sums = vec![Rational::zero(); self.k];
        let mut col_sums = vec![Rational::zero(); self.k];
        for (x, y, v) in self.cells() {
            row_sums[x] += v;
            col_sums[y] += v;
        }
        let a = Marginal::new(self.k, row_sums).expect("row sums of a joint are a distribution");
        let b = Marginal::new(self.k, col_sums).expect("column sums of a joint are a distribution");
        (a, b)
    }

    pub fn space(&self) -> OutcomeSpace {
        OutcomeSpace::new(self.k).expect("validated at construction")
    }
}
