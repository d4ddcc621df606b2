//! Greedy computation of variability and minimum median width.
//!
//! For marginals `eta_a`, `eta_b` and a candidate effect `r`, the lower
//! variability is the largest probability mass any coupling of the marginals
//! can place on cells with effect strictly below `r`, and the upper
//! variability the smallest mass any coupling must place on cells with
//! effect at most `r`. Both are transportation-polytope optima; the greedy
//! fill below computes them exactly in O(k) per call. The width of `r` then
//! measures how far the rank interval of `r` can sit from the median rank
//! 1/2 in the worst consistent coupling, and the minimum median width is the
//! best width over all `2k - 1` candidate effects.

use crate::core::{Joint, Marginal, OutcomeSpace, Rational};
use crate::error::{Error, Result};

/// The pair `(nu_lower, nu_upper)` for one candidate effect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariabilityPair {
    pub r: i64,
    pub nu_lower: Rational,
    pub nu_upper: Rational,
}

/// Width data for one candidate effect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthEntry {
    pub r: i64,
    pub nu_lower: Rational,
    pub nu_upper: Rational,
    pub width: Rational,
}

/// Widths for all candidate effects, with the minimizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthReport {
    pub k: usize,
    pub entries: Vec<WidthEntry>,
    pub argmin_r: i64,
    pub min_width: Rational,
}

impl WidthReport {
    pub fn entry(&self, r: i64) -> Option<&WidthEntry> {
        self.entries.iter().find(|e| e.r == r)
    }
}

fn check_pair(eta_a: &Marginal, eta_b: &Marginal) -> Result<OutcomeSpace> {
    if eta_a.k() != eta_b.k() {
        return Err(Error::DimensionMismatch {
            left: eta_a.k(),
            right: eta_b.k(),
        });
    }
    Ok(eta_a.space())
}

/// Partial coupling built by the greedy fill: entries placed so far, the
/// residual row and column budgets, and which lines are frozen (tight).
#[derive(Debug, Clone)]
pub struct GreedyFillState {
    k: usize,
    fill: Vec<Vec<Rational>>,
    row_residual: Vec<Rational>,
    col_residual: Vec<Rational>,
    row_frozen: Vec<bool>,
    col_frozen: Vec<bool>,
    region_mass: Rational,
}

impl GreedyFillState {
    /// Runs the greedy fill for the lower-quantile objective at effect `r`.
    ///
    /// Columns are visited from `k-1` down to `0`; within a column the rows
    /// `min(y + r - 1, k - 1)` down to `0` (exactly the cells with
    /// `x - y < r`), skipping frozen lines. Each visited cell receives the
    /// largest mass both residual budgets allow, and whichever budget became
    /// tight is frozen (both on a tie). Every visit freezes a line or ends
    /// the column, and the row cursor only moves down, so the whole fill is
    /// O(k).
    pub fn run_lower(r: i64, eta_a: &Marginal, eta_b: &Marginal) -> Result<Self> {
        let space = check_pair(eta_a, eta_b)?;
        space.check_effect(r)?;
        let k = space.k();
        let mut state = GreedyFillState {
            k,
            fill: vec![vec![Rational::zero(); k]; k],
            row_residual: eta_a.probs().to_vec(),
            col_residual: eta_b.probs().to_vec(),
            row_frozen: vec![false; k],
            col_frozen: vec![false; k],
            region_mass: Rational::zero(),
        };
        // Lowest row visited so far; every unfrozen row with budget left is
        // at or below it, so later columns may start there directly.
        let mut cursor = k as i64 - 1;
        for y in (0..k).rev() {
            let x_top = (y as i64 + r - 1).min(k as i64 - 1);
            if x_top < 0 {
                continue;
            }
            let mut x = x_top.min(cursor);
            while x >= 0 {
                let xi = x as usize;
                if state.row_frozen[xi] {
                    x -= 1;
                    continue;
                }
                cursor = x;
                let amount = state.row_residual[xi]
                    .clone()
                    .min(state.col_residual[y].clone());
                state.fill[xi][y] += &amount;
                state.row_residual[xi] -= &amount;
                state.col_residual[y] -= &amount;
                state.region_mass += &amount;
                let row_tight = state.row_residual[xi].is_zero();
                let col_tight = state.col_residual[y].is_zero();
                if row_tight {
                    state.row_frozen[xi] = true;
                }
                if col_tight {
                    state.col_frozen[y] = true;
                    break;
                }
                x -= 1;
            }
        }
        Ok(state)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total mass the fill placed inside the region `x - y < r`.
    pub fn region_mass(&self) -> &Rational {
        &self.region_mass
    }

    pub fn entry(&self, x: usize, y: usize) -> &Rational {
        &self.fill[x][y]
    }

    pub fn row_residual(&self, x: usize) -> &Rational {
        &self.row_residual[x]
    }

    pub fn col_residual(&self, y: usize) -> &Rational {
        &self.col_residual[y]
    }

    pub fn is_row_frozen(&self, x: usize) -> bool {
        self.row_frozen[x]
    }

    pub fn is_col_frozen(&self, y: usize) -> bool {
        self.col_frozen[y]
    }

    /// Completes the partial fill into a full coupling of the marginals by a
    /// northwest-corner sweep over the residual budgets. Any column with
    /// residual mass has all of its region rows exhausted, so the completion
    /// never adds mass inside the region and the witness attains the greedy
    /// optimum.
    pub fn into_witness_joint(mut self) -> Joint {
        let (mut x, mut y) = (0, 0);
        while x < self.k && y < self.k {
            if self.row_residual[x].is_zero() {
                x += 1;
                continue;
            }
            if self.col_residual[y].is_zero() {
                y += 1;
                continue;
            }
            let amount = self.row_residual[x]
                .clone()
                .min(self.col_residual[y].clone());
            self.fill[x][y] += &amount;
            self.row_residual[x] -= &amount;
            self.col_residual[y] -= &amount;
        }
        debug_assert!(self.row_residual.iter().all(Rational::is_zero));
        debug_assert!(self.col_residual.iter().all(Rational::is_zero));
        Joint::new(self.k, self.fill).expect("completion preserves marginals")
    }
}

/// Largest mass any coupling of the marginals places strictly below `r`.
pub fn variability_lower(r: i64, eta_a: &Marginal, eta_b: &Marginal) -> Result<Rational> {
    Ok(GreedyFillState::run_lower(r, eta_a, eta_b)?.region_mass)
}

/// Smallest mass any coupling of the marginals places at or below `r`.
///
/// Computed through the complementation identity
/// `nu_upper(r, a, b) = 1 - nu_lower(-r, b, a)`: the mass a coupling keeps
/// off the cells `x - y <= r` is exactly the mass it places on `x - y > r`,
/// and reading that region with the marginals swapped turns it into
/// `y - x < -r`.
pub fn variability_upper(r: i64, eta_a: &Marginal, eta_b: &Marginal) -> Result<Rational> {
    let space = check_pair(eta_a, eta_b)?;
    space.check_effect(r)?;
    let complement = variability_lower(-r, eta_b, eta_a)?;
    Ok(&Rational::one() - &complement)
}

/// The variability tuple `(nu_lower, nu_upper)` at `r`.
pub fn variability(r: i64, eta_a: &Marginal, eta_b: &Marginal) -> Result<VariabilityPair> {
    Ok(VariabilityPair {
        r,
        nu_lower: variability_lower(r, eta_a, eta_b)?,
        nu_upper: variability_upper(r, eta_a, eta_b)?,
    })
}

fn width_from_pair(pair: &VariabilityPair) -> Rational {
    let half = Rational::one_half();
    let above = (&pair.nu_lower - &half).positive_part();
    let below = (&half - &pair.nu_upper).positive_part();
    above.max(below)
}

/// Width of the candidate effect `r`:
/// `max{(nu_lower(r) - 1/2)^+, (1/2 - nu_upper(r))^+}`.
pub fn width_of_r(r: i64, eta_a: &Marginal, eta_b: &Marginal) -> Result<Rational> {
    Ok(width_from_pair(&variability(r, eta_a, eta_b)?))
}

/// Whether candidate `(width, r)` beats the incumbent under the tie-break
/// rule: smaller width first, then smaller |r|, then the nonnegative sign.
fn beats(width: &Rational, r: i64, best_width: &Rational, best_r: i64) -> bool {
    if width != best_width {
        return width < best_width;
    }
    if r.abs() != best_r.abs() {
        return r.abs() < best_r.abs();
    }
    r > best_r
}

/// Evaluates the width of every candidate effect and returns the minimizer.
///
/// All `2k - 1` candidates are scanned, so the total work is O(k^2). Ties
/// are broken toward the smallest |r|, preferring the nonnegative sign, so
/// the output is deterministic and favors the no-effect estimate when the
/// data cannot distinguish.
pub fn min_median_width(eta_a: &Marginal, eta_b: &Marginal) -> Result<WidthReport> {
    let space = check_pair(eta_a, eta_b)?;
    let mut entries = Vec::with_capacity(2 * space.k() - 1);
    let mut best: Option<(Rational, i64)> = None;
    for r in space.effect_range() {
        let pair = variability(r, eta_a, eta_b)?;
        let width = width_from_pair(&pair);
        match &best {
            Some((w, br)) if !beats(&width, r, w, *br) => {}
            _ => best = Some((width.clone(), r)),
        }
        entries.push(WidthEntry {
            r,
            nu_lower: pair.nu_lower,
            nu_upper: pair.nu_upper,
            width,
        });
    }
    let (min_width, argmin_r) = best.expect("at least one candidate effect");
    Ok(WidthReport {
        k: space.k(),
        entries,
        argmin_r,
        min_width,
    })
}

/// A coupling of the marginals whose mass strictly below `r` attains
/// `variability_lower(r, eta_a, eta_b)`.
pub fn witness_joint_lower(r: i64, eta_a: &Marginal, eta_b: &Marginal) -> Result<Joint> {
    Ok(GreedyFillState::run_lower(r, eta_a, eta_b)?.into_witness_joint())
}
