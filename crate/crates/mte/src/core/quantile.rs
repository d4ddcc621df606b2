//! Lower/upper quantiles of effect vectors and joint distributions.
//!
//! For a vector `v` of treatment effects, `q_lower(r, v)` is the fraction of
//! entries strictly below `r` and `q_upper(r, v)` the fraction at most `r`.
//! The interval `[q_lower, q_upper]` is the set of ranks occupied by the
//! value `r`; a value sits in a quantile band when that interval meets the
//! band. The joint-distribution versions weigh cells by probability mass
//! instead of counting entries.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::core::dist::Joint;
use crate::core::rational::Rational;
use crate::error::{Error, Result};

/// Integer threshold equivalent to comparing against the rational `r`:
/// `v < r` iff `v <= hold.0` when `hold.1`, else `v < hold.0` (see below).
fn floor_saturating(r: &Rational) -> i128 {
    let f: BigInt = r.floor_int();
    f.to_i128().unwrap_or(if f.is_negative() {
        i128::MIN
    } else {
        i128::MAX
    })
}

/// `value < r` for integer `value`, without building a rational per element.
fn int_lt(value: i64, r_floor: i128, r_is_integer: bool) -> bool {
    if r_is_integer {
        i128::from(value) < r_floor
    } else {
        i128::from(value) <= r_floor
    }
}

/// `value <= r` for integer `value`.
fn int_le(value: i64, r_floor: i128) -> bool {
    i128::from(value) <= r_floor
}

/// Fraction of entries of `v` strictly less than `r`.
pub fn q_lower_vec(r: &Rational, v: &[i64]) -> Result<Rational> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    let rf = floor_saturating(r);
    let ri = r.is_integer();
    let count = v.iter().filter(|&&x| int_lt(x, rf, ri)).count();
    Ok(Rational::new(count as i64, v.len() as i64))
}

/// Fraction of entries of `v` less than or equal to `r`.
pub fn q_upper_vec(r: &Rational, v: &[i64]) -> Result<Rational> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    let rf = floor_saturating(r);
    let count = v.iter().filter(|&&x| int_le(x, rf)).count();
    Ok(Rational::new(count as i64, v.len() as i64))
}

/// Whether `[lo, hi]` intersects `[q_lower(r, v), q_upper(r, v)]`, i.e.
/// whether `r` is an admissible value for every quantile in the band.
pub fn in_quantile_band(r: &Rational, v: &[i64], lo: &Rational, hi: &Rational) -> Result<bool> {
    if lo > hi || lo.is_negative() || hi > &Rational::one() {
        return Err(Error::BadBand {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    let ql = q_lower_vec(r, v)?;
    let qu = q_upper_vec(r, v)?;
    Ok(&ql <= hi && lo <= &qu)
}

/// Probability mass of cells with effect `x - y` strictly less than `r`.
pub fn q_lower_joint(r: &Rational, j: &Joint) -> Rational {
    let rf = floor_saturating(r);
    let ri = r.is_integer();
    let mut total = Rational::zero();
    for (x, y, mass) in j.cells() {
        if int_lt(x as i64 - y as i64, rf, ri) {
            total += mass;
        }
    }
    total
}

/// Probability mass of cells with effect `x - y` at most `r`.
pub fn q_upper_joint(r: &Rational, j: &Joint) -> Rational {
    let rf = floor_saturating(r);
    let mut total = Rational::zero();
    for (x, y, mass) in j.cells() {
        if int_le(x as i64 - y as i64, rf) {
            total += mass;
        }
    }
    total
}
