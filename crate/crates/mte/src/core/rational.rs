//! Exact rational arithmetic for probabilities and widths.
//!
//! Every probability in this crate is an exact rational; floating point only
//! appears at the simulation boundary and in report serialization. The type
//! wraps an arbitrary-precision ratio kept in lowest terms with a positive
//! denominator, so equal values always compare and print identically.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`, normalizing sign and reducing to lowest terms.
    ///
    /// Panics if `den == 0`, like integer division.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub(crate) fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "rational with zero denominator");
        Rational(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn one_half() -> Self {
        Rational::new(1, 2)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Largest integer not exceeding the value.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// `max(self, 0)`, the positive-part operator used by width formulas.
    pub fn positive_part(&self) -> Self {
        if self.is_negative() {
            Rational::zero()
        } else {
            self.clone()
        }
    }

    /// Nearest `f64`; exact values are preferred everywhere this is not.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Best rational approximation of a float with denominator at most
    /// `max_den`, by walking the continued-fraction convergents.
    pub fn approx_from_f64(x: f64, max_den: u64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Parse(format!("cannot convert {x} to a rational")));
        }
        assert!(max_den >= 1);
        let negative = x < 0.0;
        let mut frac = x.abs();
        // Convergents p/q of the continued fraction of |x|.
        let (mut p_prev, mut q_prev) = (BigInt::from(1), BigInt::from(0));
        let (mut p, mut q) = (BigInt::from(frac.floor() as i128), BigInt::from(1));
        frac -= frac.floor();
        for _ in 0..64 {
            if frac <= f64::EPSILON || q > BigInt::from(max_den) {
                break;
            }
            frac = 1.0 / frac;
            let a = BigInt::from(frac.floor() as i128);
            frac -= frac.floor();
            let p_next = &a * &p + &p_prev;
            let q_next = &a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
        }
        if q > BigInt::from(max_den) {
            p = p_prev;
            q = q_prev;
        }
        if negative {
            p = -p;
        }
        Ok(Rational::from_big(p, q))
    }
}

impl fmt::Display for Rational {
    /// Canonical form: `p/q` in lowest terms, or a bare integer when `q = 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses `"p/q"` strings and bare integer literals. Decimal floats are
    /// rejected so that no inexact value can enter a probability position.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::Parse(format!("invalid rational {s:?}: {msg}"));
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num = BigInt::from_str(num_str)
            .map_err(|_| bad("expected an integer or \"p/q\" (floats are not exact)"))?;
        let den = match den_str {
            Some(d) => BigInt::from_str(d)
                .map_err(|_| bad("expected an integer or \"p/q\" (floats are not exact)"))?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        Ok(Rational(BigRational::new(num, den)))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($($trait:ident $fn:ident),*) => {
        $(
            impl $trait for Rational {
                type Output = Rational;
                fn $fn(self, rhs: Rational) -> Rational {
                    Rational((self.0).$fn(rhs.0))
                }
            }
            impl<'a> $trait<&'a Rational> for &'a Rational {
                type Output = Rational;
                fn $fn(self, rhs: &'a Rational) -> Rational {
                    Rational((&self.0).$fn(&rhs.0))
                }
            }
        )*
    };
}

forward_binop!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}
