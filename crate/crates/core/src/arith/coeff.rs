//! The coefficient-ring abstraction shared by polynomials, jets and operators.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact commutative ring used as a coefficient domain.
///
/// Implemented for [`BigRational`] (the field ℚ), [`super::UniPoly`] (ℚ[s] or
/// ℚ[k]) and [`super::RationalFunction`] (ℚ(k)).
pub trait Coeff: Clone + PartialEq + Eq + Debug + Send + Sync + 'static {
    fn czero() -> Self;
    fn cone() -> Self;
    fn is_czero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Exact quotient, `None` when `other` does not divide `self`.
    fn exact_div(&self, other: &Self) -> Option<Self>;
    fn from_rational(r: &BigRational) -> Self;
    /// Serialization tag: `Q`, `Qs`, `Qk` or `Qk(frac)`.
    fn ring_tag() -> &'static str;
    fn write_coeff(&self) -> String;
    fn parse_coeff(s: &str) -> Result<Self>;

    fn is_cone(&self) -> bool {
        *self == Self::cone()
    }
    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }
    fn scale(&self, r: &BigRational) -> Self {
        self.times(&Self::from_rational(r))
    }
    fn add_assign_c(&mut self, other: &Self) {
        *self = self.plus(other);
    }
    fn pow_c(&self, e: u32) -> Self {
        let mut acc = Self::cone();
        for _ in 0..e {
            acc = acc.times(self);
        }
        acc
    }
}

impl Coeff for BigRational {
    fn czero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn cone() -> Self {
        <BigRational as One>::one()
    }
    fn is_czero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn exact_div(&self, other: &Self) -> Option<Self> {
        if Zero::is_zero(other) {
            None
        } else {
            Some(self / other)
        }
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn ring_tag() -> &'static str {
        "Q"
    }
    fn write_coeff(&self) -> String {
        format_rational(self)
    }
    fn parse_coeff(s: &str) -> Result<Self> {
        parse_rational(s)
    }
    fn scale(&self, r: &BigRational) -> Self {
        self * r
    }
    fn add_assign_c(&mut self, other: &Self) {
        *self += other;
    }
}

/// Writes `num/den` (always with the slash, so the format is fixed-width in fields).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in '{s}'")))?;
    let den: BigInt = d
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in '{s}'")))?;
    if Zero::is_zero(&den) {
        return Err(Error::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(BigRational::new(num, den))
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Human-readable rendering: integers without `/1`.
pub fn display_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Falling factorial n (n-1) … (n-k+1).
pub(crate) fn falling(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_roundtrip() {
        let r = ratio(-6, 4);
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), r);
        assert_eq!(parse_rational("7").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(2, 3), BigInt::from(0));
        assert_eq!(falling(5, 2), BigInt::from(20));
        assert_eq!(falling(2, 3), BigInt::from(0));
    }
}
