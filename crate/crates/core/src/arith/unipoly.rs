//! Dense univariate polynomials over ℚ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::coeff::{display_rational, format_rational, parse_rational, Coeff};
use crate::error::{Error, Result};

/// Name of the indeterminate. Only used for display and serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Var {
    #[default]
    S,
    K,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::S => "s",
            Var::K => "k",
        }
    }
}

/// Polynomial `c[0] + c[1] x + …` with the trailing coefficient nonzero.
///
/// Equality ignores the variable tag.
#[derive(Clone, Debug, Eq)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
    var: Var,
}

impl PartialEq for UniPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl std::hash::Hash for UniPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>, var: Var) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs, var }
    }

    pub fn from_ints(coeffs: &[i64], var: Var) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
            var,
        )
    }

    pub fn zero_in(var: Var) -> Self {
        UniPoly {
            coeffs: vec![],
            var,
        }
    }

    pub fn constant(c: BigRational, var: Var) -> Self {
        Self::new(vec![c], var)
    }

    /// The monomial `x`.
    pub fn x(var: Var) -> Self {
        Self::from_ints(&[0, 1], var)
    }

    /// `x + c`.
    pub fn linear(c: BigRational, var: Var) -> Self {
        Self::new(vec![c, BigRational::one()], var)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn tag_for(&self, other: &Self) -> Var {
        if self.is_constant() {
            other.var
        } else {
            self.var
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * r).collect(), self.var)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        self.scale(&(BigRational::one() / lc))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UniPoly::constant(BigRational::one(), self.var);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `p(x + c)`.
    pub fn shift(&self, c: &BigRational) -> Self {
        let lin = UniPoly::linear(c.clone(), self.var);
        let mut acc = UniPoly::zero_in(self.var);
        for coef in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &UniPoly::constant(coef.clone(), self.var);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
            self.var,
        )
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lc = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return Ok((UniPoly::zero_in(self.var), self.clone()));
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((
            UniPoly::new(quot, self.tag_for(d)),
            UniPoly::new(rem, self.tag_for(d)),
        ))
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Distinct rational roots with multiplicity, ascending; also returns the
    /// cofactor left after removing all of them.
    pub fn rational_roots(&self) -> (Vec<(BigRational, usize)>, UniPoly) {
        let mut rest = self.clone();
        let mut roots: Vec<(BigRational, usize)> = Vec::new();
        if rest.degree().unwrap_or(0) == 0 {
            return (roots, rest);
        }
        // x = 0 first, then the rational-root theorem on the primitive integer form.
        let mut zero_mult = 0;
        while rest.degree().unwrap_or(0) > 0 && rest.coeff(0).is_zero() {
            rest = UniPoly::new(rest.coeffs[1..].to_vec(), rest.var);
            zero_mult += 1;
        }
        if zero_mult > 0 {
            roots.push((BigRational::zero(), zero_mult));
        }
        if rest.degree().unwrap_or(0) == 0 {
            return (roots, rest);
        }
        let ints = rest.integer_form();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let ps = divisors(&a0);
        let qs = divisors(&an);
        let mut cands: Vec<BigRational> = Vec::new();
        for p in &ps {
            for q in &qs {
                let r = BigRational::new(p.clone(), q.clone());
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        for c in cands {
            let lin = UniPoly::new(vec![-c.clone(), BigRational::one()], rest.var);
            let mut mult = 0;
            loop {
                if rest.degree().unwrap_or(0) == 0 {
                    break;
                }
                let (q, r) = rest.div_rem(&lin).expect("nonzero");
                if r.is_zero() {
                    rest = q;
                    mult += 1;
                } else {
                    break;
                }
            }
            if mult > 0 {
                roots.push((c, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, rest)
    }

    /// Integer coefficients of a primitive associate.
    pub fn integer_form(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            ints
        } else {
            ints.into_iter().map(|c| c / &g).collect()
        }
    }

    /// Bracketed list `[c0,c1,…]` of `num/den` entries.
    pub fn to_bracket(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn parse_bracket(s: &str, var: Var) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [..] polynomial, got '{s}'")))?;
        if inner.trim().is_empty() {
            return Ok(UniPoly::zero_in(var));
        }
        let coeffs = inner
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        Ok(UniPoly::new(coeffs, var))
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // Trial division; the constants met here are small (b-function values).
    let mut out = Vec::new();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut small = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            small.push(i.clone());
            let other = n / &i;
            if other != i {
                out.push(other);
            }
        }
        i += 1;
    }
    small.extend(out.into_iter().rev());
    small
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let x = self.var.name();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_c = i == 0 || !a.is_one();
            if show_c {
                write!(f, "{}", display_rational(&a))?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}{x}", if show_c { "*" } else { "" })?,
                _ => write!(f, "{}{x}^{i}", if show_c { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        UniPoly::new(coeffs, self.tag_for(rhs))
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        UniPoly::new(coeffs, self.tag_for(rhs))
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero_in(self.tag_for(rhs));
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out, self.tag_for(rhs))
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect(), self.var)
    }
}

impl Coeff for UniPoly {
    fn czero() -> Self {
        UniPoly::zero_in(Var::K)
    }
    fn cone() -> Self {
        UniPoly::constant(BigRational::one(), Var::K)
    }
    fn is_czero(&self) -> bool {
        self.coeffs.is_empty()
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
        let (q, r) = self.div_rem(other).ok()?;
        r.is_zero().then_some(q)
    }
    fn from_rational(r: &BigRational) -> Self {
        UniPoly::constant(r.clone(), Var::K)
    }
    fn ring_tag() -> &'static str {
        "Qk"
    }
    fn write_coeff(&self) -> String {
        self.to_bracket()
    }
    fn parse_coeff(s: &str) -> Result<Self> {
        UniPoly::parse_bracket(s, Var::K)
    }
    fn scale(&self, r: &BigRational) -> Self {
        UniPoly::scale(self, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::coeff::{rat, ratio};

    #[test]
    fn arithmetic_and_display() {
        let p = UniPoly::from_ints(&[1, 1], Var::K); // k+1
        let q = p.pow(2);
        assert_eq!(q, UniPoly::from_ints(&[1, 2, 1], Var::K));
        assert_eq!(q.to_string(), "k^2 + 2*k + 1");
        assert_eq!((&q - &q).degree(), None);
        assert_eq!(q.eval(&rat(2)), rat(9));
    }

    #[test]
    fn division_and_gcd() {
        let a = UniPoly::from_ints(&[-1, 0, 1], Var::S); // s^2-1
        let b = UniPoly::from_ints(&[1, 1], Var::S);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q, UniPoly::from_ints(&[-1, 1], Var::S));
        assert!(r.is_zero());
        let g = a.gcd(&UniPoly::from_ints(&[2, 2], Var::S));
        assert_eq!(g, b);
        assert!(a.div_rem(&UniPoly::zero_in(Var::S)).is_err());
    }

    #[test]
    fn rational_roots_of_b_function() {
        // 2(k+1)^2(2k+3)
        let p = UniPoly::from_ints(&[6, 16, 14, 4], Var::K);
        let (roots, rest) = p.rational_roots();
        assert_eq!(roots, vec![(ratio(-3, 2), 1), (rat(-1), 2)]);
        assert_eq!(rest, UniPoly::from_ints(&[4], Var::K));
        let irr = UniPoly::from_ints(&[-2, 0, 1], Var::K);
        let (roots, rest) = irr.rational_roots();
        assert!(roots.is_empty());
        assert_eq!(rest, irr);
    }

    #[test]
    fn shift_matches_substitution() {
        let p = UniPoly::from_ints(&[6, 4], Var::K); // 4k+6
        assert_eq!(p.shift(&rat(2)), UniPoly::from_ints(&[14, 4], Var::K));
    }

    #[test]
    fn bracket_roundtrip() {
        let p = UniPoly::new(vec![ratio(1, 2), rat(0), rat(-3)], Var::K);
        assert_eq!(UniPoly::parse_bracket(&p.to_bracket(), Var::K).unwrap(), p);
    }
}
