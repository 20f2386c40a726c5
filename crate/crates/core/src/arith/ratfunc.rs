//! Quotients of univariate polynomials, kept coprime with a monic denominator.

use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use super::coeff::Coeff;
use super::unipoly::{UniPoly, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: UniPoly,
    den: UniPoly,
}

impl RationalFunction {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let var = if num.is_constant() {
            den.var()
        } else {
            num.var()
        };
        if num.is_zero() {
            return Ok(RationalFunction {
                num: UniPoly::zero_in(var),
                den: UniPoly::constant(BigRational::one(), var),
            });
        }
        let g = num.gcd(&den);
        let (n, _) = num.div_rem(&g)?;
        let (d, _) = den.div_rem(&g)?;
        let lc = d.leading();
        let inv = BigRational::one() / lc;
        Ok(RationalFunction {
            num: n.scale(&inv).with_var(var),
            den: d.scale(&inv).with_var(var),
        })
    }

    pub fn from_poly(p: UniPoly) -> Self {
        let var = p.var();
        RationalFunction {
            num: p,
            den: UniPoly::constant(BigRational::one(), var),
        }
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial itself when the denominator is 1.
    pub fn as_poly(&self) -> Option<&UniPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn eval(&self, x: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(x);
        if num_traits::Zero::is_zero(&d) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn inverse(&self) -> Result<Self> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn var(&self) -> Var {
        self.num.var()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Coeff for RationalFunction {
    fn czero() -> Self {
        RationalFunction::from_poly(UniPoly::zero_in(Var::K))
    }
    fn cone() -> Self {
        RationalFunction::from_poly(<UniPoly as Coeff>::cone())
    }
    fn is_czero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        if self.den == other.den {
            return RationalFunction::new(&self.num + &other.num, self.den.clone())
                .expect("nonzero denominator");
        }
        RationalFunction::new(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
        .expect("nonzero denominator")
    }
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
    fn times(&self, other: &Self) -> Self {
        RationalFunction::new(&self.num * &other.num, &self.den * &other.den)
            .expect("nonzero denominator")
    }
    fn negated(&self) -> Self {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
    fn exact_div(&self, other: &Self) -> Option<Self> {
        if other.is_czero() {
            return None;
        }
        Some(self.times(&other.inverse().ok()?))
    }
    fn from_rational(r: &BigRational) -> Self {
        RationalFunction::from_poly(UniPoly::constant(r.clone(), Var::K))
    }
    fn ring_tag() -> &'static str {
        "Qk(frac)"
    }
    fn write_coeff(&self) -> String {
        format!("{}:{}", self.num.to_bracket(), self.den.to_bracket())
    }
    fn parse_coeff(s: &str) -> Result<Self> {
        let (n, d) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected num:den, got '{s}'")))?;
        RationalFunction::new(
            UniPoly::parse_bracket(n, Var::K)?,
            UniPoly::parse_bracket(d, Var::K)?,
        )
    }
    fn scale(&self, r: &BigRational) -> Self {
        RationalFunction::new(self.num.scale(r), self.den.clone()).expect("nonzero denominator")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::coeff::rat;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c, Var::K)
    }

    #[test]
    fn canonical_form() {
        // (2k+2)/(4k^2-4) = 1/(2k-2) -> (1/2)/(k-1)
        let r = RationalFunction::new(p(&[2, 2]), p(&[-4, 0, 4])).unwrap();
        assert_eq!(r.den(), &p(&[-1, 1]));
        assert_eq!(r.num().coeffs(), &[crate::arith::coeff::ratio(1, 2)]);
        assert!(RationalFunction::new(p(&[1]), p(&[])).is_err());
    }

    #[test]
    fn field_operations() {
        let a = RationalFunction::new(p(&[1]), p(&[1, 1])).unwrap();
        let b = RationalFunction::new(p(&[1]), p(&[-1, 1])).unwrap();
        // 1/(k+1) + 1/(k-1) = 2k/(k^2-1)
        let s = a.plus(&b);
        assert_eq!(s.num(), &p(&[0, 2]));
        assert_eq!(s.den(), &p(&[-1, 0, 1]));
        assert_eq!(a.times(&a.inverse().unwrap()), RationalFunction::cone());
        assert_eq!(s.eval(&rat(3)).unwrap(), crate::arith::coeff::ratio(3, 4));
        let parsed = RationalFunction::parse_coeff(&s.write_coeff()).unwrap();
        assert_eq!(parsed, s);
    }
}
