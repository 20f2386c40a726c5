//! Normal-ordered differential operators with polynomial coefficients.
//!
//! A term `c · x^a ∂^b` is keyed by the pair `(a, b)`; all coordinates sit to
//! the left of all derivatives.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::coeff::{binomial, falling, Coeff};
use crate::arith::multipoly::{check_ring, parse_header};
use crate::arith::{Monomial, MultiPoly};
use crate::error::{Error, Result};

/// ℤ-grading of an operator: `|x| = 1`, `|∂| = −1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grade {
    Homogeneous(i64),
    Inhomogeneous,
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::Homogeneous(g) => write!(f, "{g}"),
            Grade::Inhomogeneous => f.write_str("inhomogeneous"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylOp<C: Coeff = BigRational> {
    arity: usize,
    terms: BTreeMap<(Monomial, Monomial), C>,
}

impl<C: Coeff> WeylOp<C> {
    pub fn zero(arity: usize) -> Self {
        WeylOp {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(arity: usize) -> Self {
        Self::term(arity, Monomial::one(arity), Monomial::one(arity), C::cone())
    }

    pub fn term(arity: usize, a: Monomial, b: Monomial, c: C) -> Self {
        let mut op = Self::zero(arity);
        op.add_term(a, b, &c);
        op
    }

    /// Multiplication by the coordinate `x_i`.
    pub fn x(arity: usize, i: usize) -> Self {
        Self::term(
            arity,
            Monomial::var(arity, i),
            Monomial::one(arity),
            C::cone(),
        )
    }

    /// The derivation `∂_i`.
    pub fn d(arity: usize, i: usize) -> Self {
        Self::term(
            arity,
            Monomial::one(arity),
            Monomial::var(arity, i),
            C::cone(),
        )
    }

    /// Multiplication operator by `p`.
    pub fn from_poly(p: &MultiPoly<C>) -> Self {
        let one = Monomial::one(p.arity());
        let mut op = Self::zero(p.arity());
        for (m, c) in p.terms() {
            op.add_term(m.clone(), one.clone(), c);
        }
        op
    }

    /// Constant-coefficient operator obtained by replacing each variable of
    /// `p` with the matching partial derivative.
    pub fn from_poly_derivatives(p: &MultiPoly<C>) -> Self {
        let one = Monomial::one(p.arity());
        let mut op = Self::zero(p.arity());
        for (m, c) in p.terms() {
            op.add_term(one.clone(), m.clone(), c);
        }
        op
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, &C)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn coeff(&self, a: &Monomial, b: &Monomial) -> C {
        self.terms
            .get(&(a.clone(), b.clone()))
            .cloned()
            .unwrap_or_else(C::czero)
    }

    pub fn add_term(&mut self, a: Monomial, b: Monomial, c: &C) {
        if c.is_czero() {
            return;
        }
        let key = (a, b);
        if let Some(v) = self.terms.get_mut(&key) {
            v.add_assign_c(c);
            if v.is_czero() {
                self.terms.remove(&key);
            }
        } else {
            self.terms.insert(key, c.clone());
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a.clone(), b.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(C::negated)
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.arity);
        for ((a, b), c) in &self.terms {
            out.add_term(a.clone(), b.clone(), &c.times(s));
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> WeylOp<D> {
        let mut out = WeylOp::zero(self.arity);
        for ((a, b), c) in &self.terms {
            out.add_term(a.clone(), b.clone(), &f(c));
        }
        out
    }

    /// Normal-ordered product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.arity);
        for ((a, b), c1) in &self.terms {
            for ((c, d), c2) in &other.terms {
                let base = c1.times(c2);
                // ∂^b x^c = Σ_i Π_j C(b_j,i_j)·c_j^{(i_j)} x^{c−i} ∂^{b−i}
                for_each_below(b, c, |i| {
                    let mut w = BigInt::from(1);
                    for j in 0..self.arity {
                        w *= binomial(b.0[j], i[j]) * falling(c.0[j], i[j]);
                    }
                    let xa = Monomial((0..self.arity).map(|j| a.0[j] + c.0[j] - i[j]).collect());
                    let db = Monomial((0..self.arity).map(|j| b.0[j] - i[j] + d.0[j]).collect());
                    out.add_term(xa, db, &base.scale(&BigRational::from_integer(w)));
                });
            }
        }
        Ok(out)
    }

    /// Applies the operator to a polynomial.
    pub fn apply(&self, p: &MultiPoly<C>) -> Result<MultiPoly<C>> {
        if p.arity() != self.arity {
            return Err(Error::ArityMismatch(self.arity, p.arity()));
        }
        let mut out = MultiPoly::zero(self.arity);
        for ((a, b), c) in &self.terms {
            for (m, pc) in p.terms() {
                if !b.divides(m) {
                    continue;
                }
                let mut w = BigInt::from(1);
                for j in 0..self.arity {
                    w *= falling(m.0[j], b.0[j]);
                }
                let e = Monomial((0..self.arity).map(|j| m.0[j] - b.0[j] + a.0[j]).collect());
                out.add_term(e, &c.times(pc).scale(&BigRational::from_integer(w)));
            }
        }
        Ok(out)
    }

    /// Largest total derivative count; 0 for the zero operator.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|(_, b)| b.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn grade(&self) -> Result<Grade> {
        let mut grades = self
            .terms
            .keys()
            .map(|(a, b)| a.degree() as i64 - b.degree() as i64);
        let g = grades.next().ok_or(Error::ZeroOperator)?;
        Ok(if grades.all(|h| h == g) {
            Grade::Homogeneous(g)
        } else {
            Grade::Inhomogeneous
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("WEYL arity={} ring={}\n", self.arity, C::ring_tag());
        for ((a, b), c) in self.terms.iter().rev() {
            s.push_str(&c.write_coeff());
            for e in &a.0 {
                s.push(' ');
                s.push_str(&e.to_string());
            }
            s.push_str(" |");
            for e in &b.0 {
                s.push(' ');
                s.push_str(&e.to_string());
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?;
        let (arity, ring) = parse_header(header, "WEYL")?;
        check_ring::<C>(&ring)?;
        let mut op = Self::zero(arity);
        for line in lines {
            let (left, right) = line
                .split_once('|')
                .ok_or_else(|| Error::Parse(format!("missing '|' in '{line}'")))?;
            let mut fields = left.split_whitespace();
            let c = C::parse_coeff(
                fields
                    .next()
                    .ok_or_else(|| Error::Parse("missing coefficient".into()))?,
            )?;
            let a = parse_exps(fields, arity)?;
            let b = parse_exps(right.split_whitespace(), arity)?;
            if c.is_czero() {
                return Err(Error::Parse("zero coefficient stored".into()));
            }
            let key = (Monomial(a), Monomial(b));
            if op.terms.insert(key, c).is_some() {
                return Err(Error::Parse("duplicate term".into()));
            }
        }
        Ok(op)
    }
}

fn parse_exps<'a>(fields: impl Iterator<Item = &'a str>, arity: usize) -> Result<Vec<u32>> {
    let v = fields
        .map(|f| {
            f.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad exponent '{f}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if v.len() != arity {
        return Err(Error::Parse(format!(
            "expected {arity} exponents, got {}",
            v.len()
        )));
    }
    Ok(v)
}

/// Calls `f` on every exponent vector `i` with `i ≤ b` and `i ≤ c` componentwise.
fn for_each_below(b: &Monomial, c: &Monomial, mut f: impl FnMut(&[u32])) {
    let lim: Vec<u32> = b.0.iter().zip(&c.0).map(|(x, y)| *x.min(y)).collect();
    let mut i = vec![0u32; lim.len()];
    loop {
        f(&i);
        let mut j = 0;
        loop {
            if j == i.len() {
                return;
            }
            if i[j] < lim[j] {
                i[j] += 1;
                break;
            }
            i[j] = 0;
            j += 1;
        }
    }
}

impl fmt::Display for WeylOp<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for ((a, b), c) in self.terms.iter().rev() {
            let neg = c < &BigRational::from_integer(0.into());
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            for (j, &e) in a.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{j}")),
                    _ => factors.push(format!("x{j}^{e}")),
                }
            }
            for (j, &e) in b.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("d{j}")),
                    _ => factors.push(format!("d{j}^{e}")),
                }
            }
            let one = BigRational::from_integer(1.into());
            if factors.is_empty() {
                write!(f, "{}", crate::arith::display_rational(&mag))?;
            } else if mag == one {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(
                    f,
                    "{}*{}",
                    crate::arith::display_rational(&mag),
                    factors.join("*")
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    type Op = WeylOp<BigRational>;

    fn mono(v: &[u32]) -> Monomial {
        Monomial(v.to_vec())
    }

    #[test]
    fn canonical_commutation() {
        let p = Op::d(1, 0).mul(&Op::x(1, 0)).unwrap();
        let want = Op::x(1, 0)
            .mul(&Op::d(1, 0))
            .unwrap()
            .add(&Op::identity(1))
            .unwrap();
        assert_eq!(p, want);
        let q = Op::d(2, 0).mul(&Op::x(2, 1)).unwrap();
        assert_eq!(q, Op::term(2, mono(&[0, 1]), mono(&[1, 0]), rat(1)));
    }

    #[test]
    fn euler_square() {
        let e = Op::term(1, mono(&[1]), mono(&[1]), rat(1));
        let sq = e.mul(&e).unwrap();
        let want = Op::term(1, mono(&[2]), mono(&[2]), rat(1)).add(&e).unwrap();
        assert_eq!(sq, want);
    }

    #[test]
    fn apply_basics() {
        let v3 = MultiPoly::from_int_terms(1, &[(1, &[3])]);
        assert_eq!(
            Op::d(1, 0).apply(&v3).unwrap(),
            MultiPoly::from_int_terms(1, &[(3, &[2])])
        );
        let e1 = Op::term(1, mono(&[1]), mono(&[1]), rat(1))
            .add(&Op::identity(1))
            .unwrap();
        let x = MultiPoly::var(1, 0);
        assert_eq!(e1.apply(&x).unwrap(), x.scale(&rat(2)));
    }

    #[test]
    fn order_and_grade() {
        let op = Op::term(2, mono(&[2, 0]), mono(&[0, 1]), rat(1));
        assert_eq!(op.order(), 1);
        assert_eq!(op.grade().unwrap(), Grade::Homogeneous(1));
        let inh = Op::x(1, 0).add(&Op::d(1, 0)).unwrap();
        assert_eq!(inh.grade().unwrap(), Grade::Inhomogeneous);
        assert_eq!(Op::zero(1).grade(), Err(Error::ZeroOperator));
    }

    #[test]
    fn text_roundtrip() {
        let op = Op::term(2, mono(&[2, 0]), mono(&[0, 1]), crate::arith::ratio(-3, 2))
            .add(&Op::identity(2))
            .unwrap();
        let t = op.to_text();
        assert!(t.starts_with("WEYL arity=2 ring=Q\n"));
        assert_eq!(Op::from_text(&t).unwrap(), op);
    }
}
