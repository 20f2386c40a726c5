//! Sparse multivariate polynomials in graded-lexicographic canonical form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use super::coeff::{display_rational, Coeff};
use crate::error::{Error, Result};

/// Exponent vector ordered graded-lexicographically: total degree first, then
/// the first differing exponent (a larger exponent of an earlier variable is
/// the larger monomial).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when every exponent of `other` is at most that of `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `e!` as a multi-index factorial.
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::from(1), |acc, &e| acc * super::coeff::factorial(e))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with coefficients in `C`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly<C: Coeff = BigRational> {
    arity: usize,
    terms: BTreeMap<Monomial, C>,
}

/// Products with more than this many term pairs are split across threads.
const PAR_MUL_THRESHOLD: usize = 1 << 14;

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(arity: usize) -> Self {
        MultiPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: C) -> Self {
        Self::monomial(arity, Monomial::one(arity), c)
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, C::cone())
    }

    pub fn monomial(arity: usize, m: Monomial, c: C) -> Self {
        assert_eq!(m.arity(), arity, "monomial arity");
        let mut terms = BTreeMap::new();
        if !c.is_czero() {
            terms.insert(m, c);
        }
        MultiPoly { arity, terms }
    }

    /// The coordinate function `x_i`.
    pub fn var(arity: usize, i: usize) -> Self {
        Self::monomial(arity, Monomial::var(arity, i), C::cone())
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(arity);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
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

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::czero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Constant value if the polynomial has degree ≤ 0.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::czero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        debug_assert_eq!(m.arity(), self.arity);
        if c.is_czero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().plus(c);
                if s.is_czero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &c.negated());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.negated())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_czero() {
            return Self::zero(self.arity);
        }
        self.map_coeffs(|t| t.times(c))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.map_coeffs(|t| t.scale(r))
    }

    /// Applies `f` to every coefficient, dropping results that vanish.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        MultiPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| {
                    let d = f(c);
                    (!d.is_czero()).then(|| (m.clone(), d))
                })
                .collect(),
        }
    }

    /// Multiplies by the single term `c·x^m`.
    pub fn mul_term(&self, m: &Monomial, c: &C) -> Self {
        if c.is_czero() {
            return Self::zero(self.arity);
        }
        MultiPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter_map(|(k, v)| {
                    let p = v.times(c);
                    (!p.is_czero()).then(|| (k.mul(m), p))
                })
                .collect(),
        }
    }

    /// Exact product in canonical form.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.arity));
        }
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let pairs = small.len() * large.len();
        let acc = if pairs >= PAR_MUL_THRESHOLD && small.len() > 1 {
            let lhs: Vec<(&Monomial, &C)> = small.terms.iter().collect();
            let chunk = lhs.len().div_ceil(rayon::current_num_threads().max(1));
            let partials: Vec<HashMap<Monomial, C>> = lhs
                .par_chunks(chunk.max(1))
                .map(|block| mul_block(block, large))
                .collect();
            let mut total: HashMap<Monomial, C> = HashMap::new();
            for part in partials {
                for (m, c) in part {
                    accumulate(&mut total, m, &c);
                }
            }
            total
        } else {
            let lhs: Vec<(&Monomial, &C)> = small.terms.iter().collect();
            mul_block(&lhs, large)
        };
        Ok(MultiPoly {
            arity: self.arity,
            terms: acc.into_iter().filter(|(_, c)| !c.is_czero()).collect(),
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.arity);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same arity");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same arity");
            }
        }
        result
    }

    /// Exact quotient `self / divisor`; errors when the remainder is nonzero.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        self.check_arity(divisor)?;
        let (lm, lc) = divisor.leading_term().ok_or(Error::DivisionByZero)?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Self::zero(self.arity);
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(&lm).ok_or(Error::NotDivisible)?;
            let qc = c.exact_div(&lc).ok_or(Error::NotDivisible)?;
            let step = divisor.mul_term(&qm, &qc.negated());
            for (k, v) in step.terms {
                rem.add_term(k, &v);
            }
            quot.add_term(qm, &qc);
        }
        Ok(quot)
    }

    /// `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.0[i] -= 1;
            out.add_term(nm, &c.times(&C::from_i64(e as i64)));
        }
        out
    }

    /// Evaluates at a point of coefficient values.
    pub fn eval(&self, point: &[C]) -> Result<C> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch(self.arity, point.len()));
        }
        let mut powers: Vec<Vec<C>> = vec![vec![C::cone()]; self.arity];
        let mut acc = C::czero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().times(&point[i]);
                    powers[i].push(next);
                }
                t = t.times(&powers[i][e as usize]);
            }
            acc.add_assign_c(&t);
        }
        Ok(acc)
    }

    /// Substitutes polynomial `subs[i]` for `x_i`; the result has the arity of the substitutes.
    pub fn compose(&self, subs: &[MultiPoly<C>]) -> Result<MultiPoly<C>> {
        if subs.len() != self.arity {
            return Err(Error::ArityMismatch(self.arity, subs.len()));
        }
        let target = subs.first().map_or(0, MultiPoly::arity);
        for s in subs {
            if s.arity != target {
                return Err(Error::ArityMismatch(target, s.arity));
            }
        }
        let mut powers: Vec<Vec<MultiPoly<C>>> = vec![vec![MultiPoly::one(target)]; self.arity];
        let mut acc = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i])?;
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize])?;
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Applies a permutation of variables: variable `i` becomes variable `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            let mut e = vec![0; self.arity];
            for (i, &x) in m.0.iter().enumerate() {
                e[perm[i]] = x;
            }
            out.add_term(Monomial(e), c);
        }
        out
    }

    /// Canonical text form: header then one term per line, leading term first.
    pub fn to_text(&self) -> String {
        let mut s = format!("MPOLY arity={} ring={}\n", self.arity, C::ring_tag());
        for (m, c) in self.terms.iter().rev() {
            s.push_str(&c.write_coeff());
            for e in &m.0 {
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
        let (arity, ring) = parse_header(header, "MPOLY")?;
        check_ring::<C>(&ring)?;
        let mut p = Self::zero(arity);
        let mut prev: Option<Monomial> = None;
        for line in lines {
            let mut fields = line.split_whitespace();
            let c = C::parse_coeff(
                fields
                    .next()
                    .ok_or_else(|| Error::Parse("missing coefficient".into()))?,
            )?;
            let exps = fields
                .map(|f| {
                    f.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent '{f}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            if exps.len() != arity {
                return Err(Error::Parse(format!(
                    "term has {} exponents, expected {arity}",
                    exps.len()
                )));
            }
            if c.is_czero() {
                return Err(Error::Parse("zero coefficient stored".into()));
            }
            let m = Monomial(exps);
            if prev.as_ref().is_some_and(|p| *p <= m) {
                return Err(Error::Parse(
                    "terms not in descending graded-lex order".into(),
                ));
            }
            prev = Some(m.clone());
            p.terms.insert(m, c);
        }
        Ok(p)
    }
}

fn mul_block<C: Coeff>(lhs: &[(&Monomial, &C)], rhs: &MultiPoly<C>) -> HashMap<Monomial, C> {
    let mut acc: HashMap<Monomial, C> = HashMap::with_capacity(lhs.len() * rhs.len() / 2 + 1);
    for (ma, ca) in lhs {
        for (mb, cb) in &rhs.terms {
            accumulate(&mut acc, ma.mul(mb), &ca.times(cb));
        }
    }
    acc
}

fn accumulate<C: Coeff>(acc: &mut HashMap<Monomial, C>, m: Monomial, c: &C) {
    match acc.get_mut(&m) {
        Some(v) => v.add_assign_c(c),
        None => {
            acc.insert(m, c.clone());
        }
    }
}

pub(crate) fn parse_header(line: &str, magic: &str) -> Result<(usize, String)> {
    let mut fields = line.split_whitespace();
    if fields.next() != Some(magic) {
        return Err(Error::Parse(format!(
            "expected {magic} header, got '{line}'"
        )));
    }
    let mut arity = None;
    let mut ring = None;
    for f in fields {
        if let Some(v) = f.strip_prefix("arity=").or_else(|| f.strip_prefix("n=")) {
            arity = Some(
                v.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad arity '{v}'")))?,
            );
        } else if let Some(v) = f.strip_prefix("ring=") {
            ring = Some(v.to_string());
        }
    }
    let arity = arity.ok_or_else(|| Error::Parse("header lacks arity".into()))?;
    Ok((arity, ring.unwrap_or_else(|| "Q".into())))
}

pub(crate) fn check_ring<C: Coeff>(ring: &str) -> Result<()> {
    let want = C::ring_tag();
    // ℚ[s] and ℚ[k] share one representation.
    let ok = ring == want || (want == "Qk" && ring == "Qs");
    if ok {
        Ok(())
    } else {
        Err(Error::Parse(format!("ring {ring} does not match {want}")))
    }
}

impl MultiPoly<BigRational> {
    /// Integer-coefficient shorthand used by tests and builders.
    pub fn from_int_terms(arity: usize, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(
            arity,
            terms
                .iter()
                .map(|(c, e)| (Monomial(e.to_vec()), super::coeff::rat(*c))),
        )
    }

    /// Evaluates at a rational point.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational> {
        self.eval(point)
    }
}

/// Pretty printer using variable names `x0, x1, …` unless names are supplied.
pub struct Pretty<'a, C: Coeff> {
    pub poly: &'a MultiPoly<C>,
    pub names: Option<&'a [String]>,
}

impl<C: Coeff> fmt::Display for Pretty<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.poly.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c.write_coeff())?;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = self
                    .names
                    .and_then(|n| n.get(i).cloned())
                    .unwrap_or_else(|| format!("x{i}"));
                if e == 1 {
                    write!(f, "*{name}")?;
                } else {
                    write!(f, "*{name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for MultiPoly<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c < &num_traits::Zero::zero();
            let a = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let is_one = a == num_traits::One::one();
            let mut wrote = false;
            if !is_one || m.degree() == 0 {
                write!(f, "{}", display_rational(&a))?;
                wrote = true;
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                wrote = true;
                if e == 1 {
                    write!(f, "x{i}")?;
                } else {
                    write!(f, "x{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::coeff::rat;

    type P = MultiPoly<BigRational>;

    fn x(i: usize) -> P {
        P::var(2, i)
    }

    #[test]
    fn difference_of_squares() {
        let p = x(0).add(&x(1)).unwrap();
        let q = x(0).sub(&x(1)).unwrap();
        let prod = p.mul(&q).unwrap();
        let want = P::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])]);
        assert_eq!(prod, want);
        assert_eq!(prod.exact_div(&q).unwrap(), p);
        assert_eq!(p.mul(&P::one(2)).unwrap(), p);
    }

    #[test]
    fn square_of_difference() {
        let d = x(0).sub(&x(1)).unwrap();
        let sq = d.mul(&d).unwrap();
        let want = P::from_int_terms(2, &[(1, &[2, 0]), (-2, &[1, 1]), (1, &[0, 2])]);
        assert_eq!(sq, want);
    }

    #[test]
    fn arity_and_divisibility_errors() {
        assert_eq!(x(0).mul(&P::one(3)), Err(Error::ArityMismatch(2, 3)));
        let p = x(0).add(&P::one(2)).unwrap();
        assert_eq!(p.exact_div(&x(1)), Err(Error::NotDivisible));
        assert_eq!(p.exact_div(&P::zero(2)), Err(Error::DivisionByZero));
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![1, 1]);
        let c = Monomial(vec![0, 3]);
        assert!(a > b);
        assert!(c > a);
    }

    #[test]
    fn text_format() {
        let p = P::from_int_terms(2, &[(3, &[1, 0]), (-1, &[0, 2])]);
        let t = p.to_text();
        assert_eq!(t, "MPOLY arity=2 ring=Q\n-1/1 0 2\n3/1 1 0\n");
        assert_eq!(P::from_text(&t).unwrap(), p);
        assert!(P::from_text("MPOLY arity=2 ring=Q\n3/1 1 0\n-1/1 0 2\n").is_err());
        assert!(MultiPoly::<crate::arith::UniPoly>::from_text(&t).is_err());
    }

    #[test]
    fn partial_eval_compose() {
        let p = P::from_int_terms(2, &[(1, &[2, 1])]); // x0^2 x1
        assert_eq!(p.partial(0), P::from_int_terms(2, &[(2, &[1, 1])]));
        assert_eq!(p.eval(&[rat(2), rat(3)]).unwrap(), rat(12));
        let s = vec![x(0).add(&x(1)).unwrap(), x(1)];
        let c = p.compose(&s).unwrap();
        assert_eq!(c.eval(&[rat(1), rat(1)]).unwrap(), rat(4));
        assert_eq!(
            p.permute_vars(&[1, 0]),
            P::from_int_terms(2, &[(1, &[1, 2])])
        );
    }
}
