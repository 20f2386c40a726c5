//! Truncated multivariate Taylor expansions ("jets") at a rational base point.
//!
//! A jet of order `m` in `N` variables stores one coefficient per exponent
//! vector of total degree ≤ m, densely, in graded order. The coefficient of
//! `e` is `(∂^e p)(x₀)/e!`. Products are truncated: terms of total degree
//! above `m` are dropped, which is exactly arithmetic in
//! `ℚ[y]/(y)^{m+1}` with `y = x − x₀`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::coeff::binomial;
use super::multipoly::{Monomial, MultiPoly};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// Index layout for all monomials of total degree ≤ order.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    order: u32,
    monos: Vec<Vec<u32>>,
    degree_start: Vec<usize>,
    index: HashMap<Vec<u32>, usize>,
    /// `step[i][idx]` is the index of `monos[idx] + e_i`, or `NONE` past the order.
    step: Vec<Vec<u32>>,
}

/// Number of exponent vectors in `nvars` variables with total degree ≤ `order`.
pub fn simplex_size(nvars: usize, order: u32) -> u128 {
    // C(nvars + order, order)
    let mut acc: u128 = 1;
    for i in 1..=order as u128 {
        acc = acc * (nvars as u128 + i) / i;
    }
    acc
}

impl JetSpace {
    pub fn new(nvars: usize, order: u32) -> Arc<Self> {
        let mut monos: Vec<Vec<u32>> = Vec::new();
        let mut degree_start = Vec::with_capacity(order as usize + 2);
        for d in 0..=order {
            degree_start.push(monos.len());
            let mut level = Vec::new();
            compositions(nvars, d, &mut vec![0; nvars], 0, &mut level);
            // descending lex within a degree
            level.sort_by(|a, b| b.cmp(a));
            monos.extend(level);
        }
        degree_start.push(monos.len());
        let index: HashMap<Vec<u32>, usize> = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let step = (0..nvars)
            .map(|v| {
                monos
                    .iter()
                    .map(|m| {
                        let mut n = m.clone();
                        n[v] += 1;
                        index.get(&n).map_or(NONE, |&i| i as u32)
                    })
                    .collect()
            })
            .collect();
        Arc::new(JetSpace {
            nvars,
            order,
            monos,
            degree_start,
            index,
            step,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn monomial(&self, idx: usize) -> &[u32] {
        &self.monos[idx]
    }

    /// Index of `monos[idx] + e`, or `None` once the order is exceeded.
    fn shift(&self, mut idx: usize, e: &[u32]) -> Option<usize> {
        for (v, &k) in e.iter().enumerate() {
            for _ in 0..k {
                let next = self.step[v][idx];
                if next == NONE {
                    return None;
                }
                idx = next as usize;
            }
        }
        Some(idx)
    }
}

fn compositions(n: usize, d: u32, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == n {
        cur[pos] = d;
        out.push(cur.clone());
        return;
    }
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in 0..=d {
        cur[pos] = k;
        compositions(n, d - k, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

/// Dense truncated Taylor expansion.
#[derive(Clone, Debug)]
pub struct Jet {
    space: Arc<JetSpace>,
    base: Vec<BigRational>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.space.nvars == other.space.nvars
            && self.space.order == other.space.order
            && self.base == other.base
            && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zero(space: Arc<JetSpace>, base: Vec<BigRational>) -> Self {
        let n = space.len();
        Jet {
            space,
            base,
            coeffs: vec![BigRational::zero(); n],
        }
    }

    pub fn one(space: Arc<JetSpace>, base: Vec<BigRational>) -> Self {
        let mut j = Self::zero(space, base);
        if !j.coeffs.is_empty() {
            j.coeffs[0] = BigRational::one();
        }
        j
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn base(&self) -> &[BigRational] {
        &self.base
    }

    pub fn order(&self) -> u32 {
        self.space.order
    }

    /// Taylor coefficient of `(x − x₀)^e`; zero beyond the order.
    pub fn coeff(&self, e: &[u32]) -> BigRational {
        self.space
            .index_of(e)
            .map_or_else(BigRational::zero, |i| self.coeffs[i].clone())
    }

    /// `(∂^e p)(x₀) = e! · coeff(e)`.
    pub fn derivative_at_base(&self, e: &[u32]) -> BigRational {
        let fact = Monomial(e.to_vec()).factorial();
        self.coeff(e) * BigRational::from_integer(fact)
    }

    /// Nonzero coefficients with their exponent vectors.
    pub fn nonzero(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.space.monomial(i), c))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.space, &other.space)
            && (self.space.nvars != other.space.nvars || self.space.order != other.space.order)
        {
            return Err(Error::DimensionMismatch("jet spaces differ".into()));
        }
        if self.base != other.base {
            return Err(Error::DimensionMismatch("jet base points differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        // Work over a common integer denominator so the inner loop is BigInt only.
        let (ia, da) = integer_image(&self.coeffs);
        let (ib, db) = integer_image(&other.coeffs);
        let sparse_a: Vec<(usize, &BigInt)> = ia
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let sparse_b: Vec<(usize, &BigInt)> = ib
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let (outer, inner) = if sparse_a.len() <= sparse_b.len() {
            (sparse_a, sparse_b)
        } else {
            (sparse_b, sparse_a)
        };
        let space = &self.space;
        let order = space.order;
        let n = space.len();
        let partial = |block: &[(usize, &BigInt)]| -> Vec<BigInt> {
            let mut acc = vec![BigInt::zero(); n];
            for &(ai, ca) in block {
                let ea = space.monomial(ai);
                let da_deg: u32 = ea.iter().sum();
                let limit = space.degree_start[(order - da_deg) as usize + 1];
                for &(bi, cb) in &inner {
                    if bi >= limit {
                        break;
                    }
                    if let Some(t) = space.shift(bi, ea) {
                        acc[t] += ca * cb;
                    }
                }
            }
            acc
        };
        let chunks = rayon::current_num_threads().max(1);
        let chunk = outer.len().div_ceil(chunks).max(1);
        let parts: Vec<Vec<BigInt>> = if outer.len() * inner.len() > 1 << 16 {
            outer.par_chunks(chunk).map(partial).collect()
        } else {
            vec![partial(&outer)]
        };
        let den = BigRational::from_integer(da * db);
        let mut coeffs = vec![BigRational::zero(); n];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let mut s = BigInt::zero();
            for p in &parts {
                s += &p[i];
            }
            if !s.is_zero() {
                *c = BigRational::from_integer(s) / &den;
            }
        }
        Ok(Jet {
            space: self.space.clone(),
            base: self.base.clone(),
            coeffs,
        })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Jet::one(self.space.clone(), self.base.clone());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Truncates a polynomial given in `y = x − x₀` coordinates into a jet.
    pub fn from_shifted_poly(
        space: Arc<JetSpace>,
        base: Vec<BigRational>,
        p: &MultiPoly<BigRational>,
    ) -> Result<Self> {
        if p.arity() != space.nvars {
            return Err(Error::ArityMismatch(space.nvars, p.arity()));
        }
        let mut j = Jet::zero(space, base);
        for (m, c) in p.terms() {
            if let Some(i) = j.space.index_of(&m.0) {
                j.coeffs[i] += c;
            }
        }
        Ok(j)
    }
}

fn integer_image(c: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = c
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints = c
        .iter()
        .map(|x| {
            if x.is_zero() {
                BigInt::zero()
            } else {
                x.numer() * (&den / x.denom())
            }
        })
        .collect();
    (ints, den)
}

/// Taylor expansion of `p` at `base`, truncated at total order `order`.
pub fn jet_of_poly(p: &MultiPoly<BigRational>, base: &[BigRational], order: u32) -> Result<Jet> {
    let space = JetSpace::new(p.arity(), order);
    jet_of_poly_in(space, p, base)
}

/// As [`jet_of_poly`] with a prebuilt index layout.
pub fn jet_of_poly_in(
    space: Arc<JetSpace>,
    p: &MultiPoly<BigRational>,
    base: &[BigRational],
) -> Result<Jet> {
    if base.len() != p.arity() || space.nvars != p.arity() {
        return Err(Error::ArityMismatch(p.arity(), base.len()));
    }
    let shifted = taylor_shift(p, base, space.order)?;
    Jet::from_shifted_poly(space, base.to_vec(), &shifted)
}

/// `p(x₀ + y)` as a polynomial in `y`, keeping only total degree ≤ `order`.
pub fn taylor_shift(
    p: &MultiPoly<BigRational>,
    base: &[BigRational],
    order: u32,
) -> Result<MultiPoly<BigRational>> {
    let n = p.arity();
    if base.len() != n {
        return Err(Error::ArityMismatch(n, base.len()));
    }
    let mut out = MultiPoly::zero(n);
    for (m, c) in p.terms() {
        // Expand ∏ (x0_i + y_i)^{m_i} one variable at a time.
        let mut partial: Vec<(Vec<u32>, u32, BigRational)> = vec![(vec![0; n], 0, c.clone())];
        for (i, &mi) in m.0.iter().enumerate() {
            if mi == 0 {
                continue;
            }
            let b = &base[i];
            let mut next = Vec::new();
            for (e, deg, coef) in &partial {
                for k in 0..=mi {
                    if deg + k > order {
                        break;
                    }
                    let rest = mi - k;
                    if rest > 0 && b.is_zero() {
                        continue;
                    }
                    let mut bp = BigRational::one();
                    for _ in 0..rest {
                        bp *= b;
                    }
                    let w = coef * bp * BigRational::from_integer(binomial(mi, k));
                    let mut ne = e.clone();
                    ne[i] = k;
                    next.push((ne, deg + k, w));
                }
            }
            partial = next;
        }
        for (e, _, w) in partial {
            out.add_term(Monomial(e), &w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::coeff::rat;

    #[test]
    fn square_at_one() {
        let p = MultiPoly::from_int_terms(1, &[(1, &[2])]);
        let j = jet_of_poly(&p, &[rat(1)], 2).unwrap();
        assert_eq!(j.coeff(&[0]), rat(1));
        assert_eq!(j.coeff(&[1]), rat(2));
        assert_eq!(j.coeff(&[2]), rat(1));
        assert_eq!(j.coeff(&[3]), rat(0));
        assert_eq!(j.derivative_at_base(&[2]), rat(2));
    }

    #[test]
    fn simplex_counts() {
        assert_eq!(simplex_size(12, 6), 18564);
        let s = JetSpace::new(3, 2);
        assert_eq!(s.len(), 10);
        assert_eq!(s.monomial(0), &[0, 0, 0]);
    }

    #[test]
    fn truncated_product() {
        // (1 + y)^3 truncated at order 2 = 1 + 3y + 3y^2
        let p = MultiPoly::from_int_terms(1, &[(1, &[1]), (1, &[0])]);
        let j = jet_of_poly(&p, &[rat(0)], 2).unwrap();
        let c = j.pow(3).unwrap();
        assert_eq!(c.coeff(&[1]), rat(3));
        assert_eq!(c.coeff(&[2]), rat(3));
    }
}
