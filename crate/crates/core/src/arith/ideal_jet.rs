//! Taylor expansions truncated to an order ideal of monomials.
//!
//! Given a finite set of target monomials, the set `D` of all their divisors
//! is closed under division, so its complement spans a monomial ideal `I`.
//! Arithmetic in `ℚ[y]/I` keeps exactly the coefficients on `D`, and the
//! coefficients of the targets in a product depend only on coefficients in
//! `D`. This is much smaller than the full simplex when the targets are the
//! support of one sparse polynomial.

use std::collections::{HashMap, HashSet};
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::jet::taylor_shift;
use super::multipoly::MultiPoly;
use crate::error::{Error, Result};

/// Multiplicative hash for packed exponent keys.
#[derive(Default, Clone, Copy)]
pub struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ b as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }
    fn write_u128(&mut self, v: u128) {
        let x = (v as u64) ^ ((v >> 64) as u64).rotate_left(29);
        self.0 = (x ^ (x >> 31)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

type KeyMap<V> = HashMap<u128, V, BuildHasherDefault<KeyHasher>>;

/// Index layout for the divisor-closed set `D`.
#[derive(Debug)]
pub struct IdealSpace {
    nvars: usize,
    bits: u32,
    keys: Vec<u128>,
    index: KeyMap<u32>,
    max_degree: u32,
}

impl IdealSpace {
    /// Divisor closure of the given monomials.
    pub fn from_generators<'a>(
        nvars: usize,
        gens: impl IntoIterator<Item = &'a [u32]>,
    ) -> Result<Arc<Self>> {
        let gens: Vec<&[u32]> = gens.into_iter().collect();
        if gens.iter().any(|g| g.len() != nvars) {
            return Err(Error::DimensionMismatch("generator arity".into()));
        }
        let max_exp = gens
            .iter()
            .flat_map(|g| g.iter().copied())
            .max()
            .unwrap_or(0);
        let bits = 32 - max_exp.leading_zeros();
        let bits = bits.max(1);
        if bits as usize * nvars > 128 {
            return Err(Error::Guard(format!(
                "{nvars} variables with exponents up to {max_exp} do not pack into 128 bits"
            )));
        }
        let mut set: HashSet<Vec<u32>> = HashSet::new();
        for g in &gens {
            let mut stack = vec![g.to_vec()];
            while let Some(x) = stack.pop() {
                if !set.insert(x.clone()) {
                    continue;
                }
                for i in 0..x.len() {
                    if x[i] > 0 {
                        let mut y = x.clone();
                        y[i] -= 1;
                        if !set.contains(&y) {
                            stack.push(y);
                        }
                    }
                }
            }
        }
        let mut monos: Vec<Vec<u32>> = set.into_iter().collect();
        monos.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let max_degree = monos.iter().map(|m| m.iter().sum()).max().unwrap_or(0);
        let keys: Vec<u128> = monos.iter().map(|m| pack(m, bits)).collect();
        let mut index: KeyMap<u32> = KeyMap::default();
        index.reserve(keys.len());
        for (i, &k) in keys.iter().enumerate() {
            index.insert(k, i as u32);
        }
        Ok(Arc::new(IdealSpace {
            nvars,
            bits,
            keys,
            index,
            max_degree,
        }))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        if e.len() != self.nvars || e.iter().any(|&x| x >= (1 << self.bits)) {
            return None;
        }
        self.index.get(&pack(e, self.bits)).map(|&i| i as usize)
    }

    /// Number of (divisor, cofactor) pairs visited by one product.
    pub fn pair_count(&self) -> u128 {
        self.keys
            .iter()
            .map(|&k| {
                unpack(k, self.bits, self.nvars)
                    .iter()
                    .map(|&e| e as u128 + 1)
                    .product::<u128>()
            })
            .sum()
    }

    fn product(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let bits = self.bits;
        let nvars = self.nvars;
        let x_nz: KeyMap<&BigInt> = self
            .keys
            .iter()
            .zip(x)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&k, c)| (k, c))
            .collect();
        self.keys
            .par_iter()
            .map(|&c| {
                let ce = unpack(c, bits, nvars);
                let mut acc = BigInt::zero();
                // Odometer over all divisors a of c, tracking the packed key.
                let mut cur = vec![0u32; nvars];
                let mut a: u128 = 0;
                loop {
                    if let Some(xa) = x_nz.get(&a) {
                        let b = self.index[&(c - a)] as usize;
                        let yb = &y[b];
                        if !yb.is_zero() {
                            acc += *xa * yb;
                        }
                    }
                    let mut i = 0;
                    loop {
                        if i == nvars {
                            return acc;
                        }
                        let shift = bits * i as u32;
                        if cur[i] < ce[i] {
                            cur[i] += 1;
                            a += 1u128 << shift;
                            break;
                        }
                        a -= (cur[i] as u128) << shift;
                        cur[i] = 0;
                        i += 1;
                    }
                }
            })
            .collect()
    }
}

fn pack(e: &[u32], bits: u32) -> u128 {
    e.iter().enumerate().fold(0u128, |acc, (i, &x)| {
        acc | ((x as u128) << (bits * i as u32))
    })
}

fn unpack(k: u128, bits: u32, nvars: usize) -> Vec<u32> {
    let mask = (1u128 << bits) - 1;
    (0..nvars)
        .map(|i| ((k >> (bits * i as u32)) & mask) as u32)
        .collect()
}

/// Element of `ℚ[y]/I`, stored as integer numerators over one denominator.
#[derive(Clone, Debug)]
pub struct IdealJet {
    space: Arc<IdealSpace>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl IdealJet {
    pub fn one(space: Arc<IdealSpace>) -> Self {
        let mut num = vec![BigInt::zero(); space.len()];
        if !num.is_empty() {
            num[0] = BigInt::one();
        }
        IdealJet {
            space,
            num,
            den: BigInt::one(),
        }
    }

    /// Image of `p(x₀ + y)` in the quotient.
    pub fn of_poly(
        space: Arc<IdealSpace>,
        p: &MultiPoly<BigRational>,
        base: &[BigRational],
    ) -> Result<Self> {
        if p.arity() != space.nvars {
            return Err(Error::ArityMismatch(space.nvars, p.arity()));
        }
        let shifted = taylor_shift(p, base, space.max_degree)?;
        let mut vals = vec![BigRational::zero(); space.len()];
        for (m, c) in shifted.terms() {
            if let Some(i) = space.index_of(&m.0) {
                vals[i] += c;
            }
        }
        let den = vals
            .iter()
            .filter(|v| !v.is_zero())
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let num = vals
            .iter()
            .map(|v| v.numer() * (&den / v.denom()))
            .collect();
        Ok(IdealJet { space, num, den })
    }

    pub fn space(&self) -> &Arc<IdealSpace> {
        &self.space
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.space, &other.space) {
            return Err(Error::DimensionMismatch("ideal jet spaces differ".into()));
        }
        Ok(IdealJet {
            space: self.space.clone(),
            num: self.space.product(&self.num, &other.num),
            den: &self.den * &other.den,
        })
    }

    /// Coefficient of `y^e`; zero outside `D`.
    pub fn coeff(&self, e: &[u32]) -> BigRational {
        self.space.index_of(e).map_or_else(BigRational::zero, |i| {
            BigRational::new(self.num[i].clone(), self.den.clone())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::coeff::rat;
    use crate::arith::jet::jet_of_poly;

    #[test]
    fn divisor_closure() {
        let sp = IdealSpace::from_generators(2, [&[2u32, 1][..]]).unwrap();
        // divisors of x²y: 1, x, y, x², xy, x²y
        assert_eq!(sp.len(), 6);
        assert_eq!(sp.pair_count(), 1 + 2 + 2 + 3 + 4 + 6);
        assert!(sp.index_of(&[0, 2]).is_none());
    }

    #[test]
    fn agrees_with_dense_jet_on_targets() {
        let p = MultiPoly::from_int_terms(
            3,
            &[
                (1, &[1, 1, 0]),
                (-2, &[0, 1, 1]),
                (3, &[2, 0, 0]),
                (1, &[0, 0, 0]),
            ],
        );
        let base = vec![rat(1), rat(0), crate::arith::ratio(1, 2)];
        let targets: Vec<Vec<u32>> = vec![vec![2, 2, 0], vec![1, 2, 1], vec![4, 0, 0]];
        let sp = IdealSpace::from_generators(3, targets.iter().map(|t| t.as_slice())).unwrap();
        let j = IdealJet::of_poly(sp.clone(), &p, &base).unwrap();
        let sq = j.mul(&j).unwrap();
        let dense = jet_of_poly(&p, &base, 4).unwrap();
        let dsq = dense.mul(&dense).unwrap();
        for t in &targets {
            assert_eq!(sq.coeff(t), dsq.coeff(t));
        }
        assert_eq!(IdealJet::one(sp).coeff(&[0, 0, 0]), rat(1));
    }
}
