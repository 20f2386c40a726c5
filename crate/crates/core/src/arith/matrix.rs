//! Small exact linear algebra over ℚ.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| BigRational::from_integer(v.into()))
                        .collect()
                })
                .collect(),
        )
        .expect("rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn rows_as_vecs(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows()).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigRational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = BigRational::one() / m.get(r, c);
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Result<BigRational> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "determinant of non-square matrix".into(),
            ));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(BigRational::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                let f = m.get(i, c) / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j) - &f * m.get(c, j);
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "inverse of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, BigRational::one());
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(out)
    }

    /// Basis of the right nullspace, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let (r, pivots) = self.rref();
        nullspace_from_rref(self.cols, &pivots, |i, j| r.get(i, j).clone())
    }
}

fn nullspace_from_rref(
    cols: usize,
    pivots: &[usize],
    entry: impl Fn(usize, usize) -> BigRational,
) -> Vec<Vec<BigRational>> {
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -entry(i, f);
            }
            v
        })
        .collect()
}

/// Incremental sparse row reduction: rows are pushed one at a time and kept
/// in echelon form with unit pivots. Suited to tall sparse systems where only
/// the nullspace is wanted.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    cols: usize,
    /// pivot column -> row (pivot entry is 1, all other entries at larger columns)
    rows: BTreeMap<usize, BTreeMap<usize, BigRational>>,
}

impl SparseEchelon {
    pub fn new(cols: usize) -> Self {
        SparseEchelon {
            cols,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduces `row` against the stored pivots; returns true if it added rank.
    pub fn push(&mut self, row: impl IntoIterator<Item = (usize, BigRational)>) -> bool {
        let mut r: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (c, v) in row {
            debug_assert!(c < self.cols);
            if v.is_zero() {
                continue;
            }
            let e = r.entry(c).or_insert_with(BigRational::zero);
            *e += v;
            if e.is_zero() {
                r.remove(&c);
            }
        }
        let mut cursor = 0usize;
        loop {
            let Some((&c, _)) = r.range(cursor..).next() else {
                return false;
            };
            if let Some(prow) = self.rows.get(&c) {
                let f = r.remove(&c).unwrap();
                for (&pc, pv) in prow.iter().skip(1) {
                    let e = r.entry(pc).or_insert_with(BigRational::zero);
                    *e -= &f * pv;
                    if e.is_zero() {
                        r.remove(&pc);
                    }
                }
                cursor = c + 1;
            } else {
                let inv = BigRational::one() / r.get(&c).unwrap();
                for v in r.values_mut() {
                    *v *= &inv;
                }
                self.rows.insert(c, r);
                return true;
            }
        }
    }

    /// Nullspace basis of all rows pushed so far.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        // Back-substitute into reduced form, working from the last pivot up.
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        let mut reduced: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
        for &p in pivots.iter().rev() {
            let mut row = self.rows[&p].clone();
            let others: Vec<usize> = row.keys().copied().filter(|&c| c != p).collect();
            for c in others {
                if let Some(lower) = reduced.get(&c) {
                    let f = row.remove(&c).unwrap();
                    for (&lc, lv) in lower.iter() {
                        if lc == c {
                            continue;
                        }
                        let e = row.entry(lc).or_insert_with(BigRational::zero);
                        *e -= &f * lv;
                        if e.is_zero() {
                            row.remove(&lc);
                        }
                    }
                }
            }
            reduced.insert(p, row);
        }
        let index: Vec<&BTreeMap<usize, BigRational>> =
            pivots.iter().map(|p| &reduced[p]).collect();
        nullspace_from_rref(self.cols, &pivots, |i, j| {
            index[i].get(&j).cloned().unwrap_or_else(BigRational::zero)
        })
    }
}

/// Prime used for modular rank computations.
const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce_mod(x: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let r = x.mod_floor(&p);
    r.to_u64_digits().1.first().copied().unwrap_or(0)
}

/// Incremental echelon over `𝔽_p` that remembers which input rows were independent.
#[derive(Clone, Debug, Default)]
pub struct ModEchelon {
    cols: usize,
    rows: BTreeMap<usize, Vec<u64>>,
    sources: Vec<usize>,
    seen: usize,
}

impl ModEchelon {
    pub fn new(cols: usize) -> Self {
        ModEchelon {
            cols,
            rows: BTreeMap::new(),
            sources: Vec::new(),
            seen: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Indices (in push order) of the rows that added rank.
    pub fn independent_rows(&self) -> &[usize] {
        &self.sources
    }

    pub fn push(&mut self, row: &[BigInt]) -> bool {
        let mut r: Vec<u64> = row.iter().map(reduce_mod).collect();
        let idx = self.seen;
        self.seen += 1;
        for (&c, p) in &self.rows {
            let f = r[c];
            if f == 0 {
                continue;
            }
            for i in c..self.cols {
                if p[i] != 0 {
                    r[i] = (r[i] + PRIME - mulmod(f, p[i])) % PRIME;
                }
            }
        }
        let Some(lead) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = powmod(r[lead], PRIME - 2);
        for x in r.iter_mut() {
            *x = mulmod(*x, inv);
        }
        self.rows.insert(lead, r);
        self.sources.push(idx);
        true
    }
}

/// Exact nullspace of an integer system.
///
/// Independent rows are selected modulo a large prime, the nullspace of those
/// rows is computed over ℚ, and every row is then checked exactly; an unlucky
/// prime falls back to full rational elimination.
pub fn modular_nullspace(cols: usize, rows: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    let mut ech = ModEchelon::new(cols);
    for r in rows {
        ech.push(r);
        if ech.rank() == cols {
            return Vec::new();
        }
    }
    let picked: Vec<Vec<BigRational>> = ech
        .independent_rows()
        .iter()
        .map(|&i| {
            rows[i]
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let ns = if picked.is_empty() {
        RatMatrix::identity(cols).rows_as_vecs()
    } else {
        RatMatrix::from_rows(picked)
            .expect("rectangular")
            .nullspace()
    };
    let scaled: Vec<Vec<BigInt>> = ns
        .iter()
        .map(|v| {
            let den = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            v.iter().map(|x| x.numer() * (&den / x.denom())).collect()
        })
        .collect();
    let exact = rows.iter().all(|r| {
        scaled.iter().all(|v| {
            r.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
                .is_zero()
        })
    });
    if exact {
        return ns;
    }
    let mut se = SparseEchelon::new(cols);
    for r in rows {
        se.push(
            r.iter()
                .enumerate()
                .map(|(i, x)| (i, BigRational::from_integer(x.clone()))),
        );
    }
    se.nullspace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::coeff::{rat, ratio};

    #[test]
    fn det_rank_inverse() {
        let m = RatMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.det().unwrap(), rat(1));
        assert_eq!(m.rank(), 2);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), RatMatrix::identity(2));
        let s = RatMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.det().unwrap(), rat(0));
        assert_eq!(s.rank(), 1);
        assert_eq!(s.inverse(), Err(Error::Singular));
    }

    #[test]
    fn nullspace_dense_and_sparse_agree() {
        let m = RatMatrix::from_ints(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let dense = m.nullspace();
        assert_eq!(dense.len(), 2);
        for v in &dense {
            assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
        let mut se = SparseEchelon::new(4);
        for i in 0..3 {
            se.push(m.row(i).iter().cloned().enumerate());
        }
        assert_eq!(se.rank(), 2);
        assert_eq!(se.nullspace(), dense);
        let int_rows: Vec<Vec<BigInt>> = (0..3)
            .map(|i| m.row(i).iter().map(|x| x.to_integer()).collect())
            .collect();
        let ns = modular_nullspace(4, &int_rows);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
        let mut me = ModEchelon::new(4);
        for r in &int_rows {
            me.push(r);
        }
        assert_eq!(me.independent_rows(), &[0, 2]);
    }

    #[test]
    fn three_by_three_det() {
        let m = RatMatrix::from_rows(vec![
            vec![ratio(1, 2), rat(0), rat(1)],
            vec![rat(0), rat(3), rat(0)],
            vec![rat(1), rat(0), rat(4)],
        ])
        .unwrap();
        // 3 * (1/2*4 - 1) = 3
        assert_eq!(m.det().unwrap(), rat(3));
    }
}
