//! Krylov matrices, the cyclic-pair determinant `f`, its derivative operator
//! `S`, and the local chart around a diagonal base point.
//!
//! Variable layout on `M_n × ℂⁿ`: `m^i_j` (row `i`, column `j`, 1-based) sits at
//! index `(i−1)n + (j−1)`, then `v_i` at `n² + i − 1`.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{Monomial, MultiPoly, RatMatrix, UniPoly, Var};
use crate::error::{Error, Result};
use crate::weyl::WeylOp;

/// Default ceiling on `n` for building `f` and `S`.
pub const DEFAULT_MAX_N: usize = 4;
/// Default ceiling on `n` for symbolic chart identities.
pub const DEFAULT_MAX_CHART_N: usize = 3;

/// Variable bookkeeping for `M_n × ℂⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicPairSpace {
    pub n: usize,
}

impl CyclicPairSpace {
    pub fn new(n: usize) -> Self {
        CyclicPairSpace { n }
    }

    pub fn arity(&self) -> usize {
        self.n * self.n + self.n
    }

    /// Index of `m^i_j`, 0-based `i`, `j`.
    pub fn m(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Index of `v_i`, 0-based.
    pub fn v(&self, i: usize) -> usize {
        self.n * self.n + i
    }

    pub fn degree(&self) -> u32 {
        (self.n * (self.n + 1) / 2) as u32
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.arity());
        for i in 1..=self.n {
            for j in 1..=self.n {
                names.push(format!("m{i}{j}"));
            }
        }
        names.extend((1..=self.n).map(|i| format!("v{i}")));
        names
    }

    /// Flattens a numeric pair `(M, v)` into a point of the layout.
    pub fn point(&self, m: &RatMatrix, v: &[BigRational]) -> Result<Vec<BigRational>> {
        check_pair(self.n, m, v)?;
        let mut p = Vec::with_capacity(self.arity());
        for i in 0..self.n {
            p.extend_from_slice(m.row(i));
        }
        p.extend_from_slice(v);
        Ok(p)
    }
}

fn check_pair(n: usize, m: &RatMatrix, v: &[BigRational]) -> Result<()> {
    if m.rows() != n || m.cols() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n}x{n} matrix and length-{n} vector, got {}x{} and {}",
            m.rows(),
            m.cols(),
            v.len()
        )));
    }
    Ok(())
}

fn guard(n: usize, max_n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::Guard("n must be at least 1".into()));
    }
    if n > max_n {
        return Err(Error::Guard(format!(
            "{what} for n={n} exceeds the limit n <= {max_n}"
        )));
    }
    Ok(())
}

/// Symbolic Krylov matrix `[v Mv … M^{n−1}v]`, as rows of polynomials.
pub fn krylov_matrix(n: usize) -> Vec<Vec<MultiPoly>> {
    let sp = CyclicPairSpace::new(n);
    let a = sp.arity();
    let mut cols: Vec<Vec<MultiPoly>> = vec![(0..n).map(|i| MultiPoly::var(a, sp.v(i))).collect()];
    for _ in 1..n {
        let prev = cols.last().unwrap();
        let next = (0..n)
            .map(|i| {
                let mut acc = MultiPoly::zero(a);
                for (j, pj) in prev.iter().enumerate() {
                    let t = MultiPoly::var(a, sp.m(i, j)).mul(pj).expect("same arity");
                    acc = acc.add(&t).expect("same arity");
                }
                acc
            })
            .collect();
        cols.push(next);
    }
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect()
}

/// Determinant of a square polynomial matrix by Laplace expansion along rows,
/// memoized on the set of columns already used.
pub fn symbolic_det(rows: &[Vec<MultiPoly>]) -> Result<MultiPoly> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("non-square matrix".into()));
    }
    if n > 20 {
        return Err(Error::Guard("symbolic determinant beyond 20x20".into()));
    }
    let arity = rows[0][0].arity();
    let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
    Ok(det_rec(rows, 0, &mut memo, arity))
}

fn det_rec(
    rows: &[Vec<MultiPoly>],
    used: u32,
    memo: &mut HashMap<u32, MultiPoly>,
    arity: usize,
) -> MultiPoly {
    let n = rows.len();
    let r = used.count_ones() as usize;
    if r == n {
        return MultiPoly::one(arity);
    }
    if let Some(v) = memo.get(&used) {
        return v.clone();
    }
    let mut acc = MultiPoly::zero(arity);
    let mut sign_neg = false;
    for c in 0..n {
        if used & (1 << c) != 0 {
            continue;
        }
        let entry = &rows[r][c];
        if !entry.is_zero() {
            let minor = det_rec(rows, used | (1 << c), memo, arity);
            let t = entry.mul(&minor).expect("same arity");
            acc = if sign_neg { acc.sub(&t) } else { acc.add(&t) }.expect("same arity");
        }
        sign_neg = !sign_neg;
    }
    memo.insert(used, acc.clone());
    acc
}

/// `f(M, v) = det[v Mv … M^{n−1}v]`.
pub fn cyclic_det(n: usize) -> Result<MultiPoly> {
    cyclic_det_with_limit(n, DEFAULT_MAX_N)
}

pub fn cyclic_det_with_limit(n: usize, max_n: usize) -> Result<MultiPoly> {
    guard(n, max_n, "building f")?;
    symbolic_det(&krylov_matrix(n))
}

/// `S`: every variable of `f` replaced by its partial derivative.
pub fn build_s(n: usize) -> Result<WeylOp> {
    build_s_with_limit(n, DEFAULT_MAX_N)
}

pub fn build_s_with_limit(n: usize, max_n: usize) -> Result<WeylOp> {
    Ok(WeylOp::from_poly_derivatives(&cyclic_det_with_limit(
        n, max_n,
    )?))
}

/// Numeric Krylov matrix of a rational pair.
pub fn krylov_numeric(m: &RatMatrix, v: &[BigRational]) -> Result<RatMatrix> {
    let n = v.len();
    check_pair(n, m, v)?;
    let mut cols = vec![v.to_vec()];
    for _ in 1..n {
        let next = m.mul_vec(cols.last().unwrap())?;
        cols.push(next);
    }
    RatMatrix::from_rows(
        (0..n)
            .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
            .collect(),
    )
}

/// `f(M, v)` computed as a numeric determinant.
pub fn f_numeric(m: &RatMatrix, v: &[BigRational]) -> Result<BigRational> {
    krylov_numeric(m, v)?.det()
}

/// Whether `v` is a cyclic vector for `M`, by exact rank of the Krylov matrix.
pub fn is_cyclic(m: &RatMatrix, v: &[BigRational]) -> Result<bool> {
    Ok(krylov_numeric(m, v)?.rank() == v.len())
}

/// The lower shift matrix `J` (ones on the subdiagonal); `(J, e₁)` is cyclic with `f = 1`.
pub fn lower_shift(n: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(n, n);
    for i in 1..n {
        m.set(i, i - 1, BigRational::one());
    }
    m
}

pub fn unit_vector(n: usize, i: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); n];
    v[i] = BigRational::one();
    v
}

/// Outcome of a semi-invariance test at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiInvariance {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub det_t: BigRational,
}

impl SemiInvariance {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Compares `f(TMT⁻¹, Tv)` with `det(T)·f(M, v)`, evaluating the symbolic `f`.
pub fn semiinvariance_check(
    f: &MultiPoly,
    t: &RatMatrix,
    m: &RatMatrix,
    v: &[BigRational],
) -> Result<SemiInvariance> {
    let n = v.len();
    let sp = CyclicPairSpace::new(n);
    if f.arity() != sp.arity() {
        return Err(Error::ArityMismatch(sp.arity(), f.arity()));
    }
    check_pair(n, t, v)?;
    let det_t = t.det()?;
    if det_t.is_zero() {
        return Err(Error::Singular);
    }
    let tinv = t.inverse()?;
    let gm = t.mul(m)?.mul(&tinv)?;
    let gv = t.mul_vec(v)?;
    let lhs = f.eval_rational(&sp.point(&gm, &gv)?)?;
    let rhs = &det_t * f.eval_rational(&sp.point(m, v)?)?;
    Ok(SemiInvariance { lhs, rhs, det_t })
}

/// `count` seeded random triples `(T, M, v)` with small integer entries and
/// `det T ≠ 0`, each checked with [`semiinvariance_check`].
pub fn semiinvariance_trials(
    f: &MultiPoly,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<SemiInvariance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entry = |rng: &mut ChaCha8Rng| BigRational::from_integer(rng.gen_range(-3i64..=3).into());
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let t = loop {
            let rows = (0..n)
                .map(|_| (0..n).map(|_| entry(&mut rng)).collect())
                .collect();
            let t = RatMatrix::from_rows(rows)?;
            if !t.det()?.is_zero() {
                break t;
            }
        };
        let m = RatMatrix::from_rows(
            (0..n)
                .map(|_| (0..n).map(|_| entry(&mut rng)).collect())
                .collect(),
        )?;
        let v: Vec<BigRational> = (0..n).map(|_| entry(&mut rng)).collect();
        out.push(semiinvariance_check(f, &t, &m, &v)?);
    }
    Ok(out)
}

/// Variable layout of the local chart: off-diagonal `t^i_j` in row-major
/// order skipping the diagonal, then `a_1…a_n`, then `v_1…v_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalChart {
    pub n: usize,
}

impl LocalChart {
    pub fn new(n: usize) -> Self {
        LocalChart { n }
    }

    pub fn arity(&self) -> usize {
        self.n * self.n + self.n
    }

    /// Index of `t^i_j` for `i ≠ j`.
    pub fn t(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j);
        i * (self.n - 1) + if j > i { j - 1 } else { j }
    }

    pub fn a(&self, i: usize) -> usize {
        self.n * (self.n - 1) + i
    }

    pub fn v(&self, i: usize) -> usize {
        self.n * self.n + i
    }

    /// `T` with unit diagonal and symbolic off-diagonal entries.
    pub fn t_matrix(&self) -> Vec<Vec<MultiPoly>> {
        let ar = self.arity();
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        if i == j {
                            MultiPoly::one(ar)
                        } else {
                            MultiPoly::var(ar, self.t(i, j))
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Both sides of the cleared chart identity.
#[derive(Clone, Debug)]
pub struct ChartIdentity {
    pub n: usize,
    /// `f(T·A·adj(T), T v)`
    pub lhs: MultiPoly,
    /// `det(T)^{n(n−1)/2 + 1} · ∏ v_i · ∏_{i<j} (a_j − a_i)`
    pub rhs: MultiPoly,
    pub det_t_power: u32,
}

impl ChartIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn adjugate(m: &[Vec<MultiPoly>]) -> Result<Vec<Vec<MultiPoly>>> {
    let n = m.len();
    let arity = m[0][0].arity();
    if n == 1 {
        return Ok(vec![vec![MultiPoly::one(arity)]]);
    }
    let mut adj = vec![vec![MultiPoly::zero(arity); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<MultiPoly>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let d = symbolic_det(&minor)?;
            // adj = cofactor transpose
            adj[j][i] = if (i + j) % 2 == 0 { d } else { d.neg() };
        }
    }
    Ok(adj)
}

fn mat_mul(a: &[Vec<MultiPoly>], b: &[Vec<MultiPoly>]) -> Result<Vec<Vec<MultiPoly>>> {
    let n = a.len();
    let arity = a[0][0].arity();
    let mut out = vec![vec![MultiPoly::zero(arity); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = MultiPoly::zero(arity);
            for k in 0..n {
                if a[i][k].is_zero() || b[k][j].is_zero() {
                    continue;
                }
                acc = acc.add(&a[i][k].mul(&b[k][j])?)?;
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// Verifies `f(T A adj(T), T v) = det(T)^{n(n−1)/2} · det(T) · ∏v_i · ∏_{i<j}(a_j − a_i)`
/// as a polynomial identity in the chart variables. Since `T A adj(T) = det(T)·TAT⁻¹`
/// and `f` has degree `n(n−1)/2` in `M`, this is the chart factorization with
/// denominators cleared.
pub fn local_chart_identity(n: usize) -> Result<ChartIdentity> {
    local_chart_identity_with_limit(n, DEFAULT_MAX_CHART_N)
}

pub fn local_chart_identity_with_limit(n: usize, max_n: usize) -> Result<ChartIdentity> {
    guard(n, max_n, "chart identity")?;
    let ch = LocalChart::new(n);
    let ar = ch.arity();
    let t = ch.t_matrix();
    let det_t = symbolic_det(&t)?;
    let adj = adjugate(&t)?;
    let a: Vec<Vec<MultiPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        MultiPoly::var(ar, ch.a(i))
                    } else {
                        MultiPoly::zero(ar)
                    }
                })
                .collect()
        })
        .collect();
    let gm = mat_mul(&mat_mul(&t, &a)?, &adj)?;
    let mut subs = Vec::with_capacity(ar);
    for row in &gm {
        subs.extend(row.iter().cloned());
    }
    for row in &t {
        let mut acc = MultiPoly::zero(ar);
        for (j, tij) in row.iter().enumerate() {
            acc = acc.add(&tij.mul(&MultiPoly::var(ar, ch.v(j)))?)?;
        }
        subs.push(acc);
    }
    let f = cyclic_det_with_limit(n, n)?;
    let lhs = f.compose(&subs)?;
    let power = (n * (n - 1) / 2 + 1) as u32;
    let mut rhs = det_t.pow(power);
    for i in 0..n {
        rhs = rhs.mul(&MultiPoly::var(ar, ch.v(i)))?;
    }
    rhs = rhs.mul(&vandermonde_in(
        ar,
        &(0..n).map(|i| ch.a(i)).collect::<Vec<_>>(),
    ))?;
    Ok(ChartIdentity {
        n,
        lhs,
        rhs,
        det_t_power: power,
    })
}

/// `∏_{i<j} (x_{idx[j]} − x_{idx[i]})` in a polynomial ring of the given arity.
pub fn vandermonde_in(arity: usize, idx: &[usize]) -> MultiPoly {
    let mut p = MultiPoly::one(arity);
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            let d = MultiPoly::var(arity, idx[j])
                .sub(&MultiPoly::var(arity, idx[i]))
                .expect("same arity");
            p = p.mul(&d).expect("same arity");
        }
    }
    p
}

/// Result of applying `∂_{v_1}…∂_{v_n}` to `(v_1…v_n)^{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalB1 {
    pub n: usize,
    pub k: u32,
    /// Scalar `c` with `∂_{v_1}…∂_{v_n}(v_1…v_n)^{k+1} = c·(v_1…v_n)^k`.
    pub observed: BigRational,
    /// `observed / (k+1)^n`; 1 when the local factor is exactly `(s+1)^n`.
    pub constant: BigRational,
    /// Monic local factor `(s+1)^n`.
    pub factor: UniPoly,
}

pub fn local_b1_check(n: usize, k: u32) -> Result<LocalB1> {
    guard(n, 8, "local b1 check")?;
    let mut prod = MultiPoly::<BigRational>::one(n);
    for i in 0..n {
        prod = prod.mul(&MultiPoly::var(n, i))?;
    }
    let d = WeylOp::term(
        n,
        Monomial::one(n),
        Monomial(vec![1; n]),
        BigRational::one(),
    );
    let lhs = d.apply(&prod.pow(k + 1))?;
    let target = prod.pow(k);
    let observed = lhs
        .exact_div(&target)?
        .as_constant()
        .ok_or_else(|| Error::TheoremViolation("local quotient is not a constant".into()))?;
    let expect = BigRational::from_integer((k + 1).into()).pow(n as i32);
    let constant = &observed / &expect;
    Ok(LocalB1 {
        n,
        k,
        observed,
        constant,
        factor: UniPoly::linear(BigRational::one(), Var::S).pow(n as u32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn krylov_small() {
        let k1 = krylov_matrix(1);
        assert_eq!(k1[0][0], MultiPoly::var(2, 1));
        let k2 = krylov_matrix(2);
        // row 0: v1, m11 v1 + m12 v2
        let want =
            MultiPoly::from_int_terms(6, &[(1, &[1, 0, 0, 0, 1, 0]), (1, &[0, 1, 0, 0, 0, 1])]);
        assert_eq!(k2[0][1], want);
        let k3 = krylov_matrix(3);
        assert!(k3
            .iter()
            .all(|row| row[2].is_homogeneous() && row[2].degree() == Some(3)));
    }

    #[test]
    fn f_for_n1_n2() {
        assert_eq!(cyclic_det(1).unwrap(), MultiPoly::var(2, 1));
        // m21 v1² + (m22 − m11) v1 v2 − m12 v2²
        let want = MultiPoly::from_int_terms(
            6,
            &[
                (1, &[0, 0, 1, 0, 2, 0]),
                (1, &[0, 0, 0, 1, 1, 1]),
                (-1, &[1, 0, 0, 0, 1, 1]),
                (-1, &[0, 1, 0, 0, 0, 2]),
            ],
        );
        assert_eq!(cyclic_det(2).unwrap(), want);
    }

    #[test]
    fn f_at_shift_is_one() {
        for n in 1..=4 {
            let f = cyclic_det(n).unwrap();
            assert!(f.is_homogeneous());
            assert_eq!(f.degree(), Some((n * (n + 1) / 2) as u32));
            let sp = CyclicPairSpace::new(n);
            let p = sp.point(&lower_shift(n), &unit_vector(n, 0)).unwrap();
            assert_eq!(f.eval_rational(&p).unwrap(), rat(1));
        }
        assert!(matches!(cyclic_det(5), Err(Error::Guard(_))));
    }

    #[test]
    fn s_order_and_grade() {
        use crate::weyl::Grade;
        let s2 = build_s(2).unwrap();
        assert_eq!(s2.order(), 3);
        assert_eq!(s2.grade().unwrap(), Grade::Homogeneous(-3));
        let s3 = build_s(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.grade().unwrap(), Grade::Homogeneous(-6));
    }

    #[test]
    fn cyclicity_examples() {
        assert!(is_cyclic(&lower_shift(3), &unit_vector(3, 0)).unwrap());
        assert!(!is_cyclic(&RatMatrix::identity(2), &[rat(1), rat(2)]).unwrap());
        let d = RatMatrix::from_ints(&[&[1, 0], &[0, 2]]);
        assert!(is_cyclic(&d, &[rat(1), rat(1)]).unwrap());
        assert_eq!(f_numeric(&d, &[rat(1), rat(1)]).unwrap(), rat(1));
    }

    #[test]
    fn semiinvariance_diag() {
        let f = cyclic_det(2).unwrap();
        let t = RatMatrix::from_ints(&[&[2, 0], &[0, 1]]);
        let m = RatMatrix::from_ints(&[&[1, 3], &[-2, 5]]);
        let r = semiinvariance_check(&f, &t, &m, &[rat(1), rat(-4)]).unwrap();
        assert!(r.holds());
        assert_eq!(r.det_t, rat(2));
        let sing = RatMatrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert!(semiinvariance_check(&f, &sing, &m, &[rat(1), rat(0)]).is_err());
    }

    #[test]
    fn chart_identity_small() {
        assert!(local_chart_identity(1).unwrap().holds());
        assert!(local_chart_identity(2).unwrap().holds());
    }

    #[test]
    fn b1_local_factor() {
        let r = local_b1_check(2, 0).unwrap();
        assert_eq!(r.observed, rat(1));
        assert_eq!(local_b1_check(2, 1).unwrap().observed, rat(4));
        let r3 = local_b1_check(3, 2).unwrap();
        assert_eq!(r3.observed, rat(27));
        assert_eq!(r3.constant, rat(1));
        assert_eq!(r3.factor, UniPoly::from_ints(&[1, 3, 3, 1], Var::S));
    }
}
