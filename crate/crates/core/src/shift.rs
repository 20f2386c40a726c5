//! Shift operators for the rational Calogero–Moser operator
//! `L_𝔥(k) = Δ + 2k P⁺`: operators `D` with `D L_𝔥(k) = L_𝔥(k+r) D`.
//!
//! The generator for `r = −1` is found as the nullspace of the linear
//! system `defect = 0` on a finite ansatz `D = δ^{−e} Σ_b q_b(t) ∂^b` of
//! grade 0 and bounded order, restricted to `W`-invariant operators. The
//! system is solved at several rational `k`, normalized by `p_N = ∏α`, and
//! the `k`-dependence is reconstructed by interpolation and then verified
//! exactly over `ℚ[k]`.
//!
//! The recursion on the coefficients `p_𝐣` of the expansion
//! `D = Σ_𝐣 ᾱ^𝐣 ∂(p_𝐣)` is implemented independently as a residual checker.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::coeff::{factorial, format_rational, Coeff};
use crate::arith::{
    interpolate, interpolate_rational, modular_nullspace, rat, ratio, ModEchelon, Monomial,
    MultiPoly, RatMatrix, UniPoly, Var,
};
use crate::bernstein::{bhat_poly, Method};
use crate::error::{Error, Result};
use crate::radial::{l_rational_at, laplacian, p_plus, Laurent, LaurentWeylOp, RootSystemA};

/// `D·L_𝔥(k) − L_𝔥(k+r)·D`, canonical.
pub fn shift_defect(d: &LaurentWeylOp<UniPoly>, r: i64) -> LaurentWeylOp<UniPoly> {
    let rs = d.roots();
    let k = UniPoly::x(Var::K);
    let kr = UniPoly::from_ints(&[r, 1], Var::K);
    d.mul(&l_rational_at(rs, &k))
        .minus(&l_rational_at(rs, &kr).mul(d))
        .canonical()
}

/// Same as [`shift_defect`] at a fixed rational `k`.
pub fn shift_defect_at(
    d: &LaurentWeylOp<BigRational>,
    k: &BigRational,
    r: i64,
) -> LaurentWeylOp<BigRational> {
    let rs = d.roots();
    let kr = k + BigRational::from_integer(r.into());
    d.mul(&l_rational_at(rs, k))
        .minus(&l_rational_at(rs, &kr).mul(d))
        .canonical()
}

/// `CT`: coefficient of the term with no derivative, `t`-degree zero and root index zero.
pub fn constant_term<C: Coeff>(d: &LaurentWeylOp<C>) -> C {
    d.constant_term()
}

/// `n! ∏_{d=2}^{n} ∏_{j=1}^{d−1} (d(k+1)+j)`.
pub fn ct_formula(n: usize) -> UniPoly {
    let mut p = UniPoly::constant(BigRational::from_integer(factorial(n as u32)), Var::K);
    for d in 2..=n as i64 {
        for j in 1..d {
            p = &p * &UniPoly::from_ints(&[d + j, d], Var::K);
        }
    }
    p
}

/// Search limits for the generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftBounds {
    /// Largest differential order tried.
    pub max_order: u32,
    /// Largest power `e` of `δ^{−e}` tried.
    pub max_pole: u32,
    /// Degree bound in `k` for the normalized coefficients.
    pub k_degree: usize,
}

impl ShiftBounds {
    pub fn default_for(n: usize) -> Self {
        let roots = (n * (n.saturating_sub(1)) / 2) as u32;
        ShiftBounds {
            max_order: (n * (n + 1) / 2) as u32,
            max_pole: 2,
            k_degree: 2 * roots as usize + 2,
        }
    }
}

/// One `W`-symmetrized basis element `Σ_w sgn(w)^e w·(t^m ∂^b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitElement {
    /// `(t-exponent, ∂-exponent) → integer coefficient`
    pub terms: BTreeMap<(Monomial, Monomial), i64>,
    pub order: u32,
}

/// Finite ansatz `δ^{−e} Σ_b q_b(t) ∂^b` of grade 0 and order ≤ `order`.
#[derive(Clone, Debug)]
pub struct ShiftAnsatz {
    pub n: usize,
    pub r: i64,
    pub order: u32,
    pub pole: u32,
    pub basis: Vec<OrbitElement>,
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            (p, if inv % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(n: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() == n - 1 {
            cur.push(d);
            out.push(Monomial(cur.clone()));
            cur.pop();
            return;
        }
        for x in (0..=d).rev() {
            cur.push(x);
            rec(n, d - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::new(), &mut out);
    }
    out
}

fn permute_mono(m: &Monomial, perm: &[usize]) -> Monomial {
    let mut e = vec![0; m.0.len()];
    for (i, &x) in m.0.iter().enumerate() {
        e[perm[i]] = x;
    }
    Monomial(e)
}

impl ShiftAnsatz {
    pub fn new(n: usize, r: i64, order: u32, pole: u32) -> Self {
        let roots = (n * (n - 1) / 2) as u32;
        let perms = permutations(n);
        let mut seen: BTreeSet<(Monomial, Monomial)> = BTreeSet::new();
        let mut basis = Vec::new();
        for ord in 0..=order {
            for b in monomials_of_degree(n, ord) {
                for m in monomials_of_degree(n, ord + pole * roots) {
                    if seen.contains(&(m.clone(), b.clone())) {
                        continue;
                    }
                    let mut terms: BTreeMap<(Monomial, Monomial), i64> = BTreeMap::new();
                    for (p, s) in &perms {
                        let key = (permute_mono(&m, p), permute_mono(&b, p));
                        seen.insert(key.clone());
                        let w = if pole % 2 == 1 { *s } else { 1 };
                        *terms.entry(key).or_insert(0) += w;
                    }
                    terms.retain(|_, v| *v != 0);
                    if terms.is_empty() {
                        continue;
                    }
                    let g = terms.values().fold(0i64, |a, &v| num_integer::gcd(a, v));
                    for v in terms.values_mut() {
                        *v /= g;
                    }
                    basis.push(OrbitElement { terms, order: ord });
                }
            }
        }
        ShiftAnsatz {
            n,
            r,
            order,
            pole,
            basis,
        }
    }

    pub fn roots(&self) -> RootSystemA {
        RootSystemA::new(self.n)
    }

    pub fn unknowns(&self) -> usize {
        self.basis.len()
    }

    /// `δ^{−e} · Σ_u x_u basis_u`.
    pub fn operator<C: Coeff>(&self, x: &[C]) -> LaurentWeylOp<C> {
        let rs = self.roots();
        let n = self.n;
        let sign = if rs.delta_sign() == -1 && self.pole % 2 == 1 {
            -1
        } else {
            1
        };
        let j = vec![-(self.pole as i32); rs.len()];
        let mut by_b: BTreeMap<Monomial, MultiPoly<C>> = BTreeMap::new();
        for (u, el) in self.basis.iter().enumerate() {
            if x[u].is_czero() {
                continue;
            }
            for ((m, b), &c) in &el.terms {
                let coeff = x[u].times(&C::from_i64(c * sign));
                by_b.entry(b.clone())
                    .or_insert_with(|| MultiPoly::zero(n))
                    .add_term(m.clone(), &coeff);
            }
        }
        let mut op = LaurentWeylOp::zero(&rs);
        for (b, q) in by_b {
            let mut l = Laurent::zero(&rs);
            l.add_term(j.clone(), q);
            op.add(b, l);
        }
        op
    }

    fn element(&self, u: usize) -> LaurentWeylOp<BigRational> {
        let mut x = vec![BigRational::zero(); self.basis.len()];
        x[u] = BigRational::one();
        self.operator(&x)
    }
}

type RowKey = (Monomial, Monomial);
type SparseCol = Vec<(RowKey, BigRational)>;

/// Polynomial `ᾱ^{(P,…,P)} · l`; requires `P` to clear every pole.
fn clear_poles(
    l: &Laurent<BigRational>,
    rs: &RootSystemA,
    p: i32,
    cache: &mut HashMap<(usize, u32), MultiPoly>,
) -> MultiPoly {
    let mut out = MultiPoly::zero(rs.n());
    for (j, q) in l.terms() {
        let mut t = q.clone();
        for (a, &ja) in j.iter().enumerate() {
            let e = ja + p;
            assert!(e >= 0, "pole clearance too small");
            if e > 0 {
                let pw = cache
                    .entry((a, e as u32))
                    .or_insert_with(|| rs.alpha::<BigRational>(a).pow(e as u32))
                    .clone();
                t = t.mul(&pw).expect("same arity");
            }
        }
        out = out.add(&t).expect("same arity");
    }
    out
}

fn to_columns(op: &LaurentWeylOp<BigRational>, rs: &RootSystemA, p: i32) -> SparseCol {
    let mut cache = HashMap::new();
    let mut out = Vec::new();
    for (b, l) in op.terms() {
        let poly = clear_poles(l, rs, p, &mut cache);
        for (m, c) in poly.terms() {
            out.push(((b.clone(), m.clone()), c.clone()));
        }
    }
    out
}

/// The defect as an affine function `A0 + k·A1` of `k`, column per ansatz unknown.
pub struct DefectSystem {
    a0: Vec<SparseCol>,
    a1: Vec<SparseCol>,
    rows: HashMap<RowKey, usize>,
}

impl DefectSystem {
    pub fn build(ans: &ShiftAnsatz) -> Self {
        let rs = ans.roots();
        let lap: LaurentWeylOp<BigRational> = laplacian(&rs);
        let pp: LaurentWeylOp<BigRational> = p_plus(&rs);
        let clear = (ans.pole + ans.order + 2) as i32;
        let r2 = BigRational::from_integer((2 * ans.r).into());
        let two = rat(2);
        let cols: Vec<(SparseCol, SparseCol)> = (0..ans.unknowns())
            .into_par_iter()
            .map(|u| {
                let b = ans.element(u);
                let pb = pp.mul(&b);
                let a0 = b.mul(&lap).minus(&lap.mul(&b)).minus(&pb.scale(&r2));
                let a1 = b.mul(&pp).minus(&pb).scale(&two);
                (to_columns(&a0, &rs, clear), to_columns(&a1, &rs, clear))
            })
            .collect();
        let mut rows = HashMap::new();
        for (c0, c1) in &cols {
            for (key, _) in c0.iter().chain(c1) {
                let next = rows.len();
                rows.entry(key.clone()).or_insert(next);
            }
        }
        let (a0, a1) = cols.into_iter().unzip();
        DefectSystem { a0, a1, rows }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Integer rows of `den(k)·(A0 + k·A1)`, zero rows dropped.
    fn integer_rows(&self, k: &BigRational) -> Vec<Vec<BigInt>> {
        let cols = self.a0.len();
        let (p, q) = (k.numer(), k.denom());
        let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); cols]; self.rows.len()];
        let mut dens: Vec<BigInt> = vec![BigInt::one(); self.rows.len()];
        for col in self.a0.iter().chain(&self.a1) {
            for (key, v) in col {
                let d = &mut dens[self.rows[key]];
                *d = d.lcm(v.denom());
            }
        }
        for u in 0..cols {
            for (key, v) in &self.a0[u] {
                let r = self.rows[key];
                rows[r][u] += v.numer() * (&dens[r] / v.denom()) * q;
            }
            for (key, v) in &self.a1[u] {
                let r = self.rows[key];
                rows[r][u] += v.numer() * (&dens[r] / v.denom()) * p;
            }
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        rows
    }
}

/// Principal part of an order-`m` grade-0 operator written as `ᾱ^𝐍 ∂(p_𝐍)`
/// with `𝐍 = (1,…,1)`; returns `p_𝐍` (in the symbol variables) or `None` when
/// the top-order part is not of that form.
pub fn top_symbol<C: Coeff>(d: &LaurentWeylOp<C>) -> Option<(u32, MultiPoly<C>)> {
    let rs = d.roots();
    let n = rs.n();
    let c = d.canonical();
    let m = c.terms().map(|(b, _)| b.degree()).max()?;
    let prod: MultiPoly<C> = (0..rs.len()).fold(MultiPoly::one(n), |acc, p| {
        acc.mul(&rs.alpha(p)).expect("arity")
    });
    let mut pn = MultiPoly::zero(n);
    for (b, l) in c.terms() {
        if b.degree() != m {
            continue;
        }
        let (e, num) = l.canonical(rs);
        if e.iter().any(|&x| x > 0) {
            return None;
        }
        let q = num.exact_div(&prod).ok()?;
        let cst = q.as_constant()?;
        pn.add_term(b.clone(), &cst);
    }
    Some((m, pn))
}

/// Splits off root factors of `p`; returns `(root names, cofactor)`.
pub fn root_factors<C: Coeff>(rs: &RootSystemA, p: &MultiPoly<C>) -> (Vec<String>, MultiPoly<C>) {
    let mut rest = p.clone();
    let mut names = Vec::new();
    if rest.is_zero() {
        return (names, rest);
    }
    for a in 0..rs.len() {
        let alpha: MultiPoly<C> = rs.alpha(a);
        while let Ok(q) = rest.exact_div(&alpha) {
            names.push(rs.name(a));
            rest = q;
        }
    }
    (names, rest)
}

/// Result of the generator search.
#[derive(Clone, Debug)]
pub struct ShiftGenerator {
    pub n: usize,
    pub r: i64,
    pub order: u32,
    pub pole: u32,
    pub unknowns: usize,
    /// Nullspace dimension at every sample `k` (all equal for a generic search).
    pub nullspace_dim: usize,
    /// Nullity after adding `p_𝐍 = 0` (0 means `p_𝐍` determines the solution).
    pub pn_zero_nullity: usize,
    pub operator: LaurentWeylOp<UniPoly>,
    pub p_n: MultiPoly<UniPoly>,
    pub samples: Vec<BigRational>,
}

fn sample_points(count: usize) -> Vec<BigRational> {
    (0..count as i64).map(|i| ratio(7 * i + 3, 11)).collect()
}

pub fn solve_at(
    sys: &DefectSystem,
    ans: &ShiftAnsatz,
    k: &BigRational,
) -> (Vec<Vec<BigRational>>, usize) {
    let rows = sys.integer_rows(k);
    let ns = modular_nullspace(ans.unknowns(), &rows);
    // Nullity mod p bounds the rational nullity from above.
    let mut witness = ModEchelon::new(ans.unknowns());
    for r in &rows {
        witness.push(r);
    }
    for (u, el) in ans.basis.iter().enumerate() {
        if el.order == ans.order {
            let mut row = vec![BigInt::zero(); ans.unknowns()];
            row[u] = BigInt::one();
            witness.push(&row);
        }
    }
    (ns, ans.unknowns() - witness.rank())
}

fn normalize(ans: &ShiftAnsatz, v: &[BigRational]) -> Result<(Vec<BigRational>, MultiPoly)> {
    let op = ans.operator(v);
    let rs = ans.roots();
    let (_, pn) = top_symbol(&op)
        .ok_or_else(|| Error::TheoremViolation("top index is not (1,...,1)".into()))?;
    let prod: MultiPoly = (0..rs.len()).fold(MultiPoly::one(rs.n()), |acc, p| {
        acc.mul(&rs.alpha(p)).expect("arity")
    });
    let q = pn
        .exact_div(&prod)
        .map_err(|_| Error::TheoremViolation("product of roots does not divide p_N".into()))?;
    let c = q.as_constant().ok_or_else(|| Error::Ambiguous(1))?;
    if c.is_zero() {
        return Err(Error::TheoremViolation("p_N vanishes".into()));
    }
    let inv = BigRational::one() / c;
    Ok((v.iter().map(|x| x * &inv).collect(), pn.scale(&inv)))
}

/// Searches orders and pole powers in increasing order; the first nonzero
/// nullspace is the generator stratum.
pub fn solve_shift_generator(n: usize, r: i64, bounds: &ShiftBounds) -> Result<ShiftGenerator> {
    if n < 2 {
        return Err(Error::Guard("shift operators need n >= 2".into()));
    }
    let probe = ratio(3, 11);
    for order in 0..=bounds.max_order {
        for pole in 0..=bounds.max_pole {
            let ans = ShiftAnsatz::new(n, r, order, pole);
            if ans.unknowns() == 0 {
                continue;
            }
            let sys = DefectSystem::build(&ans);
            let (ns, _) = solve_at(&sys, &ans, &probe);
            if ns.is_empty() {
                continue;
            }
            return finish(n, r, ans, sys, bounds);
        }
    }
    Err(Error::BoundsTooSmall(format!(
        "no solution with order <= {} and pole power <= {}",
        bounds.max_order, bounds.max_pole
    )))
}

fn finish(
    n: usize,
    r: i64,
    ans: ShiftAnsatz,
    sys: DefectSystem,
    bounds: &ShiftBounds,
) -> Result<ShiftGenerator> {
    let samples = sample_points(bounds.k_degree + 2);
    let solved: Vec<(usize, usize, Vec<BigRational>)> = samples
        .par_iter()
        .map(|k| {
            let (ns, w) = solve_at(&sys, &ans, k);
            if ns.len() != 1 {
                return Ok((ns.len(), w, Vec::new()));
            }
            let (v, _) = normalize(&ans, &ns[0])?;
            Ok((1, w, v))
        })
        .collect::<Result<_>>()?;
    let dim = solved[0].0;
    if let Some(bad) = solved.iter().find(|s| s.0 != 1) {
        return Err(Error::Ambiguous(bad.0));
    }
    let witness = solved.iter().map(|s| s.1).max().unwrap_or(0);
    let mut coeffs: Vec<UniPoly> = Vec::with_capacity(ans.unknowns());
    let mut dens: Vec<UniPoly> = Vec::new();
    for u in 0..ans.unknowns() {
        let pts: Vec<(BigRational, BigRational)> = samples
            .iter()
            .zip(&solved)
            .map(|(k, s)| (k.clone(), s.2[u].clone()))
            .collect();
        match interpolate(&pts, bounds.k_degree, Var::K) {
            Ok(p) => {
                coeffs.push(p);
                dens.push(UniPoly::constant(BigRational::one(), Var::K));
            }
            Err(Error::DegreeBoundViolated { .. }) => {
                let half = bounds.k_degree / 2;
                let (num, den) = interpolate_rational(&pts, half, half, Var::K)?;
                coeffs.push(num);
                dens.push(den);
            }
            Err(e) => return Err(e),
        }
    }
    // Clear any denominators so the operator lives over ℚ[k].
    let mut lcm = UniPoly::constant(BigRational::one(), Var::K);
    for d in &dens {
        let g = lcm.gcd(d);
        lcm = (&lcm * d).div_rem(&g)?.0;
    }
    let lcm = lcm.monic();
    let coeffs: Vec<UniPoly> = coeffs
        .iter()
        .zip(&dens)
        .map(|(c, d)| Ok(c * &lcm.div_rem(d)?.0))
        .collect::<Result<_>>()?;
    let op = ans.operator(&coeffs).canonical();
    let (_, p_n) = top_symbol(&op)
        .ok_or_else(|| Error::TheoremViolation("top index is not (1,...,1)".into()))?;
    Ok(ShiftGenerator {
        n,
        r,
        order: ans.order,
        pole: ans.pole,
        unknowns: ans.unknowns(),
        nullspace_dim: dim,
        pn_zero_nullity: witness,
        operator: op,
        p_n,
        samples,
    })
}

/// Verified properties of a generator.
#[derive(Clone, Debug)]
pub struct ShiftVerification {
    pub defect_zero: bool,
    pub top_index_ok: bool,
    pub pn_divisible: bool,
    pub w_invariant: bool,
    pub module_closure: bool,
    pub pn_determines: bool,
}

impl ShiftVerification {
    pub fn all(&self) -> bool {
        self.defect_zero
            && self.top_index_ok
            && self.pn_divisible
            && self.w_invariant
            && self.module_closure
            && self.pn_determines
    }
}

pub fn verify_generator(g: &ShiftGenerator) -> ShiftVerification {
    let d = &g.operator;
    let rs = d.roots();
    let defect_zero = shift_defect(d, g.r).is_zero();
    let top = top_symbol(d);
    let roots = rs.len() as u32;
    let top_index_ok = top
        .as_ref()
        .is_some_and(|(m, p)| *m == roots && !p.is_zero());
    let pn_divisible = top
        .as_ref()
        .is_some_and(|(_, p)| root_factors(rs, p).0.len() == rs.len());
    let w_invariant = permutations(rs.n())
        .iter()
        .all(|(p, _)| d.permute(p).equals(d));
    let k = UniPoly::x(Var::K);
    let closure = d.mul(&l_rational_at(rs, &k));
    let module_closure = shift_defect(&closure, g.r).is_zero();
    ShiftVerification {
        defect_zero,
        top_index_ok,
        pn_divisible,
        w_invariant,
        module_closure,
        pn_determines: g.pn_zero_nullity == 0,
    }
}

/// Summary for reports.
#[derive(Clone, Debug, Serialize)]
#[allow(non_snake_case)]
pub struct ShiftReport {
    pub n: usize,
    pub r: i64,
    pub nullspace_dim: usize,
    pub N: Vec<i32>,
    pub pN_factors: Vec<String>,
    pub CT_monic_coeffs: Vec<String>,
    pub matches_ct_formula: bool,
    pub generator_order: u32,
    pub pole_power: u32,
    pub unknowns: usize,
    pub defect_zero: bool,
    pub pN_determines_solution: bool,
    pub module_closure: bool,
}

/// `CT(g(−1, k+2))`.
pub fn shifted_constant_term(g: &ShiftGenerator) -> UniPoly {
    constant_term(&g.operator).shift(&rat(2))
}

pub fn shift_report(g: &ShiftGenerator, v: &ShiftVerification) -> ShiftReport {
    let rs = g.operator.roots();
    let (mut names, cof) = root_factors(rs, &g.p_n);
    if let Some(c) = cof.as_constant() {
        if !c.is_cone() {
            names.insert(0, c.to_string());
        }
    } else {
        names.push(format!("{cof:?}"));
    }
    let ct = shifted_constant_term(g);
    let monic = if ct.is_zero() { ct.clone() } else { ct.monic() };
    ShiftReport {
        n: g.n,
        r: g.r,
        nullspace_dim: g.nullspace_dim,
        N: vec![-(g.r as i32); rs.len()],
        pN_factors: names,
        CT_monic_coeffs: monic.coeffs().iter().map(format_rational).collect(),
        matches_ct_formula: !ct.is_zero() && monic == ct_formula(g.n).monic(),
        generator_order: g.order,
        pole_power: g.pole,
        unknowns: g.unknowns,
        defect_zero: v.defect_zero,
        pN_determines_solution: v.pn_determines,
        module_closure: v.module_closure,
    }
}

/// Factorization of `b̂` through the shift generator.
#[derive(Clone, Debug)]
pub struct FactorizationReport {
    pub n: usize,
    pub bhat: UniPoly,
    pub ct_shifted: UniPoly,
    pub ct_monic: UniPoly,
    pub formula_monic: UniPoly,
    pub monic_matches: bool,
    pub divides: bool,
    /// `b̂ / ((k+1)^n · CT-monic)` when it is a constant.
    pub constant: Option<BigRational>,
}

impl FactorizationReport {
    pub fn holds(&self) -> bool {
        self.monic_matches && self.divides && self.constant.is_some()
    }
}

pub fn verify_factorization(n: usize) -> Result<FactorizationReport> {
    let g = solve_shift_generator(n, -1, &ShiftBounds::default_for(n))?;
    factorization_from(&g, &bhat_poly(n, Method::Jets)?.bhat)
}

pub fn factorization_from(g: &ShiftGenerator, bhat: &UniPoly) -> Result<FactorizationReport> {
    let n = g.n;
    let ct = shifted_constant_term(g);
    if ct.is_zero() {
        return Err(Error::FactorizationViolation(
            "constant term vanishes".into(),
        ));
    }
    let ct_monic = ct.monic();
    let formula_monic = ct_formula(n).monic();
    let (_, rem) = bhat.div_rem(&ct)?;
    let denom = &UniPoly::from_ints(&[1, 1], Var::K).pow(n as u32) * &ct_monic;
    let (q, rem2) = bhat.div_rem(&denom)?;
    let constant = (rem2.is_zero() && q.is_constant()).then(|| q.coeff(0));
    Ok(FactorizationReport {
        n,
        bhat: bhat.clone(),
        ct_shifted: ct,
        monic_matches: ct_monic == formula_monic,
        ct_monic,
        formula_monic,
        divides: rem.is_zero(),
        constant,
    })
}

/// `D = Σ_𝐣 ᾱ^𝐣 ∂(p_𝐣)` with constant-coefficient `∂(p_𝐣)`; `p_𝐣` is a
/// polynomial in the symbol variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootExpansion {
    pub rs: RootSystemA,
    pub terms: BTreeMap<Vec<i32>, MultiPoly<UniPoly>>,
}

impl RootExpansion {
    pub fn zero(rs: &RootSystemA) -> Self {
        RootExpansion {
            rs: rs.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, j: Vec<i32>, p: MultiPoly<UniPoly>) {
        let e = self
            .terms
            .entry(j.clone())
            .or_insert_with(|| MultiPoly::zero(self.rs.n()));
        *e = e.add(&p).expect("arity");
        if e.is_zero() {
            self.terms.remove(&j);
        }
    }

    /// Rewrites a translation-invariant operator over simple roots
    /// `t_i − t_{i+1}`: each `t`-monomial in the simple roots becomes a root
    /// monomial.
    pub fn from_operator(d: &LaurentWeylOp<UniPoly>) -> Result<Self> {
        let rs = d.roots().clone();
        let n = rs.n();
        // t_i = Σ_{l ≥ i} s_l, t_n = 0, with s_l stored in slot l.
        let subs: Vec<MultiPoly<UniPoly>> = (0..n)
            .map(|i| {
                (i..n - 1).fold(MultiPoly::zero(n), |acc, l| {
                    acc.add(&MultiPoly::var(n, l)).expect("arity")
                })
            })
            .collect();
        let simple: Vec<usize> = (0..n - 1).map(|l| rs.index_of(l, l + 1).0).collect();
        let mut out = Self::zero(&rs);
        for (b, l) in d.terms() {
            for (j, q) in l.terms() {
                let drift = (0..n).fold(MultiPoly::zero(n), |acc, i| {
                    acc.add(&q.partial(i)).expect("arity")
                });
                if !drift.is_zero() {
                    return Err(Error::IdentityViolation(
                        "operator is not translation invariant".into(),
                    ));
                }
                let qs = q.compose(&subs)?;
                for (m, c) in qs.terms() {
                    let mut jj = j.clone();
                    for l in 0..n - 1 {
                        jj[simple[l]] += m.0[l] as i32;
                    }
                    out.add(jj, MultiPoly::monomial(n, b.clone(), c.clone()));
                }
            }
        }
        Ok(out)
    }

    pub fn to_operator(&self) -> LaurentWeylOp<UniPoly> {
        let rs = &self.rs;
        let mut op = LaurentWeylOp::zero(rs);
        for (j, p) in &self.terms {
            for (b, c) in p.terms() {
                op.add(b.clone(), Laurent::root_monomial(rs, j.clone(), c.clone()));
            }
        }
        op
    }

    /// Largest index with nonzero coefficient, if it is unique.
    pub fn top_index(&self) -> Option<Vec<i32>> {
        let max: Vec<i32> = (0..self.rs.len())
            .map(|a| self.terms.keys().map(|j| j[a]).max().unwrap_or(0))
            .collect();
        self.terms.contains_key(&max).then_some(max)
    }

    fn p(&self, j: &[i32]) -> Option<&MultiPoly<UniPoly>> {
        self.terms.get(j)
    }
}

/// Which coefficients to use on the mixed-root lines of the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecursionVariant {
    /// Coefficients from direct expansion of `D L(k) e^{tλ} − L(k+r) D e^{tλ}`.
    Derived,
    /// Mixed-root lines with the doubled factors `2(M_α+1)(M_β+1)` and `4(k+r)(M_α+1)` over ordered pairs.
    Printed,
}

fn av(r: &[u32]) -> BigRational {
    let s: u32 = r.iter().sum();
    let mut v = BigRational::from_integer(factorial(s));
    for &x in r {
        v /= BigRational::from_integer(factorial(x));
    }
    if s % 2 == 1 {
        -v
    } else {
        v
    }
}

fn shifted(m: &[i32], adds: &[(usize, i32)]) -> Vec<i32> {
    let mut j = m.to_vec();
    for &(a, x) in adds {
        j[a] += x;
    }
    j
}

/// `λ_α = Σ_i α_i λ_i`.
fn lambda_root(rs: &RootSystemA, a: usize) -> MultiPoly<UniPoly> {
    rs.alpha(a)
}

fn kc(c: i64) -> UniPoly {
    UniPoly::constant(BigRational::from_integer(c.into()), Var::K)
}

/// The seven-line expression at index `𝐌` (a polynomial in the symbol variables λ).
pub fn recursion_residual(
    a: &RootExpansion,
    m: &[i32],
    r: i64,
    variant: RecursionVariant,
) -> MultiPoly<UniPoly> {
    let rs = &a.rs;
    let n = rs.n();
    let k = UniPoly::x(Var::K);
    let kappa = UniPoly::from_ints(&[r, 1], Var::K);
    let mix = if variant == RecursionVariant::Printed {
        2
    } else {
        1
    };
    let mut acc = MultiPoly::<UniPoly>::zero(n);
    let mut add = |p: MultiPoly<UniPoly>| acc = acc.add(&p).expect("arity");
    for al in 0..rs.len() {
        let lam = lambda_root(rs, al);
        let grad = rs.grad(al);
        let (gi, gj) = rs.pair(al);
        let ma = m[al] as i64;
        // line 1
        let mut s = 0u32;
        loop {
            let j = shifted(m, &[(al, 1 + s as i32)]);
            let Some(p) = a.p(&j) else {
                if a.terms.keys().all(|x| x[al] < j[al]) {
                    break;
                }
                s += 1;
                continue;
            };
            for x in 0..=s {
                let mut rr = vec![0u32; n];
                rr[gi] = x;
                rr[gj] = s - x;
                let mut d = p.clone();
                for _ in 0..x {
                    d = d.partial(gi);
                }
                for _ in 0..s - x {
                    d = d.partial(gj);
                }
                if d.is_zero() {
                    continue;
                }
                let mut w = av(&rr);
                for i in 0..n {
                    if rr[i] % 2 == 1 && grad[i] < 0 {
                        w = -w;
                    }
                }
                let coef = k.scale(&(w * rat(2)));
                add(d.mul(&lam).expect("arity").scale(&coef));
            }
            s += 1;
        }
        let norm = rs.inner(al, al);
        if let Some(p) = a.p(&shifted(m, &[(al, 2)])) {
            // lines 2 and 5
            let c2 = kc(-(ma + 2) * (ma + 1) * norm);
            let c5 = kappa.scale(&BigRational::from_integer((-4 * (ma + 2)).into()));
            add(p.scale(&(&c2 + &c5)));
        }
        if let Some(p) = a.p(&shifted(m, &[(al, 1)])) {
            // lines 3 and 6
            let c = &kc(-2 * (ma + 1)) - &kappa.scale(&rat(2));
            add(p.mul(&lam).expect("arity").scale(&c));
        }
        for be in 0..rs.len() {
            if be == al {
                continue;
            }
            let Some(p) = a.p(&shifted(m, &[(al, 1), (be, 1)])) else {
                continue;
            };
            let ip = rs.inner(al, be);
            if ip == 0 {
                continue;
            }
            let mb = m[be] as i64;
            // lines 4 and 7, ordered pairs
            let c4 = kc(-mix * (ma + 1) * (mb + 1) * ip);
            let c7 = kappa.scale(&BigRational::from_integer(
                (-2 * mix * (mb + 1) * ip).into(),
            ));
            add(p.scale(&(&c4 + &c7)));
        }
    }
    acc
}

/// Every index `𝐌` at which some line of the recursion is nonzero.
pub fn recursion_indices(a: &RootExpansion) -> Vec<Vec<i32>> {
    let rs = &a.rs;
    let mut out: BTreeSet<Vec<i32>> = BTreeSet::new();
    for (j, p) in &a.terms {
        let deg = p.degree().unwrap_or(0) as i32;
        for al in 0..rs.len() {
            for s in 0..=deg + 1 {
                out.insert(shifted(j, &[(al, -1 - s)]));
            }
            for be in 0..rs.len() {
                if be != al {
                    out.insert(shifted(j, &[(al, -1), (be, -1)]));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Symbol `e^{−tλ} A e^{tλ}` of an operator, grouped by λ-monomial.
fn symbol(op: &LaurentWeylOp<UniPoly>) -> BTreeMap<Monomial, Laurent<UniPoly>> {
    op.terms().map(|(b, l)| (b.clone(), l.clone())).collect()
}

/// Per-index and collected checks of the recursion.
#[derive(Clone, Debug)]
pub struct RecursionReport {
    pub n: usize,
    pub indices: usize,
    pub nonzero_indices: Vec<Vec<i32>>,
    /// `Σ_𝐌 ᾱ^𝐌 R_𝐌(λ)` vanishes as a function of `t`.
    pub collected_zero: bool,
    /// `Σ_𝐌 ᾱ^𝐌 R_𝐌(λ)` equals the symbol of `shift_defect`.
    pub matches_defect_symbol: bool,
}

impl RecursionReport {
    pub fn per_index_zero(&self) -> bool {
        self.nonzero_indices.is_empty()
    }
}

pub fn check_recursion(a: &RootExpansion, r: i64, variant: RecursionVariant) -> RecursionReport {
    let rs = &a.rs;
    let idx = recursion_indices(a);
    let residuals: Vec<(Vec<i32>, MultiPoly<UniPoly>)> = idx
        .par_iter()
        .map(|m| (m.clone(), recursion_residual(a, m, r, variant)))
        .collect();
    let mut collected: BTreeMap<Monomial, Laurent<UniPoly>> = BTreeMap::new();
    let mut nonzero = Vec::new();
    for (m, res) in &residuals {
        if res.is_zero() {
            continue;
        }
        nonzero.push(m.clone());
        for (mu, c) in res.terms() {
            collected
                .entry(mu.clone())
                .or_insert_with(|| Laurent::zero(rs))
                .add_term(m.clone(), MultiPoly::constant(rs.n(), c.clone()));
        }
    }
    let collected_zero = collected.values().all(|l| l.is_zero(rs));
    let defect = symbol(&shift_defect(&a.to_operator(), r));
    let keys: BTreeSet<&Monomial> = collected.keys().chain(defect.keys()).collect();
    let matches_defect_symbol = keys.into_iter().all(|mu| {
        let x = collected
            .get(mu)
            .cloned()
            .unwrap_or_else(|| Laurent::zero(rs));
        let y = defect.get(mu).cloned().unwrap_or_else(|| Laurent::zero(rs));
        x.add(&y.neg()).is_zero(rs)
    });
    RecursionReport {
        n: rs.n(),
        indices: idx.len(),
        nonzero_indices: nonzero,
        collected_zero,
        matches_defect_symbol,
    }
}

/// `Σ_r AV(r) …` coefficient helper exposed for tests: `AV(r)`.
pub fn av_coefficient(r: &[u32]) -> BigRational {
    av(r)
}

/// Multinomial identity used by `AV`: `Σ_{|r|=s} |r|!/r! = n^s`.
pub fn multinomial_sum(n: usize, s: u32) -> BigInt {
    monomials_of_degree(n, s)
        .iter()
        .map(|m| {
            let mut v = factorial(s);
            for &x in &m.0 {
                v /= factorial(x);
            }
            v
        })
        .sum()
}

/// An expansion of `c(k)·D` on which every per-index residual vanishes.
#[derive(Clone, Debug)]
pub struct BalancedForm {
    pub form: RootExpansion,
    /// Monic multiplier `c(k)` clearing denominators in `k`.
    pub multiplier: UniPoly,
    /// Unknowns of the search (index, symbol monomial pairs).
    pub unknowns: usize,
}

/// Searches for an expansion `D = Σ_𝐣 ᾱ^𝐣 ∂(p_𝐣)` with `lower ≤ 𝐣_α ≤ upper`,
/// `deg p_𝐣 = |𝐣|`, whose per-index residuals all vanish.
///
/// The conditions are linear in the `p_𝐣`. They are solved at sample values
/// of `k` (free variables set to zero), interpolated, and then verified
/// exactly. `Ok(None)` means the system is inconsistent, so no such
/// expansion exists in the box.
pub fn balanced_form(
    d: &LaurentWeylOp<UniPoly>,
    r: i64,
    variant: RecursionVariant,
    lower: i32,
    upper: i32,
    k_degree: usize,
) -> Result<Option<BalancedForm>> {
    let rs = d.roots().clone();
    let n = rs.n();
    let nr = rs.len();
    let clear = -lower;
    if clear < 0 || upper < lower {
        return Err(Error::Guard(
            "balanced_form needs lower <= 0 <= upper".into(),
        ));
    }
    let mut unknowns: Vec<(Vec<i32>, Monomial)> = Vec::new();
    let mut j = vec![lower; nr];
    loop {
        let s: i32 = j.iter().sum();
        if s >= 0 {
            for b in monomials_of_degree(n, s as u32) {
                unknowns.push((j.clone(), b));
            }
        }
        let mut p = 0;
        while p < nr && j[p] == upper {
            j[p] = lower;
            p += 1;
        }
        if p == nr {
            break;
        }
        j[p] += 1;
    }
    let mut pow_cache: HashMap<(usize, u32), MultiPoly> = HashMap::new();
    let mut cleared = |j: &[i32]| -> Result<MultiPoly> {
        let mut t = MultiPoly::one(n);
        for (a, &ja) in j.iter().enumerate() {
            let e = ja + clear;
            if e < 0 {
                return Err(Error::Guard(format!(
                    "lower bound {lower} too small for index {j:?}"
                )));
            }
            if e > 0 {
                let pw = pow_cache
                    .entry((a, e as u32))
                    .or_insert_with(|| rs.alpha::<BigRational>(a).pow(e as u32))
                    .clone();
                t = t.mul(&pw)?;
            }
        }
        Ok(t)
    };

    // Row keys: representation rows (derivative, t-monomial) and residual
    // rows (index, λ-monomial).
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
    enum Row {
        Rep(Monomial, Monomial),
        Res(Vec<i32>, Monomial),
    }
    let mut rhs: BTreeMap<Row, UniPoly> = BTreeMap::new();
    for (b, l) in d.terms() {
        for (jj, q) in l.terms() {
            let c = cleared(jj)?;
            for (mq, cq) in q.terms() {
                for (mc, cc) in c.terms() {
                    let key = Row::Rep(b.clone(), mq.mul(mc));
                    let e = rhs.entry(key).or_insert_with(|| UniPoly::zero_in(Var::K));
                    *e = &*e + &cq.scale(cc);
                }
            }
        }
    }
    let mut columns: Vec<BTreeMap<Row, UniPoly>> = Vec::with_capacity(unknowns.len());
    let one_k = UniPoly::constant(BigRational::one(), Var::K);
    for (jj, b) in &unknowns {
        let mut col: BTreeMap<Row, UniPoly> = BTreeMap::new();
        for (mc, cc) in cleared(jj)?.terms() {
            col.insert(
                Row::Rep(b.clone(), mc.clone()),
                UniPoly::constant(cc.clone(), Var::K),
            );
        }
        let mut single = RootExpansion::zero(&rs);
        single.add(jj.clone(), MultiPoly::monomial(n, b.clone(), one_k.clone()));
        for m in recursion_indices(&single) {
            let res = recursion_residual(&single, &m, r, variant);
            for (mu, c) in res.terms() {
                col.insert(Row::Res(m.clone(), mu.clone()), c.clone());
            }
        }
        columns.push(col);
    }
    let keys: Vec<Row> = {
        let mut ks: BTreeSet<Row> = rhs.keys().cloned().collect();
        for c in &columns {
            ks.extend(c.keys().cloned());
        }
        ks.into_iter().collect()
    };
    let index: HashMap<&Row, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let nu = unknowns.len();

    // Homogeneous system in (x, c) with A x − c b = 0; solutions with c ≠ 0
    // are the expansions. The canonical one comes from the reduced basis with
    // the c column ordered first.
    let solve = |k: &BigRational| -> Option<Vec<BigRational>> {
        let mut rows: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); nu + 1]; keys.len()];
        for (u, col) in columns.iter().enumerate() {
            for (row, c) in col {
                rows[index[row]][u + 1] = c.eval(k);
            }
        }
        for (row, c) in &rhs {
            rows[index[row]][0] = -c.eval(k);
        }
        let int_rows: Vec<Vec<BigInt>> = rows
            .iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| {
                let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                r.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        let ns = modular_nullspace(nu + 1, &int_rows);
        if ns.iter().all(|v| v[0].is_zero()) {
            return None;
        }
        let basis = RatMatrix::from_rows(ns).ok()?;
        let (red, pivots) = basis.rref();
        if pivots.first() != Some(&0) {
            return None;
        }
        Some(red.row(0)[1..].to_vec())
    };
    let samples = sample_points(k_degree + 2);
    let solved: Vec<Option<Vec<BigRational>>> = samples.par_iter().map(solve).collect();
    let Some(solved) = solved.into_iter().collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    let mut nums = Vec::with_capacity(nu);
    let mut dens = Vec::with_capacity(nu);
    for u in 0..nu {
        let pts: Vec<(BigRational, BigRational)> = samples
            .iter()
            .zip(&solved)
            .map(|(k, x)| (k.clone(), x[u].clone()))
            .collect();
        match interpolate(&pts, k_degree, Var::K) {
            Ok(p) => {
                nums.push(p);
                dens.push(one_k.clone());
            }
            Err(Error::DegreeBoundViolated { .. }) => {
                let half = k_degree / 2;
                let (p, q) = interpolate_rational(&pts, half, half, Var::K)?;
                nums.push(p);
                dens.push(q);
            }
            Err(e) => return Err(e),
        }
    }
    let mut lcm = one_k.clone();
    for q in &dens {
        let g = lcm.gcd(q);
        lcm = (&lcm * q).div_rem(&g)?.0;
    }
    let lcm = lcm.monic();
    let mut form = RootExpansion::zero(&rs);
    for (u, (jj, b)) in unknowns.iter().enumerate() {
        let c = &nums[u] * &lcm.div_rem(&dens[u])?.0;
        if !c.is_zero() {
            form.add(jj.clone(), MultiPoly::monomial(n, b.clone(), c));
        }
    }
    if !form.to_operator().equals(&d.scale(&lcm)) {
        return Err(Error::IdentityViolation(
            "interpolated expansion does not represent D".into(),
        ));
    }
    if !check_recursion(&form, r, variant).per_index_zero() {
        return Err(Error::IdentityViolation(
            "interpolated expansion leaves nonzero residuals".into(),
        ));
    }
    Ok(Some(BalancedForm {
        form,
        multiplier: lcm,
        unknowns: nu,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ct_formula_values() {
        assert_eq!(ct_formula(1), UniPoly::from_ints(&[1], Var::K));
        assert_eq!(ct_formula(2), UniPoly::from_ints(&[6, 4], Var::K));
        let n3 = &(&UniPoly::from_ints(&[18, 12], Var::K) * &UniPoly::from_ints(&[4, 3], Var::K))
            * &UniPoly::from_ints(&[5, 3], Var::K);
        assert_eq!(ct_formula(3), n3);
    }

    #[test]
    fn trivial_defects() {
        let rs = RootSystemA::new(2);
        let id = LaurentWeylOp::<UniPoly>::identity(&rs);
        assert!(shift_defect(&id, 0).is_zero());
        let l = crate::radial::l_rational(&rs);
        assert!(shift_defect(&l, 0).is_zero());
        assert!(!shift_defect(&LaurentWeylOp::d(&rs, 0), -1).is_zero());
    }

    #[test]
    fn orbit_basis_is_invariant() {
        let ans = ShiftAnsatz::new(3, -1, 2, 1);
        let rs = ans.roots();
        for u in 0..ans.unknowns() {
            let op = ans.element(u);
            for (p, _) in permutations(3) {
                assert!(op.permute(&p).equals(&op));
            }
        }
        assert!(ans.unknowns() > 0);
        assert_eq!(rs.len(), 3);
    }

    #[test]
    fn generator_n2() {
        let g = solve_shift_generator(2, -1, &ShiftBounds::default_for(2)).unwrap();
        assert_eq!(g.order, 1);
        assert_eq!(g.nullspace_dim, 1);
        let ct = constant_term(&g.operator);
        assert_eq!(ct, UniPoly::from_ints(&[-2, 4], Var::K));
        let v = verify_generator(&g);
        assert!(v.all(), "{v:?}");
        let rep = shift_report(&g, &v);
        assert!(rep.matches_ct_formula);
        assert_eq!(rep.pN_factors, vec!["t1-t2".to_string()]);
    }

    #[test]
    fn recursion_n2() {
        let g = solve_shift_generator(2, -1, &ShiftBounds::default_for(2)).unwrap();
        let a = RootExpansion::from_operator(&g.operator).unwrap();
        assert_eq!(a.top_index(), Some(vec![1]));
        let rep = check_recursion(&a, -1, RecursionVariant::Derived);
        assert!(rep.per_index_zero(), "{:?}", rep.nonzero_indices);
        assert!(rep.collected_zero && rep.matches_defect_symbol);
        let mut bumped = a.clone();
        let j = vec![0];
        bumped.add(j, MultiPoly::constant(2, UniPoly::from_ints(&[1], Var::K)));
        let rep = check_recursion(&bumped, -1, RecursionVariant::Derived);
        assert!(!rep.per_index_zero());
        assert!(rep.matches_defect_symbol);
    }

    #[test]
    fn balanced_form_n2() {
        let g = solve_shift_generator(2, -1, &ShiftBounds::default_for(2)).unwrap();
        let b = balanced_form(&g.operator, -1, RecursionVariant::Derived, 0, 1, 4)
            .unwrap()
            .unwrap();
        assert!(b.multiplier.is_constant());
        assert!(b.form.to_operator().equals(&g.operator));
        assert_eq!(b.form.top_index(), Some(vec![1]));
    }

    #[test]
    fn av_values() {
        assert_eq!(av_coefficient(&[1, 0]), rat(-1));
        assert_eq!(av_coefficient(&[1, 1]), rat(2));
        assert_eq!(multinomial_sum(3, 2), BigInt::from(9));
    }
}
