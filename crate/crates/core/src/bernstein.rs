//! The polynomial `b̂` with `S f^{k+1} = b̂(k) f^k`, computed at integer `k`
//! and interpolated, together with the closed form it is compared against.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

use crate::arith::coeff::{factorial, format_rational};
use crate::arith::{
    interpolate, jet_of_poly, simplex_size, IdealJet, IdealSpace, Jet, MultiPoly, UniPoly, Var,
};
use crate::cyclic::{cyclic_det_with_limit, lower_shift, unit_vector, CyclicPairSpace};
use crate::error::{Error, Result};
use crate::weyl::WeylOp;

/// Dense jets are used up to this many slots; beyond it the divisor-closed
/// truncation takes over.
pub const DENSE_JET_LIMIT: u128 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Symbolic,
    Jets,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Symbolic => "symbolic",
            Method::Jets => "jets",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symbolic" => Ok(Method::Symbolic),
            "jets" | "jet" => Ok(Method::Jets),
            _ => Err(Error::Parse(format!("unknown method '{s}'"))),
        }
    }
}

/// Default jet base point `(J, e₁)`, where `f = 1`.
pub fn default_base(n: usize) -> Vec<BigRational> {
    CyclicPairSpace::new(n)
        .point(&lower_shift(n), &unit_vector(n, 0))
        .expect("shapes agree")
}

/// `S f^{k+1} / f^k` computed as polynomials; the quotient must be constant.
pub fn bhat_symbolic(f: &MultiPoly, k: u32) -> Result<BigRational> {
    let s = WeylOp::from_poly_derivatives(f);
    let lhs = s.apply(&f.pow(k + 1))?;
    let q = lhs.exact_div(&f.pow(k))?;
    q.as_constant()
        .ok_or_else(|| Error::TheoremViolation(format!("S f^{} / f^{k} is not constant", k + 1)))
}

enum Backend {
    Dense { f: Jet },
    Ideal { f: IdealJet },
}

/// Evaluates `b̂(k)` from Taylor data of `f^{k+1}` at one base point.
///
/// Since `S` is constant-coefficient, `(S g)(x₀) = Σ c_e · e! · [y^e] g(x₀ + y)`
/// and only the Taylor coefficients on the support of `f` are needed.
pub struct JetEvaluator {
    n: usize,
    f_poly: MultiPoly,
    f_at_base: BigRational,
    backend: Backend,
    /// `f^{j}` for the largest `j` computed so far, with `j`.
    power: Option<(u32, Backend)>,
    weights: Vec<(Vec<u32>, BigRational)>,
}

impl JetEvaluator {
    pub fn new(f: MultiPoly, n: usize, base: &[BigRational]) -> Result<Self> {
        let order = f.degree().unwrap_or(0);
        let f_at_base = f.eval_rational(base)?;
        if f_at_base.is_zero() {
            return Err(Error::BadBasePoint);
        }
        let weights: Vec<(Vec<u32>, BigRational)> = f
            .terms()
            .map(|(m, c)| (m.0.clone(), c * BigRational::from_integer(m.factorial())))
            .collect();
        let backend = if simplex_size(f.arity(), order) <= DENSE_JET_LIMIT {
            Backend::Dense {
                f: jet_of_poly(&f, base, order)?,
            }
        } else {
            let space =
                IdealSpace::from_generators(f.arity(), weights.iter().map(|(e, _)| e.as_slice()))?;
            Backend::Ideal {
                f: IdealJet::of_poly(space, &f, base)?,
            }
        };
        Ok(JetEvaluator {
            n,
            f_poly: f,
            f_at_base,
            backend,
            power: None,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> &MultiPoly {
        &self.f_poly
    }

    /// "dense" or "ideal", with slot count.
    pub fn layout(&self) -> (&'static str, usize) {
        match &self.backend {
            Backend::Dense { f } => ("dense", f.space().len()),
            Backend::Ideal { f } => ("ideal", f.space().len()),
        }
    }

    fn mul(a: &Backend, b: &Backend) -> Result<Backend> {
        Ok(match (a, b) {
            (Backend::Dense { f: x }, Backend::Dense { f: y }) => Backend::Dense { f: x.mul(y)? },
            (Backend::Ideal { f: x }, Backend::Ideal { f: y }) => Backend::Ideal { f: x.mul(y)? },
            _ => unreachable!("one backend per evaluator"),
        })
    }

    fn clone_backend(b: &Backend) -> Backend {
        match b {
            Backend::Dense { f } => Backend::Dense { f: f.clone() },
            Backend::Ideal { f } => Backend::Ideal { f: f.clone() },
        }
    }

    /// `b̂(k)`. Powers of `f` are cached, so increasing `k` is cheapest.
    pub fn eval(&mut self, k: u32) -> Result<BigRational> {
        let want = k + 1;
        let (mut j, mut p) = match self.power.take() {
            Some((j, p)) if j <= want => (j, p),
            _ => (1, Self::clone_backend(&self.backend)),
        };
        while j < want {
            p = Self::mul(&p, &self.backend)?;
            j += 1;
        }
        let mut sum = BigRational::zero();
        for (e, w) in &self.weights {
            let c = match &p {
                Backend::Dense { f } => f.coeff(e),
                Backend::Ideal { f } => f.coeff(e),
            };
            if !c.is_zero() {
                sum += w * c;
            }
        }
        self.power = Some((j, p));
        Ok(sum / self.f_at_base.pow(k as i32))
    }
}

/// `b̂(k)` with the given method, default base point for jets.
pub fn bhat_eval(n: usize, k: u32, method: Method) -> Result<BigRational> {
    let f = cyclic_det_with_limit(n, n.max(1))?;
    match method {
        Method::Symbolic => bhat_symbolic(&f, k),
        Method::Jets => JetEvaluator::new(f, n, &default_base(n))?.eval(k),
    }
}

/// Closed-form data for the theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremPoly {
    pub n: usize,
    /// Monic `b̃(s) = ∏_{0≤c<d≤n} (s + 1 + c/d)`.
    pub btilde: UniPoly,
    /// `α_n = ∏_{d=1}^n d^d`.
    pub alpha: BigRational,
    /// `n!(s+1)^n`
    pub b1: UniPoly,
    /// `∏_{1≤c<d≤n} (d(s+1) + c)`
    pub b2: UniPoly,
}

impl TheoremPoly {
    pub fn bhat(&self) -> UniPoly {
        self.btilde.scale(&self.alpha)
    }

    /// Roots `−1 − c/d` with multiplicity, ascending.
    pub fn roots(&self) -> Vec<(BigRational, usize)> {
        self.btilde.rational_roots().0
    }
}

pub fn theorem_poly(n: usize) -> TheoremPoly {
    let one = BigRational::one();
    let mut btilde = UniPoly::constant(one.clone(), Var::K);
    for d in 1..=n as i64 {
        for c in 0..d {
            let shift = &one + BigRational::new(c.into(), d.into());
            btilde = &btilde * &UniPoly::linear(shift, Var::K);
        }
    }
    let alpha = (1..=n as u32).fold(BigInt::one(), |acc, d| acc * BigInt::from(d).pow(d));
    let b1 = UniPoly::linear(one.clone(), Var::K)
        .pow(n as u32)
        .scale(&BigRational::from_integer(factorial(n as u32)));
    let mut b2 = UniPoly::constant(one, Var::K);
    for d in 2..=n as i64 {
        for c in 1..d {
            // d(k+1) + c
            b2 = &b2 * &UniPoly::from_ints(&[d + c, d], Var::K);
        }
    }
    TheoremPoly {
        n,
        btilde,
        alpha: BigRational::from_integer(alpha),
        b1,
        b2,
    }
}

/// Computed `b̂` with its factorization and comparison to the closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFunctionResult {
    pub n: usize,
    pub method: Method,
    pub samples: Vec<(u32, BigRational)>,
    pub bhat: UniPoly,
    /// Rational roots of `b̂` with multiplicity.
    pub roots: Vec<(BigRational, usize)>,
    /// Part of `b̂` without rational roots (constant when fully split).
    pub cofactor: UniPoly,
    /// Leading coefficient of `b̂`.
    pub alpha: BigRational,
    pub theorem: TheoremPoly,
}

impl BFunctionResult {
    pub fn monic(&self) -> UniPoly {
        self.bhat.monic()
    }

    /// Monic part equals `b̃` exactly.
    pub fn matches_theorem(&self) -> bool {
        self.monic() == self.theorem.btilde
    }

    /// `alpha / α_n`; 1 when the constants agree too.
    pub fn constant_ratio(&self) -> BigRational {
        &self.alpha / &self.theorem.alpha
    }

    pub fn report(&self) -> BernsteinReport {
        BernsteinReport {
            n: self.n,
            method: self.method,
            samples: self
                .samples
                .iter()
                .map(|(k, v)| (*k, format_rational(v)))
                .collect(),
            bhat_coeffs: self.bhat.coeffs().iter().map(format_rational).collect(),
            btilde_roots: self
                .roots
                .iter()
                .map(|(r, m)| {
                    (
                        r.numer().to_i64().unwrap_or(i64::MIN),
                        r.denom().to_i64().unwrap_or(i64::MIN),
                        *m,
                    )
                })
                .collect(),
            alpha: format_rational(&self.alpha),
            matches_theorem: self.matches_theorem(),
            constant_ratio: format_rational(&self.constant_ratio()),
        }
    }
}

/// JSON shape of a b-function run. Rationals are `"num/den"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BernsteinReport {
    pub n: usize,
    pub method: Method,
    pub samples: Vec<(u32, String)>,
    pub bhat_coeffs: Vec<String>,
    pub btilde_roots: Vec<(i64, i64, usize)>,
    pub alpha: String,
    pub matches_theorem: bool,
    pub constant_ratio: String,
}

/// Samples `b̂` at `k = 0..=m+1` (`m = n(n+1)/2`), interpolates with degree
/// bound `m`, factors, and compares against the closed form.
pub fn bhat_poly(n: usize, method: Method) -> Result<BFunctionResult> {
    bhat_poly_with_limit(n, method, 3)
}

pub fn bhat_poly_with_limit(n: usize, method: Method, max_n: usize) -> Result<BFunctionResult> {
    let f = cyclic_det_with_limit(n, max_n)?;
    let m = n * (n + 1) / 2;
    let ks: Vec<u32> = (0..=(m as u32 + 1)).collect();
    let samples: Vec<(u32, BigRational)> = match method {
        Method::Symbolic => {
            // Incremental powers keep this to one multiplication per node.
            let s = WeylOp::from_poly_derivatives(&f);
            let mut fk = MultiPoly::one(f.arity());
            let mut out = Vec::new();
            for &k in &ks {
                let fk1 = fk.mul(&f)?;
                let q = s.apply(&fk1)?.exact_div(&fk)?;
                let v = q.as_constant().ok_or_else(|| {
                    Error::TheoremViolation(format!("S f^{} / f^{k} is not constant", k + 1))
                })?;
                out.push((k, v));
                fk = fk1;
            }
            out
        }
        Method::Jets => {
            let mut ev = JetEvaluator::new(f, n, &default_base(n))?;
            ks.iter()
                .map(|&k| ev.eval(k).map(|v| (k, v)))
                .collect::<Result<_>>()?
        }
    };
    assemble(n, method, samples, m)
}

/// Rebuilds a result from stored samples `b̂(0..=m+1)`.
pub fn bfunction_from_samples(
    n: usize,
    method: Method,
    samples: Vec<(u32, BigRational)>,
) -> Result<BFunctionResult> {
    assemble(n, method, samples, n * (n + 1) / 2)
}

fn assemble(
    n: usize,
    method: Method,
    samples: Vec<(u32, BigRational)>,
    m: usize,
) -> Result<BFunctionResult> {
    for (k, v) in &samples {
        if !v.is_positive() {
            return Err(Error::TheoremViolation(format!(
                "b-hat({k}) = {} is not positive",
                format_rational(v)
            )));
        }
    }
    let pts: Vec<(BigRational, BigRational)> = samples
        .iter()
        .map(|(k, v)| (BigRational::from_integer((*k).into()), v.clone()))
        .collect();
    let bhat = interpolate(&pts, m, Var::K)?;
    let (roots, cofactor) = bhat.rational_roots();
    let alpha = bhat.leading();
    Ok(BFunctionResult {
        n,
        method,
        samples,
        bhat,
        roots,
        cofactor,
        alpha,
        theorem: theorem_poly(n),
    })
}

/// Term-by-term residual `S f^{k+1} − b̂(k) f^k`.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub n: usize,
    pub k: u32,
    pub bhat_k: BigRational,
    pub residual: MultiPoly,
    /// Number of terms of `S f^{k+1}` compared.
    pub terms: usize,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Default guards: `n ≤ 2`, `k ≤ 3`.
pub fn verify_bernstein_identity(n: usize, k: u32) -> Result<IdentityCheck> {
    verify_bernstein_identity_with_limits(n, k, 2, 3)
}

pub fn verify_bernstein_identity_with_limits(
    n: usize,
    k: u32,
    max_n: usize,
    max_k: u32,
) -> Result<IdentityCheck> {
    if k > max_k {
        return Err(Error::Guard(format!(
            "full symbolic identity for k={k} exceeds the limit k <= {max_k}"
        )));
    }
    let f = cyclic_det_with_limit(n, max_n)?;
    let s = WeylOp::from_poly_derivatives(&f);
    let fk = f.pow(k);
    let lhs = s.apply(&fk.mul(&f)?)?;
    let bhat_k = theorem_poly(n)
        .bhat()
        .eval(&BigRational::from_integer(k.into()));
    let residual = lhs.sub(&fk.scale(&bhat_k))?;
    Ok(IdentityCheck {
        n,
        k,
        bhat_k,
        terms: lhs.len(),
        residual,
    })
}

/// Memory estimate, in slots, for the jet evaluation of `b̂` at size `n`:
/// the dense simplex `C(n²+n+m, m)`.
pub fn dense_jet_slots(n: usize) -> u128 {
    simplex_size(n * n + n, (n * (n + 1) / 2) as u32)
}

/// Slot count of the divisor-closed layout (needs `f`).
pub fn ideal_jet_slots(f: &MultiPoly) -> Result<usize> {
    let gens: Vec<Vec<u32>> = f.terms().map(|(m, _)| m.0.clone()).collect();
    Ok(IdealSpace::from_generators(f.arity(), gens.iter().map(|g| g.as_slice()))?.len())
}

/// Spot values `b̂(k)` for given `k` by jets, without interpolation.
pub fn bhat_spot(n: usize, ks: &[u32], max_n: usize) -> Result<Vec<(u32, BigRational)>> {
    let f = cyclic_det_with_limit(n, max_n)?;
    let mut ev = JetEvaluator::new(f, n, &default_base(n))?;
    let mut sorted = ks.to_vec();
    sorted.sort_unstable();
    sorted.iter().map(|&k| ev.eval(k).map(|v| (k, v))).collect()
}

/// `b̂(k)` by jets at each of several base points.
pub fn bhat_at_bases(n: usize, k: u32, bases: &[Vec<BigRational>]) -> Result<Vec<BigRational>> {
    let f = cyclic_det_with_limit(n, 3)?;
    bases
        .iter()
        .map(|b| JetEvaluator::new(f.clone(), n, b)?.eval(k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn small_values() {
        assert_eq!(bhat_eval(1, 5, Method::Symbolic).unwrap(), rat(6));
        assert_eq!(bhat_eval(1, 5, Method::Jets).unwrap(), rat(6));
        assert_eq!(bhat_eval(2, 0, Method::Symbolic).unwrap(), rat(6));
        assert_eq!(bhat_eval(2, 1, Method::Jets).unwrap(), rat(40));
        assert_eq!(bhat_eval(2, 2, Method::Jets).unwrap(), rat(126));
    }

    #[test]
    fn theorem_constants() {
        let t1 = theorem_poly(1);
        assert_eq!(t1.btilde, UniPoly::from_ints(&[1, 1], Var::K));
        assert_eq!(t1.alpha, rat(1));
        let t2 = theorem_poly(2);
        assert_eq!(t2.alpha, rat(4));
        assert_eq!(t2.bhat(), UniPoly::from_ints(&[6, 16, 14, 4], Var::K));
        assert_eq!(&t2.b1 * &t2.b2, t2.bhat());
        let t4 = theorem_poly(4);
        assert_eq!(t4.alpha, rat(27648));
        let zero = rat(0);
        assert_eq!(t4.bhat().eval(&zero), rat(302400));
        assert_eq!((&t4.b1 * &t4.b2).eval(&zero), rat(302400));
    }

    #[test]
    fn interpolated_n1_n2() {
        let r1 = bhat_poly(1, Method::Jets).unwrap();
        assert_eq!(r1.bhat, UniPoly::from_ints(&[1, 1], Var::K));
        assert!(r1.matches_theorem());
        let r2 = bhat_poly(2, Method::Symbolic).unwrap();
        assert_eq!(r2.bhat, UniPoly::from_ints(&[6, 16, 14, 4], Var::K));
        assert!(r2.matches_theorem());
        assert_eq!(r2.constant_ratio(), rat(1));
        let rep = r2.report();
        assert_eq!(rep.btilde_roots, vec![(-3, 2, 1), (-1, 1, 2)]);
    }

    #[test]
    fn identity_n2() {
        let c = verify_bernstein_identity(2, 1).unwrap();
        assert!(c.holds());
        assert_eq!(c.bhat_k, rat(40));
        assert!(verify_bernstein_identity(3, 0).is_err());
    }
}
