//! Exact univariate interpolation with a redundant-node consistency check.

use num_rational::BigRational;
use num_traits::Zero;

use super::coeff::display_rational;
use super::unipoly::{UniPoly, Var};
use crate::error::{Error, Result};

/// Unique polynomial of degree ≤ `degree_bound` through the first
/// `degree_bound + 1` points; any further points must lie on it.
pub fn interpolate(
    points: &[(BigRational, BigRational)],
    degree_bound: usize,
    var: Var,
) -> Result<UniPoly> {
    let needed = degree_bound + 1;
    if points.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            got: points.len(),
        });
    }
    let (head, extra) = points.split_at(needed);
    for i in 0..head.len() {
        for j in 0..i {
            if head[i].0 == head[j].0 {
                return Err(Error::TooFewPoints {
                    needed,
                    got: distinct_count(head),
                });
            }
        }
    }
    // Newton divided differences, then expand the Newton form.
    let xs: Vec<&BigRational> = head.iter().map(|p| &p.0).collect();
    let mut dd: Vec<BigRational> = head.iter().map(|p| p.1.clone()).collect();
    for level in 1..needed {
        for i in (level..needed).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut poly = UniPoly::zero_in(var);
    for i in (0..needed).rev() {
        let lin = UniPoly::linear(-xs[i].clone(), var);
        poly = &(&poly * &lin) + &UniPoly::constant(dd[i].clone(), var);
    }
    for (x, y) in extra {
        if poly.eval(x) != *y {
            return Err(Error::DegreeBoundViolated {
                bound: degree_bound,
                abscissa: display_rational(x),
            });
        }
    }
    Ok(poly)
}

fn distinct_count(points: &[(BigRational, BigRational)]) -> usize {
    let mut xs: Vec<&BigRational> = points.iter().map(|p| &p.0).collect();
    xs.sort();
    xs.dedup();
    xs.len()
}

/// Rational-function interpolation `num/den` with `deg num ≤ dn`, `deg den ≤ dd`,
/// found by solving the linearized system `num(x) − y·den(x) = 0`; the extra
/// points beyond `dn + dd + 1` are consistency checks.
pub fn interpolate_rational(
    points: &[(BigRational, BigRational)],
    dn: usize,
    dd: usize,
    var: Var,
) -> Result<(UniPoly, UniPoly)> {
    use super::matrix::RatMatrix;
    let unknowns = dn + dd + 2;
    let needed = unknowns - 1;
    if points.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            got: points.len(),
        });
    }
    let mut m = RatMatrix::zeros(points.len(), unknowns);
    for (r, (x, y)) in points.iter().enumerate() {
        let mut xp = BigRational::from_integer(1.into());
        for i in 0..=dn.max(dd) {
            if i <= dn {
                m.set(r, i, xp.clone());
            }
            if i <= dd {
                m.set(r, dn + 1 + i, -(y * &xp));
            }
            xp = &xp * x;
        }
    }
    let ns = m.nullspace();
    let v = ns.first().ok_or(Error::DegreeBoundViolated {
        bound: dn,
        abscissa: "rational reconstruction".into(),
    })?;
    let num = UniPoly::new(v[..=dn].to_vec(), var);
    let den = UniPoly::new(v[dn + 1..].to_vec(), var);
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    for (x, y) in points {
        let d = den.eval(x);
        if d.is_zero() || num.eval(x) / d != *y {
            return Err(Error::DegreeBoundViolated {
                bound: dn,
                abscissa: display_rational(x),
            });
        }
    }
    Ok((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::coeff::rat;

    fn pts(v: &[(i64, i64)]) -> Vec<(BigRational, BigRational)> {
        v.iter().map(|&(x, y)| (rat(x), rat(y))).collect()
    }

    #[test]
    fn cubic_b_function_for_n2() {
        let p = interpolate(&pts(&[(0, 6), (1, 40), (2, 126), (3, 288)]), 3, Var::K).unwrap();
        assert_eq!(p, UniPoly::from_ints(&[6, 16, 14, 4], Var::K));
    }

    #[test]
    fn linear_and_constant() {
        let p = interpolate(&pts(&[(0, 1), (1, 2)]), 1, Var::K).unwrap();
        assert_eq!(p, UniPoly::from_ints(&[1, 1], Var::K));
        let c = interpolate(&pts(&[(0, 7), (1, 7)]), 0, Var::K).unwrap();
        assert_eq!(c, UniPoly::from_ints(&[7], Var::K));
    }

    #[test]
    fn redundant_node_catches_wrong_bound() {
        let err = interpolate(&pts(&[(0, 0), (1, 1), (2, 4)]), 1, Var::K).unwrap_err();
        assert!(matches!(err, Error::DegreeBoundViolated { .. }));
        assert!(interpolate(&pts(&[(0, 0)]), 1, Var::K).is_err());
        assert!(interpolate(&pts(&[(0, 0), (0, 1)]), 1, Var::K).is_err());
    }

    #[test]
    fn rational_reconstruction() {
        // y = 1/(x+1)
        let p: Vec<_> = (0..6)
            .map(|x| (rat(x), BigRational::new(1.into(), (x + 1).into())))
            .collect();
        let (n, d) = interpolate_rational(&p, 0, 1, Var::K).unwrap();
        let r = crate::arith::RationalFunction::new(n, d).unwrap();
        assert_eq!(r.den(), &UniPoly::from_ints(&[1, 1], Var::K));
    }
}
