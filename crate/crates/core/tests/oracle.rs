//! Known values checked against independent closed forms.

use bfun_core::arith::{rat, ratio, MultiPoly, RatMatrix, UniPoly, Var};
use bfun_core::bernstein::{bhat_poly, theorem_poly, verify_bernstein_identity, Method};
use bfun_core::cyclic::{
    cyclic_det, f_numeric, is_cyclic, lower_shift, unit_vector, CyclicPairSpace,
};
use bfun_core::radial::verify_radial_identity;
use bfun_core::shift::{
    constant_term, ct_formula, solve_shift_generator, verify_generator, ShiftBounds,
};

fn k_poly(c: &[i64]) -> UniPoly {
    UniPoly::from_ints(c, Var::K)
}

#[test]
fn bhat_n1_is_s_plus_one() {
    let r = bhat_poly(1, Method::Jets).unwrap();
    assert_eq!(r.bhat, k_poly(&[1, 1]));
    assert!(r.matches_theorem());
}

#[test]
fn bhat_n2_both_methods() {
    let expect = k_poly(&[6, 16, 14, 4]);
    for m in [Method::Jets, Method::Symbolic] {
        let r = bhat_poly(2, m).unwrap();
        assert_eq!(r.bhat, expect, "{m}");
        assert_eq!(r.alpha, rat(4));
        assert_eq!(r.roots, vec![(ratio(-3, 2), 1), (rat(-1), 2)]);
    }
}

#[test]
fn bhat_n3_closed_product() {
    let expect =
        &(&(&k_poly(&[1, 1]).pow(3) * &k_poly(&[3, 2])) * &k_poly(&[4, 3])) * &k_poly(&[5, 3]);
    let expect = expect.scale(&rat(6));
    let r = bhat_poly(3, Method::Jets).unwrap();
    assert_eq!(r.bhat, expect);
    assert_eq!(r.alpha, rat(108));
}

#[test]
fn theorem_n4_value_at_zero() {
    let t = theorem_poly(4);
    assert_eq!(t.alpha, rat(4 * 27 * 256));
    assert_eq!(t.bhat().eval(&rat(0)), rat(302400));
    assert_eq!(t.bhat(), &t.b1 * &t.b2);
}

#[test]
fn symbolic_identity_n2_k2() {
    let c = verify_bernstein_identity(2, 2).unwrap();
    assert_eq!(c.bhat_k, rat(126));
    assert!(c.holds());
}

#[test]
fn f_for_n2_matches_krylov_determinant() {
    let f = cyclic_det(2).unwrap();
    // det [v, Mv] with M = [[m11, m12], [m21, m22]], variables m11 m12 m21 m22 v1 v2
    let expect = MultiPoly::from_int_terms(
        6,
        &[
            (1, &[0, 0, 1, 0, 2, 0]),
            (1, &[0, 0, 0, 1, 1, 1]),
            (-1, &[1, 0, 0, 0, 1, 1]),
            (-1, &[0, 1, 0, 0, 0, 2]),
        ],
    );
    assert_eq!(f, expect);
    let sp = CyclicPairSpace::new(2);
    let m = RatMatrix::from_ints(&[&[2, -1], &[3, 5]]);
    let v = vec![rat(1), ratio(-2, 3)];
    assert_eq!(
        f.eval_rational(&sp.point(&m, &v).unwrap()).unwrap(),
        f_numeric(&m, &v).unwrap()
    );
}

#[test]
fn lower_shift_is_cyclic() {
    for n in 1..=4 {
        assert!(is_cyclic(&lower_shift(n), &unit_vector(n, 0)).unwrap());
        assert!(n == 1 || !is_cyclic(&lower_shift(n), &unit_vector(n, n - 1)).unwrap());
    }
}

#[test]
fn radial_identities_n2_n3() {
    for n in [2, 3] {
        let rep = verify_radial_identity(n).unwrap();
        let failing: Vec<&str> = rep
            .checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(
            failing,
            vec![bfun_core::radial::CHECK_PPLUS_STATED],
            "n={n}"
        );
    }
}

#[test]
fn ct_formula_n3() {
    let expect = &(&k_poly(&[18, 12]) * &k_poly(&[4, 3])) * &k_poly(&[5, 3]);
    assert_eq!(ct_formula(3), expect);
}

#[test]
fn shift_generator_n2() {
    let g = solve_shift_generator(2, -1, &ShiftBounds::default_for(2)).unwrap();
    assert_eq!((g.order, g.pole, g.nullspace_dim), (1, 0, 1));
    assert_eq!(constant_term(&g.operator), k_poly(&[-2, 4]));
    assert!(verify_generator(&g).all());
    let shifted = constant_term(&g.operator).shift(&rat(2)).monic();
    assert_eq!(shifted, ct_formula(2).monic());
}
