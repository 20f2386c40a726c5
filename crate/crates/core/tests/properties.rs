//! Property suites over random inputs.

use bfun_core::arith::jet::jet_of_poly_in;
use bfun_core::arith::{
    interpolate, modular_nullspace, ratio, BigRational, JetSpace, Monomial, MultiPoly, RatMatrix,
    UniPoly, Var,
};
use bfun_core::radial::{Laurent, LaurentWeylOp, RootSystemA};
use bfun_core::shift::{check_recursion, RecursionVariant, RootExpansion};
use bfun_core::weyl::WeylOp;
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly(arity: usize, max_exp: u32) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((-4i64..=4, prop::collection::vec(0..=max_exp, arity)), 0..5).prop_map(
        move |ts| {
            let terms: Vec<(i64, &[u32])> = ts.iter().map(|(c, e)| (*c, e.as_slice())).collect();
            MultiPoly::from_int_terms(arity, &terms)
        },
    )
}

fn weyl(arity: usize) -> impl Strategy<Value = WeylOp> {
    prop::collection::vec(
        (
            -3i64..=3,
            prop::collection::vec(0..=2u32, arity),
            prop::collection::vec(0..=2u32, arity),
        ),
        0..4,
    )
    .prop_map(move |ts| {
        let mut op = WeylOp::zero(arity);
        for (c, a, b) in ts {
            op.add_term(
                Monomial(a),
                Monomial(b),
                &BigRational::from_integer(c.into()),
            );
        }
        op
    })
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-5i64..=5, 1i64..=4).prop_map(|(a, b)| ratio(a, b))
}

/// Operator with polynomial coefficients in `t` and root powers in `[lo, 1]`.
fn laurent_op(n: usize, lo: i32) -> impl Strategy<Value = LaurentWeylOp<BigRational>> {
    let roots = n * (n - 1) / 2;
    prop::collection::vec(
        (
            -3i64..=3,
            prop::collection::vec(lo..=1, roots),
            prop::collection::vec(0..=1u32, n),
            prop::collection::vec(0..=1u32, n),
        ),
        0..4,
    )
    .prop_map(move |ts| {
        let rs = RootSystemA::new(n);
        let mut op = LaurentWeylOp::zero(&rs);
        for (c, j, m, b) in ts {
            let l = Laurent::root_monomial(&rs, j, BigRational::from_integer(c.into())).mul(
                &Laurent::from_poly(
                    &rs,
                    MultiPoly::monomial(n, Monomial(m), BigRational::from_integer(1.into())),
                ),
            );
            op = op.plus(&LaurentWeylOp::term(&rs, Monomial(b), l));
        }
        op
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, .. ProptestConfig::default() })]

    #[test]
    fn weyl_product_acts_as_composition(a in weyl(2), b in weyl(2), p in poly(2, 3)) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.apply(&p).unwrap(), a.apply(&b.apply(&p).unwrap()).unwrap());
    }

    #[test]
    fn weyl_product_is_associative(a in weyl(2), b in weyl(2), c in weyl(2)) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn weyl_text_round_trip(a in weyl(3)) {
        prop_assert_eq!(WeylOp::from_text(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn mpoly_text_round_trip(p in poly(4, 3)) {
        prop_assert_eq!(MultiPoly::from_text(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn laurent_product_acts_as_composition(a in laurent_op(3, 0), b in laurent_op(3, 0), g in poly(3, 2)) {
        let lhs = a.mul(&b).apply(&g).unwrap();
        let rhs = a.apply(&b.apply(&g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn laurent_product_is_associative(a in laurent_op(3, -1), b in laurent_op(3, -1), c in laurent_op(3, -1)) {
        prop_assert!(a.mul(&b).mul(&c).equals(&a.mul(&b.mul(&c))));
    }

    #[test]
    fn lweyl_text_round_trip(a in laurent_op(3, -1)) {
        let ak = a.map_coeffs(|c: &BigRational| UniPoly::constant(c.clone(), Var::K)).canonical();
        let back = LaurentWeylOp::<UniPoly>::from_text(&ak.to_text()).unwrap();
        prop_assert!(back.equals(&ak));
    }

    #[test]
    fn canonical_is_idempotent(a in laurent_op(3, -1)) {
        let c = a.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(c.equals(&a));
    }

    #[test]
    fn jet_is_a_ring_homomorphism(p in poly(3, 2), q in poly(3, 2), base in prop::collection::vec(small_rational(), 3)) {
        let space = JetSpace::new(3, 4);
        let jp = jet_of_poly_in(space.clone(), &p, &base).unwrap();
        let jq = jet_of_poly_in(space.clone(), &q, &base).unwrap();
        let jpq = jet_of_poly_in(space, &p.mul(&q).unwrap(), &base).unwrap();
        let prod = jp.mul(&jq).unwrap();
        prop_assert_eq!(prod.nonzero().collect::<Vec<_>>(), jpq.nonzero().collect::<Vec<_>>());
    }

    #[test]
    fn interpolation_recovers_polynomial(cs in prop::collection::vec(small_rational(), 1..7), extra in 0usize..3) {
        let p = UniPoly::new(cs.clone(), Var::K);
        let pts: Vec<(BigRational, BigRational)> = (0..cs.len() + extra)
            .map(|i| {
                let x = ratio(3 * i as i64 - 2, 2);
                let y = p.eval(&x);
                (x, y)
            })
            .collect();
        prop_assert_eq!(interpolate(&pts, cs.len() - 1, Var::K).unwrap(), p);
    }

    #[test]
    fn unipoly_bracket_round_trip(cs in prop::collection::vec(small_rational(), 0..6)) {
        let p = UniPoly::new(cs, Var::K);
        prop_assert_eq!(UniPoly::parse_bracket(&p.to_bracket(), Var::K).unwrap(), p);
    }

    #[test]
    fn modular_nullspace_is_exact(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 6), 1..6)) {
        let int_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let ns = modular_nullspace(6, &int_rows);
        let m = RatMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect(),
        ).unwrap();
        prop_assert_eq!(ns.len(), 6 - m.rank());
        for v in &ns {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| *x == BigRational::from_integer(0.into())));
        }
    }
}

/// Random expansion `Σ ᾱ^j ∂(p_j)` of grade 0 for `n = 3`.
fn root_expansion() -> impl Strategy<Value = RootExpansion> {
    prop::collection::vec(
        (
            prop::collection::vec(-1i32..=1, 3),
            -3i64..=3,
            -2i64..=2,
            0usize..10,
        ),
        1..4,
    )
    .prop_map(|ts| {
        let rs = RootSystemA::new(3);
        let mut a = RootExpansion::zero(&rs);
        for (j, c0, c1, pick) in ts {
            let s: i32 = j.iter().sum();
            if s < 0 {
                continue;
            }
            // a symbol monomial of degree s in three variables
            let mut m = vec![0u32; 3];
            for i in 0..s as usize {
                m[(pick + i) % 3] += 1;
            }
            let c = UniPoly::from_ints(&[c0, c1], Var::K);
            a.add(j, MultiPoly::monomial(3, Monomial(m), c));
        }
        a
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, .. ProptestConfig::default() })]

    #[test]
    fn recursion_residuals_reproduce_defect_symbol(a in root_expansion()) {
        let rep = check_recursion(&a, -1, RecursionVariant::Derived);
        prop_assert!(rep.matches_defect_symbol);
    }
}
