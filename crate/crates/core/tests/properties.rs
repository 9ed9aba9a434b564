use proptest::prelude::*;

use igklo_core::delta::{canonicalize_compare, expand_by_residues, FactorCurrent};
use igklo_core::oracle::{act, act_on, randomized_equal_torus, shift, TestFunction};
use igklo_core::qtorus::TorusElement;
use igklo_core::scalar::{Gauss, Monomial, Scalar, Spectral, Term, Var};

fn term() -> impl Strategy<Value = Term> {
    (-3i64..=3, -2i32..=2, 0u8..2, -2i32..=2).prop_map(|(c, qe, node, we)| {
        let c = if c == 0 { 1 } else { c };
        Term::constant(Gauss::from_int(c))
            .mul(&Term::q_half(qe))
            .mul(&Term::w(node, 1, we))
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((term(), term(), -1i32..=1), 1..3).prop_map(|fs| {
        fs.iter().fold(Scalar::one(), |acc, (a, b, e)| {
            let s = a.mul(b).neg();
            let f = Scalar::one_minus(&s).add(&Scalar::from_term(a.clone()));
            if f.is_zero() {
                return acc;
            }
            match e {
                1 => acc.mul(&f),
                -1 => acc.div(&f).unwrap_or(acc),
                _ => acc.add(&f),
            }
        })
    })
}

fn torus() -> impl Strategy<Value = TorusElement> {
    prop::collection::vec((scalar(), 0u8..2, -2i32..=2), 1..3).prop_map(|ts| {
        ts.into_iter().fold(TorusElement::zero(), |acc, (c, i, e)| {
            acc.add(&shift(i, 1, e).scale(&c))
        })
    })
}

fn test_function() -> impl Strategy<Value = TestFunction> {
    (-3i32..=3, -3i32..=3).prop_map(|(a, b)| {
        TestFunction(Monomial::from_pairs([(Var::W(0, 1), a), (Var::W(1, 1), b)]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn add_then_sub_roundtrips(x in scalar(), y in scalar()) {
        prop_assert!(x.add(&y).sub(&y).equals(&x));
    }

    #[test]
    fn mul_then_div_roundtrips(x in scalar(), y in scalar()) {
        prop_assume!(!y.is_zero());
        prop_assert!(x.mul(&y).div(&y).unwrap().equals(&x));
    }

    #[test]
    fn action_is_multiplicative(x in torus(), y in torus(), f in test_function()) {
        let lhs = act(&x.mul(&y), &f);
        let rhs = act_on(&x, &act(&y, &f));
        prop_assert!(lhs.equals(&rhs));
    }

    #[test]
    fn randomized_check_agrees_on_equal_elements(x in torus(), seed in any::<u64>()) {
        let v = randomized_equal_torus(&x, &x.add(&TorusElement::zero()), 4, seed).unwrap();
        prop_assert!(v.symbolic_equal && v.numeric_equal);
    }

    #[test]
    fn simple_poles_expand_to_their_residues(
        exps in prop::collection::btree_set(-3i32..=3, 1..4),
        k in -2i32..=2,
    ) {
        let gamma = exps.iter().fold(FactorCurrent::power(Spectral::X, k), |g, &e| {
            g.mul(&FactorCurrent::linear_inv(Spectral::X, Term::w(0, 1, 1).mul(&Term::q(e)), -1))
        });
        let exp = expand_by_residues(&gamma).unwrap();
        prop_assert!(igklo_core::oracle::truncated_series_check(&gamma, &exp, 6).unwrap());
        prop_assert!(canonicalize_compare(&exp, &exp).unwrap().is_empty());
    }
}
