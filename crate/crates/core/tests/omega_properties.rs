use num_traits::One;
use taut_core::arith::{frac, int, pow, Rational};
use taut_core::eval::integrate;
use taut_core::forget::forgetful_pullback;
use taut_core::omega::{
    hodge_total, lambda_class, mul_lambda_top, omega_class, omega_direct, omega_general_fields,
    pi_class, pi_class_by_pullback, OmegaSpec,
};
use taut_core::pairing::{equal_in_pairing, equal_in_pairing_all};
use taut_core::pullback::multiply;
use taut_core::taut::TautClass;

fn spec(r: u32, s: i64, fields: &[i64], x: i64) -> OmegaSpec {
    OmegaSpec::new(r, s, fields.to_vec(), int(x))
}

#[test]
fn lambda_two_psi_squared_on_m21() {
    // lambda_g conjecture value b_2 = 7/5760
    let l2 = lambda_class(2, 1, 2).unwrap();
    let c = l2.mul_psi(0, 2);
    assert_eq!(integrate(&c), frac(7, 5760));
}

#[test]
fn hodge_on_m2() {
    // int_{M_2} lambda_1^3 = 1/2880, lambda_1 lambda_2 = 1/5760
    let l1 = lambda_class(2, 0, 1).unwrap();
    let l2 = lambda_class(2, 0, 2).unwrap();
    let l1sq = multiply(&l1, &l1).unwrap();
    assert_eq!(integrate(&multiply(&l1sq, &l1).unwrap()), frac(1, 2880));
    assert_eq!(integrate(&multiply(&l1, &l2).unwrap()), frac(1, 5760));
}

#[test]
fn general_fields_match_direct_formula() {
    for (g, r, s, fields) in [
        (1u32, 3u32, 0i64, vec![4i64, -1]),
        (1, 2, 1, vec![-1, 2, 0]),
        (0, 3, 0, vec![5, -2, 0]),
        (2, 2, 0, vec![-2]),
    ] {
        let sp = OmegaSpec::new(r, s, fields, int(1));
        let d = 3 * g as usize + sp.fields.len() - 3;
        assert_eq!(
            omega_general_fields(g, &sp, d).unwrap(),
            omega_direct(g, &sp, d).unwrap()
        );
    }
}

#[test]
fn top_lambda_property_five() {
    for (g, n, r) in [(1u32, 1usize, 3u32), (1, 2, 2), (2, 1, 2)] {
        let x = int(2);
        let d = 3 * g as usize - 3 + n;
        let om = omega_class(g, &OmegaSpec::new(r, 0, vec![0; n], x.clone()), d).unwrap();
        let lhs = mul_lambda_top(&om).unwrap();
        let hodge = hodge_total(g, n, &-x.clone()).unwrap();
        let rhs = mul_lambda_top(&hodge)
            .unwrap()
            .scaled(&pow(&int(r as i64), 2 * g - 1));
        assert!(equal_in_pairing_all(&lhs, &rhs).unwrap(), "(g, n, r) = ({g}, {n}, {r})");
    }
}

#[test]
fn pullback_property_six() {
    for (g, r, s, fields) in [(1u32, 2u32, 1i64, vec![1i64]), (0, 3, 1, vec![0, 2, 2]), (1, 3, 0, vec![1, 2])] {
        let sp = spec(r, s, &fields, 1);
        let n = fields.len();
        let d = 3 * g as usize + n - 2;
        let base = omega_class(g, &sp, d).unwrap();
        let mut f2 = fields.clone();
        f2.push(s);
        let up = omega_general_fields(g, &spec(r, s, &f2, 1), d).unwrap();
        let pb = forgetful_pullback(&base).unwrap();
        assert!(equal_in_pairing_all(&up, &pb).unwrap(), "{g} {r} {s} {fields:?}");
    }
}

#[test]
fn pi_routes_agree() {
    let direct = pi_class(1, &[2], 1, 2).unwrap();
    let pulled = pi_class_by_pullback(1, &[2], 1, 2).unwrap();
    // Agreement holds up to degree g. Above it the shifted field -a_1 sees
    // psi_1 rather than its pullback, which leaves 4 * int lambda_1 psi_1 = 1/6.
    for d in 0..=1 {
        assert!(equal_in_pairing(&direct, &pulled, d).unwrap(), "degree {d}");
    }
    assert_eq!(integrate(&direct.sub(&pulled).unwrap()), frac(1, 6));
    let g0 = pi_class(0, &[1, 2], 2, 2).unwrap();
    assert_eq!(g0.component(0), TautClass::fundamental(0, 4));
    assert_eq!(
        pi_class(0, &[1, 1, 1], 0, 0).unwrap().component(0),
        TautClass::fundamental(0, 3).scaled(&Rational::one())
    );
}

#[test]
fn s_equal_to_r_matches_s_zero() {
    let (g, r, fields) = (1u32, 3u32, [1i64, 2]);
    let d = 3 * g as usize + fields.len() - 3;
    let at0 = omega_class(g, &spec(r, 0, &fields, 1), d).unwrap();
    let at_r = omega_direct(g, &spec(r, r as i64, &fields, 1), d).unwrap();
    assert!(equal_in_pairing_all(&at0, &at_r).unwrap());
}

#[test]
fn field_r_matches_field_zero() {
    let (g, r) = (1u32, 2u32);
    let at0 = omega_class(g, &spec(r, 0, &[0, 0], 1), 2).unwrap();
    let at_r = omega_direct(g, &spec(r, 0, &[0, r as i64], 1), 2).unwrap();
    assert!(equal_in_pairing_all(&at0, &at_r).unwrap());
}

#[test]
fn s_shift_multiplies_by_kappa_exponential() {
    // M_{1,1}, r = 3, s = 1 -> 4: the factor is 1 - (s/r) kappa_1 in degree 1
    let r = 3u32;
    let base = omega_class(1, &spec(r, 1, &[1], 1), 1).unwrap();
    let shifted = omega_direct(1, &spec(r, 1 + r as i64, &[1], 1), 1).unwrap();
    let expected = base
        .add(&multiply(&base.component(0), &TautClass::kappa(1, 1, 1)).unwrap().scaled(&-frac(1, 3)))
        .unwrap();
    assert!(equal_in_pairing_all(&shifted, &expected).unwrap());
}
