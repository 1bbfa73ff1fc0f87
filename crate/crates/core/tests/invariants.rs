use num_traits::{One, Zero};
use proptest::prelude::*;

use taut_core::arith::{
    bernoulli_polynomial, frac, int, interpolate, parse_rational, pow, rational_to_string, Rational, UniPoly,
};
use taut_core::eval::{integrate, psi_integral, PsiKey};
use taut_core::pullback::multiply;
use taut_core::omega::{omega_class, OmegaSpec};
use taut_core::taut::TautClass;

fn rat() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..40).prop_map(|(n, d)| frac(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_print_and_parse_back(x in rat()) {
        prop_assert_eq!(parse_rational(&rational_to_string(&x)), Some(x));
    }

    #[test]
    fn rational_field_laws(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&(&a + &b) * &c, &a * &c + &b * &c);
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a);
        }
    }

    #[test]
    fn bernoulli_difference_and_reflection(m in 1usize..9, x in rat()) {
        let shifted = bernoulli_polynomial(m, &(&x + Rational::one()));
        prop_assert_eq!(shifted - bernoulli_polynomial(m, &x), int(m as i64) * pow(&x, m as u32 - 1));
        let sign = if m % 2 == 0 { Rational::one() } else { -Rational::one() };
        prop_assert_eq!(bernoulli_polynomial(m, &(Rational::one() - &x)), sign * bernoulli_polynomial(m, &x));
    }

    #[test]
    fn interpolation_recovers_polynomials(coeffs in prop::collection::vec(rat(), 1..6), start in -5i64..5, bump in 1i64..7) {
        let p = UniPoly::new(coeffs.clone());
        let d = coeffs.len() - 1;
        let mut pts: Vec<(Rational, Rational)> =
            (0..d as i64 + 2).map(|i| { let x = int(start + i); (x.clone(), p.eval(&x)) }).collect();
        let q = interpolate(&pts, d).unwrap();
        prop_assert_eq!(&q, &p);
        // the surplus point is checked
        let last = pts.len() - 1;
        pts[last].1 += int(bump);
        prop_assert!(interpolate(&pts, d).is_err());
    }

    #[test]
    fn string_equation(g in 0u32..3, mut raw in prop::collection::vec(0u32..6, 1..5)) {
        // <tau_0 tau_d> = sum_j <.. tau_{d_j - 1} ..>
        prop_assume!(2 * g as usize + raw.len() > 2);
        let target = 3 * g as i64 - 2 + raw.len() as i64;
        let rest: i64 = raw[1..].iter().map(|&d| d as i64).sum();
        prop_assume!(target - rest >= 0);
        raw[0] = (target - rest) as u32;
        let mut with0 = raw.clone();
        with0.push(0);
        let lhs = psi_integral(&PsiKey::new(g, with0));
        let mut rhs = Rational::zero();
        for j in 0..raw.len() {
            if raw[j] > 0 {
                let mut w = raw.clone();
                w[j] -= 1;
                rhs += psi_integral(&PsiKey::new(g, w));
            }
        }
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn products_are_associative_and_commutative(
        fields in prop::collection::vec(0i64..3, 5),
        i in 0usize..5,
        k in 1u32..3,
    ) {
        // degree-1 part of an Omega class on M_{0,5} has boundary terms
        let total: i64 = fields.iter().sum();
        let mut f = fields.clone();
        f[4] = (f[4] + 3 - total.rem_euclid(3)) % 3;
        let om = omega_class(0, &OmegaSpec::new(3, 0, f, Rational::one()), 2).unwrap();
        let a = om.component(1);
        let b = TautClass::fundamental(0, 5).mul_psi(i, 1);
        let c = if k == 1 { om.component(1) } else { TautClass::kappa(0, 5, 1) };
        let left = multiply(&multiply(&a, &b).unwrap(), &c).unwrap();
        let right = multiply(&a, &multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(integrate(&left), integrate(&right));
        let swapped = multiply(&multiply(&b, &a).unwrap(), &c).unwrap();
        prop_assert_eq!(integrate(&left), integrate(&swapped));
    }
}
