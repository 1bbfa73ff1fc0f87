use num_traits::One;
use taut_core::arith::{int, pow, Rational};
use taut_core::dr::{d_class, dr_cycle, dr_cycle_sampled, lambda_dr, DClassSpec, DrSpec};
use taut_core::omega::lambda_class;
use taut_core::pairing::{equal_in_pairing, pairing_vector};
use taut_core::pullback::multiply;
use taut_core::taut::TautClass;

#[test]
fn trivial_parts_give_signed_top_lambda() {
    for (g, n) in [(1u32, 1usize), (1, 2), (2, 1)] {
        let dr = dr_cycle(&DrSpec::new(g, vec![0; n])).unwrap();
        let lg = lambda_class(g, n, g).unwrap();
        let sign = if g % 2 == 0 { Rational::one() } else { -Rational::one() };
        assert!(equal_in_pairing(&dr, &lg.scaled(&sign), g as usize).unwrap(), "({g}, {n})");
        // lambda_g^2 vanishes, so lambda_g DR(0) does too
        let lhs = lambda_dr(&DrSpec::new(g, vec![0; n])).unwrap();
        let rhs = multiply(&lg, &lg).unwrap().scaled(&sign);
        assert!(equal_in_pairing(&lhs, &rhs, 2 * g as usize).unwrap());
    }
}

#[test]
fn lambda_dr_is_homogeneous() {
    for (g, base) in [(1u32, vec![1i64, 2, -3]), (2, vec![1, -1])] {
        let d = 2 * g as usize;
        let v1 = pairing_vector(&lambda_dr(&DrSpec::new(g, base.clone())).unwrap(), d).unwrap();
        for t in 1..=3i64 {
            let parts: Vec<i64> = base.iter().map(|b| b * t).collect();
            let vt = pairing_vector(&lambda_dr(&DrSpec::new(g, parts)).unwrap(), d).unwrap();
            let f = pow(&int(t), 2 * g);
            assert_eq!(vt, v1.iter().map(|x| x * &f).collect::<Vec<_>>(), "g={g} t={t}");
        }
    }
}

#[test]
fn dr_is_polynomial_in_scaling() {
    // pairings of DR_1(t, -t) and DR_1(t, 2t, -3t) are polynomials of degree <= 2 in t
    for base in [vec![1i64, -1], vec![1, 2, -3]] {
        let vals: Vec<Vec<Rational>> = (0..=3i64)
            .map(|t| {
                let parts: Vec<i64> = base.iter().map(|b| b * t).collect();
                pairing_vector(&dr_cycle(&DrSpec::new(1, parts)).unwrap(), 1).unwrap()
            })
            .collect();
        for j in 0..vals[0].len() {
            let pts: Vec<(Rational, Rational)> =
                (0..=3).map(|t| (int(t), vals[t as usize][j].clone())).collect();
            taut_core::arith::interpolate(&pts, 2).unwrap();
        }
    }
}

#[test]
fn disjoint_samples_agree() {
    for spec in [DrSpec::new(1, vec![2, -2]), DrSpec::new(2, vec![1, -1]), DrSpec::new(1, vec![1, 1, -2])] {
        let a = dr_cycle(&spec).unwrap();
        let start = spec.samples().last().copied().unwrap() + 3;
        let rs: Vec<u32> = (start..start + 2 * spec.g + 2).collect();
        let b = dr_cycle_sampled(&spec, &rs).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn d_class_low_degrees() {
    let spec = DClassSpec::new(1, vec![1, 2]);
    let c = d_class(&spec, 3).unwrap();
    assert_eq!(c.component(0), TautClass::zero(1, 3));
    assert_eq!(c.component(1), TautClass::zero(1, 3));
    let top = lambda_dr(&DrSpec::new(1, vec![1, 2, -3])).unwrap().scaled(&-Rational::one());
    assert_eq!(c.component(2), top);
}
