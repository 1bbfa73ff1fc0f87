use num_traits::One;
use taut_core::arith::Rational;
use taut_core::eval::integrate;
use taut_core::forget::{forgetful_pullback, forgetful_pushforward};
use taut_core::pairing::pairing_basis;
use taut_core::pullback::multiply;
use taut_core::taut::TautClass;

fn gen(dg: &taut_core::graph::DecoratedGraph) -> TautClass {
    TautClass::from_term(dg.clone(), Rational::one())
}

/// `int pi_*(x) b = int x pi^*(b)` for every pair of generators.
fn check(g: u32, n: usize, d: usize) {
    let dim = 3 * g as usize + n - 4;
    let pulled: Vec<(TautClass, TautClass)> = pairing_basis(g, n - 1, dim + 1 - d)
        .unwrap()
        .iter()
        .map(|b| (gen(b), forgetful_pullback(&gen(b)).unwrap()))
        .collect();
    for x in pairing_basis(g, n, d).unwrap().iter() {
        let xc = gen(x);
        let px = forgetful_pushforward(&xc).unwrap();
        for (b, pb) in &pulled {
            let lhs = integrate(&multiply(&px, b).unwrap());
            let rhs = integrate(&multiply(&xc, pb).unwrap());
            assert_eq!(lhs, rhs, "x = {x:?}, b = {b:?}");
        }
    }
}

#[test]
fn projection_formula_on_generators() {
    for (g, n, d) in [(0u32, 5usize, 1usize), (0, 5, 2), (1, 2, 1), (1, 3, 2), (2, 2, 3), (2, 2, 4)] {
        check(g, n, d);
    }
}
