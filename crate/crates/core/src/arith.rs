//! Exact rational arithmetic helpers, Bernoulli polynomials and univariate
//! interpolation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::error::{Result, TautError};

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator by `num-rational`.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

/// `x^e` for a possibly negative exponent; `x` must be nonzero when `e < 0`.
pub fn pow_signed(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        pow(x, e as u32)
    } else {
        pow(&x.recip(), (-e) as u32)
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `(2k-1)!!` style double factorial; `(-1)!! = 1`.
pub fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub const DEFAULT_BERNOULLI_MAX: usize = 24;

static BERNOULLI: Lazy<RwLock<Vec<Rational>>> =
    Lazy::new(|| RwLock::new(bernoulli_table(DEFAULT_BERNOULLI_MAX)));

fn bernoulli_table(m_max: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m_max + 1);
    b.push(Rational::one());
    for m in 1..=m_max {
        // sum_{k=0}^{m} binom(m+1, k) B_k = 0
        let mut s = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += Rational::from_integer(binomial(m as u32 + 1, k as u32)) * bk;
        }
        b.push(-s / Rational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Extend the memoized Bernoulli table so that it covers indices `0..=m_max`.
pub fn reserve_bernoulli(m_max: usize) {
    if BERNOULLI.read().len() > m_max {
        return;
    }
    let mut w = BERNOULLI.write();
    if w.len() <= m_max {
        *w = bernoulli_table(m_max);
    }
}

/// Bernoulli number `B_m` with `B_1 = -1/2`.
pub fn bernoulli_number(m: usize) -> Rational {
    reserve_bernoulli(m);
    BERNOULLI.read()[m].clone()
}

/// Bernoulli polynomial `B_m(x) = sum_k binom(m, k) B_k x^{m-k}`.
pub fn bernoulli_polynomial(m: usize, x: &Rational) -> Rational {
    reserve_bernoulli(m);
    let table = BERNOULLI.read();
    // Horner in x over descending powers
    let mut acc = Rational::zero();
    for k in 0..=m {
        acc = acc * x + Rational::from_integer(binomial(m as u32, k as u32)) * &table[k];
    }
    acc
}

/// Dense univariate polynomial with rational coefficients; index is the power.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
            }
        }
        Ok(())
    }
}

/// The unique polynomial of degree `<= degree_bound` through the first
/// `degree_bound + 1` points; any further points must lie on it.
pub fn interpolate(points: &[(Rational, Rational)], degree_bound: usize) -> Result<UniPoly> {
    let needed = degree_bound + 1;
    if points.len() < needed {
        return Err(TautError::TooFewPoints {
            needed,
            got: points.len(),
        });
    }
    for i in 0..points.len() {
        for j in 0..i {
            if points[i].0 == points[j].0 {
                return Err(TautError::RepeatedAbscissa(points[i].0.to_string()));
            }
        }
    }
    let (fit, extra) = points.split_at(needed);
    // Newton divided differences
    let xs: Vec<&Rational> = fit.iter().map(|p| &p.0).collect();
    let mut dd: Vec<Rational> = fit.iter().map(|p| p.1.clone()).collect();
    for level in 1..needed {
        for i in (level..needed).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    // expand Newton form into monomial coefficients
    let mut coeffs = vec![Rational::zero(); needed];
    for i in (0..needed).rev() {
        // coeffs = coeffs * (x - xs[i]) + dd[i]
        let mut next = vec![Rational::zero(); needed];
        for k in 0..needed {
            if coeffs[k].is_zero() {
                continue;
            }
            if k + 1 < needed {
                next[k + 1] += &coeffs[k];
            }
            next[k] -= &coeffs[k] * xs[i];
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    let poly = UniPoly::new(coeffs);
    for (x, y) in extra {
        if &poly.eval(x) != y {
            return Err(TautError::InconsistentSample {
                x: x.to_string(),
                y: y.to_string(),
                degree: degree_bound,
            });
        }
    }
    Ok(poly)
}

pub fn rational_to_string(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Oracle: B_m(x) from the explicit sum over Bernoulli numbers, the numbers
    // themselves from the defining recurrence, evaluated independently.
    fn oracle_bernoulli_poly(m: usize, x: &Rational) -> Rational {
        let mut b = vec![Rational::one()];
        for k in 1..=m {
            let mut s = Rational::zero();
            for j in 0..k {
                s += Rational::from_integer(binomial(k as u32 + 1, j as u32)) * &b[j];
            }
            b.push(-s / int(k as i64 + 1));
        }
        (0..=m)
            .map(|k| Rational::from_integer(binomial(m as u32, k as u32)) * &b[k] * pow(x, (m - k) as u32))
            .sum()
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli_polynomial(0, &frac(7, 3)), int(1));
        assert_eq!(bernoulli_polynomial(1, &int(0)), frac(-1, 2));
        assert_eq!(bernoulli_number(2), frac(1, 6));
        assert_eq!(bernoulli_number(3), int(0));
        assert_eq!(bernoulli_number(4), frac(-1, 30));
        // B_2(1/3) = 1/9 - 1/3 + 1/6 = -1/18
        assert_eq!(bernoulli_polynomial(2, &frac(1, 3)), frac(-1, 18));
        assert_eq!(oracle_bernoulli_poly(2, &frac(1, 3)), frac(-1, 18));
    }

    #[test]
    fn bernoulli_matches_oracle_beyond_default_table() {
        for m in [5usize, 12, 30] {
            let x = frac(3, 7);
            assert_eq!(bernoulli_polynomial(m, &x), oracle_bernoulli_poly(m, &x));
        }
    }

    #[test]
    fn interpolation_examples() {
        let p = interpolate(&[(int(0), int(1)), (int(1), int(1))], 0).unwrap();
        assert_eq!(p, UniPoly::new(vec![int(1)]));
        let p = interpolate(&[(int(1), int(1)), (int(2), int(4)), (int(3), int(9))], 2).unwrap();
        assert_eq!(p, UniPoly::new(vec![int(0), int(0), int(1)]));
        let err = interpolate(
            &[(int(1), int(1)), (int(2), int(4)), (int(3), int(9)), (int(4), int(17))],
            2,
        )
        .unwrap_err();
        assert!(matches!(err, TautError::InconsistentSample { .. }));
        assert!(interpolate(&[(int(1), int(1))], 1).is_err());
        assert!(interpolate(&[(int(1), int(1)), (int(1), int(2))], 1).is_err());
    }

    #[test]
    fn zero_poly_has_no_degree() {
        assert_eq!(UniPoly::new(vec![int(0), int(0)]).degree(), None);
        assert_eq!(UniPoly::new(vec![int(0), int(2)]).degree(), Some(1));
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["0", "-3", "7/12", "-1/24"] {
            assert_eq!(rational_to_string(&parse_rational(s).unwrap()), s);
        }
    }
}
