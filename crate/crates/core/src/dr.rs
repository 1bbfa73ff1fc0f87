//! Double ramification cycles from Pixton's graph sum, and the D-class built
//! from `lambda_g DR`.
//!
//! For fixed `r` the degree-`g` part of
//! `sum_G sum_w r^{-h1(G)} [G, prod_i exp(b_i^2 psi_i) prod_e (1 - exp(-w(h) w(h') (psi_h + psi_h'))) / (psi_h + psi_h')]`
//! is a polynomial in `r` once `r` is large. `DR_g(b)` is `2^{-g}` times its
//! value at `r = 0`, recovered by interpolation over consecutive samples.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use rayon::prelude::*;

use crate::arith::{binomial, factorial, int, pow, pow_signed, interpolate, Rational};
use crate::error::{Result, TautError};
use crate::graph::{enumerate_stable_graphs, DecoratedGraph, StableGraph};
use crate::omega::{mul_lambda_top, poly_mul, unit_mono, weightings, Poly};
use crate::taut::{check_stable, TautClass};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DrSpec {
    pub g: u32,
    pub parts: Vec<i64>,
}

impl DrSpec {
    pub fn new(g: u32, parts: Vec<i64>) -> Self {
        DrSpec { g, parts }
    }

    fn check(&self) -> Result<()> {
        check_stable(self.g, self.parts.len())?;
        let s: i64 = self.parts.iter().sum();
        if s != 0 {
            return Err(TautError::PartsSum(s));
        }
        Ok(())
    }

    /// The `r` values sampled: `2g + 2` consecutive integers above `sum |b_i|`.
    pub fn samples(&self) -> Vec<u32> {
        let start = self.parts.iter().map(|b| b.unsigned_abs()).sum::<u64>() as u32 + 1;
        (start..start + 2 * self.g + 2).collect()
    }
}

fn leg_factor(b: i64, max: usize, graph: &StableGraph, leg: usize) -> Poly {
    let b2 = int(b * b);
    let mut f = Poly::new();
    for k in 0..=max {
        let c = pow(&b2, k as u32) / Rational::from_integer(factorial(k as u32));
        if c.is_zero() {
            continue;
        }
        let mut m = unit_mono(graph);
        m.0[leg] = k as u32;
        f.insert(m, c);
    }
    f
}

fn edge_factor(c: &Rational, max: usize, graph: &StableGraph, e: usize) -> Poly {
    let n = graph.legs.len();
    let mut f = Poly::new();
    for k in 0..=max {
        let lead = pow(c, k as u32 + 1) / Rational::from_integer(factorial(k as u32 + 1));
        let lead = if k % 2 == 1 { -lead } else { lead };
        if lead.is_zero() {
            continue;
        }
        for i in 0..=k {
            let mut m = unit_mono(graph);
            m.0[n + 2 * e] = i as u32;
            m.0[n + 2 * e + 1] = (k - i) as u32;
            f.insert(m, &lead * Rational::from_integer(binomial(k as u32, i as u32)));
        }
    }
    f
}

/// Degree-`g` part of the fixed-`r` graph sum, as canonical terms.
fn pixton_at(spec: &DrSpec, r: u32, trees_only: bool) -> Result<BTreeMap<DecoratedGraph, Rational>> {
    let g = spec.g;
    let n = spec.parts.len();
    let deg = g as usize;
    let leg_w: Vec<u32> = spec
        .parts
        .iter()
        .map(|&b| b.rem_euclid(r as i64) as u32)
        .collect();
    let mut out = TautClass::zero(g, n);
    for graph in enumerate_stable_graphs(g, n)?.iter() {
        let ne = graph.num_edges();
        if ne > deg || (trees_only && !graph.is_tree()) {
            continue;
        }
        let budget = deg - ne;
        let mut poly = Poly::new();
        poly.insert(unit_mono(graph), Rational::one());
        for (i, &b) in spec.parts.iter().enumerate() {
            poly = poly_mul(&poly, &leg_factor(b, budget, graph, i), budget, graph);
        }
        if ne > 0 {
            let mut esum = Poly::new();
            for w in weightings(graph, r, &leg_w, 0) {
                let mut p = Poly::new();
                p.insert(unit_mono(graph), Rational::one());
                for (e, &we) in w.iter().enumerate() {
                    let other = (r - we) % r;
                    let c = int(we as i64 * other as i64);
                    p = poly_mul(&p, &edge_factor(&c, budget, graph, e), budget, graph);
                }
                for (m, c) in p {
                    *esum.entry(m).or_insert_with(Rational::zero) += c;
                }
            }
            poly = poly_mul(&poly, &esum, budget, graph);
        }
        let scale = pow_signed(&int(r as i64), -(graph.h1() as i64));
        for ((psi, kappa), c) in poly {
            let dg = DecoratedGraph::new(graph.clone(), psi, kappa);
            if dg.degree() == deg {
                out.add_term(dg, c * &scale);
            }
        }
    }
    Ok(out.terms().map(|(d, c)| (d.clone(), c.clone())).collect())
}

static DR_MEMO: Lazy<RwLock<HashMap<(DrSpec, bool), TautClass>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn dr_memo(spec: &DrSpec, trees_only: bool) -> Result<TautClass> {
    spec.check()?;
    let key = (spec.clone(), trees_only);
    if let Some(c) = DR_MEMO.read().get(&key) {
        return Ok(c.clone());
    }
    let out = dr_from_samples(spec, &spec.samples(), trees_only)?;
    DR_MEMO.write().insert(key, out.clone());
    Ok(out)
}

/// `DR_g(b)` interpolated from the given `r` values (at least `2g + 1`; any
/// further samples are checked against the interpolant).
pub fn dr_cycle_sampled(spec: &DrSpec, rs: &[u32]) -> Result<TautClass> {
    spec.check()?;
    dr_from_samples(spec, rs, false)
}

fn dr_from_samples(spec: &DrSpec, rs: &[u32], trees_only: bool) -> Result<TautClass> {
    let samples: Vec<BTreeMap<DecoratedGraph, Rational>> = rs
        .par_iter()
        .map(|&r| pixton_at(spec, r, trees_only))
        .collect::<Result<_>>()?;
    let mut keys: Vec<&DecoratedGraph> = samples.iter().flat_map(|s| s.keys()).collect();
    keys.sort();
    keys.dedup();
    let zero = Rational::zero();
    let scale = pow_signed(&int(2), -(spec.g as i64));
    let mut out = TautClass::zero(spec.g, spec.parts.len());
    for k in keys {
        let pts: Vec<(Rational, Rational)> = rs
            .iter()
            .zip(&samples)
            .map(|(&r, s)| (int(r as i64), s.get(k).unwrap_or(&zero).clone()))
            .collect();
        let p = interpolate(&pts, 2 * spec.g as usize)?;
        out.add_term(k.clone(), p.coeff(0) * &scale);
    }
    Ok(out)
}

/// `DR_g(b_1, ..., b_n)` in codimension `g`.
pub fn dr_cycle(spec: &DrSpec) -> Result<TautClass> {
    dr_memo(spec, false)
}

/// The compact-type part of `DR_g(b)`: enough to determine `lambda_g DR_g(b)`.
pub fn dr_cycle_trees(spec: &DrSpec) -> Result<TautClass> {
    dr_memo(spec, true)
}

/// `lambda_g DR_g(b)`.
pub fn lambda_dr(spec: &DrSpec) -> Result<TautClass> {
    mul_lambda_top(&dr_cycle_trees(spec)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DClassSpec {
    pub g: u32,
    pub fields: Vec<u64>,
}

impl DClassSpec {
    pub fn new(g: u32, fields: Vec<u64>) -> Self {
        DClassSpec { g, fields }
    }

    pub fn a(&self) -> i64 {
        self.fields.iter().sum::<u64>() as i64
    }
}

/// `-lambda_g DR_g(a_1, ..., a_n, -a) sum_k (-a psi_{n+1})^k` on `(g, n+1)`,
/// up to codimension `max_degree`.
pub fn d_class(spec: &DClassSpec, max_degree: usize) -> Result<TautClass> {
    if spec.fields.iter().any(|&a| a == 0) {
        return Err(TautError::InvalidArgument("D-class fields must be positive".into()));
    }
    let n = spec.fields.len();
    let g = spec.g;
    check_stable(g, n + 1)?;
    let max_degree = max_degree.min(3 * g as usize + n - 2);
    let key = (spec.clone(), max_degree);
    if let Some(c) = D_MEMO.read().get(&key) {
        return Ok(c.clone());
    }
    let c = d_class_uncached(spec, max_degree)?;
    D_MEMO.write().insert(key, c.clone());
    Ok(c)
}

static D_MEMO: Lazy<RwLock<HashMap<(DClassSpec, usize), TautClass>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn d_class_uncached(spec: &DClassSpec, max_degree: usize) -> Result<TautClass> {
    let n = spec.fields.len();
    let g = spec.g;
    let a = spec.a();
    let mut parts: Vec<i64> = spec.fields.iter().map(|&x| x as i64).collect();
    parts.push(-a);
    let base = lambda_dr(&DrSpec::new(g, parts))?.scaled(&-Rational::one());
    let mut out = TautClass::zero(g, n + 1);
    let low = 2 * g as usize;
    if max_degree < low {
        return Ok(out);
    }
    for k in 0..=(max_degree - low) {
        let c = base.mul_psi(n, k as u32);
        if c.is_empty() {
            break;
        }
        out.add_scaled(&c, &pow(&int(-a), k as u32))?;
    }
    Ok(out.truncate(max_degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::integrate;

    #[test]
    fn genus_zero_is_fundamental() {
        let c = dr_cycle(&DrSpec::new(0, vec![2, 1, -3])).unwrap();
        assert_eq!(c, TautClass::fundamental(0, 3));
    }

    #[test]
    fn parts_must_sum_to_zero() {
        assert_eq!(
            dr_cycle(&DrSpec::new(1, vec![1, 1])).unwrap_err(),
            TautError::PartsSum(2)
        );
    }

    #[test]
    fn genus_one_two_parts() {
        // DR_1(b, -b) = b^2 (psi_1 - D_{12}) - lambda_1, so int DR psi_1 = (b^2 - 1) / 24
        for b in 1..=3i64 {
            let d = dr_cycle(&DrSpec::new(1, vec![b, -b])).unwrap();
            assert_eq!(integrate(&d.mul_psi(0, 1)), crate::arith::frac(b * b - 1, 24));
        }
    }

    #[test]
    fn d_class_genus_zero() {
        let c = d_class(&DClassSpec::new(0, vec![1, 2]), 0).unwrap();
        assert_eq!(c, TautClass::fundamental(0, 3).scaled(&-Rational::one()));
    }
}
