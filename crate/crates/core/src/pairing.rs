//! Additive generators of a fixed codimension and vanishing in the pairing
//! sense.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use itertools::Itertools;
use num_traits::Zero;
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use rayon::prelude::*;

use crate::arith::Rational;
use crate::error::Result;
use crate::graph::{enumerate_stable_graphs, DecoratedGraph};
use crate::pullback::pair_terms;
use crate::taut::{check_stable, TautClass};

/// Partitions of `k` into positive parts, parts non-increasing.
pub fn partitions(k: u32) -> Vec<Vec<u32>> {
    fn go(k: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=k.min(max)).rev() {
            cur.push(p);
            go(k - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, k, &mut Vec::new(), &mut out);
    out
}

/// Compositions of `k` into `parts` nonnegative entries.
pub fn compositions(k: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if k == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in compositions(k - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All (psi exponents, kappa multiset) of total degree `k` on a vertex with
/// `val` half-edges.
fn vertex_decorations(k: u32, val: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    for kk in 0..=k {
        for kap in partitions(kk) {
            for ps in compositions(k - kk, val) {
                let mut kap = kap.clone();
                kap.sort_unstable();
                out.push((ps, kap));
            }
        }
    }
    out
}

static BASIS_CACHE: Lazy<RwLock<HashMap<(u32, usize, usize), Arc<Vec<DecoratedGraph>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Every decorated graph of codimension `d`, up to isomorphism, that is not
/// zero for vertex-dimension reasons.
pub fn pairing_basis(g: u32, n: usize, d: usize) -> Result<Arc<Vec<DecoratedGraph>>> {
    check_stable(g, n)?;
    if let Some(b) = BASIS_CACHE.read().get(&(g, n, d)) {
        return Ok(b.clone());
    }
    let mut set = BTreeSet::new();
    for gr in enumerate_stable_graphs(g, n)?.iter() {
        let e = gr.num_edges();
        if e > d {
            continue;
        }
        let rest = (d - e) as u32;
        let nv = gr.num_vertices();
        let dims: Vec<i64> = (0..nv).map(|v| gr.vertex_dim(v)).collect();
        let hs: Vec<Vec<usize>> = (0..nv).map(|v| gr.half_edges_at(v)).collect();
        for budget in compositions(rest, nv) {
            if (0..nv).any(|v| budget[v] as i64 > dims[v]) {
                continue;
            }
            let per_vertex: Vec<Vec<(Vec<u32>, Vec<u32>)>> = (0..nv)
                .map(|v| vertex_decorations(budget[v], hs[v].len()))
                .collect();
            for choice in per_vertex.iter().map(|x| x.iter()).multi_cartesian_product() {
                let mut psi = vec![0u32; gr.num_half_edges()];
                let mut kappa = vec![Vec::new(); nv];
                for (v, (ps, kap)) in choice.into_iter().enumerate() {
                    for (i, &h) in hs[v].iter().enumerate() {
                        psi[h] = ps[i];
                    }
                    kappa[v] = kap.clone();
                }
                set.insert(DecoratedGraph::new(gr.clone(), psi, kappa).canonical());
            }
        }
    }
    let v = Arc::new(set.into_iter().collect::<Vec<_>>());
    BASIS_CACHE.write().insert((g, n, d), v.clone());
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingReport {
    pub g: u32,
    pub n: usize,
    pub degree: usize,
    pub values: Vec<(DecoratedGraph, Rational)>,
    pub vanishes: bool,
}

impl PairingReport {
    /// The first basis element with a nonzero pairing.
    pub fn witness(&self) -> Option<&(DecoratedGraph, Rational)> {
        self.values.iter().find(|(_, v)| !v.is_zero())
    }
}

/// Pair one term list against one basis element.
fn pair_with(terms: &[(&DecoratedGraph, &Rational)], b: &DecoratedGraph) -> Rational {
    let mut s = Rational::zero();
    for (a, c) in terms {
        let x = pair_terms(a, b);
        if !x.is_zero() {
            s += *c * x;
        }
    }
    s
}

/// Pair the degree-`d` component of `c` against all generators of the
/// complementary degree.
pub fn vanishes_in_pairing(c: &TautClass, d: usize) -> Result<PairingReport> {
    let (g, n) = (c.genus(), c.num_markings());
    let dim = c.dim();
    let comp = c.component(d);
    let mut report = PairingReport {
        g,
        n,
        degree: d,
        values: Vec::new(),
        vanishes: true,
    };
    if d > dim {
        return Ok(report);
    }
    let basis = pairing_basis(g, n, dim - d)?;
    let terms: Vec<(&DecoratedGraph, &Rational)> = comp.terms().collect();
    report.values = basis
        .par_iter()
        .map(|b| (b.clone(), pair_with(&terms, b)))
        .collect();
    report.vanishes = report.values.iter().all(|(_, v)| v.is_zero());
    Ok(report)
}

/// Pairing vector of the degree-`d` component against the complementary basis.
pub fn pairing_vector(c: &TautClass, d: usize) -> Result<Vec<Rational>> {
    Ok(vanishes_in_pairing(c, d)?
        .values
        .into_iter()
        .map(|(_, v)| v)
        .collect())
}

/// True when `a - b` pairs to zero in degree `d`.
pub fn equal_in_pairing(a: &TautClass, b: &TautClass, d: usize) -> Result<bool> {
    Ok(vanishes_in_pairing(&a.sub(b)?, d)?.vanishes)
}

/// True when `a - b` pairs to zero in every degree.
pub fn equal_in_pairing_all(a: &TautClass, b: &TautClass) -> Result<bool> {
    let diff = a.sub(b)?;
    for d in 0..=diff.dim() {
        if !vanishes_in_pairing(&diff, d)?.vanishes {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn basis_sizes() {
        assert_eq!(pairing_basis(0, 4, 1).unwrap().len(), 8);
        assert_eq!(pairing_basis(1, 1, 1).unwrap().len(), 3);
        assert_eq!(pairing_basis(2, 3, 0).unwrap().len(), 1);
    }

    #[test]
    fn vanishing_examples() {
        let z = TautClass::zero(0, 4);
        assert!(vanishes_in_pairing(&z, 1).unwrap().vanishes);
        let p1 = TautClass::psi(0, 4, 1);
        let r = vanishes_in_pairing(&p1, 1).unwrap();
        assert!(!r.vanishes);
        assert_eq!(r.witness().unwrap().1, int(1));
        let diff = p1.sub(&TautClass::psi(0, 4, 2)).unwrap();
        assert!(vanishes_in_pairing(&diff, 1).unwrap().vanishes);
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(partitions(0), vec![Vec::<u32>::new()]);
        assert_eq!(compositions(2, 3).len(), 6);
    }
}
