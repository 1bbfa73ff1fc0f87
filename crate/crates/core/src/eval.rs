//! Intersection numbers: psi integrals, kappa reductions, integration of
//! top-degree classes.

use std::collections::HashMap;

use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::arith::{double_factorial, factorial, frac, int, Rational};
use crate::graph::{automorphism_count, DecoratedGraph};
use crate::taut::TautClass;

/// Memo key for `<tau_{d_1} ... tau_{d_n}>_g`; exponents kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PsiKey {
    pub genus: u32,
    pub exponents: Vec<u32>,
}

impl PsiKey {
    pub fn new(genus: u32, mut exponents: Vec<u32>) -> Self {
        exponents.sort_unstable();
        PsiKey { genus, exponents }
    }
}

static PSI_MEMO: Lazy<RwLock<HashMap<PsiKey, Rational>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Snapshot of every memoized psi integral.
pub fn psi_memo_entries() -> Vec<(PsiKey, Rational)> {
    let mut v: Vec<_> = PSI_MEMO
        .read()
        .iter()
        .map(|(k, c)| (k.clone(), c.clone()))
        .collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// Seed the memo table, e.g. from a persistent cache.
pub fn seed_psi_memo(entries: impl IntoIterator<Item = (PsiKey, Rational)>) {
    let mut w = PSI_MEMO.write();
    for (k, v) in entries {
        w.entry(k).or_insert(v);
    }
}

/// `int_{M_{g,n}} psi_1^{d_1} ... psi_n^{d_n}`; zero when the dimension
/// constraint fails or the space is unstable.
pub fn psi_integral(key: &PsiKey) -> Rational {
    let g = key.genus as i64;
    let n = key.exponents.len() as i64;
    if 2 * g - 2 + n <= 0 {
        return Rational::zero();
    }
    let total: i64 = key.exponents.iter().map(|&d| d as i64).sum();
    if total != 3 * g - 3 + n {
        return Rational::zero();
    }
    let key = PsiKey::new(key.genus, key.exponents.clone());
    if let Some(v) = PSI_MEMO.read().get(&key) {
        return v.clone();
    }
    let v = psi_uncached(&key);
    PSI_MEMO.write().insert(key, v.clone());
    v
}

fn psi(g: u32, e: Vec<u32>) -> Rational {
    psi_integral(&PsiKey::new(g, e))
}

fn psi_uncached(key: &PsiKey) -> Rational {
    let g = key.genus;
    let d = &key.exponents;
    let n = d.len();
    if g == 0 && n == 3 {
        return Rational::one();
    }
    if g == 1 && n == 1 {
        return frac(1, 24);
    }
    // exponents are sorted, so a zero or one sits at the front
    if d[0] == 0 {
        let rest = &d[1..];
        let mut s = Rational::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut e = rest.to_vec();
                e[j] -= 1;
                s += psi(g, e);
            }
        }
        return s;
    }
    if d[0] == 1 {
        let rest = d[1..].to_vec();
        let chi = 2 * g as i64 - 2 + rest.len() as i64;
        return int(chi) * psi(g, rest);
    }
    dvv(g, d)
}

fn df(k: i64) -> Rational {
    Rational::from_integer(double_factorial(k))
}

/// The DVV (Virasoro) recursion, removing the largest exponent.
fn dvv(g: u32, d: &[u32]) -> Rational {
    let k = *d.last().unwrap() as i64 - 1;
    let rest: Vec<u32> = d[..d.len() - 1].to_vec();
    let mut s = Rational::zero();
    for j in 0..rest.len() {
        let dj = rest[j] as i64;
        let mut e = rest.clone();
        e[j] = (k + dj) as u32;
        s += df(2 * k + 2 * dj + 1) / df(2 * dj - 1) * psi(g, e);
    }
    let half = frac(1, 2);
    for r in 0..k {
        let t = k - 1 - r;
        let w = df(2 * r + 1) * df(2 * t + 1);
        if g >= 1 {
            let mut e = rest.clone();
            e.push(r as u32);
            e.push(t as u32);
            s += &half * &w * psi(g - 1, e);
        }
        let m = rest.len();
        for g1 in 0..=g {
            for mask in 0u64..(1u64 << m) {
                let mut e1 = vec![r as u32];
                let mut e2 = vec![t as u32];
                for (i, &x) in rest.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        e1.push(x);
                    } else {
                        e2.push(x);
                    }
                }
                let a = psi(g1, e1);
                if a.is_zero() {
                    continue;
                }
                s += &half * &w * a * psi(g - g1, e2);
            }
        }
    }
    s / df(2 * k + 3)
}

static VERTEX_MEMO: Lazy<RwLock<HashMap<VertexKey, Rational>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Memo key for a mixed psi-kappa vertex integral: genus, sorted psi
/// exponents, sorted kappa indices.
pub type VertexKey = (u32, Vec<u32>, Vec<u32>);

/// Snapshot of every memoized psi-kappa vertex integral.
pub fn vertex_memo_entries() -> Vec<(VertexKey, Rational)> {
    let mut v: Vec<_> = VERTEX_MEMO
        .read()
        .iter()
        .map(|(k, c)| (k.clone(), c.clone()))
        .collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

pub fn seed_vertex_memo(entries: impl IntoIterator<Item = (VertexKey, Rational)>) {
    let mut w = VERTEX_MEMO.write();
    for (k, v) in entries {
        w.entry(k).or_insert(v);
    }
}

/// `int_{M_{g,n}} prod psi_i^{a_i} prod_j kappa_{b_j}` with `b_j >= 1`.
pub fn vertex_integral(g: u32, psi_exps: &[u32], kappas: &[u32]) -> Rational {
    let n = psi_exps.len() as i64;
    if 2 * g as i64 - 2 + n <= 0 {
        return Rational::zero();
    }
    let deg: i64 = psi_exps.iter().chain(kappas).map(|&x| x as i64).sum();
    if deg != 3 * g as i64 - 3 + n {
        return Rational::zero();
    }
    if kappas.is_empty() {
        return psi(g, psi_exps.to_vec());
    }
    let mut a = psi_exps.to_vec();
    a.sort_unstable();
    let mut b = kappas.to_vec();
    b.sort_unstable();
    let key = (g, a, b);
    if let Some(v) = VERTEX_MEMO.read().get(&key) {
        return v.clone();
    }
    let (g, a, b) = key.clone();
    // <tau_a prod tau_{b_j + 1}> = sum over set partitions P of the kappa
    // slots of prod_B (|B|-1)! * int psi^a prod_B kappa_{b(B)}
    let mut extended = a.clone();
    extended.extend(b.iter().map(|&x| x + 1));
    let mut v = psi(g, extended);
    for part in set_partitions(b.len()) {
        if part.len() == b.len() {
            continue; // the discrete partition is the unknown
        }
        let mut weight = Rational::one();
        let mut merged = Vec::with_capacity(part.len());
        for block in &part {
            weight *= Rational::from_integer(factorial(block.len() as u32 - 1));
            merged.push(block.iter().map(|&i| b[i]).sum::<u32>());
        }
        v -= weight * vertex_integral(g, &a, &merged);
    }
    VERTEX_MEMO.write().insert(key, v.clone());
    v
}

/// All set partitions of `0..k`, as lists of blocks.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 0..k {
        let mut next = Vec::new();
        for p in out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// `int [G, dec] = (1/|Aut G|) prod_v int_v dec_v`.
pub fn integrate_term(dg: &DecoratedGraph) -> Rational {
    let g = &dg.graph;
    let mut acc = Rational::one();
    for v in 0..g.num_vertices() {
        let exps: Vec<u32> = g.half_edges_at(v).iter().map(|&h| dg.psi[h]).collect();
        let x = vertex_integral(g.genus[v], &exps, &dg.kappa[v]);
        if x.is_zero() {
            return x;
        }
        acc *= x;
    }
    acc / Rational::from_integer(automorphism_count(g).into())
}

/// Integral of the top-degree component.
pub fn integrate(c: &TautClass) -> Rational {
    let top = c.dim();
    c.terms()
        .filter(|(k, _)| k.degree() == top)
        .map(|(k, coeff)| coeff * integrate_term(k))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StableGraph;

    fn p(g: u32, e: &[u32]) -> Rational {
        psi_integral(&PsiKey::new(g, e.to_vec()))
    }

    #[test]
    fn base_values() {
        assert_eq!(p(0, &[0, 0, 0]), int(1));
        assert_eq!(p(0, &[1, 0, 0, 0]), int(1));
        assert_eq!(p(1, &[1]), frac(1, 24));
        assert_eq!(p(0, &[2, 0, 0, 0]), int(0));
        assert_eq!(p(0, &[0, 0]), int(0));
    }

    #[test]
    fn known_higher_values() {
        assert_eq!(p(2, &[4]), frac(1, 1152));
        assert_eq!(p(1, &[1, 1]), frac(1, 24));
        assert_eq!(p(0, &[1, 1, 1, 0, 0, 0]), int(6));
        assert_eq!(p(2, &[3, 2]), frac(29, 5760));
        assert_eq!(p(3, &[7]), frac(1, 82944));
    }

    #[test]
    fn kappa_integrals() {
        assert_eq!(vertex_integral(1, &[0], &[1]), frac(1, 24));
        assert_eq!(vertex_integral(0, &[0, 0, 0, 0], &[1]), int(1));
        assert_eq!(vertex_integral(0, &[0; 5], &[1, 1]), int(5));
        assert_eq!(vertex_integral(0, &[0; 5], &[2]), int(1));
    }

    #[test]
    fn integrals_of_classes() {
        assert_eq!(integrate(&TautClass::fundamental(0, 3)), int(1));
        assert_eq!(integrate(&TautClass::kappa(1, 1, 1)), frac(1, 24));
        let loop1 = StableGraph {
            genus: vec![0],
            legs: vec![0],
            edges: vec![(0, 0)],
        };
        assert_eq!(integrate(&TautClass::boundary(&loop1)), frac(1, 2));
    }

    #[test]
    fn set_partition_counts_are_bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52];
        for (k, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(k).len(), b);
        }
    }
}
