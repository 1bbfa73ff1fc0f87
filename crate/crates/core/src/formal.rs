//! Term-level cancellation certificate for the Sigma combination.
//!
//! Each summand of Sigma is expanded into leveled trees whose vertices are
//! tagged by a single decoration (Pi, D or A^1) of a fixed degree. The
//! expansions must cancel in pairs of opposite sign; for `m = 1` the
//! A^1/D terms that are left over must be exactly the combination
//! `A^1 + D + sum over one-level trees of A^1(v_r) x D(v)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Result, TautError};
use crate::trees::{
    degree_functions, enumerate_trees, height, level_functions, levels_admissible,
    one_level_trees, Positive, RootedTree,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Tag {
    Pi,
    D,
    A1,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FormalTerm {
    pub genus: Vec<u32>,
    pub parent: Vec<Option<usize>>,
    pub legs: Vec<usize>,
    pub m: usize,
    pub levels: Vec<u32>,
    pub degrees: Vec<u32>,
    pub tags: Vec<Tag>,
}

impl FormalTerm {
    fn new(t: &RootedTree, levels: Vec<u32>, degrees: Vec<u32>, tags: Vec<Tag>) -> Self {
        let (c, map) = t.canonical();
        let nv = t.num_vertices();
        let mut lv = vec![0; nv];
        let mut dg = vec![0; nv];
        let mut tg = vec![Tag::Pi; nv];
        for v in 0..nv {
            lv[map[v]] = levels[v];
            dg[map[v]] = degrees[v];
            tg[map[v]] = tags[v];
        }
        FormalTerm {
            genus: c.genus,
            parent: c.parent,
            legs: c.legs,
            m: c.m,
            levels: lv,
            degrees: dg,
            tags: tg,
        }
    }

    pub fn tree(&self) -> RootedTree {
        RootedTree {
            genus: self.genus.clone(),
            parent: self.parent.clone(),
            legs: self.legs.clone(),
            m: self.m,
        }
    }

    pub fn total_degree(&self) -> usize {
        self.degrees.iter().map(|&d| d as usize).sum::<usize>() + self.genus.len() - 1
    }
}

/// Where a formal term came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Source {
    /// `-hhh` in the first summand
    HhhSolo,
    /// `+A^1` in the first summand
    A1Solo,
    /// hhh expanded at the root of the second summand
    OmegaAGraft,
    /// `+A^1` at the root of the second summand
    A1Graft,
    /// every top vertex of the third summand takes its Pi-term
    UpsilonPi,
    /// every top vertex takes its D-term
    UpsilonD,
    /// mixed choices, pushed to an extra level
    UpsilonExtraLevel,
    /// the single-vertex D-term for `m = 1`
    DSolo,
}

#[derive(Clone, Debug, Serialize)]
pub struct CancelledPair {
    pub term: FormalTerm,
    pub plus: Source,
    pub minus: Source,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub g: u32,
    pub n: usize,
    pub m: usize,
    pub degree_cap: usize,
    pub expanded: usize,
    pub pairs: Vec<CancelledPair>,
    pub residual: Vec<(FormalTerm, i64)>,
    pub expected_residual: Vec<(FormalTerm, i64)>,
    /// terms of degree at least `2g - 1 + m` with an edge that have neither
    /// a root `OmegaA` of degree `>= 2g' - 1 + m` nor a top vertex of degree
    /// `>= 2g'`
    pub structure_violations: Vec<FormalTerm>,
}

impl Certificate {
    pub fn ok(&self) -> bool {
        self.residual == self.expected_residual && self.structure_violations.is_empty()
    }
}

/// Replace vertex `v` of `t` by the tree `inner` on the space of `v`.
/// Returns the new tree, the position of each old vertex of `t` other than
/// `v` and the position of each vertex of `inner`.
fn graft(t: &RootedTree, v: usize, inner: &RootedTree) -> (RootedTree, Vec<usize>, Vec<usize>) {
    let pos = t.positive(v);
    debug_assert_eq!(inner.n(), pos.len());
    debug_assert_eq!(inner.m, t.num_negative(v));
    let mut genus = Vec::new();
    let mut parent = Vec::new();
    let mut old_map = vec![usize::MAX; t.num_vertices()];
    let mut inner_map = vec![usize::MAX; inner.num_vertices()];
    // inner root takes the place of v
    for (w, slot) in old_map.iter_mut().enumerate() {
        if w == v {
            continue;
        }
        *slot = genus.len();
        genus.push(t.genus[w]);
        parent.push(None);
    }
    for (u, slot) in inner_map.iter_mut().enumerate() {
        *slot = genus.len();
        genus.push(inner.genus[u]);
        parent.push(None);
    }
    for w in 0..t.num_vertices() {
        if w == v {
            continue;
        }
        parent[old_map[w]] = match t.parent[w] {
            Some(p) if p == v => None, // fixed below
            Some(p) => Some(old_map[p]),
            None => None,
        };
    }
    for u in 0..inner.num_vertices() {
        parent[inner_map[u]] = match inner.parent[u] {
            Some(p) => Some(inner_map[p]),
            None => t.parent[v].map(|p| old_map[p]),
        };
    }
    let mut legs: Vec<usize> = t.legs.iter().map(|&w| if w == v { usize::MAX } else { old_map[w] }).collect();
    for (j, p) in pos.iter().enumerate() {
        let at = inner_map[inner.legs[j]];
        match *p {
            Positive::Leg(i) => legs[i] = at,
            Positive::Child(c) => parent[old_map[c]] = Some(at),
        }
    }
    // put the root first
    let root = if v == 0 { inner_map[0] } else { old_map[0] };
    let nv = genus.len();
    let mut order: Vec<usize> = vec![root];
    order.extend((0..nv).filter(|&x| x != root));
    let mut re = vec![0; nv];
    for (i, &x) in order.iter().enumerate() {
        re[x] = i;
    }
    let tree = RootedTree {
        genus: order.iter().map(|&x| genus[x]).collect(),
        parent: order.iter().map(|&x| parent[x].map(|p| re[p])).collect(),
        legs: legs.iter().map(|&x| re[x]).collect(),
        m: t.m,
    };
    let old_map = old_map
        .iter()
        .map(|&x| if x == usize::MAX { x } else { re[x] })
        .collect();
    let inner_map = inner_map.iter().map(|&x| re[x]).collect();
    (tree, old_map, inner_map)
}

struct Ledger {
    entries: BTreeMap<FormalTerm, Vec<(i64, Source)>>,
    expanded: usize,
}

impl Ledger {
    fn push(&mut self, term: FormalTerm, sign: i64, src: Source) {
        self.expanded += 1;
        self.entries.entry(term).or_default().push((sign, src));
    }
}

fn pow_sign(l: u32) -> i64 {
    if l % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Leveled trees of the hhh-sum on `(g, n, m)` with total degree exactly
/// `total` (or at most `cap` when `total` is `None`).
fn hhh_terms(g: u32, n: usize, m: usize, total: Option<usize>, cap: usize) -> Vec<(RootedTree, Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    for t in enumerate_trees(g, n, m).iter() {
        let levels = level_functions(t);
        for d in degree_functions(t, cap) {
            let deg = d.iter().map(|&x| x as usize).sum::<usize>() + t.num_edges();
            if total.is_some_and(|k| k != deg) {
                continue;
            }
            for lv in &levels {
                if levels_admissible(t, lv, &d, height(lv)) {
                    out.push((t.clone(), lv.clone(), d.clone()));
                }
            }
        }
    }
    out
}

/// Degree functions on `t` whose degree sum plus edges equals `total`.
fn exact_degrees(t: &RootedTree, total: usize) -> Vec<Vec<u32>> {
    degree_functions(t, total)
        .into_iter()
        .filter(|d| d.iter().map(|&x| x as usize).sum::<usize>() + t.num_edges() == total)
        .collect()
}

/// Expand Sigma on `(g, n, m)` up to total degree `cap` and match terms.
pub fn formal_cancellation(g: u32, n: usize, m: usize, cap: usize) -> Result<Certificate> {
    if m == 0 {
        return Err(TautError::FrozenLegsRequired(m));
    }
    if n == 0 || 2 * g as i64 - 2 + (n + m) as i64 <= 0 {
        return Err(TautError::InvalidArgument(format!("no Sigma on ({g}, {n}, {m})")));
    }
    let mut ledger = Ledger {
        entries: BTreeMap::new(),
        expanded: 0,
    };
    let dim = 3 * g as usize + n + m - 3;
    let cap = cap.min(dim);
    let mut structure_violations = Vec::new();
    let bound_main = 2 * g as i64 - 1 + m as i64;

    // first summand
    for (t, lv, d) in hhh_terms(g, n, m, None, cap) {
        let nv = t.num_vertices();
        ledger.push(FormalTerm::new(&t, lv.clone(), d, vec![Tag::Pi; nv]), -pow_sign(height(&lv)), Source::HhhSolo);
    }
    if m == 1 {
        let t = RootedTree::single(g, n, m);
        for k in 0..=cap {
            ledger.push(FormalTerm::new(&t, vec![0], vec![k as u32], vec![Tag::A1]), 1, Source::A1Solo);
        }
    }

    // second summand
    for t in one_level_trees(g, n, m) {
        let gr = t.genus[0];
        let nr = t.positive(0).len();
        let bound = 2 * gr as i64 - 2 + m as i64;
        for d in degree_functions(&t, cap) {
            let dr = d[0] as usize;
            if dr as i64 <= bound {
                continue;
            }
            for (inner, ilv, idg) in hhh_terms(gr, nr, m, Some(dr), dr) {
                let (tree, old_map, inner_map) = graft(&t, 0, &inner);
                let nv = tree.num_vertices();
                let top = height(&ilv);
                let mut levels = vec![0; nv];
                let mut degrees = vec![0; nv];
                let mut tags = vec![Tag::Pi; nv];
                for u in 0..inner.num_vertices() {
                    levels[inner_map[u]] = ilv[u];
                    degrees[inner_map[u]] = idg[u];
                }
                for w in 1..t.num_vertices() {
                    levels[old_map[w]] = top + 1;
                    degrees[old_map[w]] = d[w];
                    tags[old_map[w]] = Tag::D;
                }
                ledger.push(FormalTerm::new(&tree, levels, degrees, tags), -pow_sign(top), Source::OmegaAGraft);
            }
            if m == 1 {
                let mut tags = vec![Tag::D; t.num_vertices()];
                tags[0] = Tag::A1;
                let mut levels = vec![1; t.num_vertices()];
                levels[0] = 0;
                ledger.push(FormalTerm::new(&t, levels, d.clone(), tags), 1, Source::A1Graft);
            }
        }
    }

    // third summand
    for t in enumerate_trees(g, n, m).iter() {
        let nv = t.num_vertices();
        for lv in level_functions(t) {
            let top = height(&lv);
            let top_vs: Vec<usize> = (0..nv).filter(|&v| lv[v] == top).collect();
            for d in degree_functions(t, cap) {
                if !levels_admissible(t, &lv, &d, top) {
                    continue;
                }
                let total = d.iter().map(|&x| x as usize).sum::<usize>() + t.num_edges();
                if top >= 1 && total as i64 >= bound_main && !top_vs.iter().any(|&v| d[v] >= 2 * t.genus[v]) {
                    let tags = vec![Tag::Pi; nv];
                    structure_violations.push(FormalTerm::new(t, lv.clone(), d.clone(), tags));
                }
                expand_top(t, &lv, &d, &top_vs, &mut ledger);
            }
        }
    }

    // match
    let mut pairs = Vec::new();
    let mut residual = Vec::new();
    for (term, contribs) in ledger.entries {
        let sum: i64 = contribs.iter().map(|c| c.0).sum();
        let exceptional = term.tags.contains(&Tag::A1)
            || contribs.iter().any(|c| c.1 == Source::DSolo);
        if exceptional {
            if sum != 0 {
                residual.push((term, sum));
            }
            continue;
        }
        if contribs.len() == 2 && sum == 0 {
            let (plus, minus) = if contribs[0].0 > 0 {
                (contribs[0].1, contribs[1].1)
            } else {
                (contribs[1].1, contribs[0].1)
            };
            pairs.push(CancelledPair { term, plus, minus });
        } else {
            return Err(TautError::UncancelledTerm(format!("{term:?} from {contribs:?}")));
        }
    }

    let expected_residual = if m == 1 { exceptional_terms(g, n, cap) } else { Vec::new() };
    Ok(Certificate {
        g,
        n,
        m,
        degree_cap: cap,
        expanded: ledger.expanded,
        pairs,
        residual,
        expected_residual,
        structure_violations,
    })
}

/// Expand the Upsilon decorations on the top level of `(t, lv, d)`.
fn expand_top(t: &RootedTree, lv: &[u32], d: &[u32], top_vs: &[usize], ledger: &mut Ledger) {
    let top = height(lv);
    let nv = t.num_vertices();
    let s = pow_sign(top);
    // options per top vertex: None = Pi, Some(None) = D, Some(Some((tree, degrees)))
    type Opt = Option<Option<(RootedTree, Vec<u32>)>>;
    let mut options: Vec<Vec<Opt>> = Vec::new();
    for &v in top_vs {
        let mut o: Vec<Opt> = vec![None];
        if t.num_negative(v) == 1 {
            o.push(Some(None));
        }
        let gv = t.genus[v];
        let nvp = t.positive(v).len();
        for inner in one_level_trees(gv, nvp, t.num_negative(v)) {
            for idg in exact_degrees(&inner, d[v] as usize) {
                o.push(Some(Some((inner.clone(), idg))));
            }
        }
        options.push(o);
    }
    let mut idx = vec![0usize; top_vs.len()];
    loop {
        let choice: Vec<&Opt> = idx.iter().enumerate().map(|(k, &i)| &options[k][i]).collect();
        let all_pi = choice.iter().all(|c| c.is_none());
        let all_d = choice.iter().all(|c| matches!(c, Some(None)));
        if all_pi {
            let tags = vec![Tag::Pi; nv];
            ledger.push(FormalTerm::new(t, lv.to_vec(), d.to_vec(), tags), s, Source::UpsilonPi);
        } else if all_d && top == 0 {
            // single vertex, m = 1
            ledger.push(FormalTerm::new(t, lv.to_vec(), d.to_vec(), vec![Tag::D]), 1, Source::DSolo);
        } else if all_d {
            let tags: Vec<Tag> = (0..nv).map(|v| if lv[v] == top { Tag::D } else { Tag::Pi }).collect();
            ledger.push(FormalTerm::new(t, lv.to_vec(), d.to_vec(), tags), s, Source::UpsilonD);
        } else {
            // graft every tree choice; D choices move up one level
            let mut tree = t.clone();
            let mut levels = lv.to_vec();
            let mut degrees = d.to_vec();
            let mut tags = vec![Tag::Pi; nv];
            let mut place: Vec<usize> = (0..nv).collect();
            for (k, &v) in top_vs.iter().enumerate() {
                match choice[k] {
                    None => {}
                    Some(None) => {
                        levels[place[v]] = top + 1;
                        tags[place[v]] = Tag::D;
                    }
                    Some(Some((inner, idg))) => {
                        let (nt, old_map, inner_map) = graft(&tree, place[v], inner);
                        let nn = nt.num_vertices();
                        let mut nl = vec![0; nn];
                        let mut nd = vec![0; nn];
                        let mut ng = vec![Tag::Pi; nn];
                        for w in 0..tree.num_vertices() {
                            if w == place[v] {
                                continue;
                            }
                            nl[old_map[w]] = levels[w];
                            nd[old_map[w]] = degrees[w];
                            ng[old_map[w]] = tags[w];
                        }
                        for u in 0..inner.num_vertices() {
                            let x = inner_map[u];
                            nd[x] = idg[u];
                            if u == 0 {
                                nl[x] = top;
                                ng[x] = Tag::Pi;
                            } else {
                                nl[x] = top + 1;
                                ng[x] = Tag::D;
                            }
                        }
                        let gone = place[v];
                        for p in place.iter_mut() {
                            if *p != usize::MAX && *p != gone {
                                *p = old_map[*p];
                            }
                        }
                        place[v] = usize::MAX;
                        tree = nt;
                        levels = nl;
                        degrees = nd;
                        tags = ng;
                    }
                }
            }
            ledger.push(FormalTerm::new(&tree, levels, degrees, tags), s, Source::UpsilonExtraLevel);
        }
        // next choice
        let mut k = 0;
        loop {
            if k == idx.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `A^1 + D + sum over one-level trees of A^1(v_r) x D(v)` as formal terms,
/// keeping only root degrees `>= 2 g(v_r)` in the tree terms (the lower
/// ones are zero since `(A^1)_{<2g} = 0`).
fn exceptional_terms(g: u32, n: usize, cap: usize) -> Vec<(FormalTerm, i64)> {
    let mut out = BTreeMap::new();
    let t = RootedTree::single(g, n, 1);
    let dim = 3 * g as usize + n - 2;
    for k in 0..=cap.min(dim) {
        *out.entry(FormalTerm::new(&t, vec![0], vec![k as u32], vec![Tag::A1])).or_insert(0) += 1;
        *out.entry(FormalTerm::new(&t, vec![0], vec![k as u32], vec![Tag::D])).or_insert(0) += 1;
    }
    for t in one_level_trees(g, n, 1) {
        let nv = t.num_vertices();
        for d in degree_functions(&t, cap) {
            if d[0] < 2 * t.genus[0] {
                continue;
            }
            let mut tags = vec![Tag::D; nv];
            tags[0] = Tag::A1;
            let mut levels = vec![1; nv];
            levels[0] = 0;
            *out.entry(FormalTerm::new(&t, levels, d, tags)).or_insert(0) += 1;
        }
    }
    out.into_iter().filter(|(_, c)| *c != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_zero_degree_zero() {
        let c = formal_cancellation(0, 2, 1, 0).unwrap();
        assert!(c.ok());
        // A^1 and D single-vertex terms only
        assert_eq!(c.residual.len(), 2);
    }

    #[test]
    fn two_frozen_legs_leave_nothing() {
        for (g, n) in [(0u32, 2usize), (0, 3), (1, 1), (1, 2)] {
            let c = formal_cancellation(g, n, 2, 10).unwrap();
            assert!(c.residual.is_empty(), "({g}, {n})");
            assert!(c.ok());
            assert!(!c.pairs.is_empty());
        }
    }

    #[test]
    fn one_frozen_leg_leaves_the_exceptional_terms() {
        for (g, n) in [(0u32, 3usize), (1, 1), (1, 2), (2, 1)] {
            let c = formal_cancellation(g, n, 1, 10).unwrap();
            assert_eq!(c.residual, c.expected_residual, "({g}, {n})");
            assert!(c.ok());
        }
    }
}
