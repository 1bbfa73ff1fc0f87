//! Tautological classes as rational combinations of decorated stable graphs.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::arith::{int, rational_to_string, Rational};
use crate::error::{Result, TautError};
use crate::graph::{automorphism_count, DecoratedGraph, StableGraph};

/// Finite combination of decorated graphs on a fixed `(g, n)`, keyed by
/// canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TautClass {
    g: u32,
    n: usize,
    terms: BTreeMap<DecoratedGraph, Rational>,
}

pub fn check_stable(g: u32, n: usize) -> Result<()> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        Err(TautError::UnstableSpace { g: g as usize, n })
    } else {
        Ok(())
    }
}

impl TautClass {
    pub fn zero(g: u32, n: usize) -> Self {
        TautClass {
            g,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn fundamental(g: u32, n: usize) -> Self {
        let mut c = Self::zero(g, n);
        c.terms.insert(
            DecoratedGraph::undecorated(StableGraph::smooth(g, n)),
            Rational::one(),
        );
        c
    }

    /// `psi_i` for marking `i` (1-based).
    pub fn psi(g: u32, n: usize, i: usize) -> Self {
        Self::fundamental(g, n).mul_psi(i - 1, 1)
    }

    /// `kappa_m`; `kappa_0` is the scalar `2g - 2 + n`.
    pub fn kappa(g: u32, n: usize, m: u32) -> Self {
        Self::fundamental(g, n).mul_kappa(m)
    }

    /// The generator `[G]` of an undecorated stable graph.
    pub fn boundary(graph: &StableGraph) -> Self {
        Self::from_term(DecoratedGraph::undecorated(graph.clone()), Rational::one())
    }

    pub fn from_term(dg: DecoratedGraph, coeff: Rational) -> Self {
        let mut c = Self::zero(dg.graph.total_genus(), dg.graph.num_legs());
        c.add_term(dg, coeff);
        c
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn num_markings(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        (3 * self.g as i64 - 3 + self.n as i64).max(0) as usize
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DecoratedGraph, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, dg: &DecoratedGraph) -> Rational {
        self.terms
            .get(&dg.canonical())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Add `coeff * [dg]`, canonicalizing; terms that vanish for dimension
    /// reasons are dropped.
    pub fn add_term(&mut self, dg: DecoratedGraph, coeff: Rational) {
        if coeff.is_zero() || dg.degree() > self.dim() || dg.exceeds_vertex_dims() {
            return;
        }
        debug_assert_eq!((dg.graph.total_genus(), dg.graph.num_legs()), (self.g, self.n));
        let key = dg.canonical();
        self.insert_canonical(key, coeff);
    }

    fn insert_canonical(&mut self, key: DecoratedGraph, coeff: Rational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn same_ambient(&self, other: &Self) -> Result<()> {
        if (self.g, self.n) != (other.g, other.n) {
            return Err(TautError::AmbientMismatch(
                self.g as usize,
                self.n,
                other.g as usize,
                other.n,
            ));
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.add_scaled(other, &Rational::one())
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Rational) -> Result<()> {
        self.same_ambient(other)?;
        if s.is_zero() {
            return Ok(());
        }
        for (k, c) in &other.terms {
            self.insert_canonical(k.clone(), c * s);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one())?;
        Ok(out)
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.g, self.n);
        }
        TautClass {
            g: self.g,
            n: self.n,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect(),
        }
    }

    pub fn component(&self, d: usize) -> Self {
        self.filter_degrees(|k| k == d)
    }

    pub fn truncate(&self, max_degree: usize) -> Self {
        self.filter_degrees(|k| k <= max_degree)
    }

    pub fn filter_degrees(&self, keep: impl Fn(usize) -> bool) -> Self {
        TautClass {
            g: self.g,
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k.degree()))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Degrees carrying at least one term.
    pub fn degrees(&self) -> Vec<usize> {
        self.terms.keys().map(|k| k.degree()).sorted().dedup().collect()
    }

    /// Keep only terms whose graph is a tree.
    pub fn tree_part(&self) -> Self {
        TautClass {
            g: self.g,
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.graph.is_tree())
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Multiply by `psi^k` at the half-edge of leg `leg` (0-based).
    pub fn mul_psi(&self, leg: usize, k: u32) -> Self {
        let mut out = Self::zero(self.g, self.n);
        for (dg, c) in &self.terms {
            let mut d = dg.clone();
            d.psi[leg] += k;
            out.add_term(d, c.clone());
        }
        out
    }

    /// Multiply by `kappa_m`, which restricts to each stratum as the sum over
    /// its vertices.
    pub fn mul_kappa(&self, m: u32) -> Self {
        if m == 0 {
            return self.scaled(&int(2 * self.g as i64 - 2 + self.n as i64));
        }
        let mut out = Self::zero(self.g, self.n);
        for (dg, c) in &self.terms {
            for v in 0..dg.graph.num_vertices() {
                let mut d = dg.clone();
                d.kappa[v].push(m);
                d.kappa[v].sort_unstable();
                out.add_term(d, c.clone());
            }
        }
        out
    }

    /// Reinterpret markings: marking `i + 1` of `self` becomes marking
    /// `perm[i] + 1` of the result.
    pub fn permute_markings(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = Self::zero(self.g, self.n);
        for (dg, c) in &self.terms {
            let mut legs = vec![0u32; self.n];
            let mut psi = dg.psi.clone();
            for i in 0..self.n {
                legs[perm[i]] = dg.graph.legs[i];
                psi[perm[i]] = dg.psi[i];
            }
            let graph = StableGraph {
                genus: dg.graph.genus.clone(),
                legs,
                edges: dg.graph.edges.clone(),
            };
            out.add_term(DecoratedGraph::new(graph, psi, dg.kappa.clone()), c.clone());
        }
        out
    }

}

impl fmt::Display for TautClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 on ({}, {})", self.g, self.n);
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} * [{}]", rational_to_string(c), k)?;
        }
        Ok(())
    }
}

/// Glue decorated graphs on the vertex spaces of `outer` into one decorated
/// graph on the ambient space. Leg `j` of `parts[w]` is attached to the
/// `j`-th half-edge at `w` in `outer.half_edges_at(w)`.
///
/// Returns `(G, f)` with `xi_{outer*}(tensor of [parts]) = f * [G]`.
pub fn glue(outer: &StableGraph, parts: &[DecoratedGraph]) -> (DecoratedGraph, Rational) {
    let nv = outer.num_vertices();
    debug_assert_eq!(parts.len(), nv);
    let n = outer.num_legs();
    let mut offset = Vec::with_capacity(nv);
    let mut genus = Vec::new();
    let mut kappa = Vec::new();
    for p in parts {
        offset.push(genus.len() as u32);
        genus.extend_from_slice(&p.graph.genus);
        kappa.extend(p.kappa.iter().cloned());
    }
    // outer half-edge -> (part, local leg)
    let mut slot = vec![(0usize, 0usize); outer.num_half_edges()];
    for w in 0..nv {
        for (j, h) in outer.half_edges_at(w).into_iter().enumerate() {
            slot[h] = (w, j);
        }
    }
    let place = |h: usize| -> (u32, u32) {
        let (w, j) = slot[h];
        let p = &parts[w];
        (offset[w] + p.graph.legs[j], p.psi[j])
    };
    let mut legs = Vec::with_capacity(n);
    let mut psi = Vec::new();
    for i in 0..n {
        let (v, p) = place(i);
        legs.push(v);
        psi.push(p);
    }
    let mut edges = Vec::new();
    for e in 0..outer.num_edges() {
        let (va, pa) = place(n + 2 * e);
        let (vb, pb) = place(n + 2 * e + 1);
        edges.push((va, vb));
        psi.push(pa);
        psi.push(pb);
    }
    for (w, p) in parts.iter().enumerate() {
        let pn = p.graph.num_legs();
        for (e, &(a, b)) in p.graph.edges.iter().enumerate() {
            edges.push((offset[w] + a, offset[w] + b));
            psi.push(p.psi[pn + 2 * e]);
            psi.push(p.psi[pn + 2 * e + 1]);
        }
    }
    let graph = StableGraph { genus, legs, edges };
    let aut = automorphism_count(&graph);
    let denom: u64 = parts.iter().map(|p| automorphism_count(&p.graph)).product();
    let dg = DecoratedGraph::new(graph, psi, kappa);
    (dg, Rational::new(aut.into(), denom.into()))
}

/// `(1/|Aut T|) xi_{T*}` applied to the tensor product of per-vertex
/// classes, so that gluing fundamental classes yields `[T]` itself.
pub fn boundary_pushforward(outer: &StableGraph, classes: &[TautClass]) -> Result<TautClass> {
    if classes.len() != outer.num_vertices() {
        return Err(TautError::InvalidArgument(format!(
            "{} vertex classes for a graph with {} vertices",
            classes.len(),
            outer.num_vertices()
        )));
    }
    for (v, c) in classes.iter().enumerate() {
        let val = outer.valence(v);
        if c.genus() != outer.genus[v] || c.num_markings() != val {
            return Err(TautError::VertexSpaceMismatch {
                vertex: v,
                g: outer.genus[v] as usize,
                n: val,
            });
        }
    }
    let g = outer.total_genus();
    let n = outer.num_legs();
    let mut out = TautClass::zero(g, n);
    let aut_outer = Rational::from_integer(automorphism_count(outer).into());
    let lists: Vec<Vec<(&DecoratedGraph, &Rational)>> =
        classes.iter().map(|c| c.terms().collect()).collect();
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(out);
    }
    for combo in lists.iter().map(|l| l.iter()).multi_cartesian_product() {
        let parts: Vec<DecoratedGraph> = combo.iter().map(|(d, _)| (*d).clone()).collect();
        let coeff: Rational = combo.iter().map(|(_, c)| (*c).clone()).product();
        let (dg, f) = glue(outer, &parts);
        out.add_term(dg, coeff * f / &aut_outer);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;

    #[test]
    fn psi_squared_is_single_term() {
        let p = TautClass::psi(1, 2, 1).mul_psi(0, 1);
        assert_eq!(p.len(), 1);
        let (k, c) = p.terms().next().unwrap();
        assert_eq!(k.psi[0], 2);
        assert_eq!(c, &Rational::one());
    }

    #[test]
    fn one_vertex_gluing_is_identity() {
        let c = TautClass::psi(0, 4, 2).add(&TautClass::kappa(0, 4, 1)).unwrap();
        let outer = StableGraph::smooth(0, 4);
        assert_eq!(boundary_pushforward(&outer, &[c.clone()]).unwrap(), c);
    }

    #[test]
    fn loop_gluing_gives_generator() {
        let outer = StableGraph {
            genus: vec![0],
            legs: vec![0],
            edges: vec![(0, 0)],
        };
        let c = boundary_pushforward(&outer, &[TautClass::fundamental(0, 3)]).unwrap();
        assert_eq!(c, TautClass::boundary(&outer));
        assert_eq!(c.coefficient(&DecoratedGraph::undecorated(outer)), int(1));
    }

    #[test]
    fn gluing_vertex_space_mismatch() {
        let outer = StableGraph {
            genus: vec![0, 0],
            legs: vec![0, 0, 1, 1],
            edges: vec![(0, 1)],
        };
        let err = boundary_pushforward(
            &outer,
            &[TautClass::fundamental(0, 3), TautClass::fundamental(0, 4)],
        )
        .unwrap_err();
        assert!(matches!(err, TautError::VertexSpaceMismatch { vertex: 1, .. }));
    }

    #[test]
    fn kappa_zero_is_euler_characteristic() {
        let k = TautClass::kappa(1, 2, 0);
        assert_eq!(k, TautClass::fundamental(1, 2).scaled(&frac(2, 1)));
    }
}
