//! Stable graphs, decorated stable graphs and their canonical forms.
//!
//! Half-edges of a graph with `n` legs and `E` edges are numbered implicitly:
//! `0..n` are the legs (marking `i + 1` is half-edge `i`), and edge `e`
//! contributes half-edges `n + 2e` (at `edges[e].0`) and `n + 2e + 1`
//! (at `edges[e].1`).

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::error::{Result, TautError};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StableGraph {
    pub genus: Vec<u32>,
    /// vertex carrying marking `i + 1`
    pub legs: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl StableGraph {
    pub fn smooth(g: u32, n: usize) -> Self {
        StableGraph {
            genus: vec![g],
            legs: vec![0; n],
            edges: Vec::new(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.genus.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.legs.len() + 2 * self.edges.len()
    }

    pub fn half_vertex(&self, h: usize) -> usize {
        let n = self.legs.len();
        if h < n {
            self.legs[h] as usize
        } else {
            let e = (h - n) / 2;
            if (h - n) % 2 == 0 {
                self.edges[e].0 as usize
            } else {
                self.edges[e].1 as usize
            }
        }
    }

    /// The other half of an edge half-edge; `None` for legs.
    pub fn partner(&self, h: usize) -> Option<usize> {
        let n = self.legs.len();
        if h < n {
            None
        } else {
            Some(n + ((h - n) ^ 1))
        }
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.num_half_edges())
            .filter(|&h| self.half_vertex(h) == v)
            .collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.legs.iter().filter(|&&w| w as usize == v).count()
            + self
                .edges
                .iter()
                .map(|&(a, b)| (a as usize == v) as usize + (b as usize == v) as usize)
                .sum::<usize>()
    }

    /// First Betti number.
    pub fn h1(&self) -> usize {
        self.edges.len() + 1 - self.genus.len()
    }

    pub fn is_tree(&self) -> bool {
        self.h1() == 0
    }

    pub fn total_genus(&self) -> u32 {
        self.genus.iter().sum::<u32>() + self.h1() as u32
    }

    pub fn vertex_dim(&self, v: usize) -> i64 {
        3 * self.genus[v] as i64 - 3 + self.valence(v) as i64
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices())
            .all(|v| 2 * self.genus[v] as i64 - 2 + self.valence(v) as i64 > 0)
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.num_vertices();
        if nv == 0 {
            return false;
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a as usize, b as usize), (b as usize, a as usize)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn canonical(&self) -> StableGraph {
        DecoratedGraph::undecorated(self.clone()).canonical().graph
    }
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{:?} L{:?} E{:?}", self.genus, self.legs, self.edges)
    }
}

/// A stable graph with psi powers on half-edges and kappa multisets on
/// vertices. As a class it denotes `(1/|Aut G|) xi_{G*}(decoration)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DecoratedGraph {
    pub graph: StableGraph,
    /// psi power per half-edge
    pub psi: Vec<u32>,
    /// sorted kappa indices per vertex (`kappa_m` with `m >= 1`)
    pub kappa: Vec<Vec<u32>>,
}

impl DecoratedGraph {
    pub fn undecorated(graph: StableGraph) -> Self {
        let psi = vec![0; graph.num_half_edges()];
        let kappa = vec![Vec::new(); graph.num_vertices()];
        DecoratedGraph { graph, psi, kappa }
    }

    pub fn new(graph: StableGraph, psi: Vec<u32>, mut kappa: Vec<Vec<u32>>) -> Self {
        debug_assert_eq!(psi.len(), graph.num_half_edges());
        debug_assert_eq!(kappa.len(), graph.num_vertices());
        for k in kappa.iter_mut() {
            k.sort_unstable();
        }
        DecoratedGraph { graph, psi, kappa }
    }

    /// Codimension: edges plus psi powers plus kappa indices.
    pub fn degree(&self) -> usize {
        self.graph.num_edges()
            + self.psi.iter().map(|&p| p as usize).sum::<usize>()
            + self
                .kappa
                .iter()
                .flat_map(|k| k.iter())
                .map(|&m| m as usize)
                .sum::<usize>()
    }

    pub fn vertex_degree(&self, v: usize) -> usize {
        let g = &self.graph;
        (0..g.num_half_edges())
            .filter(|&h| g.half_vertex(h) == v)
            .map(|h| self.psi[h] as usize)
            .sum::<usize>()
            + self.kappa[v].iter().map(|&m| m as usize).sum::<usize>()
    }

    /// True when some vertex carries more degree than its dimension, so the
    /// class is zero.
    pub fn exceeds_vertex_dims(&self) -> bool {
        (0..self.graph.num_vertices())
            .any(|v| self.vertex_degree(v) as i64 > self.graph.vertex_dim(v))
    }

    /// Canonical representative under relabelling of vertices and half-edges
    /// (markings fixed).
    pub fn canonical(&self) -> DecoratedGraph {
        canonicalize(self).0
    }

    pub fn is_canonical(&self) -> bool {
        &self.canonical() == self
    }

    fn relabel(&self, order: &[usize]) -> DecoratedGraph {
        let g = &self.graph;
        let nv = g.num_vertices();
        let n = g.num_legs();
        let mut pos = vec![0u32; nv];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new as u32;
        }
        let genus = order.iter().map(|&o| g.genus[o]).collect();
        let kappa = order.iter().map(|&o| self.kappa[o].clone()).collect();
        let legs: Vec<u32> = g.legs.iter().map(|&v| pos[v as usize]).collect();
        let mut edges: Vec<(u32, u32, u32, u32)> = g
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| {
                let (pa, pb) = (pos[a as usize], pos[b as usize]);
                let (sa, sb) = (self.psi[n + 2 * e], self.psi[n + 2 * e + 1]);
                if pa < pb || (pa == pb && sa <= sb) {
                    (pa, pb, sa, sb)
                } else {
                    (pb, pa, sb, sa)
                }
            })
            .collect();
        edges.sort_unstable();
        let mut psi: Vec<u32> = self.psi[..n].to_vec();
        for &(_, _, sa, sb) in &edges {
            psi.push(sa);
            psi.push(sb);
        }
        DecoratedGraph {
            graph: StableGraph {
                genus,
                legs,
                edges: edges.iter().map(|&(a, b, _, _)| (a, b)).collect(),
            },
            psi,
            kappa,
        }
    }
}

impl fmt::Display for DecoratedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} psi{:?} kappa{:?}", self.graph, self.psi, self.kappa)
    }
}

/// Vertex colours refined until stable; returns the colour of each vertex,
/// with colours numbered by sorted invariant signatures.
fn refined_colours(dg: &DecoratedGraph) -> Vec<u32> {
    let g = &dg.graph;
    let nv = g.num_vertices();
    let n = g.num_legs();
    type Sig = (u32, Vec<u32>, Vec<(usize, u32)>, Vec<(u32, u32)>, usize);
    let base: Vec<Sig> = (0..nv)
        .map(|v| {
            let legs: Vec<(usize, u32)> = (0..n)
                .filter(|&i| g.legs[i] as usize == v)
                .map(|i| (i, dg.psi[i]))
                .collect();
            let mut loops: Vec<(u32, u32)> = g
                .edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a as usize == v && b as usize == v)
                .map(|(e, _)| {
                    let (x, y) = (dg.psi[n + 2 * e], dg.psi[n + 2 * e + 1]);
                    (x.min(y), x.max(y))
                })
                .collect();
            loops.sort_unstable();
            (g.genus[v], dg.kappa[v].clone(), legs, loops, g.valence(v))
        })
        .collect();
    let mut colours = ranks(&base);
    let mut classes = count_distinct(&colours);
    loop {
        let sigs: Vec<(u32, Vec<(u32, u32, u32)>)> = (0..nv)
            .map(|v| {
                let mut nb: Vec<(u32, u32, u32)> = Vec::new();
                for (e, &(a, b)) in g.edges.iter().enumerate() {
                    let (a, b) = (a as usize, b as usize);
                    if a == b {
                        continue;
                    }
                    if a == v {
                        nb.push((colours[b], dg.psi[n + 2 * e], dg.psi[n + 2 * e + 1]));
                    } else if b == v {
                        nb.push((colours[a], dg.psi[n + 2 * e + 1], dg.psi[n + 2 * e]));
                    }
                }
                nb.sort_unstable();
                (colours[v], nb)
            })
            .collect();
        let next = ranks(&sigs);
        let c = count_distinct(&next);
        colours = next;
        if c == classes {
            break;
        }
        classes = c;
    }
    colours
}

fn ranks<T: Ord + Clone>(sigs: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = sigs.to_vec();
    sorted.sort();
    sorted.dedup();
    sigs.iter()
        .map(|s| sorted.binary_search(s).unwrap() as u32)
        .collect()
}

fn count_distinct(c: &[u32]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// All vertex orderings compatible with the refined colour cells.
fn cell_orderings(colours: &[u32]) -> Vec<Vec<usize>> {
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let maxc = colours.iter().copied().max().map_or(0, |m| m as usize + 1);
    for c in 0..maxc {
        let cell: Vec<usize> = (0..colours.len())
            .filter(|&v| colours[v] as usize == c)
            .collect();
        if !cell.is_empty() {
            cells.push(cell);
        }
    }
    if cells.iter().all(|c| c.len() == 1) {
        return vec![cells.into_iter().flatten().collect()];
    }
    cells
        .iter()
        .map(|cell| cell.iter().copied().permutations(cell.len()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|parts| parts.into_iter().flatten().collect())
        .collect()
}

/// Canonical form together with the number of vertex orderings realising it
/// (the vertex-level automorphism count of the decorated graph).
fn canonicalize(dg: &DecoratedGraph) -> (DecoratedGraph, u64) {
    let colours = refined_colours(dg);
    let mut best: Option<DecoratedGraph> = None;
    let mut count = 0u64;
    for order in cell_orderings(&colours) {
        let cand = dg.relabel(&order);
        match &best {
            None => {
                best = Some(cand);
                count = 1;
            }
            Some(b) => match cand.cmp(b) {
                std::cmp::Ordering::Less => {
                    best = Some(cand);
                    count = 1;
                }
                std::cmp::Ordering::Equal => count += 1,
                std::cmp::Ordering::Greater => {}
            },
        }
    }
    (best.expect("graph has at least one vertex"), count)
}

fn factorial_u64(k: usize) -> u64 {
    (1..=k as u64).product()
}

static AUT_CACHE: Lazy<RwLock<HashMap<StableGraph, u64>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Order of the automorphism group of the underlying graph acting on
/// half-edges (markings fixed). Loop flips and permutations of parallel edges
/// are counted.
pub fn automorphism_count(graph: &StableGraph) -> u64 {
    if let Some(&a) = AUT_CACHE.read().get(graph) {
        return a;
    }
    let (canon, vertex_perms) = canonicalize(&DecoratedGraph::undecorated(graph.clone()));
    let mut mult: HashMap<(u32, u32), usize> = HashMap::new();
    for &(a, b) in &canon.graph.edges {
        *mult.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    let mut aut = vertex_perms;
    for (&(a, b), &k) in &mult {
        aut *= factorial_u64(k);
        if a == b {
            aut *= 1u64 << k;
        }
    }
    AUT_CACHE.write().insert(graph.clone(), aut);
    aut
}

/// Canonical form and the automorphism-group order of the underlying graph.
pub fn canonical_form(dg: &DecoratedGraph) -> (DecoratedGraph, u64) {
    let canon = dg.canonical();
    let aut = automorphism_count(&canon.graph);
    (canon, aut)
}

/// Number of half-edge permutations fixing markings that preserve the graph
/// and its decorations.
pub fn decorated_automorphism_count(dg: &DecoratedGraph) -> u64 {
    let (canon, vertex_perms) = canonicalize(dg);
    let n = canon.graph.num_legs();
    let mut mult: HashMap<(u32, u32, u32, u32), usize> = HashMap::new();
    for (e, &(a, b)) in canon.graph.edges.iter().enumerate() {
        *mult
            .entry((a, b, canon.psi[n + 2 * e], canon.psi[n + 2 * e + 1]))
            .or_default() += 1;
    }
    let mut aut = vertex_perms;
    for (&(a, b, pa, pb), &k) in &mult {
        aut *= factorial_u64(k);
        if a == b && pa == pb {
            aut *= 1u64 << k;
        }
    }
    aut
}

/// Working representation with explicit half-edge to vertex incidence, used
/// while cutting and regluing graphs.
#[derive(Clone, Debug)]
pub struct HalfEdgeGraph {
    pub genus: Vec<u32>,
    /// vertex of each half-edge
    pub hv: Vec<usize>,
    /// half-edge of each marking
    pub legs: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl HalfEdgeGraph {
    pub fn from_graph(g: &StableGraph) -> Self {
        let n = g.num_legs();
        HalfEdgeGraph {
            genus: g.genus.clone(),
            hv: (0..g.num_half_edges()).map(|h| g.half_vertex(h)).collect(),
            legs: (0..n).collect(),
            edges: (0..g.num_edges()).map(|e| (n + 2 * e, n + 2 * e + 1)).collect(),
        }
    }

    pub fn add_half_edge(&mut self, v: usize) -> usize {
        self.hv.push(v);
        self.hv.len() - 1
    }

    pub fn add_vertex(&mut self, genus: u32) -> usize {
        self.genus.push(genus);
        self.genus.len() - 1
    }

    /// Convert back to the implicit numbering; `map[h]` gives the new index
    /// of each old half-edge that survives.
    pub fn to_graph(&self) -> (StableGraph, Vec<Option<usize>>) {
        let n = self.legs.len();
        let mut map = vec![None; self.hv.len()];
        for (i, &h) in self.legs.iter().enumerate() {
            map[h] = Some(i);
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            map[a] = Some(n + 2 * e);
            map[b] = Some(n + 2 * e + 1);
        }
        let g = StableGraph {
            genus: self.genus.clone(),
            legs: self.legs.iter().map(|&h| self.hv[h] as u32).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| (self.hv[a] as u32, self.hv[b] as u32))
                .collect(),
        };
        (g, map)
    }
}

static ENUM_CACHE: Lazy<RwLock<HashMap<(u32, usize), std::sync::Arc<Vec<StableGraph>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// All isomorphism classes of stable graphs of type `(g, n)`, canonical
/// forms sorted by edge count then lexicographically.
pub fn enumerate_stable_graphs(g: u32, n: usize) -> Result<std::sync::Arc<Vec<StableGraph>>> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(TautError::UnstableSpace { g: g as usize, n });
    }
    if let Some(v) = ENUM_CACHE.read().get(&(g, n)) {
        return Ok(v.clone());
    }
    let dim = 3 * g as usize + n - 3;
    let mut all: Vec<StableGraph> = vec![StableGraph::smooth(g, n)];
    let mut layer = all.clone();
    for _ in 0..dim {
        let mut next: Vec<StableGraph> = layer.iter().flat_map(single_degenerations).collect();
        next.sort();
        next.dedup();
        all.extend(next.iter().cloned());
        layer = next;
    }
    all.sort_by(|a, b| a.num_edges().cmp(&b.num_edges()).then(a.cmp(b)));
    let arc = std::sync::Arc::new(all);
    ENUM_CACHE.write().insert((g, n), arc.clone());
    Ok(arc)
}

/// Canonical graphs obtained by adding one edge (one more node).
pub fn single_degenerations(graph: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    for v in 0..graph.num_vertices() {
        let gv = graph.genus[v];
        if gv >= 1 {
            let mut h = HalfEdgeGraph::from_graph(graph);
            h.genus[v] -= 1;
            let a = h.add_half_edge(v);
            let b = h.add_half_edge(v);
            h.edges.push((a, b));
            out.push(h.to_graph().0.canonical());
        }
        let hs = graph.half_edges_at(v);
        let k = hs.len();
        for mask in 0u64..(1u64 << k) {
            let moved = mask.count_ones() as i64;
            for g1 in 0..=gv {
                let g2 = gv - g1;
                if 2 * g1 as i64 - 2 + (k as i64 - moved) + 1 <= 0 {
                    continue;
                }
                if 2 * g2 as i64 - 2 + moved + 1 <= 0 {
                    continue;
                }
                let mut h = HalfEdgeGraph::from_graph(graph);
                h.genus[v] = g1;
                let w = h.add_vertex(g2);
                for (i, &he) in hs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        h.hv[he] = w;
                    }
                }
                let a = h.add_half_edge(v);
                let b = h.add_half_edge(w);
                h.edges.push((a, b));
                out.push(h.to_graph().0.canonical());
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumeration_counts() {
        assert_eq!(enumerate_stable_graphs(0, 3).unwrap().len(), 1);
        assert_eq!(enumerate_stable_graphs(1, 1).unwrap().len(), 2);
        assert_eq!(enumerate_stable_graphs(0, 4).unwrap().len(), 4);
        assert!(enumerate_stable_graphs(0, 2).is_err());
        assert!(enumerate_stable_graphs(1, 0).is_err());
    }

    #[test]
    fn loop_automorphisms() {
        let loop_graph = StableGraph {
            genus: vec![0],
            legs: vec![0],
            edges: vec![(0, 0)],
        };
        assert_eq!(automorphism_count(&loop_graph), 2);
        let smooth = StableGraph::smooth(1, 1);
        assert_eq!(automorphism_count(&smooth), 1);
    }

    #[test]
    fn partner_pairs_edge_halves() {
        let g = StableGraph {
            genus: vec![0, 0],
            legs: vec![0, 0, 1],
            edges: vec![(0, 1), (1, 1)],
        };
        assert_eq!(g.partner(0), None);
        assert_eq!(g.partner(3), Some(4));
        assert_eq!(g.partner(4), Some(3));
        assert_eq!(g.partner(5), Some(6));
        assert_eq!(g.partner(6), Some(5));
    }

    #[test]
    fn two_labellings_of_same_genus_two_graph() {
        // (2, 0): genus-1 vertex joined to a genus-0 vertex with a self-loop
        let a = StableGraph {
            genus: vec![1, 0],
            legs: vec![],
            edges: vec![(0, 1), (1, 1)],
        };
        let b = StableGraph {
            genus: vec![0, 1],
            legs: vec![],
            edges: vec![(0, 0), (1, 0)],
        };
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(automorphism_count(&a), 2);
    }
}
