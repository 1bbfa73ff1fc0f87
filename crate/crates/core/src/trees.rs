//! Stable rooted trees with regular legs and frozen legs at the root, their
//! level functions and degree functions.
//!
//! Trees are kept pruned: every non-root vertex has at least one regular leg
//! among its descendants, since the edge weight `a(e)` of an edge without
//! descendant legs is zero. With all legs labelled this also makes every
//! tree automorphism-free.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use num_traits::One;
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::arith::{int, Rational};
use crate::error::Result;
use crate::graph::{automorphism_count, StableGraph};
use crate::pairing::compositions;
use crate::taut::{boundary_pushforward, TautClass};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedTree {
    /// genus of each vertex; vertex 0 is the root
    pub genus: Vec<u32>,
    /// parent of each vertex, `None` only at the root
    pub parent: Vec<Option<usize>>,
    /// vertex carrying regular leg `i`
    pub legs: Vec<usize>,
    /// number of frozen legs, all at the root
    pub m: usize,
}

/// A positive half-edge at a vertex: a regular leg or the edge to a child.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positive {
    Leg(usize),
    Child(usize),
}

impl RootedTree {
    pub fn single(g: u32, n: usize, m: usize) -> Self {
        RootedTree {
            genus: vec![g],
            parent: vec![None],
            legs: vec![0; n],
            m,
        }
    }

    pub fn n(&self) -> usize {
        self.legs.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.genus.len()
    }

    pub fn num_edges(&self) -> usize {
        self.genus.len() - 1
    }

    pub fn total_genus(&self) -> u32 {
        self.genus.iter().sum()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&w| self.parent[w] == Some(v))
            .collect()
    }

    pub fn is_root(&self, v: usize) -> bool {
        v == 0
    }

    /// Positive half-edges at `v`: its regular legs, then its children.
    pub fn positive(&self, v: usize) -> Vec<Positive> {
        let mut out: Vec<Positive> = (0..self.n())
            .filter(|&i| self.legs[i] == v)
            .map(Positive::Leg)
            .collect();
        out.extend(self.children(v).into_iter().map(Positive::Child));
        out
    }

    pub fn num_negative(&self, v: usize) -> usize {
        if v == 0 {
            self.m
        } else {
            1
        }
    }

    pub fn valence(&self, v: usize) -> usize {
        self.positive(v).len() + self.num_negative(v)
    }

    pub fn vertex_dim(&self, v: usize) -> usize {
        (3 * self.genus[v] as i64 - 3 + self.valence(v) as i64).max(0) as usize
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| 2 * self.genus[v] as i64 - 2 + self.valence(v) as i64 > 0)
    }

    /// Is `w` a descendant of `v` (or `v` itself)?
    pub fn descends(&self, w: usize, v: usize) -> bool {
        let mut cur = Some(w);
        while let Some(x) = cur {
            if x == v {
                return true;
            }
            cur = self.parent[x];
        }
        false
    }

    /// Regular legs descending from `v`, ascending.
    pub fn descendant_legs(&self, v: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.descends(self.legs[i], v)).collect()
    }

    /// `a(v)`: the sum of `a` over the descendant legs of `v`.
    pub fn a_of(&self, v: usize, a: &[u64]) -> u64 {
        self.descendant_legs(v).iter().map(|&i| a[i]).sum()
    }

    /// `a(h)` for the positive half-edges at `v`, in `positive(v)` order.
    pub fn positive_weights(&self, v: usize, a: &[u64]) -> Vec<u64> {
        self.positive(v)
            .into_iter()
            .map(|p| match p {
                Positive::Leg(i) => a[i],
                Positive::Child(c) => self.a_of(c, a),
            })
            .collect()
    }

    /// `prod_e a(e)`.
    pub fn edge_weight(&self, a: &[u64]) -> Rational {
        (1..self.num_vertices())
            .map(|v| int(self.a_of(v, a) as i64))
            .fold(Rational::one(), |x, y| x * y)
    }

    /// Depth of each vertex (root 0).
    pub fn depth(&self, v: usize) -> usize {
        let mut d = 0;
        let mut cur = self.parent[v];
        while let Some(x) = cur {
            d += 1;
            cur = self.parent[x];
        }
        d
    }

    /// The underlying stable graph: regular legs first, frozen legs next,
    /// the edge to vertex `v` has index `v - 1` and starts at the parent.
    pub fn stable_graph(&self) -> StableGraph {
        let mut legs: Vec<u32> = self.legs.iter().map(|&v| v as u32).collect();
        legs.extend(std::iter::repeat(0).take(self.m));
        let edges = (1..self.num_vertices())
            .map(|v| (self.parent[v].unwrap() as u32, v as u32))
            .collect();
        StableGraph {
            genus: self.genus.clone(),
            legs,
            edges,
        }
    }

    /// Half-edges at `v` of `stable_graph()` in vertex-class order:
    /// positive half-edges, then negative ones.
    fn class_order(&self, v: usize) -> Vec<usize> {
        let n = self.n();
        let off = n + self.m;
        let mut out: Vec<usize> = self
            .positive(v)
            .into_iter()
            .map(|p| match p {
                Positive::Leg(i) => i,
                Positive::Child(c) => off + 2 * (c - 1),
            })
            .collect();
        if v == 0 {
            out.extend(n..n + self.m);
        } else {
            out.push(off + 2 * (v - 1) + 1);
        }
        out
    }

    /// `(b_T)_*` of per-vertex classes, each with its markings in
    /// positive-then-negative order.
    pub fn pushforward(&self, classes: &[TautClass]) -> Result<TautClass> {
        let graph = self.stable_graph();
        let mut local = Vec::with_capacity(classes.len());
        for (v, c) in classes.iter().enumerate() {
            let at = graph.half_edges_at(v);
            let perm: Vec<usize> = self
                .class_order(v)
                .iter()
                .map(|h| at.iter().position(|x| x == h).unwrap())
                .collect();
            local.push(c.permute_markings(&perm));
        }
        let aut = automorphism_count(&graph);
        let c = boundary_pushforward(&graph, &local)?;
        Ok(if aut == 1 {
            c
        } else {
            c.scaled(&int(aut as i64))
        })
    }

    /// Canonical relabelling: preorder with children sorted by their
    /// smallest descendant leg. Returns the tree and the old-to-new map.
    pub fn canonical(&self) -> (RootedTree, Vec<usize>) {
        let nv = self.num_vertices();
        let key: Vec<usize> = (0..nv)
            .map(|v| self.descendant_legs(v).first().copied().unwrap_or(usize::MAX))
            .collect();
        let mut order = Vec::with_capacity(nv);
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            order.push(v);
            let mut ch = self.children(v);
            ch.sort_by_key(|&c| std::cmp::Reverse(key[c]));
            stack.extend(ch);
        }
        let mut map = vec![0usize; nv];
        for (new, &old) in order.iter().enumerate() {
            map[old] = new;
        }
        let t = RootedTree {
            genus: order.iter().map(|&v| self.genus[v]).collect(),
            parent: order.iter().map(|&v| self.parent[v].map(|p| map[p])).collect(),
            legs: self.legs.iter().map(|&v| map[v]).collect(),
            m: self.m,
        };
        (t, map)
    }
}

#[derive(Clone, Debug)]
struct Shape {
    genus: u32,
    legs: Vec<usize>,
    children: Vec<Shape>,
}

/// Set partitions of `items` into nonempty blocks, blocks ordered by their
/// first element.
pub fn set_partitions<T: Clone + Ord>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let first = items[0].clone();
    let mut out = Vec::new();
    for p in set_partitions(&items[1..]) {
        let mut with_new = vec![vec![first.clone()]];
        with_new.extend(p.iter().cloned());
        out.push(with_new);
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first.clone());
            q.sort();
            out.push(q);
        }
    }
    out
}

fn shapes(legs: &[usize], g: u32, negative: usize) -> Vec<Shape> {
    let mut out = Vec::new();
    for gv in 0..=g {
        for mask in 0u32..(1 << legs.len()) {
            let kept: Vec<usize> = (0..legs.len())
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| legs[i])
                .collect();
            let rest: Vec<usize> = (0..legs.len())
                .filter(|&i| mask & (1 << i) == 0)
                .map(|i| legs[i])
                .collect();
            for blocks in set_partitions(&rest) {
                let k = blocks.len();
                if 2 * gv as i64 - 2 + (kept.len() + k + negative) as i64 <= 0 {
                    continue;
                }
                if k == 0 {
                    if gv == g {
                        out.push(Shape {
                            genus: gv,
                            legs: kept.clone(),
                            children: Vec::new(),
                        });
                    }
                    continue;
                }
                for comp in compositions(g - gv, k) {
                    let options: Vec<Vec<Shape>> = blocks
                        .iter()
                        .zip(&comp)
                        .map(|(b, &gb)| shapes(b, gb, 1))
                        .collect();
                    if options.iter().any(|o| o.is_empty()) {
                        continue;
                    }
                    for choice in options.iter().map(|o| o.iter()).multi_cartesian_product() {
                        out.push(Shape {
                            genus: gv,
                            legs: kept.clone(),
                            children: choice.into_iter().cloned().collect(),
                        });
                    }
                }
            }
        }
    }
    out
}

fn flatten(s: &Shape, n: usize, m: usize) -> RootedTree {
    let mut t = RootedTree {
        genus: Vec::new(),
        parent: Vec::new(),
        legs: vec![usize::MAX; n],
        m,
    };
    fn go(s: &Shape, parent: Option<usize>, t: &mut RootedTree) {
        let v = t.genus.len();
        t.genus.push(s.genus);
        t.parent.push(parent);
        for &l in &s.legs {
            t.legs[l] = v;
        }
        for c in &s.children {
            go(c, Some(v), t);
        }
    }
    go(s, None, &mut t);
    t.canonical().0
}

static TREE_CACHE: Lazy<RwLock<HashMap<(u32, usize, usize), Arc<Vec<RootedTree>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// All pruned stable rooted trees of genus `g` with `n` regular and `m`
/// frozen legs, canonical and duplicate-free.
pub fn enumerate_trees(g: u32, n: usize, m: usize) -> Arc<Vec<RootedTree>> {
    let key = (g, n, m);
    if let Some(t) = TREE_CACHE.read().get(&key) {
        return t.clone();
    }
    let legs: Vec<usize> = (0..n).collect();
    let mut trees: Vec<RootedTree> = shapes(&legs, g, m).iter().map(|s| flatten(s, n, m)).collect();
    trees.sort();
    trees.dedup();
    let trees = Arc::new(trees);
    TREE_CACHE.write().insert(key, trees.clone());
    trees
}

/// Trees of height one: every non-root vertex is a child of the root.
pub fn one_level_trees(g: u32, n: usize, m: usize) -> Vec<RootedTree> {
    enumerate_trees(g, n, m)
        .iter()
        .filter(|t| t.num_vertices() > 1 && (1..t.num_vertices()).all(|v| t.parent[v] == Some(0)))
        .cloned()
        .collect()
}

/// Level functions: root at 0, strictly increasing away from the root, no
/// empty levels.
pub fn level_functions(t: &RootedTree) -> Vec<Vec<u32>> {
    let nv = t.num_vertices();
    // vertices are in preorder, so parents come first
    let mut out = Vec::new();
    let mut cur = vec![0u32; nv];
    fn go(v: usize, t: &RootedTree, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let nv = t.num_vertices();
        if v == nv {
            let max = *cur.iter().max().unwrap();
            if (0..=max).all(|l| cur.contains(&l)) {
                out.push(cur.clone());
            }
            return;
        }
        let p = cur[t.parent[v].unwrap()];
        for l in p + 1..nv as u32 {
            cur[v] = l;
            go(v + 1, t, cur, out);
        }
    }
    go(1, t, &mut cur, &mut out);
    out
}

pub fn height(levels: &[u32]) -> u32 {
    levels.iter().copied().max().unwrap_or(0)
}

/// `g^lvl(l)`.
pub fn level_genus(t: &RootedTree, levels: &[u32], l: u32) -> i64 {
    (0..t.num_vertices())
        .filter(|&v| levels[v] <= l)
        .map(|v| t.genus[v] as i64)
        .sum()
}

/// `d^lvl(l)`.
pub fn level_degree(levels: &[u32], d: &[u32], l: u32) -> i64 {
    let mut s = -1i64;
    for (v, &lv) in levels.iter().enumerate() {
        if lv <= l {
            s += d[v] as i64 + 1;
        }
    }
    s
}

/// `d^lvl(i) <= 2 g^lvl(i) - 2 + m` for every level `i` below `top`.
pub fn levels_admissible(t: &RootedTree, levels: &[u32], d: &[u32], top: u32) -> bool {
    (0..top).all(|i| level_degree(levels, d, i) <= 2 * level_genus(t, levels, i) - 2 + t.m as i64)
}

/// Degree functions with `d(v) <= dim(v)` and `sum d(v) + |E| <= cap`.
pub fn degree_functions(t: &RootedTree, cap: usize) -> Vec<Vec<u32>> {
    let nv = t.num_vertices();
    let mut out = Vec::new();
    if t.num_edges() > cap {
        return out;
    }
    let budget = cap - t.num_edges();
    let dims: Vec<usize> = (0..nv).map(|v| t.vertex_dim(v)).collect();
    let mut cur = vec![0u32; nv];
    fn go(v: usize, left: usize, dims: &[usize], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if v == dims.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=dims[v].min(left) {
            cur[v] = k as u32;
            go(v + 1, left - k, dims, cur, out);
        }
        cur[v] = 0;
    }
    go(0, budget, &dims, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_partition_counts() {
        // Bell numbers
        for (k, b) in [(0usize, 1usize), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52)] {
            let items: Vec<usize> = (0..k).collect();
            assert_eq!(set_partitions(&items).len(), b);
        }
    }

    #[test]
    fn single_vertex_present() {
        for (g, n, m) in [(0u32, 3usize, 0usize), (0, 2, 1), (1, 1, 1), (2, 0, 1)] {
            let ts = enumerate_trees(g, n, m);
            assert!(ts.contains(&RootedTree::single(g, n, m)));
            assert!(ts.iter().all(|t| t.is_stable() && t.total_genus() == g));
        }
    }

    #[test]
    fn small_counts() {
        // (0, 2, 1): only the single vertex
        assert_eq!(enumerate_trees(0, 2, 1).len(), 1);
        // (0, 3, 1): single vertex, or a genus-0 child holding two of the
        // three legs
        assert_eq!(enumerate_trees(0, 3, 1).len(), 4);
        // (1, 1, 1): a genus-0 root would need a second child, which pruning
        // forbids
        assert_eq!(enumerate_trees(1, 1, 1).len(), 1);
    }

    #[test]
    fn pruned_trees_have_no_automorphisms() {
        for (g, n, m) in [(0u32, 4usize, 1usize), (1, 3, 1), (2, 2, 1), (1, 2, 2)] {
            for t in enumerate_trees(g, n, m).iter() {
                assert_eq!(automorphism_count(&t.stable_graph()), 1, "{t:?}");
            }
        }
    }

    #[test]
    fn level_function_counts() {
        // root with two children: both at level 1, or at levels 1 and 2 in
        // either order
        let t = RootedTree {
            genus: vec![0, 0, 0],
            parent: vec![None, Some(0), Some(0)],
            legs: vec![1, 1, 2, 2],
            m: 1,
        };
        assert_eq!(level_functions(&t).len(), 3);
        let chain = RootedTree {
            genus: vec![0, 0, 0],
            parent: vec![None, Some(0), Some(1)],
            legs: vec![1, 2, 2],
            m: 1,
        };
        assert_eq!(level_functions(&chain), vec![vec![0, 1, 2]]);
    }
}
