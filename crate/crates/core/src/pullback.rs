//! Pullback of decorated strata to the vertex spaces of a stable graph via
//! generic structures, and the products and pairings built on it.
//!
//! For graphs `A`, `B` on the same space, a structure is a graph `Gamma`
//! obtained by replacing each vertex `w` of `B` by a stable graph `Gamma_w`,
//! together with a subset `S` of the edges of `B` and an isomorphism
//! `Gamma / S -> A`. Then
//! `xi_B^* [A, alpha] = (1/|Aut A|) sum_structures tensor_w [Gamma_w, dec_w]`
//! where `dec` is `alpha` pulled back along the isomorphism times
//! `prod (-psi_h - psi_h')` over the uncontracted edges of `B`.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use rayon::prelude::*;

use crate::arith::Rational;
use crate::error::Result;
use crate::eval::vertex_integral;
use crate::graph::{automorphism_count, enumerate_stable_graphs, DecoratedGraph, StableGraph};
use crate::iso::isomorphisms;
use crate::taut::{glue, TautClass};

/// Location of a half-edge or vertex inside the parts: `(w, local index)`.
pub type Slot = (usize, usize);

#[derive(Clone, Debug)]
pub struct PullbackStructure {
    pub parts: Vec<StableGraph>,
    /// half-edge of `A` -> half-edge of some part
    pub half_map: Vec<Slot>,
    /// vertex of `A` -> the part vertices contracted onto it
    pub vertex_map: Vec<Vec<Slot>>,
    /// edges of `B` that are also edges of `A`, as pairs of part legs
    pub excess: Vec<(Slot, Slot)>,
}

type StructKey = (StableGraph, StableGraph);

static STRUCT_CACHE: Lazy<RwLock<HashMap<StructKey, Arc<Vec<PullbackStructure>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn vertex_profile(g: &StableGraph) -> Vec<(u32, usize, Vec<usize>)> {
    let mut p: Vec<_> = (0..g.num_vertices())
        .map(|v| {
            let legs = (0..g.num_legs()).filter(|&i| g.legs[i] as usize == v).collect();
            (g.genus[v], g.valence(v), legs)
        })
        .collect();
    p.sort();
    p
}

/// All generic structures pulling `a` back to the vertex spaces of `b`.
pub fn structures(a: &StableGraph, b: &StableGraph) -> Arc<Vec<PullbackStructure>> {
    let key = (a.clone(), b.clone());
    if let Some(s) = STRUCT_CACHE.read().get(&key) {
        return s.clone();
    }
    let s = Arc::new(compute_structures(a, b));
    STRUCT_CACHE.write().insert(key, s.clone());
    s
}

fn compute_structures(a: &StableGraph, b: &StableGraph) -> Vec<PullbackStructure> {
    let ea = a.num_edges();
    let eb = b.num_edges();
    let n = b.num_legs();
    let a_profile = vertex_profile(a);
    let candidates: Vec<Vec<StableGraph>> = (0..b.num_vertices())
        .map(|w| {
            enumerate_stable_graphs(b.genus[w], b.valence(w))
                .expect("vertices of a stable graph are stable")
                .iter()
                .filter(|p| p.num_edges() <= ea)
                .cloned()
                .collect()
        })
        .collect();
    // slot of each half-edge of b inside its part (as a leg)
    let mut b_slot = vec![(0usize, 0usize); b.num_half_edges()];
    for w in 0..b.num_vertices() {
        for (j, h) in b.half_edges_at(w).into_iter().enumerate() {
            b_slot[h] = (w, j);
        }
    }
    let mut out = Vec::new();
    for combo in candidates.iter().map(|c| c.iter()).multi_cartesian_product() {
        let internal: usize = combo.iter().map(|p| p.num_edges()).sum();
        if internal > ea || internal + eb < ea {
            continue;
        }
        let common = ea - internal;
        let contracted = eb - common;
        // assemble Gamma: vertices by part offset; half-edges with slots
        let mut offset = Vec::new();
        let mut genus = Vec::new();
        for p in &combo {
            offset.push(genus.len());
            genus.extend_from_slice(&p.genus);
        }
        let vslot: Vec<Slot> = combo
            .iter()
            .enumerate()
            .flat_map(|(w, p)| (0..p.num_vertices()).map(move |v| (w, v)))
            .collect();
        let gv = |s: Slot| offset[s.0] + combo[s.0].half_vertex(s.1);
        // Gamma half-edges: legs, then b-edges, then internal edges
        let mut hslot: Vec<Slot> = (0..n).map(|i| b_slot[i]).collect();
        let mut gedges: Vec<(usize, usize)> = Vec::new();
        for e in 0..eb {
            let (s0, s1) = (b_slot[n + 2 * e], b_slot[n + 2 * e + 1]);
            hslot.push(s0);
            hslot.push(s1);
            gedges.push((gv(s0), gv(s1)));
        }
        for (w, p) in combo.iter().enumerate() {
            let pn = p.num_legs();
            for (f, &(x, y)) in p.edges.iter().enumerate() {
                hslot.push((w, pn + 2 * f));
                hslot.push((w, pn + 2 * f + 1));
                gedges.push((offset[w] + x as usize, offset[w] + y as usize));
            }
        }
        let glegs: Vec<usize> = (0..n).map(|i| gv(b_slot[i])).collect();
        for smask in 0u64..(1u64 << eb) {
            if smask.count_ones() as usize != contracted {
                continue;
            }
            // contract the b-edges in S
            let nvg = genus.len();
            let mut parent: Vec<usize> = (0..nvg).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                let mut y = x;
                while p[y] != r {
                    let nx = p[y];
                    p[y] = r;
                    y = nx;
                }
                r
            }
            for e in 0..eb {
                if smask >> e & 1 == 1 {
                    let (x, y) = gedges[e];
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                    if rx != ry {
                        parent[rx] = ry;
                    }
                }
            }
            let roots: Vec<usize> = (0..nvg).map(|v| find(&mut parent, v)).collect();
            let reps: Vec<usize> = roots.iter().copied().sorted().dedup().collect();
            let qv = |v: usize| reps.binary_search(&roots[v]).unwrap();
            let mut qgenus = vec![0u32; reps.len()];
            let mut comp_vertices = vec![0i64; reps.len()];
            for v in 0..nvg {
                qgenus[qv(v)] += genus[v];
                comp_vertices[qv(v)] += 1;
            }
            let mut comp_edges = vec![0i64; reps.len()];
            for e in 0..eb {
                if smask >> e & 1 == 1 {
                    comp_edges[qv(gedges[e].0)] += 1;
                }
            }
            for c in 0..reps.len() {
                qgenus[c] += (comp_edges[c] - comp_vertices[c] + 1) as u32;
            }
            // quotient graph, remembering Gamma half-edges
            let mut qhalf: Vec<usize> = (0..n).collect();
            let mut qedges = Vec::new();
            for (e, &(x, y)) in gedges.iter().enumerate() {
                if e < eb && smask >> e & 1 == 1 {
                    continue;
                }
                qedges.push((qv(x) as u32, qv(y) as u32));
                qhalf.push(n + 2 * e);
                qhalf.push(n + 2 * e + 1);
            }
            let q = StableGraph {
                genus: qgenus,
                legs: glegs.iter().map(|&v| qv(v) as u32).collect(),
                edges: qedges,
            };
            if vertex_profile(&q) != a_profile {
                continue;
            }
            let excess: Vec<(Slot, Slot)> = (0..eb)
                .filter(|&e| smask >> e & 1 == 0)
                .map(|e| (b_slot[n + 2 * e], b_slot[n + 2 * e + 1]))
                .collect();
            for iso in isomorphisms(&q, a) {
                // invert: a half-edge -> q half-edge -> Gamma half-edge
                let mut half_map = vec![(0, 0); a.num_half_edges()];
                for (hq, &ha) in iso.hmap.iter().enumerate() {
                    half_map[ha] = hslot[qhalf[hq]];
                }
                let mut vertex_map = vec![Vec::new(); a.num_vertices()];
                for v in 0..nvg {
                    vertex_map[iso.vmap[qv(v)]].push(vslot[v]);
                }
                out.push(PullbackStructure {
                    parts: combo.iter().map(|p| (*p).clone()).collect(),
                    half_map,
                    vertex_map,
                    excess: excess.clone(),
                });
            }
        }
    }
    out
}

/// Decorations on the parts obtained by pulling back `alpha` (which must live
/// on the graph the structure was built for) times the excess factor.
/// Terms exceeding a vertex dimension are dropped.
pub fn pull_decoration(st: &PullbackStructure, alpha: &DecoratedGraph) -> Vec<(Rational, Vec<DecoratedGraph>)> {
    let mut base: Vec<DecoratedGraph> = st
        .parts
        .iter()
        .map(|p| DecoratedGraph::undecorated(p.clone()))
        .collect();
    for (h, &(w, lh)) in st.half_map.iter().enumerate() {
        base[w].psi[lh] += alpha.psi[h];
    }
    // kappa factors: each goes to one part vertex in the preimage
    let mut factors: Vec<(u32, &Vec<Slot>)> = Vec::new();
    for (v, ks) in alpha.kappa.iter().enumerate() {
        for &m in ks {
            factors.push((m, &st.vertex_map[v]));
        }
    }
    let mut out = Vec::new();
    let kappa_choices: Vec<Vec<Slot>> = if factors.is_empty() {
        vec![Vec::new()]
    } else {
        factors
            .iter()
            .map(|(_, t)| t.iter().copied())
            .multi_cartesian_product()
            .collect()
    };
    let k = st.excess.len();
    for choice in &kappa_choices {
        let mut with_kappa = base.clone();
        for (i, &(w, v)) in choice.iter().enumerate() {
            with_kappa[w].kappa[v].push(factors[i].0);
        }
        for side in 0u64..(1u64 << k) {
            let mut d = with_kappa.clone();
            for (j, &(s0, s1)) in st.excess.iter().enumerate() {
                let (w, lh) = if side >> j & 1 == 0 { s0 } else { s1 };
                d[w].psi[lh] += 1;
            }
            if d.iter().any(|p| p.exceeds_vertex_dims()) {
                continue;
            }
            for p in d.iter_mut() {
                for ks in p.kappa.iter_mut() {
                    ks.sort_unstable();
                }
            }
            let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
            out.push((sign, d));
        }
    }
    out
}

/// Multiply a decorated graph on a vertex space by a psi/kappa monomial on
/// that space: `leg_psi[j]` adds to leg `j`, each kappa index is distributed
/// over the vertices.
pub fn mul_monomial(part: &DecoratedGraph, leg_psi: &[u32], kappas: &[u32]) -> Vec<DecoratedGraph> {
    let mut base = part.clone();
    for (j, &p) in leg_psi.iter().enumerate() {
        base.psi[j] += p;
    }
    if kappas.is_empty() {
        return vec![base];
    }
    let nv = part.graph.num_vertices();
    let mut out = Vec::new();
    for choice in (0..kappas.len()).map(|_| 0..nv).multi_cartesian_product() {
        let mut d = base.clone();
        for (i, &v) in choice.iter().enumerate() {
            d.kappa[v].push(kappas[i]);
        }
        for ks in d.kappa.iter_mut() {
            ks.sort_unstable();
        }
        out.push(d);
    }
    out
}

/// Per-vertex monomial of a decorated graph: psi powers at the half-edges of
/// `w` (in `half_edges_at` order) and its kappa multiset.
pub fn vertex_monomial(dg: &DecoratedGraph, w: usize) -> (Vec<u32>, Vec<u32>) {
    let hs = dg.graph.half_edges_at(w);
    (hs.iter().map(|&h| dg.psi[h]).collect(), dg.kappa[w].clone())
}

/// `int [G, dec] * monomial` on the vertex space of `G`.
fn part_integral(part: &DecoratedGraph, leg_psi: &[u32], kappas: &[u32]) -> Rational {
    let g = &part.graph;
    let aut = Rational::from_integer(automorphism_count(g).into());
    let mut total = Rational::zero();
    for d in mul_monomial(part, leg_psi, kappas) {
        let mut acc = Rational::one();
        for v in 0..g.num_vertices() {
            let exps: Vec<u32> = g.half_edges_at(v).iter().map(|&h| d.psi[h]).collect();
            let x = vertex_integral(g.genus[v], &exps, &d.kappa[v]);
            if x.is_zero() {
                acc = x;
                break;
            }
            acc *= x;
        }
        total += acc;
    }
    total / aut
}

/// `int [A, alpha] * [B, beta]` for canonical decorated graphs.
pub fn pair_terms(x: &DecoratedGraph, y: &DecoratedGraph) -> Rational {
    // pull the graph with more edges back to the one with fewer
    let (a, b) = if x.graph.num_edges() >= y.graph.num_edges() {
        (x, y)
    } else {
        (y, x)
    };
    pair_pulled(a, b)
}

fn pair_pulled(a: &DecoratedGraph, b: &DecoratedGraph) -> Rational {
    let sts = structures(&a.graph, &b.graph);
    let mono: Vec<(Vec<u32>, Vec<u32>)> = (0..b.graph.num_vertices())
        .map(|w| vertex_monomial(b, w))
        .collect();
    let mut total = Rational::zero();
    for st in sts.iter() {
        for (sign, parts) in pull_decoration(st, a) {
            let mut acc = sign;
            for (w, p) in parts.iter().enumerate() {
                let x = part_integral(p, &mono[w].0, &mono[w].1);
                if x.is_zero() {
                    acc = x;
                    break;
                }
                acc *= x;
            }
            total += acc;
        }
    }
    let auts = automorphism_count(&a.graph) * automorphism_count(&b.graph);
    total / Rational::from_integer(auts.into())
}

/// `int c * d` over the ambient space.
pub fn pairing(c: &TautClass, d: &TautClass) -> Result<Rational> {
    if (c.genus(), c.num_markings()) != (d.genus(), d.num_markings()) {
        return Err(crate::error::TautError::AmbientMismatch(
            c.genus() as usize,
            c.num_markings(),
            d.genus() as usize,
            d.num_markings(),
        ));
    }
    let dim = c.dim();
    let xs: Vec<_> = c.terms().collect();
    let ys: Vec<_> = d.terms().collect();
    let v: Rational = xs
        .par_iter()
        .map(|(a, ca)| {
            let mut s = Rational::zero();
            for (b, cb) in &ys {
                if a.degree() + b.degree() == dim {
                    s += *ca * *cb * pair_terms(a, b);
                }
            }
            s
        })
        .reduce(Rational::zero, |x, y| x + y);
    Ok(v)
}

/// Ring product, truncated at the dimension.
pub fn multiply(c1: &TautClass, c2: &TautClass) -> Result<TautClass> {
    if (c1.genus(), c1.num_markings()) != (c2.genus(), c2.num_markings()) {
        return Err(crate::error::TautError::AmbientMismatch(
            c1.genus() as usize,
            c1.num_markings(),
            c2.genus() as usize,
            c2.num_markings(),
        ));
    }
    let dim = c1.dim();
    let ys: Vec<_> = c2.terms().collect();
    let partials: Vec<TautClass> = ys
        .par_iter()
        .map(|(b, cb)| {
            let mut out = TautClass::zero(c1.genus(), c1.num_markings());
            let mono: Vec<(Vec<u32>, Vec<u32>)> = (0..b.graph.num_vertices())
                .map(|w| vertex_monomial(b, w))
                .collect();
            let aut_b = automorphism_count(&b.graph);
            for (a, ca) in c1.terms() {
                if a.degree() + b.degree() > dim {
                    continue;
                }
                let aut_a = automorphism_count(&a.graph);
                let denom = Rational::from_integer((aut_a * aut_b).into());
                for st in structures(&a.graph, &b.graph).iter() {
                    for (sign, parts) in pull_decoration(st, a) {
                        let per_part: Vec<Vec<DecoratedGraph>> = parts
                            .iter()
                            .enumerate()
                            .map(|(w, p)| mul_monomial(p, &mono[w].0, &mono[w].1))
                            .collect();
                        for choice in per_part.iter().map(|v| v.iter()).multi_cartesian_product() {
                            let ps: Vec<DecoratedGraph> = choice.into_iter().cloned().collect();
                            let (dg, f) = glue(&b.graph, &ps);
                            out.add_term(dg, &sign * *cb * ca * f / &denom);
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut total = TautClass::zero(c1.genus(), c1.num_markings());
    for p in partials {
        total.add_assign(&p)?;
    }
    Ok(total)
}
