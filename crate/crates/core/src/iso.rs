//! Explicit isomorphisms between stable graphs (markings fixed).

use itertools::Itertools;

use crate::graph::StableGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphIso {
    /// vertex of the source -> vertex of the target
    pub vmap: Vec<usize>,
    /// half-edge of the source -> half-edge of the target
    pub hmap: Vec<usize>,
}

fn vertex_signature(g: &StableGraph, v: usize) -> (u32, usize, Vec<usize>) {
    let legs = (0..g.num_legs()).filter(|&i| g.legs[i] as usize == v).collect();
    (g.genus[v], g.valence(v), legs)
}

fn edge_counts(g: &StableGraph) -> Vec<Vec<usize>> {
    let nv = g.num_vertices();
    let mut m = vec![vec![0usize; nv]; nv];
    for &(a, b) in &g.edges {
        m[a as usize][b as usize] += 1;
        if a != b {
            m[b as usize][a as usize] += 1;
        }
    }
    m
}

/// All half-edge isomorphisms from `src` to `dst` that fix every marking.
pub fn isomorphisms(src: &StableGraph, dst: &StableGraph) -> Vec<GraphIso> {
    let nv = src.num_vertices();
    if nv != dst.num_vertices()
        || src.num_edges() != dst.num_edges()
        || src.num_legs() != dst.num_legs()
    {
        return Vec::new();
    }
    let sig_s: Vec<_> = (0..nv).map(|v| vertex_signature(src, v)).collect();
    let sig_d: Vec<_> = (0..nv).map(|v| vertex_signature(dst, v)).collect();
    let ms = edge_counts(src);
    let md = edge_counts(dst);
    let mut vmaps = Vec::new();
    let mut cur = vec![usize::MAX; nv];
    let mut used = vec![false; nv];
    extend_vertex_map(0, &sig_s, &sig_d, &ms, &md, &mut cur, &mut used, &mut vmaps);

    let n = src.num_legs();
    let mut out = Vec::new();
    for vmap in vmaps {
        // group source edges by unordered endpoint pair; match to the target
        // edges over the image pair
        let mut groups: Vec<(Vec<usize>, Vec<usize>, bool)> = Vec::new();
        let mut seen = std::collections::HashMap::new();
        for (e, &(a, b)) in src.edges.iter().enumerate() {
            let key = ((a.min(b)) as usize, (a.max(b)) as usize);
            let idx = *seen.entry(key).or_insert_with(|| {
                let (x, y) = (vmap[key.0], vmap[key.1]);
                let targets: Vec<usize> = dst
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, &(c, d))| {
                        (c as usize == x && d as usize == y) || (c as usize == y && d as usize == x)
                    })
                    .map(|(f, _)| f)
                    .collect();
                groups.push((Vec::new(), targets, key.0 == key.1));
                groups.len() - 1
            });
            groups[idx].0.push(e);
        }
        // per group: list of (edge matchings with orientation choices)
        let per_group: Vec<Vec<Vec<(usize, usize)>>> = groups
            .iter()
            .map(|(es, ts, is_loop)| {
                let k = es.len();
                let mut opts = Vec::new();
                for perm in ts.iter().copied().permutations(k) {
                    if *is_loop {
                        for flips in 0..(1u32 << k) {
                            let pairs = (0..k)
                                .map(|i| {
                                    let (e, f) = (es[i], perm[i]);
                                    let flip = flips >> i & 1 == 1;
                                    (e, 2 * f + flip as usize)
                                })
                                .collect();
                            opts.push(pairs);
                        }
                    } else {
                        let pairs = (0..k)
                            .map(|i| {
                                let (e, f) = (es[i], perm[i]);
                                let src_first = src.edges[e].0 as usize;
                                let dst_first = dst.edges[f].0 as usize;
                                // orientation is forced by the vertex map
                                let flip = vmap[src_first] != dst_first;
                                (e, 2 * f + flip as usize)
                            })
                            .collect();
                        opts.push(pairs);
                    }
                }
                opts
            })
            .collect();
        for choice in per_group.iter().map(|o| o.iter()).multi_cartesian_product() {
            let mut hmap: Vec<usize> = (0..src.num_half_edges()).collect();
            for pairs in choice {
                for &(e, code) in pairs {
                    let (f, flip) = (code / 2, code % 2 == 1);
                    let (h0, h1) = (n + 2 * e, n + 2 * e + 1);
                    let (t0, t1) = (n + 2 * f, n + 2 * f + 1);
                    if flip {
                        hmap[h0] = t1;
                        hmap[h1] = t0;
                    } else {
                        hmap[h0] = t0;
                        hmap[h1] = t1;
                    }
                }
            }
            out.push(GraphIso {
                vmap: vmap.clone(),
                hmap,
            });
        }
        if src.num_edges() == 0 {
            // multi_cartesian_product of nothing yields nothing
            if out.last().map_or(true, |o: &GraphIso| o.vmap != vmap) {
                out.push(GraphIso {
                    vmap: vmap.clone(),
                    hmap: (0..n).collect(),
                });
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn extend_vertex_map(
    v: usize,
    sig_s: &[(u32, usize, Vec<usize>)],
    sig_d: &[(u32, usize, Vec<usize>)],
    ms: &[Vec<usize>],
    md: &[Vec<usize>],
    cur: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    let nv = sig_s.len();
    if v == nv {
        out.push(cur.clone());
        return;
    }
    for t in 0..nv {
        if used[t] || sig_s[v] != sig_d[t] {
            continue;
        }
        if (0..v).any(|u| ms[v][u] != md[t][cur[u]]) || ms[v][v] != md[t][t] {
            continue;
        }
        cur[v] = t;
        used[t] = true;
        extend_vertex_map(v + 1, sig_s, sig_d, ms, md, cur, used, out);
        used[t] = false;
        cur[v] = usize::MAX;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{automorphism_count, enumerate_stable_graphs};

    #[test]
    fn self_isomorphisms_count_automorphisms() {
        for (g, n) in [(0u32, 4usize), (1, 1), (1, 2), (2, 0), (0, 5), (2, 1)] {
            for gr in enumerate_stable_graphs(g, n).unwrap().iter() {
                assert_eq!(
                    isomorphisms(gr, gr).len() as u64,
                    automorphism_count(gr),
                    "{gr}"
                );
            }
        }
    }

    #[test]
    fn isomorphism_respects_incidence() {
        let a = StableGraph {
            genus: vec![1, 0],
            legs: vec![1],
            edges: vec![(0, 1), (1, 1)],
        };
        let b = StableGraph {
            genus: vec![0, 1],
            legs: vec![0],
            edges: vec![(0, 0), (1, 0)],
        };
        let isos = isomorphisms(&a, &b);
        assert_eq!(isos.len(), 2);
        for iso in &isos {
            for h in 0..a.num_half_edges() {
                assert_eq!(iso.vmap[a.half_vertex(h)], b.half_vertex(iso.hmap[h]));
                let p = a.partner(h).map(|p| iso.hmap[p]);
                assert_eq!(p, b.partner(iso.hmap[h]));
            }
        }
    }
}
