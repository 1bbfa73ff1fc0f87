//! Forgetful maps `pi: M_{g,n+1} -> M_{g,n}` forgetting the last marking.

use num_traits::One;

use crate::arith::{int, Rational};
use crate::error::{Result, TautError};
use crate::graph::{automorphism_count, DecoratedGraph, StableGraph};
use crate::taut::{check_stable, glue, TautClass};

/// Smooth decorated vertex spaces of `dg`, legs in `half_edges_at` order.
fn vertex_parts(dg: &DecoratedGraph) -> Vec<DecoratedGraph> {
    let g = &dg.graph;
    (0..g.num_vertices())
        .map(|v| {
            let hs = g.half_edges_at(v);
            DecoratedGraph::new(
                StableGraph::smooth(g.genus[v], hs.len()),
                hs.iter().map(|&h| dg.psi[h]).collect(),
                vec![dg.kappa[v].clone()],
            )
        })
        .collect()
}

/// `pi_*` on a smooth vertex space of type `(g, k+1)`, forgetting local leg
/// `j`: `psi^a psi_j^p kappa_B` goes to
/// `[p=0] sum_i psi^{a-e_i} kappa_B + sum_S psi^a kappa_{B-S} kappa_{p-1+|S|}`.
fn vertex_pushforward(g: u32, exps: &[u32], j: usize, kappa: &[u32]) -> Vec<(Rational, Vec<u32>, Vec<u32>)> {
    let p = exps[j];
    let a: Vec<u32> = exps
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &x)| x)
        .collect();
    let chi = 2 * g as i64 - 2 + a.len() as i64;
    let mut out = Vec::new();
    if p == 0 {
        for i in 0..a.len() {
            if a[i] >= 1 {
                let mut b = a.clone();
                b[i] -= 1;
                out.push((Rational::one(), b, kappa.to_vec()));
            }
        }
    }
    for mask in 0u64..(1u64 << kappa.len()) {
        let sum: u32 = (0..kappa.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| kappa[i])
            .sum::<u32>()
            + p;
        if sum == 0 {
            continue;
        }
        let mut rest: Vec<u32> = (0..kappa.len())
            .filter(|&i| mask >> i & 1 == 0)
            .map(|i| kappa[i])
            .collect();
        if sum == 1 {
            out.push((int(chi), a.clone(), rest));
        } else {
            rest.push(sum - 1);
            out.push((Rational::one(), a.clone(), rest));
        }
    }
    out
}

/// Push forward along the map forgetting the last marking.
pub fn forgetful_pushforward(c: &TautClass) -> Result<TautClass> {
    let g = c.genus();
    let n1 = c.num_markings();
    if n1 == 0 || 2 * g as i64 - 2 + n1 as i64 - 1 <= 0 {
        return Err(TautError::TargetUnstable {
            g: g as usize,
            n: n1.saturating_sub(1),
        });
    }
    let n = n1 - 1;
    let mut out = TautClass::zero(g, n);
    for (dg, coeff) in c.terms() {
        let gr = &dg.graph;
        let v = gr.legs[n] as usize;
        let aut = Rational::from_integer(automorphism_count(gr).into());
        let hs = gr.half_edges_at(v);
        if gr.genus[v] == 0 && hs.len() == 3 {
            let (dg2, f) = contract_unstable(dg, v);
            out.add_term(dg2, coeff * f / &aut);
            continue;
        }
        // drop leg n: half-edges above it shift down by one
        let g2 = StableGraph {
            genus: gr.genus.clone(),
            legs: gr.legs[..n].to_vec(),
            edges: gr.edges.clone(),
        };
        let mut parts = vertex_parts(dg);
        let j = hs.iter().position(|&h| h == n).unwrap();
        let exps = parts[v].psi.clone();
        for (w, a, k) in vertex_pushforward(gr.genus[v], &exps, j, &dg.kappa[v]) {
            parts[v] = DecoratedGraph::new(StableGraph::smooth(gr.genus[v], a.len()), a, vec![k]);
            let (glued, f) = glue(&g2, &parts);
            out.add_term(glued, coeff * w * f / &aut);
        }
    }
    Ok(out)
}

/// Remove a genus-0 trivalent vertex carrying the last leg, joining its two
/// other half-edges. Returns the new generator and `|Aut G'|`.
fn contract_unstable(dg: &DecoratedGraph, v: usize) -> (DecoratedGraph, Rational) {
    let gr = &dg.graph;
    let n = gr.num_legs() - 1;
    let others: Vec<usize> = gr.half_edges_at(v).into_iter().filter(|&h| h != n).collect();
    let reindex = |x: usize| if x > v { x - 1 } else { x };
    let genus: Vec<u32> = (0..gr.num_vertices())
        .filter(|&x| x != v)
        .map(|x| gr.genus[x])
        .collect();
    let kappa: Vec<Vec<u32>> = (0..gr.num_vertices())
        .filter(|&x| x != v)
        .map(|x| dg.kappa[x].clone())
        .collect();
    let mut legs: Vec<u32> = gr.legs[..n].iter().map(|&x| x as u32).collect();
    let mut psi: Vec<u32> = dg.psi[..n].to_vec();
    let mut edges = Vec::new();
    let mut epsi = Vec::new();
    for (e, &(a, b)) in gr.edges.iter().enumerate() {
        if a as usize == v || b as usize == v {
            continue;
        }
        edges.push((reindex(a as usize) as u32, reindex(b as usize) as u32));
        epsi.push(dg.psi[n + 1 + 2 * e]);
        epsi.push(dg.psi[n + 2 + 2 * e]);
    }
    let (h1, h2) = (others[0], others[1]);
    match (gr.partner(h1), gr.partner(h2)) {
        (None, Some(p)) | (Some(p), None) => {
            let leg = if gr.partner(h1).is_none() { h1 } else { h2 };
            legs[leg] = gr.half_vertex(p) as u32;
            psi[leg] = dg.psi[p];
        }
        (Some(p1), Some(p2)) => {
            edges.push((
                reindex(gr.half_vertex(p1)) as u32,
                reindex(gr.half_vertex(p2)) as u32,
            ));
            epsi.push(dg.psi[p1]);
            epsi.push(dg.psi[p2]);
        }
        (None, None) => unreachable!("target space is stable"),
    }
    for l in legs.iter_mut() {
        *l = reindex(*l as usize) as u32;
    }
    psi.extend(epsi);
    let graph = StableGraph { genus, legs, edges };
    let aut = automorphism_count(&graph);
    (
        DecoratedGraph::new(graph, psi, kappa),
        Rational::from_integer(aut.into()),
    )
}

/// Pull back along the map forgetting the last marking.
pub fn forgetful_pullback(c: &TautClass) -> Result<TautClass> {
    let g = c.genus();
    let n = c.num_markings();
    check_stable(g, n)?;
    let mut out = TautClass::zero(g, n + 1);
    for (dg, coeff) in c.terms() {
        let gr = &dg.graph;
        let aut = Rational::from_integer(automorphism_count(gr).into());
        let base_parts = vertex_parts(dg);
        for v in 0..gr.num_vertices() {
            let mut legs = gr.legs.clone();
            legs.push(v as u32);
            let gv = StableGraph {
                genus: gr.genus.clone(),
                legs,
                edges: gr.edges.clone(),
            };
            // the new leg sits after the old legs at v, before edge halves
            let hs = gv.half_edges_at(v);
            let j = hs.iter().position(|&h| h == n).unwrap();
            let mut exps = base_parts[v].psi.clone();
            exps.insert(j, 0);
            for (w, part) in vertex_pullback(gr.genus[v], &exps, j, &dg.kappa[v]) {
                let mut parts = base_parts.clone();
                parts[v] = part;
                let (glued, f) = glue(&gv, &parts);
                out.add_term(glued, coeff * w * f / &aut);
            }
        }
    }
    Ok(out)
}

/// `pi^*` of `psi^a kappa_B` from `(g, k)` to `(g, k+1)`, where `exps` already
/// has a zero at the new local leg `j`.
fn vertex_pullback(g: u32, exps: &[u32], j: usize, kappa: &[u32]) -> Vec<(Rational, DecoratedGraph)> {
    let k1 = exps.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << kappa.len()) {
        let taken: Vec<u32> = (0..kappa.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| kappa[i])
            .collect();
        let rest: Vec<u32> = (0..kappa.len())
            .filter(|&i| mask >> i & 1 == 0)
            .map(|i| kappa[i])
            .collect();
        let mut e = exps.to_vec();
        e[j] = taken.iter().sum();
        let sign = if taken.len() % 2 == 0 { int(1) } else { int(-1) };
        out.push((
            sign,
            DecoratedGraph::new(StableGraph::smooth(g, k1), e, vec![rest]),
        ));
    }
    // boundary corrections: bubble carrying leg h and the new leg
    for h in 0..k1 {
        if h == j || exps[h] == 0 {
            continue;
        }
        let legs: Vec<u32> = (0..k1).map(|i| (i == h || i == j) as u32).collect();
        let mut psi: Vec<u32> = (0..k1).map(|i| if i == h || i == j { 0 } else { exps[i] }).collect();
        psi.push(exps[h] - 1);
        psi.push(0);
        let graph = StableGraph {
            genus: vec![g, 0],
            legs,
            edges: vec![(0, 1)],
        };
        out.push((int(-1), DecoratedGraph::new(graph, psi, vec![kappa.to_vec(), vec![]])));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;
    use crate::eval::integrate;
    use crate::pullback::{multiply, pairing};

    #[test]
    fn pushforward_of_one_is_zero() {
        assert!(forgetful_pushforward(&TautClass::fundamental(1, 2)).unwrap().is_empty());
    }

    #[test]
    fn dilaton_and_kappa_one() {
        for (g, n) in [(0u32, 3usize), (1, 1), (1, 2), (2, 0)] {
            let p = TautClass::psi(g, n + 1, n + 1);
            let expect = TautClass::fundamental(g, n).scaled(&int(2 * g as i64 - 2 + n as i64));
            assert_eq!(forgetful_pushforward(&p).unwrap(), expect);
        }
        let p2 = TautClass::psi(1, 2, 2).mul_psi(1, 1);
        assert_eq!(forgetful_pushforward(&p2).unwrap(), TautClass::kappa(1, 1, 1));
    }

    #[test]
    fn target_unstable() {
        assert!(forgetful_pushforward(&TautClass::fundamental(0, 3)).is_err());
        assert!(forgetful_pushforward(&TautClass::fundamental(1, 1)).is_err());
    }

    #[test]
    fn pullback_of_one_and_psi() {
        assert_eq!(
            forgetful_pullback(&TautClass::fundamental(1, 1)).unwrap(),
            TautClass::fundamental(1, 2)
        );
        // pi^* psi_1 on (1,1) -> (1,2): psi_1 - D_{1,2}
        let pb = forgetful_pullback(&TautClass::psi(1, 1, 1)).unwrap();
        let d12 = StableGraph {
            genus: vec![1, 0],
            legs: vec![1, 1],
            edges: vec![(0, 1)],
        };
        let expect = TautClass::psi(1, 2, 1).sub(&TautClass::boundary(&d12)).unwrap();
        assert_eq!(pb, expect);
    }

    #[test]
    fn projection_formula_on_m11() {
        for c in [TautClass::fundamental(1, 1), TautClass::psi(1, 1, 1)] {
            let up = forgetful_pullback(&c).unwrap();
            let prod = multiply(&up, &TautClass::psi(1, 2, 2)).unwrap();
            let down = forgetful_pushforward(&prod).unwrap();
            assert_eq!(down, c.scaled(&int(1)).mul_kappa(0));
        }
    }

    #[test]
    fn kappa_pullback_integrals() {
        // pi^* kappa_1 = kappa_1 - psi_2 on (1,2); paired with psi_1:
        // <kappa_1 psi_1>_{1,2} - <psi_1 psi_2>_{1,2} = 1/12 - 1/24
        let up = forgetful_pullback(&TautClass::kappa(1, 1, 1)).unwrap();
        let v = pairing(&up, &TautClass::psi(1, 2, 1)).unwrap();
        assert_eq!(v, frac(1, 24));
        assert_eq!(integrate(&multiply(&up, &TautClass::psi(1, 2, 1)).unwrap()), frac(1, 24));
    }
}
