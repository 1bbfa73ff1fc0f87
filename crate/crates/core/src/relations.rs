//! Tree sums built from Pi-, D- and Upsilon-decorations: the hhh-class, the
//! Upsilon-class, the A-classes and the master combination Sigma.
//!
//! Vertex classes live on `(g(v), |H(v)|)` with the positive half-edges
//! first. All tree sums carry the factor `prod_e a(e)`.

use std::collections::HashMap;

use num_traits::One;
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::arith::Rational;
use crate::dr::{d_class, DClassSpec};
use crate::error::{Result, TautError};
use crate::forget::forgetful_pushforward;
use crate::omega::pi_class;
use crate::taut::{check_stable, TautClass};
use crate::trees::{
    degree_functions, enumerate_trees, height, level_functions, levels_admissible,
    one_level_trees, RootedTree,
};

type Key = (u32, Vec<u64>, usize, usize);

fn check_fields(a: &[u64]) -> Result<()> {
    if a.is_empty() || a.iter().any(|&x| x == 0) {
        return Err(TautError::InvalidArgument(
            "need at least one regular leg and positive weights".into(),
        ));
    }
    Ok(())
}

fn sign(l: u32) -> Rational {
    if l % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn pi_at(t: &RootedTree, v: usize, a: &[u64]) -> Result<TautClass> {
    pi_class(t.genus[v], &t.positive_weights(v, a), t.num_negative(v), t.vertex_dim(v))
}

fn d_at(t: &RootedTree, v: usize, a: &[u64]) -> Result<TautClass> {
    d_class(
        &DClassSpec::new(t.genus[v], t.positive_weights(v, a)),
        t.vertex_dim(v),
    )
}

fn upsilon_at(t: &RootedTree, v: usize, a: &[u64]) -> Result<TautClass> {
    upsilon_class(t.genus[v], &t.positive_weights(v, a), t.num_negative(v), t.vertex_dim(v))
}

/// Components by degree, `0..=dim`.
fn split(c: &TautClass, dim: usize) -> Vec<TautClass> {
    (0..=dim).map(|d| c.component(d)).collect()
}

/// Sum over degree functions `d` accepted by `keep` of `(b_T)_*` of the
/// degree-`d(v)` components.
fn push_degrees(
    t: &RootedTree,
    comps: &[Vec<TautClass>],
    cap: usize,
    keep: impl Fn(&[u32]) -> bool,
) -> Result<TautClass> {
    let mut out = TautClass::zero(t.total_genus(), t.n() + t.m);
    for d in degree_functions(t, cap) {
        if d.iter().enumerate().any(|(v, &k)| comps[v][k as usize].is_empty()) || !keep(&d) {
            continue;
        }
        let classes: Vec<TautClass> = d
            .iter()
            .enumerate()
            .map(|(v, &k)| comps[v][k as usize].clone())
            .collect();
        out.add_assign(&t.pushforward(&classes)?)?;
    }
    Ok(out)
}

static HHH_MEMO: Lazy<RwLock<HashMap<Key, TautClass>>> = Lazy::new(|| RwLock::new(HashMap::new()));

/// `sum (-1)^{l(T)} prod a(e) (b_T)_* tensor Pi(v)_{d(v)}` over leveled
/// trees whose level degrees below the top satisfy
/// `d^lvl(i) <= 2 g^lvl(i) - 2 + m`.
pub fn hhh_class(g: u32, a: &[u64], m: usize, max_degree: usize) -> Result<TautClass> {
    check_fields(a)?;
    let n = a.len();
    check_stable(g, n + m)?;
    let max_degree = max_degree.min(3 * g as usize + n + m - 3);
    let key = (g, a.to_vec(), m, max_degree);
    if let Some(c) = HHH_MEMO.read().get(&key) {
        return Ok(c.clone());
    }
    let mut out = TautClass::zero(g, n + m);
    for t in enumerate_trees(g, n, m).iter() {
        if t.num_edges() > max_degree {
            continue;
        }
        let w = t.edge_weight(a);
        let comps: Vec<Vec<TautClass>> = (0..t.num_vertices())
            .map(|v| Ok(split(&pi_at(t, v, a)?, t.vertex_dim(v))))
            .collect::<Result<_>>()?;
        for lv in level_functions(t) {
            let top = height(&lv);
            let c = push_degrees(t, &comps, max_degree, |d| levels_admissible(t, &lv, d, top))?;
            out.add_scaled(&c, &(&w * sign(top)))?;
        }
    }
    HHH_MEMO.write().insert(key, out.clone());
    Ok(out)
}

static UPS_MEMO: Lazy<RwLock<HashMap<Key, TautClass>>> = Lazy::new(|| RwLock::new(HashMap::new()));

/// `delta_{m,1} D_{g,n+1}(a) + Pi^m_{g,n}(a) + sum over one-level trees of
/// prod a(e) (b_T)_*(Pi(v_r) tensor D(v))`.
pub fn upsilon_class(g: u32, a: &[u64], m: usize, max_degree: usize) -> Result<TautClass> {
    if m == 0 {
        return Err(TautError::FrozenLegsRequired(m));
    }
    check_fields(a)?;
    let n = a.len();
    check_stable(g, n + m)?;
    let max_degree = max_degree.min(3 * g as usize + n + m - 3);
    let key = (g, a.to_vec(), m, max_degree);
    if let Some(c) = UPS_MEMO.read().get(&key) {
        return Ok(c.clone());
    }
    let mut out = pi_class(g, a, m, max_degree)?;
    if m == 1 {
        out.add_assign(&d_class(&DClassSpec::new(g, a.to_vec()), max_degree)?)?;
    }
    for t in one_level_trees(g, n, m) {
        if t.num_edges() > max_degree {
            continue;
        }
        let mut classes = vec![pi_at(&t, 0, a)?];
        for v in 1..t.num_vertices() {
            classes.push(d_at(&t, v, a)?);
        }
        let c = t.pushforward(&classes)?.truncate(max_degree);
        out.add_scaled(&c, &t.edge_weight(a))?;
    }
    UPS_MEMO.write().insert(key, out.clone());
    Ok(out)
}

static A1_MEMO: Lazy<RwLock<HashMap<(u32, Vec<u64>, usize), TautClass>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// `A^1_{g,n}(a)` on `(g, n+1)`, from
/// `A^1 + D_{g,n+1} + sum over one-level trees of prod a(e) (b_T)_*(A^1(v_r) tensor D(v)) = 0`.
pub fn a1_class(g: u32, a: &[u64], max_degree: usize) -> Result<TautClass> {
    check_fields(a)?;
    let n = a.len();
    check_stable(g, n + 1)?;
    let max_degree = max_degree.min(3 * g as usize + n - 2);
    let key = (g, a.to_vec(), max_degree);
    if let Some(c) = A1_MEMO.read().get(&key) {
        return Ok(c.clone());
    }
    let mut out = d_class(&DClassSpec::new(g, a.to_vec()), max_degree)?.scaled(&-Rational::one());
    for t in one_level_trees(g, n, 1) {
        if t.num_edges() > max_degree {
            continue;
        }
        let mut classes = vec![a1_class(t.genus[0], &t.positive_weights(0, a), t.vertex_dim(0))?];
        for v in 1..t.num_vertices() {
            classes.push(d_at(&t, v, a)?);
        }
        let c = t.pushforward(&classes)?.truncate(max_degree);
        out.add_scaled(&c, &-t.edge_weight(a))?;
    }
    A1_MEMO.write().insert(key, out.clone());
    Ok(out)
}

/// `A^0_{g,n}(a) = pi_* A^1_{g,n}(a) / a`.
pub fn a0_class(g: u32, a: &[u64], max_degree: usize) -> Result<TautClass> {
    check_fields(a)?;
    check_stable(g, a.len())?;
    let total: u64 = a.iter().sum();
    let c = forgetful_pushforward(&a1_class(g, a, max_degree + 1)?)?;
    Ok(c.scaled(&Rational::new(1.into(), (total as i64).into())).truncate(max_degree))
}

/// `hhh^m - delta_{m,1} A^1`.
pub fn omega_a_class(g: u32, a: &[u64], m: usize, max_degree: usize) -> Result<TautClass> {
    let mut c = hhh_class(g, a, m, max_degree)?;
    if m == 1 {
        c = c.sub(&a1_class(g, a, max_degree)?)?;
    }
    Ok(c)
}

/// `hhh^m - A^m (delta_{m,0} + delta_{m,1})`.
pub fn main_difference(g: u32, a: &[u64], m: usize, max_degree: usize) -> Result<TautClass> {
    let mut c = hhh_class(g, a, m, max_degree)?;
    match m {
        0 => c = c.sub(&a0_class(g, a, max_degree)?)?,
        1 => c = c.sub(&a1_class(g, a, max_degree)?)?,
        _ => {}
    }
    Ok(c)
}

/// The three-summand combination
/// `-(hhh - delta A^1) - (one-level, root above the bound, OmegaA x D) + (leveled, top level Upsilon)`.
pub fn sigma_class(g: u32, a: &[u64], m: usize, max_degree: usize) -> Result<TautClass> {
    if m == 0 {
        return Err(TautError::FrozenLegsRequired(m));
    }
    let parts = sigma_parts(g, a, m, max_degree)?;
    let mut out = parts[0].clone();
    out.add_assign(&parts[1])?;
    out.add_assign(&parts[2])?;
    Ok(out)
}

/// The three summands of `sigma_class` separately.
pub fn sigma_parts(g: u32, a: &[u64], m: usize, max_degree: usize) -> Result<[TautClass; 3]> {
    if m == 0 {
        return Err(TautError::FrozenLegsRequired(m));
    }
    check_fields(a)?;
    let n = a.len();
    check_stable(g, n + m)?;
    let max_degree = max_degree.min(3 * g as usize + n + m - 3);
    let first = omega_a_class(g, a, m, max_degree)?.scaled(&-Rational::one());

    let mut second = TautClass::zero(g, n + m);
    for t in one_level_trees(g, n, m) {
        if t.num_edges() > max_degree {
            continue;
        }
        let gr = t.genus[0];
        let bound = 2 * gr as i64 - 2 + m as i64;
        let root = omega_a_class(gr, &t.positive_weights(0, a), m, t.vertex_dim(0))?;
        let root = root.filter_degrees(|d| d as i64 > bound);
        let mut classes = vec![root];
        for v in 1..t.num_vertices() {
            classes.push(d_at(&t, v, a)?);
        }
        let c = t.pushforward(&classes)?.truncate(max_degree);
        second.add_scaled(&c, &-t.edge_weight(a))?;
    }

    let mut third = TautClass::zero(g, n + m);
    for t in enumerate_trees(g, n, m).iter() {
        if t.num_edges() > max_degree {
            continue;
        }
        let w = t.edge_weight(a);
        let mut pis: Vec<Option<Vec<TautClass>>> = vec![None; t.num_vertices()];
        let mut ups: Vec<Option<Vec<TautClass>>> = vec![None; t.num_vertices()];
        for lv in level_functions(t) {
            let top = height(&lv);
            let mut comps = Vec::with_capacity(t.num_vertices());
            for v in 0..t.num_vertices() {
                let slot = if lv[v] == top { &mut ups } else { &mut pis };
                if slot[v].is_none() {
                    let c = if lv[v] == top { upsilon_at(t, v, a)? } else { pi_at(t, v, a)? };
                    slot[v] = Some(split(&c, t.vertex_dim(v)));
                }
                comps.push(slot[v].clone().unwrap());
            }
            let c = push_degrees(t, &comps, max_degree, |d| levels_admissible(t, &lv, d, top))?;
            third.add_scaled(&c, &(&w * sign(top)))?;
        }
    }
    Ok([first, second, third])
}
