//! Chiodo classes as graph sums, Hodge classes, and the h- and Pi-classes.
//!
//! `Omega^{[x]}(r, s; a)` is evaluated as
//! `sum_G sum_w r^{2g-1-h1(G)} [G, prod_v V_v prod_i L_i prod_e E_e]` with
//!
//! * `V_v = exp(-sum_m (-1)^{m-1} x^m B_{m+1}(s/r) / (m(m+1)) kappa_m(v))`
//! * `L_i = exp(sum_m (-1)^{m-1} x^m B_{m+1}(a_i/r) / (m(m+1)) psi_i^m)`
//! * `E_e = (1 - exp(sum_m (-1)^{m-1} x^m B_{m+1}(w(h)/r) / (m(m+1)) (psi_h^m - (-psi_h')^m))) / (psi_h + psi_h')`
//!
//! where `w` runs over weightings of half-edges by `0..r` with
//! `w(leg i) = a_i mod r`, `w(h) + w(h') = 0 mod r` on edges and
//! `sum_{h at v} w(h) = s(2g_v - 2 + n_v) mod r` at each vertex.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::arith::{bernoulli_polynomial, frac, int, pow, pow_signed, Rational};
use crate::error::{Result, TautError};
use crate::graph::{enumerate_stable_graphs, DecoratedGraph, StableGraph};
use crate::taut::{boundary_pushforward, check_stable, TautClass};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OmegaSpec {
    pub r: u32,
    pub s: i64,
    pub fields: Vec<i64>,
    pub x: Rational,
}

impl OmegaSpec {
    pub fn new(r: u32, s: i64, fields: Vec<i64>, x: Rational) -> Self {
        OmegaSpec { r, s, fields, x }
    }

    pub fn check(&self, g: u32) -> Result<()> {
        if self.r == 0 {
            return Err(TautError::InvalidArgument("r must be positive".into()));
        }
        let r = self.r as i64;
        let sum: i64 = self.fields.iter().sum();
        let expected = (2 * g as i64 - 2 + self.fields.len() as i64) * self.s;
        if (sum - expected).rem_euclid(r) != 0 {
            return Err(TautError::ModularConstraint {
                sum,
                expected: expected.rem_euclid(r),
                r,
            });
        }
        Ok(())
    }

    fn normalized(&self) -> bool {
        self.fields.iter().all(|&a| a >= 0 && a < self.r as i64)
    }
}

/// `c_m = (-1)^{m-1} x^m B_{m+1}(y) / (m(m+1))`.
fn series_coeff(m: u32, y: &Rational, x: &Rational) -> Rational {
    let sign = if m % 2 == 1 { int(1) } else { int(-1) };
    sign * pow(x, m) * bernoulli_polynomial(m as usize + 1, y) / int((m * (m + 1)) as i64)
}

/// Univariate `exp(sum_{m>=1} t_m z^m)` up to `z^max`.
fn exp_series(t: &[Rational], max: usize) -> Vec<Rational> {
    // f' = (sum m t_m z^{m-1}) f
    let mut f = vec![Rational::zero(); max + 1];
    f[0] = Rational::one();
    for k in 1..=max {
        let mut s = Rational::zero();
        for m in 1..=k {
            if m < t.len() && !t[m].is_zero() {
                s += int(m as i64) * &t[m] * &f[k - m];
            }
        }
        f[k] = s / int(k as i64);
    }
    f
}

/// Bivariate polynomial `sum c[i][j] u^i v^j`, total degree `<= max`.
type Bivariate = Vec<Vec<Rational>>;

fn bivariate_zero(max: usize) -> Bivariate {
    (0..=max).map(|i| vec![Rational::zero(); max + 1 - i]).collect()
}

fn bivariate_mul(a: &Bivariate, b: &Bivariate, max: usize) -> Bivariate {
    let mut c = bivariate_zero(max);
    for i in 0..a.len() {
        for j in 0..a[i].len() {
            if a[i][j].is_zero() {
                continue;
            }
            for k in 0..b.len() {
                for l in 0..b[k].len() {
                    if i + j + k + l > max || b[k][l].is_zero() {
                        continue;
                    }
                    c[i + k][j + l] += &a[i][j] * &b[k][l];
                }
            }
        }
    }
    c
}

/// Edge factor `(1 - exp(F)) / (u + v)` for twist `w`, total degree `<= max`.
/// With `F = (u+v) G`, this is `-G (e^F - 1)/F = -G sum_k F^k/(k+1)!`.
fn edge_factor(r: u32, w: u32, x: &Rational, max: usize) -> Bivariate {
    let y = frac(w as i64, r as i64);
    let mut gpoly = bivariate_zero(max + 1);
    let mut fpoly = bivariate_zero(max + 1);
    for m in 1..=(max as u32 + 1) {
        let c = series_coeff(m, &y, x);
        if c.is_zero() {
            continue;
        }
        // (u^m - (-v)^m)/(u+v) = sum_j u^{m-1-j} (-v)^j
        for j in 0..m {
            let sgn = if j % 2 == 0 { int(1) } else { int(-1) };
            if ((m - 1) as usize) <= max {
                gpoly[(m - 1 - j) as usize][j as usize] += &c * &sgn;
            }
        }
        fpoly[m as usize][0] += &c;
        let sgn = if m % 2 == 0 { int(-1) } else { int(1) };
        fpoly[0][m as usize] += &c * sgn;
    }
    // sum_k F^k / (k+1)!
    let mut acc = bivariate_zero(max);
    acc[0][0] = Rational::one();
    let mut power = acc.clone();
    let mut fact = Rational::one();
    for k in 1..=max {
        power = bivariate_mul(&power, &fpoly, max);
        fact *= int(k as i64 + 1);
        for i in 0..power.len() {
            for j in 0..power[i].len() {
                if !power[i][j].is_zero() {
                    acc[i][j] += &power[i][j] / &fact;
                }
            }
        }
    }
    let gtrunc: Bivariate = (0..=max)
        .map(|i| (0..=max - i).map(|j| -gpoly[i][j].clone()).collect())
        .collect();
    bivariate_mul(&gtrunc, &acc, max)
}

/// Sparse decoration polynomial on a fixed graph.
pub(crate) type Mono = (Vec<u32>, Vec<Vec<u32>>);
pub(crate) type Poly = HashMap<Mono, Rational>;

fn mono_degree(m: &Mono) -> usize {
    m.0.iter().map(|&p| p as usize).sum::<usize>()
        + m.1.iter().flatten().map(|&k| k as usize).sum::<usize>()
}

pub(crate) fn poly_mul(a: &Poly, b: &Poly, max: usize, graph: &StableGraph) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        let da = mono_degree(ma);
        for (mb, cb) in b {
            if da + mono_degree(mb) > max {
                continue;
            }
            let psi: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
            let kappa: Vec<Vec<u32>> = ma
                .1
                .iter()
                .zip(&mb.1)
                .map(|(x, y)| {
                    let mut k = x.clone();
                    k.extend_from_slice(y);
                    k.sort_unstable();
                    k
                })
                .collect();
            let m = (psi, kappa);
            if exceeds(&m, graph) {
                continue;
            }
            *out.entry(m).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn exceeds(m: &Mono, graph: &StableGraph) -> bool {
    (0..graph.num_vertices()).any(|v| {
        let d: u32 = graph.half_edges_at(v).iter().map(|&h| m.0[h]).sum::<u32>()
            + m.1[v].iter().sum::<u32>();
        d as i64 > graph.vertex_dim(v)
    })
}

pub(crate) fn unit_mono(graph: &StableGraph) -> Mono {
    (
        vec![0; graph.num_half_edges()],
        vec![Vec::new(); graph.num_vertices()],
    )
}

/// Multisets of positive integers of total at most `max`, with the
/// coefficient of `prod_m (t_m kappa_m)^{k_m} / k_m!`.
fn kappa_exp_terms(t: &[Rational], max: usize) -> Vec<(Vec<u32>, Rational)> {
    let mut out = vec![(Vec::new(), Rational::one())];
    for m in 1..=max {
        if m >= t.len() || t[m].is_zero() {
            continue;
        }
        let mut next = Vec::new();
        for (ks, c) in &out {
            let used: usize = ks.iter().map(|&k| k as usize).sum();
            let mut k = 0usize;
            let mut coeff = c.clone();
            let mut cur = ks.clone();
            loop {
                next.push((cur.clone(), coeff.clone()));
                k += 1;
                if used + k * m > max {
                    break;
                }
                coeff = coeff * &t[m] / int(k as i64);
                cur.push(m as u32);
            }
        }
        out = next;
    }
    for (ks, _) in out.iter_mut() {
        ks.sort_unstable();
    }
    out
}

/// All edge weightings of `graph` compatible with the leg weights and vertex
/// targets, as the value of the first half of each edge.
pub(crate) fn weightings(graph: &StableGraph, r: u32, leg_w: &[u32], s: i64) -> Vec<Vec<u32>> {
    let nv = graph.num_vertices();
    let ne = graph.num_edges();
    let r64 = r as i64;
    let target: Vec<i64> = (0..nv)
        .map(|v| (s * (2 * graph.genus[v] as i64 - 2 + graph.valence(v) as i64)).rem_euclid(r64))
        .collect();
    // spanning tree by BFS from vertex 0
    let mut parent_edge = vec![usize::MAX; nv];
    let mut order = vec![0usize];
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut in_tree = vec![false; ne];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for (e, &(a, b)) in graph.edges.iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            let other = if a == v { b } else if b == v { a } else { continue };
            if !seen[other] {
                seen[other] = true;
                parent_edge[other] = e;
                in_tree[e] = true;
                order.push(other);
            }
        }
    }
    let free: Vec<usize> = (0..ne).filter(|&e| !in_tree[e]).collect();
    let mut out = Vec::new();
    let total = (r as u64).pow(free.len() as u32);
    for code in 0..total {
        let mut w = vec![u32::MAX; ne];
        let mut c = code;
        for &e in &free {
            w[e] = (c % r as u64) as u32;
            c /= r as u64;
        }
        // children before parents
        let mut ok = true;
        for &v in order.iter().skip(1).rev() {
            let pe = parent_edge[v];
            let mut sum = 0i64;
            for (i, &lv) in graph.legs.iter().enumerate() {
                if lv as usize == v {
                    sum += leg_w[i] as i64;
                }
            }
            for (e, &(a, b)) in graph.edges.iter().enumerate() {
                if e == pe {
                    continue;
                }
                if a as usize == v {
                    sum += w[e] as i64;
                }
                if b as usize == v {
                    sum += (r64 - w[e] as i64).rem_euclid(r64);
                }
            }
            let need = (target[v] - sum).rem_euclid(r64);
            // need is the weight of the half of `pe` at v
            w[pe] = if graph.edges[pe].0 as usize == v {
                need as u32
            } else {
                ((r64 - need).rem_euclid(r64)) as u32
            };
        }
        // root check
        let mut sum = 0i64;
        for (i, &lv) in graph.legs.iter().enumerate() {
            if lv == 0 {
                sum += leg_w[i] as i64;
            }
        }
        for (e, &(a, b)) in graph.edges.iter().enumerate() {
            if a == 0 {
                sum += w[e] as i64;
            }
            if b == 0 {
                sum += (r64 - w[e] as i64).rem_euclid(r64);
            }
        }
        if (sum - target[0]).rem_euclid(r64) != 0 {
            ok = false;
        }
        if ok {
            out.push(w);
        }
    }
    out
}

type EdgeKey = (u32, u32, Rational, usize);
static EDGE_MEMO: Lazy<RwLock<HashMap<EdgeKey, Arc<Bivariate>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn edge_factor_cached(r: u32, w: u32, x: &Rational, max: usize) -> Arc<Bivariate> {
    let key = (r, w, x.clone(), max);
    if let Some(v) = EDGE_MEMO.read().get(&key) {
        return v.clone();
    }
    let v = Arc::new(edge_factor(r, w, x, max));
    EDGE_MEMO.write().insert(key, v.clone());
    v
}

/// The graph sum with leg factors evaluated at the given (possibly
/// unreduced) fields. `trees_only` skips graphs with loops.
fn omega_graph_sum(g: u32, spec: &OmegaSpec, max_degree: usize, trees_only: bool) -> Result<TautClass> {
    let n = spec.fields.len();
    check_stable(g, n)?;
    spec.check(g)?;
    let r = spec.r;
    let x = &spec.x;
    let leg_w: Vec<u32> = spec
        .fields
        .iter()
        .map(|&a| a.rem_euclid(r as i64) as u32)
        .collect();
    let max_degree = max_degree.min(3 * g as usize + n - 3);
    // leg and vertex series
    let leg_series: Vec<Vec<Rational>> = spec
        .fields
        .iter()
        .map(|&a| {
            let y = frac(a, r as i64);
            let t: Vec<Rational> = (0..=max_degree)
                .map(|m| if m == 0 { Rational::zero() } else { series_coeff(m as u32, &y, x) })
                .collect();
            exp_series(&t, max_degree)
        })
        .collect();
    let ys = frac(spec.s, r as i64);
    let vt: Vec<Rational> = (0..=max_degree)
        .map(|m| if m == 0 { Rational::zero() } else { -series_coeff(m as u32, &ys, x) })
        .collect();
    let vertex_terms = kappa_exp_terms(&vt, max_degree);

    let mut out = TautClass::zero(g, n);
    for graph in enumerate_stable_graphs(g, n)?.iter() {
        let ne = graph.num_edges();
        if ne > max_degree || (trees_only && !graph.is_tree()) {
            continue;
        }
        let budget = max_degree - ne;
        let nh = graph.num_half_edges();
        let mut poly: Poly = Poly::new();
        poly.insert(unit_mono(graph), Rational::one());
        // legs
        for i in 0..n {
            let mut f = Poly::new();
            for (k, c) in leg_series[i].iter().enumerate().take(budget + 1) {
                if c.is_zero() {
                    continue;
                }
                let mut m = unit_mono(graph);
                m.0[i] = k as u32;
                f.insert(m, c.clone());
            }
            poly = poly_mul(&poly, &f, budget, graph);
        }
        // vertices
        for v in 0..graph.num_vertices() {
            let mut f = Poly::new();
            for (ks, c) in &vertex_terms {
                if ks.iter().sum::<u32>() as usize > budget {
                    continue;
                }
                let mut m = unit_mono(graph);
                m.1[v] = ks.clone();
                f.insert(m, c.clone());
            }
            poly = poly_mul(&poly, &f, budget, graph);
        }
        // edges, summed over weightings
        if ne > 0 {
            let mut esum = Poly::new();
            for w in weightings(graph, r, &leg_w, spec.s) {
                let mut p = Poly::new();
                p.insert(unit_mono(graph), Rational::one());
                for e in 0..ne {
                    let bi = edge_factor_cached(r, w[e], x, budget);
                    let mut f = Poly::new();
                    for i in 0..bi.len() {
                        for j in 0..bi[i].len() {
                            if bi[i][j].is_zero() {
                                continue;
                            }
                            let mut m = unit_mono(graph);
                            m.0[n + 2 * e] = i as u32;
                            m.0[n + 2 * e + 1] = j as u32;
                            f.insert(m, bi[i][j].clone());
                        }
                    }
                    p = poly_mul(&p, &f, budget, graph);
                }
                for (m, c) in p {
                    *esum.entry(m).or_insert_with(Rational::zero) += c;
                }
            }
            esum.retain(|_, c| !c.is_zero());
            poly = poly_mul(&poly, &esum, budget, graph);
        }
        let h1 = graph.h1() as i64;
        let scale = pow_signed(&int(r as i64), 2 * g as i64 - 1 - h1);
        debug_assert_eq!(nh, graph.num_half_edges());
        for ((psi, kappa), c) in poly {
            out.add_term(DecoratedGraph::new(graph.clone(), psi, kappa), c * &scale);
        }
    }
    Ok(out)
}

static OMEGA_MEMO: Lazy<RwLock<HashMap<(u32, OmegaSpec, usize, bool), TautClass>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn omega_memo(g: u32, spec: &OmegaSpec, max_degree: usize, trees_only: bool) -> Result<TautClass> {
    let key = (g, spec.clone(), max_degree, trees_only);
    if let Some(c) = OMEGA_MEMO.read().get(&key) {
        return Ok(c.clone());
    }
    let c = omega_graph_sum(g, spec, max_degree, trees_only)?;
    OMEGA_MEMO.write().insert(key, c.clone());
    Ok(c)
}

/// `Omega^{[x]}_{g,n}(r, s; a)` up to codimension `max_degree`; fields must
/// lie in `[0, r)`.
pub fn omega_class(g: u32, spec: &OmegaSpec, max_degree: usize) -> Result<TautClass> {
    if !spec.normalized() {
        return Err(TautError::InvalidArgument(format!(
            "fields {:?} not in [0, {})",
            spec.fields, spec.r
        )));
    }
    omega_memo(g, spec, max_degree, false)
}

/// The graph sum evaluated directly at unreduced fields; used as a second
/// route for `omega_general_fields`.
pub fn omega_direct(g: u32, spec: &OmegaSpec, max_degree: usize) -> Result<TautClass> {
    omega_memo(g, spec, max_degree, false)
}

/// Multiply by `(1 + c psi_leg)^{e}` (`e = +-1`), truncated.
fn mul_linear_psi(c: &TautClass, leg: usize, coeff: &Rational, inverse: bool, max_degree: usize) -> TautClass {
    let mut out = c.clone();
    let mut term = c.clone();
    let step = if inverse { -coeff.clone() } else { coeff.clone() };
    for k in 1..=max_degree {
        if !inverse && k > 1 {
            break;
        }
        term = term.mul_psi(leg, 1).scaled(&step).truncate(max_degree);
        if term.is_empty() {
            break;
        }
        out.add_assign(&term).expect("same ambient");
    }
    out
}

/// `Omega` at arbitrary integer fields via the primary-field shift rule
/// applied to the reduced fields.
pub fn omega_general_fields(g: u32, spec: &OmegaSpec, max_degree: usize) -> Result<TautClass> {
    spec.check(g)?;
    let r = spec.r as i64;
    let reduced: Vec<i64> = spec.fields.iter().map(|&a| a.rem_euclid(r)).collect();
    let base = OmegaSpec::new(spec.r, spec.s, reduced.clone(), spec.x.clone());
    let mut c = omega_class(g, &base, max_degree)?;
    let x = &spec.x;
    for (i, (&a, &abar)) in spec.fields.iter().zip(&reduced).enumerate() {
        let k = (a - abar) / r;
        if k > 0 {
            for j in 0..k {
                let coeff = x * frac(abar + j * r, r);
                c = mul_linear_psi(&c, i, &coeff, false, max_degree);
            }
        } else {
            for j in k..0 {
                let coeff = x * frac(abar + j * r, r);
                c = mul_linear_psi(&c, i, &coeff, true, max_degree);
            }
        }
    }
    Ok(c)
}

/// Total Hodge class `1 + x lambda_1 + ... + x^g lambda_g`, i.e. the
/// `r = s = 1` class at weight `-x`.
pub fn hodge_total(g: u32, n: usize, x: &Rational) -> Result<TautClass> {
    let spec = OmegaSpec::new(1, 1, vec![1; n], -x.clone());
    omega_general_fields(g, &spec, g as usize)
}

static LAMBDA_MEMO: Lazy<RwLock<HashMap<(u32, usize, u32), TautClass>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// `lambda_k` on `(g, n)`.
pub fn lambda_class(g: u32, n: usize, k: u32) -> Result<TautClass> {
    check_stable(g, n)?;
    if k > g {
        return Ok(TautClass::zero(g, n));
    }
    if let Some(c) = LAMBDA_MEMO.read().get(&(g, n, k)) {
        return Ok(c.clone());
    }
    let c = hodge_total(g, n, &Rational::one())?.component(k as usize);
    LAMBDA_MEMO.write().insert((g, n, k), c.clone());
    Ok(c)
}

/// `lambda_g * c`, using that `lambda_g` vanishes on strata with loops and
/// restricts to trees as the product of the vertex `lambda_{g_v}`.
pub fn mul_lambda_top(c: &TautClass) -> Result<TautClass> {
    let (g, n) = (c.genus(), c.num_markings());
    let mut out = TautClass::zero(g, n);
    for (dg, coeff) in c.terms() {
        let gr = &dg.graph;
        if !gr.is_tree() || dg.degree() + g as usize > c.dim() {
            continue;
        }
        let mut classes = Vec::with_capacity(gr.num_vertices());
        for v in 0..gr.num_vertices() {
            let hs = gr.half_edges_at(v);
            let mut vc = lambda_class(gr.genus[v], hs.len(), gr.genus[v])?;
            for (j, &h) in hs.iter().enumerate() {
                if dg.psi[h] > 0 {
                    vc = vc.mul_psi(j, dg.psi[h]);
                }
            }
            for &m in &dg.kappa[v] {
                vc = vc.mul_kappa(m);
            }
            classes.push(vc);
        }
        out.add_scaled(&boundary_pushforward(gr, &classes)?, coeff)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HClassSpec {
    pub g: u32,
    pub fields: Vec<u64>,
}

impl HClassSpec {
    pub fn a(&self) -> i64 {
        self.fields.iter().sum::<u64>() as i64
    }

    fn check(&self) -> Result<()> {
        if self.fields.iter().any(|&a| a == 0) {
            return Err(TautError::InvalidArgument(
                "h-class fields must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `a^{1-g} Omega^{[a]}(a, 0; -a_1, ..., -a_n)`.
pub fn h_class(spec: &HClassSpec, max_degree: usize) -> Result<TautClass> {
    spec.check()?;
    let a = spec.a();
    let fields: Vec<i64> = spec.fields.iter().map(|&x| -(x as i64)).collect();
    let om = OmegaSpec::new(a as u32, 0, fields, int(a));
    let c = omega_general_fields(spec.g, &om, max_degree)?;
    Ok(c.scaled(&pow_signed(&int(a), 1 - spec.g as i64)))
}

/// `Pi^m_{g,n}(a) = a^{1-g} lambda_g Omega^{[a]}_{g,n+m}(a, 0; -a, 0^m)`.
pub fn pi_class(g: u32, fields: &[u64], m: usize, max_degree: usize) -> Result<TautClass> {
    let spec = HClassSpec {
        g,
        fields: fields.to_vec(),
    };
    spec.check()?;
    let n = fields.len();
    check_stable(g, n + m)?;
    let max_degree = max_degree.min(3 * g as usize + n + m - 3);
    let key = (g, fields.to_vec(), m, max_degree);
    if let Some(c) = PI_MEMO.read().get(&key) {
        return Ok(c.clone());
    }
    let a = spec.a();
    let mut f: Vec<i64> = fields.iter().map(|&x| -(x as i64)).collect();
    f.extend(std::iter::repeat(0).take(m));
    let om = OmegaSpec::new(a as u32, 0, f, int(a));
    let c = if max_degree < g as usize {
        TautClass::zero(g, n + m)
    } else {
        let omega = omega_compact_type(g, &om, max_degree - g as usize)?;
        mul_lambda_top(&omega)?.scaled(&pow_signed(&int(a), 1 - g as i64))
    };
    PI_MEMO.write().insert(key, c.clone());
    Ok(c)
}

type PiKey = (u32, Vec<u64>, usize, usize);
static PI_MEMO: Lazy<RwLock<HashMap<PiKey, TautClass>>> = Lazy::new(|| RwLock::new(HashMap::new()));

/// Tree part of `omega_general_fields`: its restriction to compact type,
/// enough whenever `lambda_g` follows.
pub fn omega_compact_type(g: u32, spec: &OmegaSpec, max_degree: usize) -> Result<TautClass> {
    spec.check(g)?;
    let r = spec.r as i64;
    let reduced: Vec<i64> = spec.fields.iter().map(|&a| a.rem_euclid(r)).collect();
    let base = OmegaSpec::new(spec.r, spec.s, reduced.clone(), spec.x.clone());
    let mut c = omega_memo(g, &base, max_degree, true)?;
    let x = &spec.x;
    for (i, (&a, &abar)) in spec.fields.iter().zip(&reduced).enumerate() {
        let k = (a - abar) / r;
        if k > 0 {
            for j in 0..k {
                c = mul_linear_psi(&c, i, &(x * frac(abar + j * r, r)), false, max_degree);
            }
        } else {
            for j in k..0 {
                c = mul_linear_psi(&c, i, &(x * frac(abar + j * r, r)), true, max_degree);
            }
        }
    }
    Ok(c)
}

/// `Pi^m` through `m` forgetful pullbacks of `lambda_g h`.
pub fn pi_class_by_pullback(g: u32, fields: &[u64], m: usize, max_degree: usize) -> Result<TautClass> {
    let spec = HClassSpec {
        g,
        fields: fields.to_vec(),
    };
    let h = h_class(&spec, max_degree.saturating_sub(g as usize))?;
    let mut c = mul_lambda_top(&h)?.truncate(max_degree);
    for _ in 0..m {
        c = crate::forget::forgetful_pullback(&c)?.truncate(max_degree);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::integrate;

    #[test]
    fn exp_series_matches_exponential() {
        // exp(z) = sum z^k/k!
        let t = vec![int(0), int(1)];
        let f = exp_series(&t, 4);
        assert_eq!(f, vec![int(1), int(1), frac(1, 2), frac(1, 6), frac(1, 24)]);
    }

    #[test]
    fn edge_factor_low_order() {
        // degree-0 part is -c_1 = -B_2(w/r)/2
        let e = edge_factor(1, 0, &int(1), 1);
        assert_eq!(e[0][0], frac(-1, 12));
        let e = edge_factor(3, 1, &int(1), 0);
        assert_eq!(e[0][0], -bernoulli_polynomial(2, &frac(1, 3)) / int(2));
    }

    #[test]
    fn lambda_one_on_m11() {
        let l1 = lambda_class(1, 1, 1).unwrap();
        assert_eq!(integrate(&l1), frac(1, 24));
    }

    #[test]
    fn degree_zero_normalization() {
        let spec = OmegaSpec::new(3, 1, vec![1, 1], int(1));
        let c = omega_class(1, &spec, 0).unwrap();
        assert_eq!(c, TautClass::fundamental(1, 2).scaled(&int(3)));
    }

    #[test]
    fn modular_constraint_checked() {
        let spec = OmegaSpec::new(3, 0, vec![1, 1], int(1));
        assert!(matches!(
            omega_class(1, &spec, 1),
            Err(TautError::ModularConstraint { .. })
        ));
    }
}
