use std::ops::RangeInclusive;
use std::time::Instant;

use itertools::Itertools;
use num_traits::{One, Zero};
use rayon::prelude::*;

use taut_core::arith::{double_factorial, factorial, frac, int, interpolate, pow, pow_signed, rational_to_string, Rational};
use taut_core::dr::{dr_cycle, dr_cycle_sampled, lambda_dr, DrSpec};
use taut_core::error::{Result as CoreResult, TautError};
use taut_core::eval::{integrate, psi_integral, PsiKey};
use taut_core::forget::{forgetful_pullback, forgetful_pushforward};
use taut_core::formal::formal_cancellation;
use taut_core::omega::{
    hodge_total, lambda_class, mul_lambda_top, omega_class, omega_compact_type, omega_direct,
    omega_general_fields, OmegaSpec,
};
use taut_core::pairing::{pairing_vector, vanishes_in_pairing};
use taut_core::pullback::multiply;
use taut_core::relations::{a1_class, main_difference, sigma_class, upsilon_class};
use taut_core::taut::TautClass;

use crate::cache::Cache;
use crate::config::{CheckConfig, Relation};
use crate::error::{Result, VerifyError};
use crate::report::{CaseReport, ConfigEcho, Failure, ReportBody, RunInfo, Status, VerificationReport, Witness};

/// One unit of work: a moduli space plus whatever else the relation sweeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub g: usize,
    pub n: usize,
    pub m: usize,
    pub fields: Vec<u64>,
    /// `r` for the Chiodo-class suite, `a` for the degree bound
    pub r: Option<u32>,
    pub s: Option<i64>,
}

impl Case {
    fn space(g: usize, n: usize, m: usize) -> Self {
        Case {
            g,
            n,
            m,
            fields: Vec::new(),
            r: None,
            s: None,
        }
    }

    pub fn id(&self) -> String {
        let mut id = format!("g={} n={} m={}", self.g, self.n, self.m);
        if !self.fields.is_empty() {
            id += &format!(" a=({})", self.fields.iter().join(","));
        }
        if let Some(r) = self.r {
            id += &format!(" r={r}");
        }
        if let Some(s) = self.s {
            id += &format!(" s={s}");
        }
        id
    }

    fn dim(&self) -> usize {
        3 * self.g + self.n + self.m - 3
    }
}

fn stable(g: usize, n: usize) -> bool {
    2 * g + n > 2
}

fn dim_of(g: usize, n: usize) -> usize {
    3 * g + n - 3
}

fn spaces(cfg: &CheckConfig) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for &g in &cfg.g.0 {
        for &n in &cfg.n.0 {
            for &m in &cfg.m.0 {
                if n >= 1 && stable(g, n + m) && dim_of(g, n + m) <= cfg.dim_cap {
                    out.push((g, n, m));
                }
            }
        }
    }
    out
}

/// Nondecreasing tuples of length `n` with entries in `lo..=hi`.
pub fn multisets(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in multisets(n - 1, first, hi) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The cases a configuration expands to, in report order.
pub fn build_cases(cfg: &CheckConfig) -> Vec<Case> {
    let mut out = Vec::new();
    match cfg.relation {
        Relation::IntersectionNumbers => {
            for &g in &cfg.g.0 {
                for &n in &cfg.n.0 {
                    if n >= 1 && stable(g, n) && 2 * g + n <= cfg.weight_cap {
                        out.push(Case::space(g, n, 0));
                    }
                }
            }
        }
        Relation::SigmaZeroFormal => {
            for &g in &cfg.g.0 {
                for &n in &cfg.n.0 {
                    for &m in &cfg.m.0 {
                        if n >= 1 && m >= 1 && stable(g, n + m) && 2 * g + n + m <= cfg.weight_cap {
                            out.push(Case::space(g, n, m));
                        }
                    }
                }
            }
        }
        Relation::OmegaProperties => {
            for (g, n, _) in spaces_without_m(cfg) {
                for r in 1..=cfg.r_max {
                    for s in 0..=r as i64 {
                        out.push(Case {
                            r: Some(r),
                            s: Some(s),
                            ..Case::space(g, n, 0)
                        });
                    }
                }
            }
        }
        Relation::OmegaPolynomiality => {
            for (g, n, _) in spaces_without_m(cfg) {
                if n >= 2 {
                    out.push(Case::space(g, n, 0));
                }
                for a in 1..=cfg.a_grid.max as u32 {
                    out.push(Case {
                        r: Some(a),
                        ..Case::space(g, n, 0)
                    });
                }
            }
        }
        Relation::DrOracles => {
            for (g, n, _) in spaces_without_m(cfg) {
                out.push(Case::space(g, n, 0));
            }
        }
        Relation::APostConditions => {
            for &g in &cfg.g.0 {
                for &n in &cfg.n.0 {
                    if n >= 1 && stable(g, n + 1) && dim_of(g, n + 1) <= cfg.dim_cap {
                        for a in cfg.a_grid.tuples(g, n, 1) {
                            out.push(Case {
                                fields: a,
                                ..Case::space(g, n, 1)
                            });
                        }
                    }
                }
            }
        }
        Relation::UpsilonVanishing | Relation::SigmaZeroPairing | Relation::MainTheorem => {
            for (g, n, m) in spaces(cfg) {
                if m == 0 && cfg.relation != Relation::MainTheorem {
                    continue;
                }
                for a in cfg.a_grid.tuples(g, n, m) {
                    out.push(Case {
                        fields: a,
                        ..Case::space(g, n, m)
                    });
                }
            }
        }
    }
    out
}

fn spaces_without_m(cfg: &CheckConfig) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for &g in &cfg.g.0 {
        for &n in &cfg.n.0 {
            if n >= 1 && stable(g, n) && dim_of(g, n) <= cfg.dim_cap {
                out.push((g, n, 0));
            }
        }
    }
    out
}

/// Verdicts collected while running one case.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<Failure>,
}

impl Tally {
    fn fail(&mut self, check: &str, degree: Option<usize>, witness: Option<Witness>, detail: String) {
        self.failures.push(Failure {
            check: check.into(),
            degree,
            witness,
            detail,
        });
    }

    fn expect(&mut self, check: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(check, None, None, detail());
        }
    }

    fn expect_eq(&mut self, check: &str, got: &Rational, want: &Rational) {
        self.expect(check, got == want, || {
            format!("got {}, expected {}", rational_to_string(got), rational_to_string(want))
        });
    }

    /// The degree-`d` component of `c` pairs to zero with every generator.
    fn vanishes(&mut self, check: &str, c: &TautClass, d: usize) -> CoreResult<()> {
        self.checks += 1;
        let comp = c.component(d);
        if comp.is_empty() {
            return Ok(());
        }
        let rep = vanishes_in_pairing(&comp, d)?;
        if let Some((b, v)) = rep.witness() {
            self.fail(
                check,
                Some(d),
                Some(Witness {
                    generator: b.to_string(),
                    value: rational_to_string(v),
                }),
                format!("degree-{d} part pairs to a nonzero value"),
            );
        }
        Ok(())
    }

    fn vanishes_in(&mut self, check: &str, c: &TautClass, degrees: RangeInclusive<usize>) -> CoreResult<()> {
        for d in degrees {
            self.vanishes(check, c, d)?;
        }
        Ok(())
    }

    /// `a` and `b` agree in pairing in the given degrees; identical
    /// representations settle it without pairing.
    fn equal(&mut self, check: &str, a: &TautClass, b: &TautClass, degrees: RangeInclusive<usize>) -> CoreResult<()> {
        if a == b {
            self.checks += degrees.count();
            return Ok(());
        }
        let diff = a.sub(b)?;
        self.vanishes_in(check, &diff, degrees)
    }
}

fn top(cfg: &CheckConfig, dim: usize) -> usize {
    cfg.max_degree.map_or(dim, |d| d.min(dim))
}

fn run_case(cfg: &CheckConfig, case: &Case) -> CaseReport {
    let mut t = Tally::default();
    let res = match cfg.relation {
        Relation::IntersectionNumbers => intersection_numbers(case, &mut t),
        Relation::OmegaProperties => omega_properties(cfg, case, &mut t),
        Relation::OmegaPolynomiality => match case.r {
            None => polynomiality(cfg, case, &mut t),
            Some(a) => degree_bound(cfg, case, a, &mut t),
        },
        Relation::DrOracles => dr_oracles(cfg, case, &mut t),
        Relation::UpsilonVanishing => upsilon_vanishing(cfg, case, &mut t),
        Relation::SigmaZeroFormal => sigma_formal(case, &mut t),
        Relation::SigmaZeroPairing => sigma_pairing(cfg, case, &mut t),
        Relation::MainTheorem => main_theorem(cfg, case, &mut t),
        Relation::APostConditions => a_post_conditions(cfg, case, &mut t),
    };
    let status = match res {
        Err(e) => {
            t.fail("computation", None, None, e.to_string());
            Status::Error
        }
        Ok(()) if t.failures.is_empty() => Status::Pass,
        Ok(()) => Status::Fail,
    };
    CaseReport {
        id: case.id(),
        g: case.g,
        n: case.n,
        m: case.m,
        status,
        checks: t.checks,
        failures: t.failures,
    }
}

fn corr(g: i64, exps: &[u32]) -> Rational {
    if g < 0 {
        return Rational::zero();
    }
    psi_integral(&PsiKey::new(g as u32, exps.to_vec()))
}

fn dfact(n: i64) -> Rational {
    Rational::from_integer(double_factorial(n))
}

fn fact(n: usize) -> Rational {
    Rational::from_integer(factorial(n as u32))
}

fn without(v: &[u32], i: usize) -> Vec<u32> {
    let mut w = v.to_vec();
    w.remove(i);
    w
}

/// `(2k+3)!! <tau_{k+1} S>_g` expanded by the DVV recursion, for `k >= 1`.
fn dvv_rhs(g: i64, k: u32, rest: &[u32]) -> Rational {
    let mut out = Rational::zero();
    for (i, &d) in rest.iter().enumerate() {
        let mut w = without(rest, i);
        w.push(d + k);
        out += dfact(2 * (k + d) as i64 + 1) / dfact(2 * d as i64 - 1) * corr(g, &w);
    }
    let half = frac(1, 2);
    for r in 0..k {
        let s = k - 1 - r;
        let c = dfact(2 * r as i64 + 1) * dfact(2 * s as i64 + 1) * &half;
        let mut w = rest.to_vec();
        w.push(r);
        w.push(s);
        let mut acc = corr(g - 1, &w);
        for mask in 0..1u32 << rest.len() {
            let mut left = vec![r];
            let mut right = vec![s];
            for (i, &d) in rest.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    left.push(d);
                } else {
                    right.push(d);
                }
            }
            for g1 in 0..=g {
                acc += corr(g1, &left) * corr(g - g1, &right);
            }
        }
        out += c * acc;
    }
    out
}

fn intersection_numbers(case: &Case, t: &mut Tally) -> CoreResult<()> {
    let (g, n) = (case.g as i64, case.n);
    let total = 3 * g - 3 + n as i64;
    if g == 0 && n == 3 {
        t.expect_eq("base value tau_0^3", &corr(0, &[0, 0, 0]), &Rational::one());
    }
    if g == 1 && n == 1 {
        t.expect_eq("base value tau_1", &corr(1, &[1]), &frac(1, 24));
    }
    for exps in multisets(n, 0, total) {
        if exps.iter().sum::<i64>() != total {
            continue;
        }
        let e: Vec<u32> = exps.iter().map(|&x| x as u32).collect();
        let v = corr(g, &e);
        let lower = stable(case.g, n - 1);
        if let Some(i) = e.iter().position(|&d| d == 0) {
            if lower {
                let rest = without(&e, i);
                let mut rhs = Rational::zero();
                for (j, &d) in rest.iter().enumerate() {
                    if d > 0 {
                        let mut w = rest.clone();
                        w[j] = d - 1;
                        rhs += corr(g, &w);
                    }
                }
                t.expect_eq(&format!("string {e:?}"), &v, &rhs);
            }
        }
        if let Some(i) = e.iter().position(|&d| d == 1) {
            if lower {
                let rhs = int(2 * g - 3 + n as i64) * corr(g, &without(&e, i));
                t.expect_eq(&format!("dilaton {e:?}"), &v, &rhs);
            }
        }
        for (i, &d) in e.iter().enumerate().dedup_by(|a, b| a.1 == b.1) {
            if d >= 2 {
                let lhs = dfact(2 * d as i64 + 1) * &v;
                t.expect_eq(&format!("DVV {e:?} at tau_{d}"), &lhs, &dvv_rhs(g, d - 1, &without(&e, i)));
            }
        }
        if g == 0 {
            let denom: Rational = e.iter().map(|&d| fact(d as usize)).product();
            t.expect_eq(&format!("genus-zero multinomial {e:?}"), &v, &(fact(n - 3) / denom));
        }
        if g == 1 && e.iter().all(|&d| d == 1) {
            t.expect_eq(&format!("genus-one tau_1^{n}"), &v, &(fact(n - 1) / int(24)));
        }
        if n == 1 && g >= 1 {
            let want = Rational::one() / (pow(&int(24), g as u32) * fact(g as usize));
            t.expect_eq(&format!("single point genus {g}"), &v, &want);
        }
    }
    Ok(())
}

fn spec(r: u32, s: i64, fields: Vec<i64>, x: &Rational) -> OmegaSpec {
    OmegaSpec::new(r, s, fields, x.clone())
}

/// `c * exp(sum_m ((-x)^m / m) (s/r)^m kappa_m)` up to degree `top`.
fn times_kappa_exp(c: &TautClass, x: &Rational, s: i64, r: u32, top: usize) -> TautClass {
    let y = frac(s, r as i64);
    let coeffs: Vec<Rational> = (1..=top as u32)
        .map(|m| pow(&-x.clone(), m) * pow(&y, m) / int(m as i64))
        .collect();
    let mut acc = c.truncate(top);
    let mut term = acc.clone();
    for j in 1..=top {
        let mut next = TautClass::zero(c.genus(), c.num_markings());
        for (m, cm) in coeffs.iter().enumerate() {
            if !cm.is_zero() {
                next.add_scaled(&term.mul_kappa(m as u32 + 1), cm).expect("same ambient");
            }
        }
        term = next.truncate(top).scaled(&frac(1, j as i64));
        if term.is_empty() {
            break;
        }
        acc.add_assign(&term).expect("same ambient");
    }
    acc
}

/// Field tuples in `[0, r)`, up to order, satisfying the modular constraint.
fn admissible(g: usize, n: usize, r: u32, s: i64) -> Vec<Vec<i64>> {
    multisets(n, 0, r as i64 - 1)
        .into_iter()
        .filter(|a| (a.iter().sum::<i64>() - (2 * g as i64 - 2 + n as i64) * s).rem_euclid(r as i64) == 0)
        .collect()
}

fn omega_properties(cfg: &CheckConfig, case: &Case, t: &mut Tally) -> CoreResult<()> {
    let (g, n) = (case.g as u32, case.n);
    let (r, s) = (case.r.unwrap(), case.s.unwrap());
    let dim = case.dim();
    let d = top(cfg, dim);
    let x = Rational::one();
    for a in admissible(case.g, n, r, s) {
        let base = omega_class(g, &spec(r, s, a.clone(), &x), dim)?;
        for (i, &ai) in a.iter().enumerate().dedup_by(|p, q| p.1 == q.1) {
            let mut shifted = a.clone();
            shifted[i] += r as i64;
            let lhs = omega_direct(g, &spec(r, s, shifted, &x), dim)?;
            let mut rhs = base.clone();
            rhs.add_scaled(&base.mul_psi(i, 1).truncate(dim), &(&x * frac(ai, r as i64)))?;
            t.equal(&format!("field shift a_{} {a:?}", i + 1), &lhs, &rhs, 0..=d)?;
            if ai == 0 {
                let mut up = a.clone();
                up[i] = r as i64;
                let lhs = omega_direct(g, &spec(r, s, up, &x), dim)?;
                t.equal(&format!("field 0 vs r at a_{} {a:?}", i + 1), &lhs, &base, 0..=d)?;
            }
        }
        let lhs = omega_direct(g, &spec(r, s + r as i64, a.clone(), &x), dim)?;
        let rhs = times_kappa_exp(&base, &x, s, r, dim);
        t.equal(&format!("s shift {a:?}"), &lhs, &rhs, 0..=d)?;
        if s == 0 {
            let lhs = omega_direct(g, &spec(r, r as i64, a.clone(), &x), dim)?;
            t.equal(&format!("s=0 vs s=r {a:?}"), &lhs, &base, 0..=d)?;
        }
        if dim + 1 <= cfg.dim_cap {
            let mut more = a.clone();
            more.push(s);
            let lhs = omega_direct(g, &spec(r, s, more, &x), dim + 1)?;
            let rhs = forgetful_pullback(&base)?;
            t.equal(&format!("pullback {a:?}"), &lhs, &rhs, 0..=top(cfg, dim + 1))?;
        }
    }
    if s == 0 {
        for xv in [1i64, 2] {
            let x = int(xv);
            let om = omega_class(g, &spec(r, 0, vec![0; n], &x), dim)?;
            let lhs = mul_lambda_top(&om)?;
            let rhs = mul_lambda_top(&hodge_total(g, n, &-x.clone())?)?
                .scaled(&pow_signed(&int(r as i64), 2 * g as i64 - 1));
            t.equal(&format!("top lambda x={xv}"), &lhs, &rhs, 0..=d)?;
        }
    }
    if (g, n, r, s) == (1, 1, 1, 1) {
        let om = omega_class(1, &spec(1, 1, vec![0], &-Rational::one()), dim)?;
        t.equal("r=s=1 is the total Hodge class", &om, &hodge_total(1, 1, &Rational::one())?, 0..=d)?;
        t.expect_eq("int lambda_1 on (1,1)", &integrate(&lambda_class(1, 1, 1)?), &frac(1, 24));
    }
    Ok(())
}

/// Measured polynomial degree in `t` of the degree-`k` part of the
/// compact-type Chiodo class at fields `t * (u, -sum u)`, `s = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub k: usize,
    /// over the coefficients of the graph representation
    pub representation: Option<usize>,
    /// over the pairings of `lambda_g` times the part with all generators;
    /// `None` when not computed or identically zero
    pub pairing: Option<usize>,
}

fn poly_degree(values: &[Rational]) -> CoreResult<Option<usize>> {
    let pts: Vec<(Rational, Rational)> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (int(i as i64 + 1), v.clone()))
        .collect();
    Ok(interpolate(&pts, pts.len() - 1)?.degree())
}

fn max_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Samples `t = 1..=2 top + 2` at one `r` large enough that no field
/// wraps around, so every coefficient is a polynomial in `t`.
pub fn compact_type_degrees(g: u32, u: &[u64], top: usize, with_pairing: bool) -> CoreResult<Vec<DegreeProfile>> {
    let n = u.len() + 1;
    let samples = 2 * top + 2;
    let sum: u64 = u.iter().sum();
    let r = (samples as u64 * sum + 1) as u32;
    let dim = 3 * g as usize + n - 3;
    let classes: Vec<TautClass> = (1..=samples as i64)
        .map(|t| {
            let mut f: Vec<i64> = u.iter().map(|&x| x as i64 * t).collect();
            f.push(-(sum as i64) * t);
            omega_compact_type(g, &OmegaSpec::new(r, 0, f, Rational::one()), top)
        })
        .collect::<CoreResult<_>>()?;
    let mut out = Vec::new();
    for k in 0..=top {
        let comps: Vec<TautClass> = classes.iter().map(|c| c.component(k)).collect();
        let keys: Vec<_> = comps.iter().flat_map(|c| c.terms().map(|(dg, _)| dg.clone())).sorted().dedup().collect();
        let mut rep = None;
        for dg in &keys {
            let vals: Vec<Rational> = comps.iter().map(|c| c.coefficient(dg)).collect();
            rep = max_opt(rep, poly_degree(&vals)?);
        }
        let mut pairing = None;
        if with_pairing && k + g as usize <= dim {
            let vecs: Vec<Vec<Rational>> = comps
                .iter()
                .map(|c| pairing_vector(&mul_lambda_top(c)?, k + g as usize))
                .collect::<CoreResult<_>>()?;
            for j in 0..vecs[0].len() {
                let vals: Vec<Rational> = vecs.iter().map(|v| v[j].clone()).collect();
                pairing = max_opt(pairing, poly_degree(&vals)?);
            }
        }
        out.push(DegreeProfile {
            k,
            representation: rep,
            pairing,
        });
    }
    Ok(out)
}

/// Directions for the polynomiality sweep: the box part of the grid.
pub fn polynomiality_directions(cfg: &CheckConfig, n: usize) -> Vec<Vec<u64>> {
    multisets(n - 1, 1, cfg.a_grid.max as i64)
        .into_iter()
        .map(|v| v.into_iter().map(|x| x as u64).collect())
        .collect()
}

fn polynomiality(cfg: &CheckConfig, case: &Case, t: &mut Tally) -> CoreResult<()> {
    let g = case.g as u32;
    let d = top(cfg, case.dim());
    for u in polynomiality_directions(cfg, case.n) {
        for p in compact_type_degrees(g, &u, d, false)? {
            let bound = 2 * p.k;
            let deg = p.representation;
            t.expect(&format!("degree {} along {u:?}", p.k), deg.map_or(true, |x| x <= bound), || {
                format!("polynomial degree {deg:?} exceeds {bound}")
            });
        }
    }
    Ok(())
}

fn degree_bound(cfg: &CheckConfig, case: &Case, a: u32, t: &mut Tally) -> CoreResult<()> {
    let (g, n) = (case.g as u32, case.n);
    let dim = case.dim();
    let d = top(cfg, dim);
    for big_b in 1..=2i64 {
        let total = big_b * a as i64;
        for b in multisets(n, 0, total) {
            if b.iter().sum::<i64>() != total {
                continue;
            }
            let om = omega_general_fields(g, &OmegaSpec::new(a, 0, b.clone(), Rational::one()), dim)?;
            let lo = g as usize + big_b as usize;
            if lo <= d {
                t.vanishes_in(&format!("degree bound b={b:?}"), &om, lo..=d)?;
            }
        }
    }
    Ok(())
}

fn dr_parts(cfg: &CheckConfig, case: &Case) -> Vec<(Vec<i64>, bool)> {
    let mut out = vec![(vec![0i64; case.n], true)];
    if case.n >= 2 {
        for a in cfg.a_grid.tuples(case.g, case.n - 1, 0) {
            let in_box = a.iter().all(|&x| x <= cfg.a_grid.max);
            let mut p: Vec<i64> = a.iter().map(|&x| x as i64).collect();
            p.push(-p.iter().sum::<i64>());
            out.push((p, in_box));
        }
    }
    out
}

fn dr_oracles(cfg: &CheckConfig, case: &Case, t: &mut Tally) -> CoreResult<()> {
    let (g, n) = (case.g as u32, case.n);
    let gd = g as usize;
    let dim = case.dim();
    let sign = if g % 2 == 0 { Rational::one() } else { -Rational::one() };
    for (parts, in_box) in dr_parts(cfg, case) {
        let sp = DrSpec::new(g, parts.clone());
        if g == 0 {
            t.equal(&format!("genus zero {parts:?}"), &dr_cycle(&sp)?, &TautClass::fundamental(0, n), 0..=0)?;
            continue;
        }
        if parts.iter().all(|&b| b == 0) {
            let lg = lambda_class(g, n, g)?;
            if gd <= top(cfg, dim) {
                t.equal("zero parts, degree g", &dr_cycle(&sp)?, &lg.scaled(&sign), gd..=gd)?;
            }
            if 2 * gd <= top(cfg, dim) {
                let rhs = multiply(&lg, &lg)?.scaled(&sign);
                t.equal("zero parts, lambda_g times", &lambda_dr(&sp)?, &rhs, 2 * gd..=2 * gd)?;
            }
            continue;
        }
        if 2 * gd <= top(cfg, dim) {
            let base = lambda_dr(&sp)?;
            for s in 2..=3i64 {
                let scaled: Vec<i64> = parts.iter().map(|b| b * s).collect();
                let lhs = lambda_dr(&DrSpec::new(g, scaled))?;
                let rhs = base.scaled(&pow(&int(s), 2 * g));
                t.equal(&format!("homogeneity t={s} {parts:?}"), &lhs, &rhs, 2 * gd..=2 * gd)?;
            }
        }
        if in_box {
            // one surplus sample inside, then a disjoint window
            let full = dr_cycle(&sp)?;
            t.checks += 1;
            let start = sp.samples().last().copied().unwrap() + 1;
            let rs: Vec<u32> = (start..start + 2 * g + 2).collect();
            match dr_cycle_sampled(&sp, &rs) {
                Ok(other) => t.equal(&format!("disjoint r-window {parts:?}"), &other, &full, gd..=gd)?,
                Err(e @ TautError::InconsistentSample { .. }) => {
                    t.fail(&format!("r-interpolation {parts:?}"), Some(gd), None, e.to_string())
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

fn fields_of(case: &Case) -> &[u64] {
    &case.fields
}

fn upsilon_vanishing(cfg: &CheckConfig, case: &Case, t: &mut Tally) -> CoreResult<()> {
    let d = top(cfg, case.dim());
    let u = upsilon_class(case.g as u32, fields_of(case), case.m, d)?;
    let lo = 2 * case.g + case.m - 1;
    if lo <= d {
        t.vanishes_in("upsilon high degree", &u, lo..=d)?;
    }
    Ok(())
}

fn sigma_formal(case: &Case, t: &mut Tally) -> CoreResult<()> {
    match formal_cancellation(case.g as u32, case.n, case.m, case.dim()) {
        Ok(c) => {
            t.expect("certificate", c.ok(), || {
                format!(
                    "{} residual terms, {} expected, {} structure violations",
                    c.residual.len(),
                    c.expected_residual.len(),
                    c.structure_violations.len()
                )
            });
            if case.m >= 2 {
                t.expect("empty residual", c.residual.is_empty(), || {
                    format!("{} residual terms", c.residual.len())
                });
            }
            t.expect("non-vacuous", c.expanded > 0, || "nothing expanded".into());
        }
        Err(TautError::UncancelledTerm(s)) => {
            t.checks += 1;
            t.fail("certificate", None, None, format!("uncancelled term {s}"));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn sigma_pairing(cfg: &CheckConfig, case: &Case, t: &mut Tally) -> CoreResult<()> {
    let d = top(cfg, case.dim());
    let s = sigma_class(case.g as u32, fields_of(case), case.m, d)?;
    t.vanishes_in("sigma", &s, 0..=d)
}

fn main_theorem(cfg: &CheckConfig, case: &Case, t: &mut Tally) -> CoreResult<()> {
    let (g, a, m) = (case.g as u32, fields_of(case), case.m);
    let dim = case.dim();
    let d = top(cfg, dim);
    let lo = (2 * case.g + m).saturating_sub(1);
    let c = main_difference(g, a, m, d)?;
    if lo <= d {
        t.vanishes_in("hhh minus A", &c, lo..=d)?;
    }
    if m == 0 && dim + 1 <= cfg.dim_cap && lo <= d {
        let total: u64 = a.iter().sum();
        let up = main_difference(g, a, 1, d + 1)?;
        let pushed = forgetful_pushforward(&up)?.scaled(&frac(1, total as i64));
        t.vanishes_in("pushforward of the m=1 difference", &pushed, lo..=d)?;
    }
    Ok(())
}

fn a_post_conditions(cfg: &CheckConfig, case: &Case, t: &mut Tally) -> CoreResult<()> {
    let (g, a) = (case.g as u32, fields_of(case));
    let dim = case.dim();
    let d = top(cfg, dim);
    let c = a1_class(g, a, d)?;
    if 2 * case.g > 0 {
        t.vanishes_in("A1 below 2g", &c, 0..=(2 * case.g - 1).min(d))?;
    }
    if 2 * case.g <= d {
        let mut parts: Vec<i64> = a.iter().map(|&x| x as i64).collect();
        parts.push(-parts.iter().sum::<i64>());
        let ldr = lambda_dr(&DrSpec::new(g, parts))?;
        t.equal("A1 in degree 2g", &c, &ldr, 2 * case.g..=2 * case.g)?;
    }
    Ok(())
}

pub fn echo(cfg: &CheckConfig) -> ConfigEcho {
    ConfigEcho {
        relation: cfg.relation.id().into(),
        g: cfg.g.to_string(),
        n: cfg.n.to_string(),
        m: cfg.m.to_string(),
        a_grid: cfg.a_grid.to_string(),
        max_degree: cfg.max_degree,
        dim_cap: cfg.dim_cap,
        weight_cap: cfg.weight_cap,
        r_max: cfg.r_max,
    }
}

/// Run one relation over its cases on `cfg.workers` threads.
pub fn run_check(cfg: &CheckConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut cache = cfg.cache.as_deref().map(Cache::open).transpose()?;
    let cases = build_cases(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| VerifyError::Config(e.to_string()))?;
    let results: Vec<(CaseReport, f64)> = pool.install(|| {
        cases
            .par_iter()
            .map(|c| {
                let t0 = Instant::now();
                let r = run_case(cfg, c);
                (r, t0.elapsed().as_secs_f64())
            })
            .collect()
    });
    if let Some(c) = cache.as_mut() {
        c.persist()?;
    }
    let (reports, case_seconds): (Vec<CaseReport>, Vec<f64>) = results.into_iter().unzip();
    Ok(VerificationReport {
        body: ReportBody::new(echo(cfg), reports),
        run: RunInfo {
            workers: cfg.workers,
            cache: cfg.cache.as_ref().map(|p| p.display().to_string()),
            cache_stats: cache.map(|c| c.stats).unwrap_or_default(),
            seconds: start.elapsed().as_secs_f64(),
            case_seconds,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use taut_core::eval::integrate;

    #[test]
    fn nonvanishing_class_reports_a_witness() {
        let mut t = Tally::default();
        t.vanishes("psi", &TautClass::psi(1, 1, 1), 1).unwrap();
        assert_eq!(t.checks, 1);
        let w = t.failures[0].witness.as_ref().unwrap();
        assert_eq!(w.value, "1/24");
        let mut ok = Tally::default();
        ok.vanishes("zero", &TautClass::zero(1, 1), 1).unwrap();
        assert!(ok.failures.is_empty());
    }

    #[test]
    fn dvv_right_side() {
        // (2k+3)!! <tau_4>_2 with k = 3
        assert_eq!(dvv_rhs(2, 3, &[]), frac(945, 1152));
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(3, 0, 2).len(), 10);
        assert_eq!(multisets(2, 1, 1), vec![vec![1, 1]]);
    }

    #[test]
    fn kappa_exponential() {
        let one = TautClass::fundamental(1, 1);
        let x = int(1);
        assert_eq!(integrate(&times_kappa_exp(&one, &x, 0, 3, 1).component(1)), int(0));
        // 1 - kappa_1 on M_{1,1}
        assert_eq!(integrate(&times_kappa_exp(&one, &x, 1, 1, 1)), frac(-1, 24));
    }
}
