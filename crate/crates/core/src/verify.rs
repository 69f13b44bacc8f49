//! Seeded randomized checks of the calculus identities.
//!
//! Every trial draws from its own ChaCha stream (root seed, stream = trial
//! index), so reports do not depend on how trials are scheduled.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algebra::{
    embed_simplicial_in_cubic, m_matrix, n_matrix, CubicAlgebra, RewriteOrder, TruncatedPolyRing,
};
use crate::cubic::{determine_sign, t_extension, CubicArg, SignVerdict, SIGNS};
use crate::error::{Error, Result};
use crate::expr::{Expr, MapExpr};
use crate::jet::{domain_check, domain_check_cubic, sj_via_ring, t_via_ring};
use crate::ring::{slices_eq, RingDescriptor, RingElement};
use crate::simplicial::{
    divided_difference, divided_difference_rec, eval_points, expansion_residual, sj_extension, Point, ScalarTuple,
    VecTuple,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ChainRule,
    Recursion,
    Conjugation,
    LimitedExpansion,
    RingIso,
    Embedding,
    Locality,
    CubicFunctor,
    SignDetermination,
    CubicRecursion,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::ChainRule,
        Suite::Recursion,
        Suite::Conjugation,
        Suite::LimitedExpansion,
        Suite::RingIso,
        Suite::Embedding,
        Suite::Locality,
        Suite::CubicFunctor,
        Suite::SignDetermination,
        Suite::CubicRecursion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ChainRule => "chain-rule",
            Suite::Recursion => "recursion",
            Suite::Conjugation => "conjugation",
            Suite::LimitedExpansion => "limited-expansion",
            Suite::RingIso => "ring-iso",
            Suite::Embedding => "embedding",
            Suite::Locality => "locality",
            Suite::CubicFunctor => "cubic-functor",
            Suite::SignDetermination => "sign-determination",
            Suite::CubicRecursion => "cubic-recursion",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub ring: RingDescriptor,
    pub trials: usize,
    pub seed: u64,
    pub max_order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub ring: RingDescriptor,
    pub trials: usize,
    pub seed: u64,
    pub max_order: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub first_failure: Option<Value>,
    /// Suite-specific findings, e.g. the signs found by `sign-determination`.
    pub findings: serde_json::Map<String, Value>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "suite": self.suite.name(),
            "ring": self.ring.to_string(),
            "trials": self.trials,
            "seed": self.seed,
            "max_order": self.max_order,
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "first_failure": self.first_failure,
        });
        for (key, val) in &self.findings {
            v[key] = val.clone();
        }
        v
    }
}

#[derive(Debug, Clone)]
enum Outcome {
    Pass,
    Skip,
    Fail(Value),
    /// Per-order sign verdict, judged once all trials are in.
    Sign(usize, SignVerdict, Value),
}

pub fn run(config: &VerifyConfig) -> Result<Report> {
    if config.max_order == 0 {
        return Err(Error::OrderOutOfRange { order: 0, min: 1, max: 4 });
    }
    let needs_exact_field = matches!(config.suite, Suite::Embedding);
    if needs_exact_field && !(config.ring.is_exact() && config.ring.is_field()) {
        return Err(Error::ExactRingRequired(format!("suite {} over {}", config.suite, config.ring)));
    }
    if !matches!(config.ring, RingDescriptor::Rational | RingDescriptor::ZMod(_) | RingDescriptor::Real(_)) {
        return Err(Error::InvalidDescriptor("verification runs over base rings only".into()));
    }
    let outcomes: Vec<Outcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial as u64);
            let mut g = Gen { rng, ring: config.ring.clone(), max_order: config.max_order };
            match run_trial(config.suite, &mut g) {
                Ok(Outcome::Fail(v)) => Outcome::Fail(with_trial(v, trial)),
                Ok(Outcome::Sign(k, s, v)) => Outcome::Sign(k, s, with_trial(v, trial)),
                Ok(o) => o,
                Err(Error::Domain(_)) | Err(Error::NonsingularRequired(_)) => Outcome::Skip,
                Err(e) => Outcome::Fail(json!({"trial": trial, "error": e.kind(), "detail": e.to_string()})),
            }
        })
        .collect();

    let mut report = Report {
        suite: config.suite,
        ring: config.ring.clone(),
        trials: config.trials,
        seed: config.seed,
        max_order: config.max_order,
        passed: 0,
        failed: 0,
        skipped: 0,
        first_failure: None,
        findings: serde_json::Map::new(),
    };
    let mut signs: Vec<Option<i8>> = vec![None; config.max_order.max(SIGNS.len()) + 1];
    let mut undetermined = vec![0usize; signs.len()];
    for outcome in outcomes {
        let failure = match outcome {
            Outcome::Pass => {
                report.passed += 1;
                None
            }
            Outcome::Skip => {
                report.skipped += 1;
                None
            }
            Outcome::Fail(v) => Some(v),
            Outcome::Sign(k, verdict, v) => match (verdict.sign(), signs[k]) {
                (_, _) if verdict == SignVerdict::Contradiction => Some(v),
                (None, _) => {
                    undetermined[k] += 1;
                    report.passed += 1;
                    None
                }
                (Some(found), Some(known)) if found != known => Some(v),
                (Some(found), _) if found != SIGNS[k - 1] => Some(v),
                (Some(found), _) => {
                    signs[k] = Some(found);
                    report.passed += 1;
                    None
                }
            },
        };
        if let Some(v) = failure {
            report.failed += 1;
            report.first_failure.get_or_insert(v);
        }
    }
    if config.suite == Suite::SignDetermination {
        let mut found = serde_json::Map::new();
        let mut open = serde_json::Map::new();
        for k in 1..signs.len() {
            if let Some(s) = signs[k] {
                found.insert(k.to_string(), json!(if s > 0 { "+1" } else { "-1" }));
            }
            if undetermined[k] > 0 {
                open.insert(k.to_string(), json!(undetermined[k]));
            }
        }
        report.findings.insert("signs".into(), Value::Object(found));
        report.findings.insert("undetermined".into(), Value::Object(open));
    }
    Ok(report)
}

fn with_trial(mut v: Value, trial: usize) -> Value {
    v["trial"] = json!(trial);
    v
}

fn run_trial(suite: Suite, g: &mut Gen) -> Result<Outcome> {
    match suite {
        Suite::ChainRule => chain_rule(g),
        Suite::Recursion => recursion(g),
        Suite::Conjugation => conjugation(g),
        Suite::LimitedExpansion => limited_expansion(g),
        Suite::RingIso => ring_iso(g),
        Suite::Embedding => embedding(g),
        Suite::Locality => locality(g),
        Suite::CubicFunctor => cubic_functor(g),
        Suite::SignDetermination => sign_determination(g),
        Suite::CubicRecursion => cubic_recursion(g),
    }
}

/// Random data for one trial.
pub struct Gen {
    rng: ChaCha8Rng,
    ring: RingDescriptor,
    max_order: usize,
}

impl Gen {
    pub fn new(ring: RingDescriptor, seed: u64, max_order: usize) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), ring, max_order }
    }

    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }

    pub fn order(&mut self, cap: usize) -> usize {
        self.rng.gen_range(1..=self.max_order.min(cap))
    }

    pub fn scalar(&mut self) -> RingElement {
        match &self.ring {
            RingDescriptor::Real(_) => {
                let x: f64 = self.rng.gen_range(-2.0..2.0);
                RingElement::Real { value: x, tol: tolerance(&self.ring) }
            }
            RingDescriptor::Rational if self.rng.gen_bool(0.25) => {
                let num = self.rng.gen_range(-9i64..=9);
                let den = self.rng.gen_range(2i64..=5);
                self.ring.embed_int(num).div(&self.ring.embed_int(den)).expect("nonzero denominator")
            }
            _ => {
                let n = self.rng.gen_range(-9i64..=9);
                self.ring.embed_int(n)
            }
        }
    }

    pub fn point(&mut self, n: usize) -> Point {
        (0..n).map(|_| self.scalar()).collect()
    }

    pub fn vectors(&mut self, k: usize, n: usize) -> VecTuple {
        VecTuple::new((0..=k).map(|_| self.point(n)).collect()).expect("uniform arity")
    }

    /// Largest order for which non-singular tuples exist.
    pub fn nonsingular_cap(&self) -> usize {
        match self.ring {
            RingDescriptor::ZMod(m) => (2..=m).find(|p| m % p == 0).unwrap_or(m) as usize - 1,
            _ => usize::MAX,
        }
    }

    /// Non-singular `s` of length `k + 1`; reals keep pairwise gaps of at least 0.1.
    pub fn nonsingular(&mut self, k: usize) -> Option<ScalarTuple> {
        for _ in 0..200 {
            let entries: Vec<_> = (0..=k).map(|_| self.scalar()).collect();
            let ok = match &self.ring {
                RingDescriptor::Real(_) => entries.iter().enumerate().all(|(i, a)| {
                    entries[..i].iter().all(|b| (real(a) - real(b)).abs() >= 0.1)
                }),
                _ => crate::algebra::nodes_nonsingular(&entries).unwrap_or(false),
            };
            if ok {
                return ScalarTuple::new(entries).ok();
            }
        }
        None
    }

    /// `s` drawn from a tiny pool so that repeated entries are common.
    pub fn clustered(&mut self, k: usize) -> ScalarTuple {
        let pool: Vec<RingElement> = (0..2).map(|_| self.scalar()).collect();
        let entries = (0..=k).map(|_| pool.choose(&mut self.rng).expect("nonempty").clone()).collect();
        ScalarTuple::new(entries).expect("one owner")
    }

    fn constant(&mut self) -> Expr {
        Expr::constant(self.rng.gen_range(-9..=9))
    }

    /// Random polynomial expression of depth at most `depth` in `n` variables.
    pub fn expr(&mut self, n: usize, depth: usize) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return if self.rng.gen_bool(0.6) { Expr::Var(self.rng.gen_range(0..n)) } else { self.constant() };
        }
        let sub = |g: &mut Gen| Box::new(g.expr(n, depth - 1));
        match self.rng.gen_range(0..6) {
            0 | 1 => Expr::Add(sub(self), sub(self)),
            2 => Expr::Sub(sub(self), sub(self)),
            3 => Expr::Mul(sub(self), sub(self)),
            4 => Expr::Neg(sub(self)),
            _ => Expr::Pow(sub(self), self.rng.gen_range(2..=3)),
        }
    }

    /// Random map `K^n -> K^m`, with at most one division by `1 + monomial`.
    pub fn map(&mut self, name: &str, n: usize, m: usize, division: bool) -> MapExpr {
        let mut outputs: Vec<Expr> = (0..m).map(|_| self.expr(n, 4)).collect();
        if division && self.rng.gen_bool(0.5) {
            let c = Expr::Const(BigInt::from(self.rng.gen_range(1..=9)));
            let var = Expr::Var(self.rng.gen_range(0..n));
            let mono = match self.rng.gen_range(1..=2) {
                1 => Expr::Mul(Box::new(c), Box::new(var)),
                d => Expr::Mul(Box::new(c), Box::new(Expr::Pow(Box::new(var), d))),
            };
            let j = self.rng.gen_range(0..m);
            let den = Expr::Add(Box::new(Expr::constant(1)), Box::new(mono));
            outputs[j] = Expr::Div(Box::new(outputs[j].clone()), Box::new(den));
        }
        let names = (1..=n).map(|i| format!("x{i}")).collect();
        MapExpr::new(name, names, outputs)
    }

    fn arity(&mut self) -> usize {
        self.rng.gen_range(1..=2)
    }
}

fn tolerance(ring: &RingDescriptor) -> crate::ring::Tolerance {
    match ring {
        RingDescriptor::Real(t) => *t,
        _ => unreachable!("only real descriptors carry a tolerance"),
    }
}

fn real(e: &RingElement) -> f64 {
    match e {
        RingElement::Real { value, .. } => *value,
        _ => unreachable!("real ring"),
    }
}

fn scalars_json(s: &ScalarTuple) -> Value {
    Value::Array(s.entries().iter().map(RingElement::to_json).collect())
}

fn points_json(p: &[Point]) -> Value {
    Value::Array(p.iter().map(|r| Value::Array(r.iter().map(RingElement::to_json).collect())).collect())
}

fn verdict(ok: bool, details: impl FnOnce() -> Value) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(details())
    }
}

fn all_zero(rows: &[Point]) -> bool {
    rows.iter().flatten().all(RingElement::is_zero)
}

fn chain_rule(g: &mut Gen) -> Result<Outcome> {
    let zero_s = g.rng.gen_bool(0.5);
    let (k, s) = if zero_s {
        let k = g.order(3);
        (k, ScalarTuple::zeros(&g.ring.clone(), k))
    } else {
        let k = g.order(3.min(g.nonsingular_cap()));
        let Some(s) = g.nonsingular(k) else { return Ok(Outcome::Skip) };
        (k, s)
    };
    let (n, m, l) = (g.arity(), g.arity(), g.arity());
    let f = g.map("f", n, m, true);
    let gm = g.map("g", m, l, true);
    let v = g.vectors(k, n);
    let extension = |h: &MapExpr, v: &VecTuple| if zero_s { sj_via_ring(h, v, &s) } else { sj_extension(h, v, &s) };
    let rhs = match extension(&f, &v).and_then(|jf| extension(&gm, &jf)) {
        Ok(r) => r,
        Err(Error::Domain(_)) => return Ok(Outcome::Skip),
        Err(e) => return Err(e),
    };
    let gf = MapExpr::compose(&gm, &f)?;
    let details = |lhs: Value| {
        json!({"order": k, "f": f.to_string(), "g": gm.to_string(), "v": v.to_json(), "s": scalars_json(&s),
               "lhs": lhs, "rhs": rhs.to_json()})
    };
    Ok(match extension(&gf, &v) {
        Ok(lhs) => {
            let same = match g.ring {
                RingDescriptor::Real(tol) => real_rows_eq(&lhs, &rhs, &gf, &v, &s, zero_s, tol.get())?,
                _ => lhs.ring_eq(&rhs)?,
            };
            verdict(same, || details(lhs.to_json()))
        }
        Err(Error::Domain(w)) => Outcome::Fail(details(json!({"undefined": w.subexpr}))),
        Err(e) => return Err(e),
    })
}

/// Float comparison relative to the magnitude of the values being differenced:
/// row `k` may be off by `tol · max(1, |a|, |b|, F · Σ_i |N_ki|)` where `F`
/// bounds `|h(point_i)|`.
fn real_rows_eq(
    lhs: &VecTuple,
    rhs: &VecTuple,
    h: &MapExpr,
    v: &VecTuple,
    s: &ScalarTuple,
    zero_s: bool,
    tol: f64,
) -> Result<bool> {
    let mut f_max: f64 = 0.0;
    for p in eval_points(v, s)? {
        for y in h.eval(&p)? {
            f_max = f_max.max(real(&y).abs());
        }
    }
    let weights: Vec<f64> = if zero_s {
        vec![1.0; lhs.len()]
    } else {
        n_matrix(s.entries())?.rows().iter().map(|row| row.iter().map(|x| real(x).abs()).sum()).collect()
    };
    for ((a_row, b_row), w) in lhs.rows().iter().zip(rhs.rows()).zip(weights) {
        for (a, b) in a_row.iter().zip(b_row) {
            let (a, b) = (real(a), real(b));
            let scale = 1f64.max(a.abs()).max(b.abs()).max(f_max * w);
            if (a - b).abs() > tol * scale || a.is_nan() || b.is_nan() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn recursion(g: &mut Gen) -> Result<Outcome> {
    let k = g.order(4.min(g.nonsingular_cap()));
    let Some(s) = g.nonsingular(k) else { return Ok(Outcome::Skip) };
    let (n, m) = (g.arity(), g.arity());
    let f = g.map("f", n, m, true);
    let v = g.vectors(k, n);
    let direct = divided_difference(&f, &v, &s)?;
    let rec = divided_difference_rec(&f, &v, &s)?;
    Ok(verdict(slices_eq(&direct, &rec)?, || {
        json!({"order": k, "f": f.to_string(), "v": v.to_json(), "s": scalars_json(&s),
               "direct": points_json(std::slice::from_ref(&direct)), "recursive": points_json(std::slice::from_ref(&rec))})
    }))
}

fn conjugation(g: &mut Gen) -> Result<Outcome> {
    let k = g.order(4.min(g.nonsingular_cap()));
    let Some(s) = g.nonsingular(k) else { return Ok(Outcome::Skip) };
    let m = m_matrix(s.entries())?;
    let nm = n_matrix(s.entries())?;
    if !m.mul(&nm)?.is_identity()? || !nm.mul(&m)?.is_identity()? {
        return Ok(Outcome::Fail(json!({"order": k, "s": scalars_json(&s), "reason": "M_s N_s != I"})));
    }
    let (n, mo) = (g.arity(), g.arity());
    let f = g.map("f", n, mo, true);
    let v = g.vectors(k, n);
    let images = eval_points(&v, &s)?.iter().map(|p| f.eval(p)).collect::<Result<Vec<_>>>()?;
    for jet in [sj_extension(&f, &v, &s)?, sj_via_ring(&f, &v, &s)?] {
        let predicted = m.apply(jet.rows())?;
        let same = images.iter().zip(&predicted).map(|(a, b)| slices_eq(a, b)).collect::<Result<Vec<_>>>()?;
        if !same.iter().all(|&x| x) {
            return Ok(Outcome::Fail(json!({"order": k, "f": f.to_string(), "v": v.to_json(), "s": scalars_json(&s),
                "images": points_json(&images), "predicted": points_json(&predicted)})));
        }
    }
    Ok(Outcome::Pass)
}

fn limited_expansion(g: &mut Gen) -> Result<Outcome> {
    let k = g.order(4);
    let s = match g.rng.gen_range(0..3) {
        0 => ScalarTuple::zeros(&g.ring.clone(), k),
        1 => g.clustered(k),
        _ => match g.nonsingular(k.min(g.nonsingular_cap())) {
            Some(s) if s.order() == k => s,
            _ => g.clustered(k),
        },
    };
    let (n, m) = (g.arity(), g.arity());
    let f = g.map("f", n, m, true);
    let v = g.vectors(k, n);
    let jet = sj_via_ring(&f, &v, &s)?;
    let residual = expansion_residual(&f, &v, &s, &jet)?;
    Ok(verdict(all_zero(&residual), || {
        json!({"order": k, "f": f.to_string(), "v": v.to_json(), "s": scalars_json(&s),
               "jet": jet.to_json(), "residual": points_json(&residual)})
    }))
}

fn ring_iso(g: &mut Gen) -> Result<Outcome> {
    let k = g.order(4.min(g.nonsingular_cap()));
    let Some(s) = g.nonsingular(k) else { return Ok(Outcome::Skip) };
    let ring = TruncatedPolyRing::from_scalars(s.entries())?;
    let m = m_matrix(s.entries())?;
    let nm = n_matrix(s.entries())?;
    let base = ring.base().clone();
    let unit = |j: usize| -> Vec<RingElement> { (0..=k).map(|i| if i == j { base.one() } else { base.zero() }).collect() };
    // c_i c_j computed in B^s versus N_s((M_s e_i) ⊙ (M_s e_j))
    for i in 0..=k {
        for j in i..=k {
            let prod = ring.from_c_coords(&unit(i))?.mul(&ring.from_c_coords(&unit(j))?)?.to_c_coords()?;
            let ei = m.apply(&unit(i).into_iter().map(|x| vec![x]).collect::<Vec<_>>())?;
            let ej = m.apply(&unit(j).into_iter().map(|x| vec![x]).collect::<Vec<_>>())?;
            let diag = ei.iter().zip(&ej).map(|(a, b)| Ok(vec![a[0].mul(&b[0])?])).collect::<Result<Vec<_>>>()?;
            let expect: Vec<_> = nm.apply(&diag)?.into_iter().map(|r| r[0].clone()).collect();
            if !slices_eq(&prod, &expect)? {
                return Ok(Outcome::Fail(json!({"order": k, "s": scalars_json(&s), "i": i, "j": j,
                    "ring": points_json(&[prod]), "conjugated": points_json(&[expect])})));
            }
        }
    }
    // at s = 0 the product is truncated power-series multiplication
    let zero = TruncatedPolyRing::from_scalars(ScalarTuple::zeros(&base, k).entries())?;
    let a = g.point(k + 1);
    let b = g.point(k + 1);
    let prod = zero.element(a.clone())?.mul(&zero.element(b.clone())?)?;
    let mut series = vec![base.zero(); k + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(k + 1 - i) {
            series[i + j] = series[i + j].add(&x.mul(y)?)?;
        }
    }
    Ok(verdict(slices_eq(prod.coeffs(), &series)?, || {
        json!({"order": k, "a": points_json(std::slice::from_ref(&a)), "b": points_json(std::slice::from_ref(&b)),
               "ring": points_json(&[prod.coeffs().to_vec()]), "series": points_json(&[series.clone()])})
    }))
}

fn embedding(g: &mut Gen) -> Result<Outcome> {
    let k = g.order(4);
    let s = match g.rng.gen_range(0..3) {
        0 => ScalarTuple::new(g.point(k + 1))?,
        1 => g.clustered(k),
        _ => ScalarTuple::zeros(&g.ring.clone(), k),
    };
    let report = embed_simplicial_in_cubic(s.entries())?;
    Ok(verdict(report.matches, || {
        json!({"order": k, "s": scalars_json(&s), "t": report.algebra.params_json(),
               "minpoly": points_json(std::slice::from_ref(&report.minimal_polynomial)),
               "expected": points_json(std::slice::from_ref(&report.defining_polynomial))})
    }))
}

fn locality(g: &mut Gen) -> Result<Outcome> {
    let n = g.arity();
    let f = if g.rng.gen_bool(0.3) {
        MapExpr::parse("f(x) = 1/x").expect("fixed map")
    } else {
        let mut f = g.map("f", n, 1, false);
        let den = g.expr(f.arity_in(), 2);
        let num = f.outputs()[0].clone();
        f = MapExpr::new("f", f.inputs().to_vec(), vec![Expr::Div(Box::new(num), Box::new(den))]);
        f
    };
    let n = f.arity_in();
    let k = g.order(3);
    let mut v = g.vectors(k, n);
    if g.rng.gen_bool(0.3) {
        // put v0 on the zero set of the simplest denominators
        let mut rows = v.into_rows();
        rows[0] = vec![g.ring.zero(); n];
        v = VecTuple::new(rows)?;
    }
    let base_ok = f.eval(&v.rows()[0]).is_ok();
    let details = |what: &str, got: bool| {
        json!({"check": what, "order": k, "f": f.to_string(), "v": v.to_json(), "verdict": got, "v0_inside": base_ok})
    };
    // s = 0: only v0 matters
    let at_zero = domain_check(&f, &v, &ScalarTuple::zeros(&g.ring.clone(), k))?.inside;
    if at_zero != base_ok {
        return Ok(Outcome::Fail(details("s = 0", at_zero)));
    }
    // non-singular s: inside iff every evaluation point is
    let cap = g.nonsingular_cap().min(k);
    if let Some(s) = g.nonsingular(cap) {
        let vs = v.prefix(cap);
        let pts_ok = eval_points(&vs, &s)?.iter().all(|p| f.eval(p).is_ok());
        let got = domain_check(&f, &vs, &s)?.inside;
        if got != pts_ok {
            return Ok(Outcome::Fail(details("non-singular s", got)));
        }
    }
    // cubic: t_i = 0 for singletons, other t_J arbitrary
    let kc = k.min(3);
    let size = 1 << kc;
    let mut xs: Vec<Point> = (0..size).map(|_| g.point(n)).collect();
    xs[0] = v.rows()[0].clone();
    let mut ts: Vec<RingElement> = (0..size).map(|_| g.scalar()).collect();
    for j in 0..kc {
        ts[1 << j] = g.ring.zero();
    }
    let arg = CubicArg::new(xs, ts)?;
    let got = domain_check_cubic(&f, &arg)?.inside;
    Ok(verdict(got == base_ok, || details("cubic t_i = 0", got)))
}

fn cubic_functor(g: &mut Gen) -> Result<Outcome> {
    let k = g.order(3);
    let (n, m, l) = (g.arity(), g.arity(), g.arity());
    let f = g.map("f", n, m, true);
    let gm = g.map("g", m, l, true);
    let xs: Vec<Point> = (0..1 << k).map(|_| g.point(n)).collect();
    let ts: Vec<RingElement> = (0..1 << k).map(|_| g.scalar()).collect();
    let arg = CubicArg::new(xs, ts)?;
    let inner = t_extension(&f, &arg)?;
    let rhs = t_extension(&gm, &CubicArg::new(inner, arg.scalars().to_vec())?)?;
    let gf = MapExpr::compose(&gm, &f)?;
    let lhs = t_extension(&gf, &arg)?;
    let ring = t_via_ring(&gf, &arg)?;
    let same = |a: &[Point], b: &[Point]| -> Result<bool> {
        for (x, y) in a.iter().zip(b) {
            if !slices_eq(x, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let ok = same(&lhs, &rhs)? && same(&lhs, &ring)?;
    Ok(verdict(ok, || {
        json!({"order": k, "f": f.to_string(), "g": gm.to_string(), "x": points_json(arg.vectors()),
               "t": points_json(&[arg.scalars().to_vec()]), "composite": points_json(&lhs),
               "composed": points_json(&rhs), "ring": points_json(&ring)})
    }))
}

fn sign_determination(g: &mut Gen) -> Result<Outcome> {
    let k = g.order(SIGNS.len().min(g.nonsingular_cap()));
    let Some(s) = g.nonsingular(k) else { return Ok(Outcome::Skip) };
    let n = g.arity();
    let f = g.map("f", n, 1, true);
    let v = g.vectors(k, n);
    let found = determine_sign(&f, &v, &s)?;
    Ok(Outcome::Sign(k, found, json!({"order": k, "f": f.to_string(), "v": v.to_json(), "s": scalars_json(&s),
        "verdict": format!("{found:?}"), "expected_sign": SIGNS[k - 1]})))
}

fn cubic_recursion(g: &mut Gen) -> Result<Outcome> {
    let k = g.order(3);
    let ts: Vec<RingElement> = (0..1 << k).map(|_| g.scalar()).collect();
    let algebra = CubicAlgebra::new(g.ring.clone(), k, ts)?;
    let tower = algebra.structure_constants_via_tower()?;
    let seed = g.rng.gen();
    for order in [RewriteOrder::HighestFirst, RewriteOrder::LowestFirst, RewriteOrder::Random(seed)] {
        let direct = algebra.structure_constants_with(order)?;
        if !slices_eq(&direct, &tower)? {
            return Ok(Outcome::Fail(json!({"order": k, "t": algebra.params_json(), "rewrite": format!("{order:?}")})));
        }
    }
    Ok(Outcome::Pass)
}
