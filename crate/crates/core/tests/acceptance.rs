//! Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on failure.

mod support;

use std::process::ExitCode;
use std::time::Instant;

use divcalc::algebra::{embed_simplicial_in_cubic, CubicAlgebra};
use divcalc::cubic::{diff_quotient_k, embedding_arg, CubicArg};
use divcalc::jet::{domain_check, domain_check_cubic, taylor_coeffs};
use divcalc::ring::rational;
use divcalc::simplicial::{divided_difference, ScalarTuple, VecTuple};
use divcalc::verify::{run, Gen, Suite, VerifyConfig};
use divcalc::{Error, MapExpr, RingDescriptor, RingElement};

type Check = Result<String, String>;

fn suite(suite: Suite, ring: &str, trials: usize, max_order: usize) -> Check {
    let config = VerifyConfig { suite, ring: ring.parse().map_err(|e: Error| e.to_string())?, trials, seed: 20240917, max_order };
    let report = run(&config).map_err(|e| e.to_string())?;
    let summary = format!("{suite} over {ring}: {} passed, {} skipped", report.passed, report.skipped);
    if !report.all_passed() {
        return Err(format!("{summary}, {} failed, first: {}", report.failed, report.to_json()["first_failure"]));
    }
    // a run that skipped most trials proves little
    if report.passed * 2 < trials {
        return Err(format!("{summary}: too few decided trials"));
    }
    Ok(summary)
}

fn all(checks: impl IntoIterator<Item = Check>) -> Check {
    let mut notes = Vec::new();
    for c in checks {
        notes.push(c?);
    }
    Ok(notes.join("; "))
}

fn ensure(cond: bool, what: &str) -> Check {
    if cond {
        Ok(what.to_string())
    } else {
        Err(format!("failed: {what}"))
    }
}

fn q(v: &[i64]) -> Vec<RingElement> {
    v.iter().map(|&x| rational(x, 1)).collect()
}

fn chain_rule() -> Check {
    let mut checks: Vec<Check> =
        ["rational", "zmod:2", "zmod:3", "zmod:5", "zmod:7"].iter().map(|r| suite(Suite::ChainRule, r, 200, 3)).collect();
    checks.push(suite(Suite::ChainRule, "real:1e-9", 200, 3));
    all(checks)
}

fn recursion() -> Check {
    suite(Suite::Recursion, "rational", 200, 4)
}

fn conjugation() -> Check {
    suite(Suite::Conjugation, "rational", 200, 4)
}

fn limited_expansion() -> Check {
    all([suite(Suite::LimitedExpansion, "rational", 200, 4), suite(Suite::LimitedExpansion, "zmod:5", 200, 4)])
}

fn taylor_factorial() -> Check {
    let ring = RingDescriptor::Rational;
    let (mut decided, mut skipped) = (0, 0);
    for trial in 0..100u64 {
        let mut g = Gen::new(ring.clone(), 1000 + trial, 4);
        let n = 1 + (trial % 2) as usize;
        let f = g.map("f", n, 1, true);
        let x = g.point(n);
        let h = g.point(n);
        let coeffs = match taylor_coeffs(&f, &x, &h, 4) {
            Ok(c) => c,
            Err(Error::Domain(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        let mut args = x.clone();
        args.extend(h.iter().cloned());
        let mut factorial = 1;
        for (j, c) in coeffs.iter().enumerate() {
            if j > 0 {
                factorial *= j as i64;
            }
            let oracle = support::iterated_directional(&f, j).eval(&args).map_err(|e| e.to_string())?;
            let scaled = c[0].mul(&ring.embed_int(factorial)).map_err(|e| e.to_string())?;
            if scaled != oracle[0] {
                return Err(format!("trial {trial}: {f} at x={x:?} h={h:?}, order {j}: {scaled} vs {oracle:?}"));
            }
        }
        decided += 1;
    }
    if decided < 50 {
        return Err(format!("only {decided} decided trials"));
    }
    // over Z/p the jet of x^p exists although p! vanishes
    for p in [2u64, 3, 5, 7] {
        let zp = RingDescriptor::zmod(p).map_err(|e| e.to_string())?;
        let f = MapExpr::parse(&format!("f(x) = x^{p}")).map_err(|e| e.to_string())?;
        for x in 0..p as i64 {
            let xv = zp.embed_int(x);
            let coeffs = taylor_coeffs(&f, std::slice::from_ref(&xv), &[zp.one()], p as usize).map_err(|e| e.to_string())?;
            let mut expect = vec![vec![zp.zero()]; p as usize + 1];
            expect[0] = vec![xv.pow(p).map_err(|e| e.to_string())?];
            expect[p as usize] = vec![zp.one()];
            if coeffs != expect {
                return Err(format!("x^{p} at {x} over Z/{p}: {coeffs:?}"));
            }
        }
    }
    Ok(format!("{decided} rational trials matched symbolic derivatives ({skipped} outside domain); x^p over Z/p for p = 2, 3, 5, 7"))
}

fn ring_iso() -> Check {
    suite(Suite::RingIso, "rational", 100, 4)
}

fn embedding() -> Check {
    let worked = embed_simplicial_in_cubic(&q(&[0, 1, 3])).map_err(|e| e.to_string())?;
    let mut checks = vec![ensure(worked.matches && worked.minimal_polynomial == q(&[0, 3, -4, 1]), "s = (0,1,3) gives X^3 - 4X^2 + 3X")];
    for ring in ["rational", "zmod:2", "zmod:3", "zmod:5", "zmod:7"] {
        checks.push(suite(Suite::Embedding, ring, 100, 4));
    }
    all(checks)
}

fn simplicial_in_cubic() -> Check {
    let f = MapExpr::parse("f(x) = x^2").unwrap();
    let v = VecTuple::scalars(q(&[2, 1, 0])).unwrap();
    let s = ScalarTuple::new(q(&[0, 1, 3])).unwrap();
    let simplicial = divided_difference(&f, &v, &s).map_err(|e| e.to_string())?;
    let cubic = diff_quotient_k(&f, &embedding_arg(&v, &s).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let worked = ensure(simplicial == q(&[1]) && cubic == q(&[1]), "x^2 at v=(2,1,0), s=(0,1,3): both sides 1");
    let report = run(&VerifyConfig {
        suite: Suite::SignDetermination,
        ring: RingDescriptor::Rational,
        trials: 200,
        seed: 20240917,
        max_order: 3,
    })
    .map_err(|e| e.to_string())?;
    let signs = report.to_json()["signs"].clone();
    let determined = ensure(
        report.all_passed() && (1..=3).all(|k| signs[k.to_string()].is_string()),
        &format!("signs {signs} constant over {} trials", report.passed),
    );
    all([worked, determined, suite(Suite::SignDetermination, "zmod:7", 200, 3)])
}

fn cubic_recursion() -> Check {
    let z7 = RingDescriptor::zmod(7).unwrap();
    let mut checks = vec![suite(Suite::CubicRecursion, "zmod:7", 200, 3)];
    // every k <= 3 explicitly, several random t each
    let mut g = Gen::new(z7.clone(), 99, 3);
    for k in 1..=3 {
        for _ in 0..20 {
            let t = g.point(1 << k);
            let a = CubicAlgebra::new(z7.clone(), k, t).map_err(|e| e.to_string())?;
            let tower = a.structure_constants_via_tower().map_err(|e| e.to_string())?;
            if a.structure_constants() != tower.as_slice() {
                return Err(format!("k = {k}: direct and tower structure constants differ for t = {}", a.params_json()));
            }
        }
    }
    checks.push(Ok("k = 1, 2, 3 exhaustively over all basis pairs".into()));
    // X_2 · X_{1,2} = (t_2 + t_1 t_12) X_{1,2};  X_2 · X_{2,3} = t_2 X_{2,3} + t_12 X_{1,2,3}
    let mut g = Gen::new(RingDescriptor::Rational, 5, 3);
    for _ in 0..10 {
        let t = g.point(8);
        let a = CubicAlgebra::new(RingDescriptor::Rational, 3, t.clone()).map_err(|e| e.to_string())?;
        let p = a.basis(0b010).mul(&a.basis(0b011)).map_err(|e| e.to_string())?;
        let coeff = t[2].add(&t[1].mul(&t[3]).unwrap()).unwrap();
        let mut expect = vec![rational(0, 1); 8];
        expect[0b011] = coeff;
        if p.coeffs() != expect.as_slice() {
            return Err(format!("X2·X12 = {:?}", p.coeffs()));
        }
        let p = a.basis(0b010).mul(&a.basis(0b110)).map_err(|e| e.to_string())?;
        let mut expect = vec![rational(0, 1); 8];
        expect[0b110] = t[2].clone();
        expect[0b111] = t[3].clone();
        if p.coeffs() != expect.as_slice() {
            return Err(format!("X2·X23 = {:?}", p.coeffs()));
        }
    }
    checks.push(Ok("X2·X12 = (t2 + t1 t12) X12 and X2·X23 = t2 X23 + t12 X123".into()));
    all(checks)
}

fn locality() -> Check {
    let inv = MapExpr::parse("f(x) = 1/x").unwrap();
    let z5 = RingDescriptor::zmod(5).unwrap();
    // s = 0: verdict depends on v0 only, exhaustively over Z/5 for k = 1, 2
    for k in 1..=2usize {
        let s = ScalarTuple::zeros(&z5, k);
        for code in 0..5usize.pow(k as u32 + 1) {
            let rows: Vec<i64> = (0..=k).map(|j| (code / 5usize.pow(j as u32) % 5) as i64).collect();
            let v = VecTuple::scalars(rows.iter().map(|&x| z5.embed_int(x)).collect()).unwrap();
            let inside = domain_check(&inv, &v, &s).map_err(|e| e.to_string())?.inside;
            if inside != (rows[0] != 0) {
                return Err(format!("Z/5, s = 0, v = {rows:?}: verdict {inside}"));
            }
        }
    }
    // v0 inside but the second evaluation point 1 + (1 - 0)(-1) = 0 is not
    let rejected = !domain_check(&inv, &VecTuple::scalars(q(&[1, -1])).unwrap(), &ScalarTuple::new(q(&[0, 1])).unwrap())
        .map_err(|e| e.to_string())?
        .inside;
    let rejected = ensure(rejected, "v = (1,-1), s = (0,1) rejected")?;
    // cubic: t_1 = t_2 = 0, t_12 = 1, exhaustively over Z/5
    let t = vec![z5.zero(), z5.zero(), z5.zero(), z5.one()];
    for code in 0..625usize {
        let xs: Vec<Vec<RingElement>> = (0..4).map(|j| vec![z5.embed_int((code / 5usize.pow(j) % 5) as i64)]).collect();
        let x0 = code % 5;
        let arg = CubicArg::new(xs, t.clone()).unwrap();
        let inside = domain_check_cubic(&inv, &arg).map_err(|e| e.to_string())?.inside;
        if inside != (x0 != 0) {
            return Err(format!("cubic over Z/5, code {code}: verdict {inside}"));
        }
    }
    all([
        Ok("1/x at s = 0 exhaustive over Z/5".to_string()),
        Ok(rejected),
        Ok("cubic t_i = 0, t_12 = 1 exhaustive over Z/5".to_string()),
        suite(Suite::Locality, "rational", 200, 3),
        suite(Suite::Locality, "zmod:5", 200, 3),
    ])
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("chain rule", chain_rule),
        ("recursion", recursion),
        ("conjugation", conjugation),
        ("limited expansion", limited_expansion),
        ("taylor/factorial", taylor_factorial),
        ("ring isomorphism", ring_iso),
        ("embedding", embedding),
        ("simplicial in cubic", simplicial_in_cubic),
        ("cubic algebra recursion", cubic_recursion),
        ("locality", locality),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(note) => println!("PASS {:>2} {name} ({secs:.1}s): {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
