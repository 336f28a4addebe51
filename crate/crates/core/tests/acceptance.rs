//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use frobheis::action::{ActionContext, Oracle};
use frobheis::diagram::Morphism;
use frobheis::frobenius::{self, FrobeniusAlgebra};
use frobheis::macros::Heis;
use frobheis::relations::{self, Suite, SuiteOptions};
use frobheis::rewrite::{self, rule_set, ClosedValue};
use frobheis::sample::{self, DiagramShape};
use frobheis::wreath::{factorial, symmetrizer, AWElement, CycloParams, CyclotomicAlgebra, WreathRing};
use frobheis::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

const GRID: [&str; 3] = ["trivial", "trunc-poly-2", "clifford"];

fn alg(name: &str) -> Arc<FrobeniusAlgebra> {
    Arc::new(frobenius::builtin(name).unwrap())
}

fn within(t: Instant, limit: Duration, detail: String) -> Outcome {
    if t.elapsed() > limit {
        Err(format!("{detail}, but took {:.1?} (limit {limit:?})", t.elapsed()))
    } else {
        Ok(detail)
    }
}

fn frobenius_kernel() -> Outcome {
    let t = Instant::now();
    let mut algs: Vec<FrobeniusAlgebra> =
        ["trivial", "trunc-poly-2", "trunc-poly-3", "clifford"].iter().map(|n| frobenius::builtin(n).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..20 {
        algs.push(frobenius::random_algebra(&mut rng, i));
    }
    for f in &algs {
        for c in frobenius::check_frobenius_identities(f) {
            if !c.passed {
                return Err(format!("{}: {} fails", f.name, c.identity));
            }
        }
        // pairing against the dual basis, computed directly
        for a in 0..f.dim() {
            for b in 0..f.dim() {
                let v = f.tr(&f.mul(f.dual(a), &f.basis_elem(b)));
                if v != Scalar::from_int((a == b) as i64) {
                    return Err(format!("{}: dual basis pairing ({a},{b})", f.name));
                }
            }
        }
    }
    within(t, Duration::from_secs(10), format!("{} algebras", algs.len()))
}

fn random_element(a: &CyclotomicAlgebra, rng: &mut ChaCha8Rng) -> AWElement {
    let mut e = AWElement::zero();
    for _ in 0..3 {
        let w = a.word(rng.gen_range(0..a.dim()));
        e.add_term(w, Scalar::from_int(rng.gen_range(-3..=3)));
    }
    e
}

fn wreath() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut triples = 0;
    for name in GRID {
        let f = Arc::new(frobenius::builtin(name).unwrap().opposite());
        for ell in [1usize, 2] {
            let ring = Arc::new(WreathRing::cyclotomic(f.clone(), CycloParams::zero(&f, ell), 3).map_err(|e| e.to_string())?);
            for n in 0..=3 {
                let a = CyclotomicAlgebra::new(ring.clone(), n).map_err(|e| e.to_string())?;
                let expect = (ell * f.dim()).pow(n as u32) * factorial(n);
                if a.dim() != expect {
                    return Err(format!("{name} ell={ell} n={n}: dim {} != {expect}", a.dim()));
                }
                a.certify().map_err(|e| format!("{name} ell={ell} n={n}: {e}"))?;
                if n >= 2 {
                    for _ in 0..20 {
                        let (x, y, z) = (random_element(&a, &mut rng), random_element(&a, &mut rng), random_element(&a, &mut rng));
                        if ring.mul(&ring.mul(&x, &y), &z) != ring.mul(&x, &ring.mul(&y, &z)) {
                            return Err(format!("{name} ell={ell} n={n}: associativity"));
                        }
                        triples += 1;
                    }
                }
            }
        }
        let affine = WreathRing::affine(f.clone()).map_err(|e| e.to_string())?;
        for n in 1..=4 {
            let e = symmetrizer(&affine, f.unit(), n).map_err(|e| e.to_string())?;
            if affine.mul(&e, &e) != e {
                return Err(format!("{name}: symmetrizer n={n} is not idempotent"));
            }
        }
    }
    within(t, Duration::from_secs(120), format!("dimensions certified, {triples} associativity triples"))
}

/// Runs every instance of the given relation ids on the grid in parallel.
fn run_suite(ids: &[&'static str], ks: &[i64], levels: &[usize], opts: SuiteOptions) -> Result<usize, String> {
    let jobs: Vec<(&str, i64, &str)> =
        GRID.iter().flat_map(|n| ks.iter().flat_map(move |&k| ids.iter().map(move |&id| (*n, k, id)))).collect();
    let counts: Result<Vec<usize>, String> = jobs
        .par_iter()
        .map(|&(name, k, id)| {
            let o = Oracle::new(alg(name), k, levels.iter().max().unwrap() + 3).map_err(|e| e.to_string())?;
            let insts = relations::instances(&o.heis, id, &opts).map_err(|e| e.to_string())?;
            for i in &insts {
                match o.check_equal(&i.lhs, &i.rhs, levels) {
                    Ok(None) => {}
                    Ok(Some(l)) => return Err(format!("{name} k={k} {id} [{}] fails at level {l}", i.params)),
                    Err(e) => return Err(format!("{name} k={k} {id} [{}]: {e}", i.params)),
                }
            }
            Ok(insts.len())
        })
        .collect();
    Ok(counts?.iter().sum())
}

fn defining_suite() -> Outcome {
    let t = Instant::now();
    let n = run_suite(Suite::Defining.ids(), &[-1, -2], &[0, 1, 2], SuiteOptions::default())?;
    for name in GRID {
        for k in [-1i64, -2] {
            let ctx = ActionContext::new(alg(name), k, 5).map_err(|e| e.to_string())?;
            for level in 0..=2 {
                ctx.check_inversion(level).map_err(|e| format!("{name} k={k} level {level}: {e}"))?;
            }
        }
    }
    within(t, Duration::from_secs(300), format!("{n} instances, inversion invertible at levels 0..2"))
}

fn theorem_suites() -> Outcome {
    let t = Instant::now();
    let opts = SuiteOptions { t_max: 4, r_max: 3 };
    let ids: Vec<&'static str> = Suite::Presentation.ids().iter().chain(Suite::Consequences.ids()).copied().collect();
    let n = run_suite(&ids, &[-1, -2], &[0, 1, 2], opts)?;
    let m = run_suite(&ids, &[1, 2], &[0, 1, 2], opts)?;
    within(t, Duration::from_secs(1800), format!("{} instances at k<0, {} at k>0 through ω", n, m))
}

fn centrality() -> Outcome {
    let n = run_suite(Suite::Central.ids(), &[-2, -1, 1, 2], &[0, 1, 2], SuiteOptions::default())?;
    Ok(format!("{n} instances"))
}

fn rewrite_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut rules_checked = 0;
    for (name, k) in [("trunc-poly-2", -1i64), ("clifford", -2), ("clifford", 1), ("trivial", 2)] {
        let o = Oracle::new(alg(name), k, 5).map_err(|e| e.to_string())?;
        for rule in rule_set(&o.heis) {
            let n = common::check_rule(&o, &rule, 20, &mut rng)?;
            if n < 20 {
                return Err(format!("{name} k={k} {} ({}): only {n} embeddings", rule.id, rule.note));
            }
            rules_checked += 1;
        }
    }
    let shape = DiagramShape::default();
    let mut simplified = 0;
    for (name, k) in [("trunc-poly-2", -1i64), ("clifford", 1), ("trivial", -2)] {
        let o = Oracle::new(alg(name), k, 5).map_err(|e| e.to_string())?;
        let rules = rule_set(&o.heis);
        let mut here = 0;
        while here < 40 {
            let dom = sample::random_word(2, &mut rng);
            let m = Morphism::from_diagram(sample::random_diagram(&o.heis.alg, &dom, &shape, &mut rng));
            let s = rewrite::simplify(&o.heis, &m, &rules, 200);
            match common::same(&o, &m, &s.morphism, &[0, 1]) {
                Ok(true) => here += 1,
                Ok(false) => return Err(format!("simplify changed the action of {m:?}")),
                Err(_) => {}
            }
        }
        simplified += here;
    }
    let mut closed = 0;
    for (name, k) in [("trunc-poly-2", -1i64), ("clifford", -2), ("trivial", 1), ("clifford", 2)] {
        let o = Oracle::new(alg(name), k, 5).map_err(|e| e.to_string())?;
        let h = o.heis.clone();
        let rules = rule_set(&h);
        let mut here = 0;
        for _ in 0..200 {
            if here >= 15 {
                break;
            }
            let m = sample::random_closed(&h, &mut rng);
            let v = rewrite::eval_closed(&h, &m, &rules, 5000).map_err(|e| e.to_string())?;
            let value = match &v {
                ClosedValue::Scalar(c) => Morphism::identity(vec![]).scaled(c),
                ClosedValue::Polynomial(p) => p.to_morphism(&h),
                ClosedValue::Irreducible(_) => continue,
            };
            match common::same(&o, &m, &value, &[0, 1]) {
                Ok(true) => here += 1,
                Ok(false) => return Err(format!("{name} k={k}: eval_closed gives {v:?}")),
                Err(_) => {}
            }
        }
        closed += here;
    }
    if closed < 50 {
        return Err(format!("only {closed} reducible closed diagrams"));
    }
    Ok(format!("{rules_checked} rules x 20 embeddings, simplify on {simplified}, eval_closed on {closed}"))
}

fn omega() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..120 {
        let a = [frobenius::clifford(), frobenius::trunc_poly(2), frobenius::exterior_two()][i % 3].clone();
        let dom = sample::random_word(3, &mut rng);
        let m = Morphism::from_diagram(sample::random_diagram(&a, &dom, &DiagramShape::default(), &mut rng));
        if m.omega(&a).omega(&a) != m {
            return Err(format!("ω² ≠ id on {m:?}"));
        }
    }
    let axioms = ["token-homom", "braid-up", "doublecross-up", "dotslide1", "right-adjunction-up"];
    let mut n = 0;
    for name in GRID {
        for k in [1i64, 2] {
            let h = Heis::new(alg(name), -k);
            let o = Oracle::new(alg(name), k, 5).map_err(|e| e.to_string())?;
            for id in axioms {
                for i in relations::instances(&h, id, &SuiteOptions::default()).map_err(|e| e.to_string())? {
                    let (l, r) = (i.lhs.omega(&h.alg), i.rhs.omega(&h.alg));
                    if o.check_equal(&l, &r, &[0, 1, 2]).map_err(|e| e.to_string())?.is_some() {
                        return Err(format!("{name} k={k}: ω image of {id} [{}]", i.params));
                    }
                    n += 1;
                }
            }
        }
    }
    Ok(format!("ω² on 120 diagrams, {n} ω-images of axioms"))
}

fn sign_discipline() -> Outcome {
    let a = alg("clifford");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in [-1i64, -2] {
        let o = Oracle::new(a.clone(), k, 4).map_err(|e| e.to_string())?;
        for _ in 0..25 {
            let f = sample::odd_element(&a, &mut rng).unwrap();
            let g = sample::odd_element(&a, &mut rng).unwrap();
            common::super_interchange(&o, &f, &g, &mut rng)?;
        }
    }
    Ok("50 configurations".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("frobenius kernel", frobenius_kernel),
        ("wreath algebras", wreath),
        ("defining relations", defining_suite),
        ("derived relations", theorem_suites),
        ("central bubbles", centrality),
        ("rewrite soundness", rewrite_soundness),
        ("omega", omega),
        ("super-interchange sign", sign_discipline),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        match r {
            Ok(d) => println!("[{}] PASS {name}: {d} ({:.1?})", i + 1, t.elapsed()),
            Err(e) => {
                failed += 1;
                println!("[{}] FAIL {name}: {e} ({:.1?})", i + 1, t.elapsed());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
