mod common;

use common::{check_rule, labels, same};
use frobheis::action::{ActionError, Oracle};
use frobheis::diagram::{Builder, Gen, Morphism};
use frobheis::frobenius;
use frobheis::macros::Heis;
use frobheis::rewrite::{self, apply_rule, find_sites, rule_set, ClosedValue, Matcher, RewriteRule, Status};
use frobheis::sample::{self, DiagramShape};
use frobheis::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

fn oracle(name: &str, k: i64) -> Oracle {
    Oracle::new(Arc::new(frobenius::builtin(name).unwrap()), k, 5).unwrap()
}


#[test]
fn every_rule_is_sound_in_context() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = Vec::new();
    for (name, k) in [("trunc-poly-2", -1i64), ("clifford", -2), ("clifford", 1), ("trivial", 2)] {
        let o = oracle(name, k);
        for rule in rule_set(&o.heis) {
            match check_rule(&o, &rule, 20, &mut rng) {
                Ok(n) if n >= 20 => {}
                Ok(n) => bad.push(format!("{name} k={k} {} ({}): only {n} embeddings", rule.id, rule.note)),
                Err(e) => bad.push(format!("{name} k={k} {e}")),
            }
        }
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn window_rules_preserve_grading() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (name, k) in [("trunc-poly-2", -2i64), ("trunc-poly-2", 1), ("clifford", -1)] {
        let o = oracle(name, k);
        let h = &o.heis;
        for rule in rule_set(h) {
            let Matcher::Window(p, _) = &rule.matcher else { continue };
            for _ in 0..5 {
                let Some((l, r)) = rule.instance(&labels(h, p.captures(), &mut rng)) else { continue };
                let g = l.grading(&h.alg, k);
                assert!(g.is_some());
                for d in r.terms.keys() {
                    if d.slices.iter().any(|s| matches!(&s.gen, Gen::Token(f) | Gen::DownToken(f) if frobenius::is_zero(f))) {
                        continue;
                    }
                    assert_eq!(d.grading(&h.alg, k), g, "{} ({})", rule.id, rule.note);
                }
            }
        }
    }
}

#[test]
fn simplify_preserves_the_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shape = DiagramShape { max_slices: 8, max_width: 4, composites: true };
    let mut compared = 0;
    let mut normalized = 0;
    for (name, k) in [("trunc-poly-2", -1i64), ("clifford", 1), ("trivial", -2)] {
        let o = oracle(name, k);
        let rules = rule_set(&o.heis);
        let mut here = 0;
        while here < 40 {
            let dom = sample::random_word(2, &mut rng);
            let m = Morphism::from_diagram(sample::random_diagram(&o.heis.alg, &dom, &shape, &mut rng));
            let s = rewrite::simplify(&o.heis, &m, &rules, 200);
            match same(&o, &m, &s.morphism, &[0, 1]) {
                Ok(true) => {
                    here += 1;
                    normalized += (s.status == Status::Normalized) as usize;
                }
                Ok(false) => panic!("simplify changed {m:?} into {:?}", s.morphism),
                Err(ActionError::LevelBound(..)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        compared += here;
    }
    assert!(compared >= 100);
    assert!(normalized > compared / 2, "{normalized}/{compared}");
}

#[test]
fn closed_diagrams_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut reduced = 0;
    for (name, k) in [("trunc-poly-2", -1i64), ("clifford", -2), ("trivial", 1), ("clifford", 2)] {
        let o = oracle(name, k);
        let h = o.heis.clone();
        let rules = rule_set(&h);
        for _ in 0..30 {
            let m = sample::random_closed(&h, &mut rng);
            let v = rewrite::eval_closed(&h, &m, &rules, 5000).unwrap();
            let as_morphism = match &v {
                ClosedValue::Scalar(c) => Morphism::identity(vec![]).scaled(c),
                ClosedValue::Polynomial(p) => p.to_morphism(&h),
                ClosedValue::Irreducible(r) => r.clone(),
            };
            if !matches!(v, ClosedValue::Irreducible(_)) {
                reduced += 1;
            }
            match same(&o, &m, &as_morphism, &[0, 1]) {
                Ok(true) | Err(ActionError::LevelBound(..)) => {}
                Ok(false) => panic!("{name} k={k}: closed value {v:?} is wrong"),
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(reduced >= 50, "{reduced}");
}

#[test]
fn eval_closed_rejects_open_diagrams() {
    let o = oracle("trivial", -1);
    let r = rewrite::eval_closed(&o.heis, &o.heis.dots(1), &rule_set(&o.heis), 10);
    assert_eq!(r.unwrap_err(), rewrite::RewriteError::NotClosed);
}

fn closed_scalar(h: &Heis, m: &Morphism) -> Scalar {
    match rewrite::eval_closed(h, m, &rule_set(h), 1000).unwrap() {
        ClosedValue::Scalar(c) => c,
        v => panic!("not a scalar: {v:?}"),
    }
}

#[test]
fn bubble_values() {
    let h = Heis::new(Arc::new(frobenius::trivial()), -1);
    assert_eq!(closed_scalar(&h, &h.ccw(0, &h.one())), Scalar::from_int(1));
    let h = Heis::new(Arc::new(frobenius::trunc_poly(2)), 1);
    let f = vec![Scalar::from_int(3), Scalar::from_int(5)];
    // clockwise, no dots, at level one: minus the trace
    assert_eq!(closed_scalar(&h, &h.cw(0, &f)), Scalar::from_int(-5));
    let h = Heis::new(Arc::new(frobenius::trunc_poly(2)), -2);
    for r in 0..2 {
        let expect = if r == 1 { Scalar::from_int(5) } else { Scalar::from_int(0) };
        assert_eq!(closed_scalar(&h, &h.ccw(r, &f)), expect);
    }
}

#[test]
fn bubble_products_are_polynomials() {
    let h = Heis::new(Arc::new(frobenius::trivial()), -2);
    let b = h.cw(3, &h.one());
    let m = b.then(&b);
    match rewrite::eval_closed(&h, &m, &rule_set(&h), 1000).unwrap() {
        ClosedValue::Polynomial(p) => {
            assert!(p.scalar().is_none());
            let o = oracle("trivial", -2);
            assert!(same(&o, &m, &p.to_morphism(&h), &[0, 1, 2]).unwrap());
        }
        v => panic!("{v:?}"),
    }
}

fn first<'a>(rules: &'a [RewriteRule], id: &str) -> &'a RewriteRule {
    rules.iter().find(|r| r.id == id).unwrap()
}

#[test]
fn apply_rule_examples() {
    let h = Heis::new(Arc::new(frobenius::trunc_poly(2)), -1);
    let rules = rule_set(&h);
    let ss = h.s().then(&h.s());
    let r = first(&rules, "doublecross-up");
    assert_eq!(find_sites(&h, &ss, r), vec![0]);
    assert_eq!(apply_rule(&h, &ss, r, 0).unwrap(), h.id("++"));
    assert!(apply_rule(&h, &h.s(), r, 0).is_err());
    let z = h.zigzag_right_up();
    let r = first(&rules, "right-adjunction-up");
    assert_eq!(apply_rule(&h, &z, r, find_sites(&h, &z, r)[0]).unwrap(), h.id("+"));
    let z = vec![Scalar::from_int(0), Scalar::from_int(1)];
    // a token above a dot moves below it, twisted by ψ
    let m = h.dots(1).then(&h.token(&z));
    let r = first(&rules, "dot-token-up-slide");
    let out = apply_rule(&h, &m, r, find_sites(&h, &m, r)[0]).unwrap();
    assert_eq!(out, h.token(&h.psi(&z, 1)).then(&h.dots(1)));
    assert!(same(&oracle("trunc-poly-2", -1), &m, &out, &[0, 1, 2]).unwrap());
}

#[test]
fn interchange_sign_when_aligning_windows() {
    let h = Heis::new(Arc::new(frobenius::clifford()), -1);
    let rules = rule_set(&h);
    let c = h.b(1);
    // two odd tokens on the first strand separated by an odd token on the second
    let m = Builder::from("++").token(0, &c).token(1, &c).token(0, &c).build();
    let r = rules.iter().find(|r| r.id == "token-homom" && matches!(&r.matcher, Matcher::Window(p, _) if p.captures() == 2)).unwrap();
    let out = apply_rule(&h, &m, r, find_sites(&h, &m, r)[0]).unwrap();
    // c·c = 1, and the middle token jumped over an odd token
    assert_eq!(out, Builder::from("++").token(1, &c).build().neg());
    assert!(same(&oracle("clifford", -1), &m, &out, &[0, 1]).unwrap());
}

#[test]
fn simplify_examples() {
    let h = Heis::new(Arc::new(frobenius::trivial()), -1);
    let rules = rule_set(&h);
    let s = rewrite::simplify(&h, &h.s().then(&h.s()), &rules, 10);
    assert_eq!((s.status, s.morphism), (Status::Normalized, h.id("++")));
    // k < 0: left curls vanish
    let s = rewrite::simplify(&h, &h.left_curl(0), &rules, 10);
    assert!(s.morphism.is_zero());
    let h1 = Heis::new(Arc::new(frobenius::trivial()), 1);
    let s = rewrite::simplify(&h1, &h1.right_curl(0), &rule_set(&h1), 10);
    assert!(s.morphism.is_zero());
}

#[test]
fn level_zero_crossings_are_inverse() {
    let h = Heis::new(Arc::new(frobenius::trivial()), 0);
    let rules = rule_set(&h);
    let s = rewrite::simplify(&h, &h.t().then(&h.tp()), &rules, 50);
    assert_eq!(s.morphism, h.id("+-"));
    let s = rewrite::simplify(&h, &h.tp().then(&h.t()), &rules, 50);
    assert_eq!(s.morphism, h.id("-+"));
}

#[test]
fn doublecross_down_up_correction() {
    let h = Heis::new(Arc::new(frobenius::trivial()), -1);
    let r = first(&rule_set(&h), "doublecross-down-up").clone();
    let (l, rhs) = r.instance(&[]).unwrap();
    assert_eq!(l.len(), 1);
    assert_eq!(rhs.len(), 2);
    assert!(same(&oracle("trivial", -1), &l, &rhs, &[0, 1, 2]).unwrap());
}

#[test]
fn fuel_bound() {
    let h = Heis::new(Arc::new(frobenius::trunc_poly(2)), -2);
    let rules = rule_set(&h);
    let s3 = relations_braid_nest(&h);
    let s = rewrite::simplify(&h, &s3, &rules, 2);
    assert_eq!(s.status, Status::FuelExhausted);
    assert_eq!(s.steps, 2);
    assert!(same(&oracle("trunc-poly-2", -2), &s3, &s.morphism, &[0, 1]).unwrap());
}

/// Alternating braids stacked on three strands with dots in between.
fn relations_braid_nest(h: &Heis) -> Morphism {
    let a = Builder::from("+-+").gen(1, Gen::TCrossPrime).build();
    let b = Builder::from("++-").gen(1, Gen::TCross).build();
    let mut m = h.id("+-+");
    for _ in 0..3 {
        m = m.then(&a).then(&Builder::from("++-").gen(0, Gen::Crossing).dots(1, 1).build()).then(&b);
    }
    m
}

#[test]
fn unknown_rule_ids_are_reported() {
    let h = Heis::new(Arc::new(frobenius::trivial()), -1);
    let rules = rule_set(&h);
    assert!(rewrite::select_rules(&rules, &["doublecross-up"]).is_ok());
    assert!(matches!(rewrite::select_rules(&rules, &["nope"]), Err(rewrite::RewriteError::UnknownRule(_))));
}

#[test]
fn rules_are_ordered_by_priority() {
    let h = Heis::new(Arc::new(frobenius::clifford()), 2);
    let rules = rule_set(&h);
    let mut seen = BTreeMap::new();
    for (i, r) in rules.iter().enumerate() {
        seen.entry(r.priority).or_insert(i);
    }
    assert!(rules.windows(2).all(|w| w[0].priority <= w[1].priority));
    assert!(seen.len() >= 3);
}
