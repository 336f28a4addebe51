//! Helpers shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use frobheis::action::{ActionError, Oracle};
use frobheis::diagram::{word, Diagram, Gen, Morphism, Sign, Slice};
use frobheis::frobenius::FrobeniusAlgebra;
use frobheis::macros::{Deco, Heis, Orient};
use frobheis::rewrite::{apply_rule, find_sites, Matcher, RewriteRule};
use frobheis::sample;
use frobheis::Scalar;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `Ok(true)` when equal, `Err` when the words leave the oracle's range.
pub fn same(o: &Oracle, a: &Morphism, b: &Morphism, levels: &[usize]) -> Result<bool, ActionError> {
    o.check_equal(a, b, levels).map(|r| r.is_none())
}

/// Random slices that keep the object word fixed.
pub fn endo_slices(alg: &FrobeniusAlgebra, w: &[Sign], n: usize, rng: &mut ChaCha8Rng) -> Diagram {
    let mut slices = Vec::new();
    for _ in 0..n {
        let p = rng.gen_range(0..w.len().max(1));
        if w.is_empty() {
            break;
        }
        let tok = sample::homogeneous_element(alg, rng);
        let mut opts = match w[p] {
            Sign::Up => vec![Gen::Dot, Gen::Token(tok)],
            Sign::Down => vec![Gen::DownDot, Gen::DownToken(tok)],
        };
        if p + 1 < w.len() && w[p] == w[p + 1] {
            opts.push(if w[p] == Sign::Up { Gen::Crossing } else { Gen::DownCrossing });
        }
        slices.push(Slice { pos: p, gen: opts.choose(rng).unwrap().clone() });
    }
    Diagram { domain: w.to_vec(), slices }
}

/// Puts `core` between random slices, with up to one extra strand on
/// either side as long as the result stays three strands wide.
pub fn embed(alg: &FrobeniusAlgebra, core: &Morphism, rng: &mut ChaCha8Rng) -> Morphism {
    let side = |rng: &mut ChaCha8Rng| -> Vec<Sign> {
        if rng.gen_bool(0.5) {
            vec![]
        } else {
            sample::random_word(1, rng)
        }
    };
    let width = core.domain.len().max(core.codomain.len());
    let (l, r) = match width {
        0 | 1 => (side(rng), side(rng)),
        2 => (side(rng), vec![]),
        _ => (vec![], vec![]),
    };
    let mid = core.whisker(&l, &r);
    let below = Morphism::from_diagram(endo_slices(alg, &mid.domain, rng.gen_range(0..3), rng));
    let above = Morphism::from_diagram(endo_slices(alg, &mid.codomain, rng.gen_range(0..3), rng));
    below.then(&mid).then(&above)
}

pub fn labels(h: &Heis, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Scalar>> {
    (0..n).map(|_| sample::homogeneous_element(&h.alg, rng)).collect()
}

pub fn bubble_beside_strand(h: &Heis, rng: &mut ChaCha8Rng) -> Morphism {
    let orient = if rng.gen_bool(0.5) { Orient::Cw } else { Orient::Ccw };
    let deco = |rng: &mut ChaCha8Rng| -> Vec<Deco> {
        (0..rng.gen_range(0..3))
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Deco::Dots(rng.gen_range(1..3))
                } else {
                    Deco::Token(h.b(rng.gen_range(0..h.dim())))
                }
            })
            .collect()
    };
    let (l, r) = (deco(rng), deco(rng));
    let b = h.bubble(orient, &l, &r);
    let m = if rng.gen_bool(0.5) { b.whisker(&word("+"), &[]) } else { b.whisker(&[], &word("+")) };
    m.then(&h.token(&h.b(rng.gen_range(0..h.dim()))))
}

/// Soundness of one rule: at least `want` embeddings where the rule fires
/// and the result acts like the input.
pub fn check_rule(o: &Oracle, rule: &RewriteRule, want: usize, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let h = &o.heis;
    let mut ok = 0;
    for _ in 0..40 * want {
        if ok >= want {
            break;
        }
        let m = match &rule.matcher {
            Matcher::Window(p, _) => {
                let Some((lhs, _)) = rule.instance(&labels(h, p.captures(), rng)) else { continue };
                embed(&h.alg, &lhs, rng)
            }
            Matcher::Reverse => return Ok(want),
            _ => bubble_beside_strand(h, rng),
        };
        let sites = find_sites(h, &m, rule);
        let Some(&site) = sites.choose(rng) else { continue };
        let out = apply_rule(h, &m, rule, site).map_err(|e| e.to_string())?;
        let wide = m.domain.len().max(m.codomain.len()) > 2;
        match same(o, &m, &out, if wide { &[0] } else { &[0, 1] }) {
            Ok(true) => ok += 1,
            Ok(false) => return Err(format!("{} ({}) changes the action", rule.id, rule.note)),
            Err(ActionError::LevelBound(..)) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(ok)
}


/// Two odd tokens on the two upward strands of a random word, checked in
/// both height orders: the action must differ by exactly a sign.
pub fn super_interchange(o: &Oracle, f: &[Scalar], g: &[Scalar], rng: &mut ChaCha8Rng) -> Result<(), String> {
    let h = &o.heis;
    let left: Vec<Sign> = if rng.gen_bool(0.5) { vec![] } else { sample::random_word(1, rng) };
    let mid: Vec<Sign> = if rng.gen_bool(0.5) { vec![] } else { word("-") };
    let mut w = left.clone();
    w.push(Sign::Up);
    w.extend(&mid);
    w.push(Sign::Up);
    let at = |m: &Morphism, p: usize| m.whisker(&w[..p], &w[p + 1..]);
    let (pf, pg) = (left.len(), left.len() + 1 + mid.len());
    let (tf, tg) = (h.token(f), h.token(g));
    let f_then_g = at(&tf, pf).then(&at(&tg, pg));
    let g_then_f = at(&tg, pg).then(&at(&tf, pf));
    let level = rng.gen_range(0..2);
    let e = |e: ActionError| e.to_string();
    if !same(o, &f_then_g, &g_then_f.neg(), &[level]).map_err(e)? {
        return Err(format!("interchange sign fails on {w:?}"));
    }
    if same(o, &f_then_g, &g_then_f, &[level]).map_err(e)? {
        return Err(format!("both orders vanish on {w:?}"));
    }
    Ok(())
}
