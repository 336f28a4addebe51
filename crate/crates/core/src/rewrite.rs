//! Oriented rewrite rules, a fuel-bounded simplifier and reduction of closed
//! diagrams to polynomials in bubbles.
//!
//! Every rule is a relation of the category read left to right, so rewriting
//! never changes the morphism. Nothing here claims confluence or canonical
//! forms; semantic equality belongs to the action oracle.

use crate::diagram::{elem_grading, word, Builder, Diagram, Gen, Morphism, ObjectWord, Sign, Slice};
use crate::frobenius::{self, Element};
use crate::macros::{Heis, Orient};
use crate::relations::{self, SuiteOptions};
use crate::scalar::Scalar;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("rule {0} does not match at the given site")]
    NoMatch(String),
    #[error("morphism has a nonempty boundary")]
    NotClosed,
    #[error("unknown rule id {0}")]
    UnknownRule(String),
}

/// One box of a pattern. Token slots match any token and capture its label.
#[derive(Clone, Debug, PartialEq)]
pub enum Slot {
    Gen(Gen),
    Token,
    DownToken,
}

/// A window of consecutive slices on a fixed domain word.
#[derive(Clone, Debug)]
pub struct Pattern {
    pub domain: ObjectWord,
    pub slices: Vec<(usize, Slot)>,
}

impl Pattern {
    fn new(domain: &str, slices: Vec<(usize, Slot)>) -> Pattern {
        Pattern { domain: word(domain), slices }
    }

    pub fn captures(&self) -> usize {
        self.slices.iter().filter(|(_, s)| !matches!(s, Slot::Gen(_))).count()
    }

    /// The pattern as a diagram with the given token labels.
    pub fn instantiate(&self, tokens: &[Element]) -> Diagram {
        let mut it = tokens.iter();
        let slices = self
            .slices
            .iter()
            .map(|(p, s)| {
                let gen = match s {
                    Slot::Gen(g) => g.clone(),
                    Slot::Token => Gen::Token(it.next().expect("missing token").clone()),
                    Slot::DownToken => Gen::DownToken(it.next().expect("missing token").clone()),
                };
                Slice { pos: *p, gen }
            })
            .collect();
        Diagram { domain: self.domain.clone(), slices }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Priority {
    Eliminate,
    Slide,
    Braid,
    Expand,
}

type Replace = Arc<dyn Fn(&[Element]) -> Option<Morphism> + Send + Sync>;

#[derive(Clone)]
pub enum Matcher {
    Window(Pattern, Replace),
    /// A closed bubble of this orientation whose value is a scalar.
    BubbleValue(Orient),
    /// A bubble of this orientation rewritten through the other orientation.
    Grassmannian(Orient),
    /// A bubble of this orientation moved across the upward strand beside it.
    Slide(Orient),
    /// A strictly central bubble moved to the far left.
    Central,
    /// A clockwise bubble with k dots turned into the counterclockwise one
    /// with -k dots (only when both are genuine diagrams, i.e. k = 0).
    Reverse,
}

impl fmt::Debug for Matcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Matcher::Window(p, _) => write!(f, "Window({:?})", p),
            Matcher::BubbleValue(o) => write!(f, "BubbleValue({o:?})"),
            Matcher::Grassmannian(o) => write!(f, "Grassmannian({o:?})"),
            Matcher::Slide(o) => write!(f, "Slide({o:?})"),
            Matcher::Central => write!(f, "Central"),
            Matcher::Reverse => write!(f, "Reverse"),
        }
    }
}

/// A relation oriented as a rewrite.
#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub id: &'static str,
    pub note: String,
    pub priority: Priority,
    pub matcher: Matcher,
}

impl RewriteRule {
    /// Left and right sides for a window rule with the given token labels.
    pub fn instance(&self, tokens: &[Element]) -> Option<(Morphism, Morphism)> {
        match &self.matcher {
            Matcher::Window(p, r) => {
                let rhs = r(tokens)?;
                Some((Morphism::from_diagram(p.instantiate(tokens)), rhs))
            }
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Rule set

fn up_token(h: &Heis, f: &[Scalar]) -> Morphism {
    if let Some(c) = unit_multiple(h, f) {
        return Morphism::identity(word("+")).scaled(&c);
    }
    h.token(f)
}

fn down_token(h: &Heis, f: &[Scalar]) -> Morphism {
    if let Some(c) = unit_multiple(h, f) {
        return Morphism::identity(word("-")).scaled(&c);
    }
    h.down_token(f)
}

/// `Some(λ)` when f = λ·1 (including λ = 0).
fn unit_multiple(h: &Heis, f: &[Scalar]) -> Option<Scalar> {
    let u = h.alg.unit();
    let i = h.alg.unit_index()?;
    let lambda = &f[i] * &u[i].inv()?;
    let scaled = frobenius::scale(u, &lambda);
    (scaled.as_slice() == f).then_some(lambda)
}

fn odd(h: &Heis, f: &[Scalar]) -> bool {
    elem_grading(&h.alg, f).map(|g| g.1).unwrap_or(false)
}

fn g(x: Gen) -> Slot {
    Slot::Gen(x)
}

fn relation_rhs(h: &Heis, id: &str, params: &str) -> Option<Morphism> {
    let opts = SuiteOptions { t_max: 0, r_max: 3 };
    relations::instances(h, id, &opts).ok()?.into_iter().find(|i| i.params == params).map(|i| i.rhs)
}

/// Every rule instantiated for F and k, in priority order.
pub fn rule_set(h: &Heis) -> Vec<RewriteRule> {
    let k = h.k;
    let mut rules = Vec::new();
    let mut window = |id: &'static str, note: &str, pr: Priority, dom: &str, slots: Vec<(usize, Slot)>, r: Replace| {
        rules.push(RewriteRule {
            id,
            note: note.to_string(),
            priority: pr,
            matcher: Matcher::Window(Pattern::new(dom, slots), r),
        });
    };
    use Priority::*;
    let idw = |w: &'static str| -> Replace { Arc::new(move |_| Some(Morphism::identity(word(w)))) };

    let hh = h.clone();
    window(
        "token-homom",
        "two tokens merge into their product",
        Eliminate,
        "+",
        vec![(0, Slot::Token), (0, Slot::Token)],
        Arc::new(move |c| Some(up_token(&hh, &hh.mul(&c[1], &c[0])))),
    );
    let hh = h.clone();
    window(
        "token-homom",
        "a scalar token is a scalar",
        Eliminate,
        "+",
        vec![(0, Slot::Token)],
        Arc::new(move |c| unit_multiple(&hh, &c[0]).map(|l| Morphism::identity(word("+")).scaled(&l))),
    );
    let hh = h.clone();
    window(
        "F-to-sQ_-",
        "two down tokens merge (anti-homomorphism)",
        Eliminate,
        "-",
        vec![(0, Slot::DownToken), (0, Slot::DownToken)],
        Arc::new(move |c| {
            let sign = Scalar::sign(odd(&hh, &c[0]) && odd(&hh, &c[1]));
            Some(down_token(&hh, &hh.mul(&c[0], &c[1])).scaled(&sign))
        }),
    );
    let hh = h.clone();
    window(
        "F-to-sQ_-",
        "a scalar down token is a scalar",
        Eliminate,
        "-",
        vec![(0, Slot::DownToken)],
        Arc::new(move |c| unit_multiple(&hh, &c[0]).map(|l| Morphism::identity(word("-")).scaled(&l))),
    );
    window("doublecross-up", "", Eliminate, "++", vec![(0, g(Gen::Crossing)), (0, g(Gen::Crossing))], idw("++"));
    window(
        "doublecross-down",
        "",
        Eliminate,
        "--",
        vec![(0, g(Gen::DownCrossing)), (0, g(Gen::DownCrossing))],
        idw("--"),
    );
    window("right-adjunction-up", "", Eliminate, "+", vec![(1, g(Gen::Cup)), (0, g(Gen::Cap))], idw("+"));
    window("right-adjunction-down", "", Eliminate, "-", vec![(0, g(Gen::Cup)), (1, g(Gen::Cap))], idw("-"));
    window("zigzag-leftup", "", Eliminate, "+", vec![(0, g(Gen::LeftCup)), (1, g(Gen::LeftCap))], idw("+"));
    window("zigzag-leftdown", "", Eliminate, "-", vec![(1, g(Gen::LeftCup)), (0, g(Gen::LeftCap))], idw("-"));
    if k >= 0 {
        let v = if k == 0 { h.id("+") } else { Morphism::zero(word("+"), word("+")) };
        window(
            "right-curl",
            "",
            Eliminate,
            "+",
            vec![(1, g(Gen::LeftCup)), (0, g(Gen::Crossing)), (1, g(Gen::Cap))],
            Arc::new(move |_| Some(v.clone())),
        );
    }
    if k <= 0 {
        let v = if k == 0 { h.id("+") } else { Morphism::zero(word("+"), word("+")) };
        window(
            "left-curl",
            "",
            Eliminate,
            "+",
            vec![(0, g(Gen::Cup)), (1, g(Gen::Crossing)), (0, g(Gen::LeftCap))],
            Arc::new(move |_| Some(v.clone())),
        );
    }
    let v = relation_rhs(h, "doublecross-up-down", "general").unwrap();
    window(
        "doublecross-up-down",
        "",
        Eliminate,
        "+-",
        vec![(0, g(Gen::TCross)), (0, g(Gen::TCrossPrime))],
        Arc::new(move |_| Some(v.clone())),
    );
    let v = relation_rhs(h, "doublecross-down-up", "general").unwrap();
    window(
        "doublecross-down-up",
        "",
        Eliminate,
        "-+",
        vec![(0, g(Gen::TCrossPrime)), (0, g(Gen::TCross))],
        Arc::new(move |_| Some(v.clone())),
    );
    window(
        "right-mates",
        "a dot carried around a right cup and cap is a down dot",
        Eliminate,
        "-",
        vec![(0, g(Gen::Cup)), (1, g(Gen::Dot)), (1, g(Gen::Cap))],
        Arc::new(|_| Some(Morphism::gen(Gen::DownDot))),
    );
    let hh = h.clone();
    window(
        "right-mates",
        "a token carried around a right cup and cap is a down token",
        Eliminate,
        "-",
        vec![(0, g(Gen::Cup)), (1, Slot::Token), (1, g(Gen::Cap))],
        Arc::new(move |c| Some(down_token(&hh, &c[0]))),
    );
    window(
        "t-def",
        "",
        Eliminate,
        "+-",
        vec![(0, g(Gen::Cup)), (1, g(Gen::Crossing)), (2, g(Gen::Cap))],
        Arc::new(|_| Some(Morphism::gen(Gen::TCross))),
    );
    window(
        "t-def-alt",
        "",
        Eliminate,
        "-+",
        vec![(2, g(Gen::LeftCup)), (1, g(Gen::Crossing)), (0, g(Gen::LeftCap))],
        Arc::new(|_| Some(Morphism::gen(Gen::TCrossPrime))),
    );
    window(
        "crossing-rotation",
        "right mate of the crossing",
        Eliminate,
        "--",
        vec![(0, g(Gen::Cup)), (1, g(Gen::TCross)), (2, g(Gen::Cap))],
        Arc::new(|_| Some(Morphism::gen(Gen::DownCrossing))),
    );
    let hh = h.clone();
    window(
        "token-rotation",
        "left mate of a token",
        Eliminate,
        "-",
        vec![(1, g(Gen::LeftCup)), (1, Slot::Token), (0, g(Gen::LeftCap))],
        Arc::new(move |c| Some(down_token(&hh, &hh.psi(&c[0], -hh.k)))),
    );
    let corr = h.sum_basis(|b, bd, _| {
        let label = frobenius::sub(&h.psi(b, -1), b);
        Builder::from("-").token(0, bd).build().then(&h.cw(k, &label).whisker(&word("-"), &[]))
    });
    let v = Morphism::gen(Gen::DownDot).plus(&corr);
    window(
        "dot-rotation",
        "left mate of the dot",
        Eliminate,
        "-",
        vec![(1, g(Gen::LeftCup)), (1, g(Gen::Dot)), (0, g(Gen::LeftCap))],
        Arc::new(move |_| Some(v.clone())),
    );
    let minus = word("-");
    let rc = h.right_curl(0);
    let lc = h.left_curl(0);
    let kinks = [
        ("", Gen::LeftCup, Gen::TCross, Builder::from("").gen(0, Gen::Cup).build().then(&rc.whisker(&minus, &[]))),
        ("-+", Gen::TCrossPrime, Gen::Cap, rc.whisker(&minus, &[]).then(&Builder::from("-+").gen(0, Gen::LeftCap).build())),
        ("", Gen::Cup, Gen::TCrossPrime, Builder::from("").gen(0, Gen::LeftCup).build().then(&lc.whisker(&[], &minus))),
        ("+-", Gen::TCross, Gen::LeftCap, lc.whisker(&[], &minus).then(&Builder::from("+-").gen(0, Gen::Cap).build())),
    ];
    for (dom, lo, hi, v) in kinks {
        window(
            "kink",
            "a cup or cap absorbed by a sideways crossing is a curl",
            Eliminate,
            dom,
            vec![(0, g(lo)), (0, g(hi))],
            Arc::new(move |_| Some(v.clone())),
        );
    }
    for (id, o) in [
        ("clockwise-circ", Orient::Cw),
        ("counterclockwise-circ", Orient::Ccw),
        ("inf-grass1", Orient::Cw),
        ("inf-grass2", Orient::Ccw),
    ] {
        // genuine bubbles have r ≥ 0 dots; the range r < k (cw) or r < -k (ccw) may be empty
        let reachable = match o {
            Orient::Cw => h.k > 0,
            Orient::Ccw => h.k < 0,
        };
        if !reachable {
            continue;
        }
        rules.push(RewriteRule {
            id,
            note: "closed bubble in the determined range".into(),
            priority: Eliminate,
            matcher: Matcher::BubbleValue(o),
        });
    }
    let mut window = |id: &'static str, note: &str, pr: Priority, dom: &str, slots: Vec<(usize, Slot)>, r: Replace| {
        rules.push(RewriteRule {
            id,
            note: note.to_string(),
            priority: pr,
            matcher: Matcher::Window(Pattern::new(dom, slots), r),
        });
    };

    let hh = h.clone();
    window(
        "dot-token-up-slide",
        "tokens move below dots",
        Slide,
        "+",
        vec![(0, g(Gen::Dot)), (0, Slot::Token)],
        Arc::new(move |c| Some(Builder::from("+").token(0, &hh.psi(&c[0], 1)).gen(0, Gen::Dot).build())),
    );
    let hh = h.clone();
    window(
        "dot-token-down-slide",
        "down tokens move below down dots",
        Slide,
        "-",
        vec![(0, g(Gen::DownDot)), (0, Slot::DownToken)],
        Arc::new(move |c| Some(Builder::from("-").token(0, &hh.psi(&c[0], -1)).gen(0, Gen::DownDot).build())),
    );
    window(
        "tokenslide-up-right",
        "tokens move up through crossings",
        Slide,
        "++",
        vec![(0, Slot::Token), (0, g(Gen::Crossing))],
        Arc::new(|c| Some(Builder::from("++").gen(0, Gen::Crossing).token(1, &c[0]).build())),
    );
    window(
        "tokenslide-up-left",
        "tokens move up through crossings",
        Slide,
        "++",
        vec![(1, Slot::Token), (0, g(Gen::Crossing))],
        Arc::new(|c| Some(Builder::from("++").gen(0, Gen::Crossing).token(0, &c[0]).build())),
    );
    let teleport = h.sum_basis(|b, bd, _| Builder::from("++").token(0, bd).token(1, b).build());
    let v = Builder::from("++").gen(1, Gen::Dot).gen(0, Gen::Crossing).build().plus(&teleport);
    window(
        "dotslide1",
        "dots move down through crossings",
        Slide,
        "++",
        vec![(0, g(Gen::Crossing)), (0, g(Gen::Dot))],
        Arc::new(move |_| Some(v.clone())),
    );
    let teleport = h.sum_basis(|b, bd, _| Builder::from("++").token(1, bd).token(0, b).build());
    let v = Builder::from("++").gen(0, Gen::Dot).gen(0, Gen::Crossing).build().minus(&teleport);
    window(
        "dotslide2",
        "dots move down through crossings",
        Slide,
        "++",
        vec![(0, g(Gen::Crossing)), (1, g(Gen::Dot))],
        Arc::new(move |_| Some(v.clone())),
    );
    window(
        "dot-right-cupcap",
        "dots leave the downward leg of a right cup",
        Slide,
        "",
        vec![(0, g(Gen::Cup)), (0, g(Gen::DownDot))],
        Arc::new(|_| Some(Builder::from("").gen(0, Gen::Cup).gen(1, Gen::Dot).build())),
    );
    window(
        "dot-right-cupcap",
        "dots leave the downward leg of a right cap",
        Slide,
        "+-",
        vec![(1, g(Gen::DownDot)), (0, g(Gen::Cap))],
        Arc::new(|_| Some(Builder::from("+-").gen(0, Gen::Dot).gen(0, Gen::Cap).build())),
    );
    window(
        "f-right-cupcap-slide",
        "tokens leave the downward leg of a right cup",
        Slide,
        "",
        vec![(0, g(Gen::Cup)), (0, Slot::DownToken)],
        Arc::new(|c| Some(Builder::from("").gen(0, Gen::Cup).token(1, &c[0]).build())),
    );
    window(
        "f-right-cupcap-slide",
        "tokens leave the downward leg of a right cap",
        Slide,
        "+-",
        vec![(1, Slot::DownToken), (0, g(Gen::Cap))],
        Arc::new(|c| Some(Builder::from("+-").token(0, &c[0]).gen(0, Gen::Cap).build())),
    );
    window(
        "braid-up",
        "",
        Braid,
        "+++",
        vec![(0, g(Gen::Crossing)), (1, g(Gen::Crossing)), (0, g(Gen::Crossing))],
        Arc::new(|_| {
            Some(Builder::from("+++").gen(1, Gen::Crossing).gen(0, Gen::Crossing).gen(1, Gen::Crossing).build())
        }),
    );
    let opts = SuiteOptions::default();
    let alt = relations::instances(h, "braid-alternating", &opts).unwrap().remove(0);
    let other = Builder::from("+-+").gen(1, Gen::TCrossPrime).gen(0, Gen::Crossing).gen(1, Gen::TCross).build();
    let v = other.plus(&alt.rhs);
    window(
        "braid-alternating",
        "",
        Braid,
        "+-+",
        vec![(0, g(Gen::TCross)), (1, g(Gen::Crossing)), (0, g(Gen::TCrossPrime))],
        Arc::new(move |_| Some(v.clone())),
    );
    for inst in relations::instances(h, "left-dotted-curl", &opts).unwrap() {
        let r: usize = inst.params.trim_start_matches("r=").parse().unwrap();
        let mut slots = vec![(0, g(Gen::Cup))];
        slots.extend(std::iter::repeat_n((1, g(Gen::Dot)), r));
        slots.push((1, g(Gen::Crossing)));
        slots.push((0, g(Gen::LeftCap)));
        let v = inst.rhs;
        window("left-dotted-curl", &inst.params, Expand, "+", slots, Arc::new(move |_| Some(v.clone())));
    }
    for inst in relations::instances(h, "right-dotted-curl", &opts).unwrap() {
        let r: usize = inst.params.trim_start_matches("r=").parse().unwrap();
        let mut slots = vec![(1, g(Gen::LeftCup))];
        slots.extend(std::iter::repeat_n((2, g(Gen::DownDot)), r));
        slots.push((0, g(Gen::Crossing)));
        slots.push((1, g(Gen::Cap)));
        let v = inst.rhs;
        window("right-dotted-curl", &inst.params, Expand, "+", slots, Arc::new(move |_| Some(v.clone())));
    }
    for (id, o) in [("clockwise-bubble-slide", Orient::Cw), ("counterclockwise-bubble-slide", Orient::Ccw)] {
        rules.push(RewriteRule { id, note: String::new(), priority: Expand, matcher: Matcher::Slide(o) });
    }
    let eliminated = if k <= 0 { Orient::Cw } else { Orient::Ccw };
    rules.push(RewriteRule {
        id: "inf-grass3",
        note: format!("{eliminated:?} bubbles expressed through the other orientation"),
        priority: Expand,
        matcher: Matcher::Grassmannian(eliminated),
    });
    rules.push(RewriteRule {
        id: "central-bubbles",
        note: "strictly central bubbles move to the far left".into(),
        priority: Expand,
        matcher: Matcher::Central,
    });
    if k == 0 {
        rules.push(RewriteRule {
            id: "central-bubble-reverse",
            note: String::new(),
            priority: Eliminate,
            matcher: Matcher::Reverse,
        });
    }
    rules.sort_by_key(|r| r.priority);
    rules
}

/// Rules whose id is in `ids`; every id must be known.
pub fn select_rules(rules: &[RewriteRule], ids: &[&str]) -> Result<Vec<RewriteRule>, RewriteError> {
    for id in ids {
        if !rules.iter().any(|r| r.id == *id) {
            return Err(RewriteError::UnknownRule(id.to_string()));
        }
    }
    Ok(rules.iter().filter(|r| ids.contains(&r.id)).cloned().collect())
}

// ---------------------------------------------------------------------------
// Height moves

fn widths(g: &Gen) -> (usize, usize) {
    (g.domain().len(), g.codomain().len())
}

/// Exchanges the heights of slices i and i+1 when they touch disjoint
/// strands. Returns whether the super interchange law contributes a sign.
fn try_swap(slices: &mut [Slice], i: usize, h: &Heis) -> Option<bool> {
    let (a, b) = (&slices[i], &slices[i + 1]);
    let (wa, ca) = widths(&a.gen);
    let (wb, cb) = widths(&b.gen);
    let (lower, upper) = if b.pos + wb <= a.pos {
        (Slice { pos: b.pos, gen: b.gen.clone() }, Slice { pos: a.pos + cb - wb, gen: a.gen.clone() })
    } else if b.pos >= a.pos + ca {
        (Slice { pos: b.pos + wa - ca, gen: b.gen.clone() }, Slice { pos: a.pos, gen: a.gen.clone() })
    } else {
        return None;
    };
    let sign = a.gen.is_odd(&h.alg) && b.gen.is_odd(&h.alg);
    slices[i] = lower;
    slices[i + 1] = upper;
    Some(sign)
}

const LOOKAHEAD: usize = 12;

struct WindowMatch {
    slices: Vec<Slice>,
    start: usize,
    len: usize,
    offset: usize,
    negate: bool,
    captures: Vec<Element>,
}

fn slot_match(slot: &Slot, gen: &Gen, caps: &mut Vec<Element>) -> bool {
    match (slot, gen) {
        (Slot::Gen(a), b) => a == b,
        (Slot::Token, Gen::Token(f)) | (Slot::DownToken, Gen::DownToken(f)) => {
            caps.push(f.clone());
            true
        }
        _ => false,
    }
}

fn match_window(h: &Heis, d: &Diagram, words: &[ObjectWord], start: usize, pat: &Pattern) -> Option<WindowMatch> {
    let n = d.slices.len();
    let l = pat.slices.len();
    if start + l > n {
        return None;
    }
    let (p0, slot0) = &pat.slices[0];
    let first = &d.slices[start];
    if first.pos < *p0 {
        return None;
    }
    let offset = first.pos - p0;
    let w = &words[start];
    let wd = pat.domain.len();
    if offset + wd > w.len() || w[offset..offset + wd] != pat.domain[..] {
        return None;
    }
    let mut caps = Vec::new();
    if !slot_match(slot0, &first.gen, &mut caps) {
        return None;
    }
    let mut sl = d.slices.clone();
    let mut negate = false;
    for e in 1..l {
        let t = start + e;
        let (pp, slot) = &pat.slices[e];
        let mut found = false;
        for j in t..n.min(t + LOOKAHEAD) {
            let mut trial = if j == t { None } else { Some(sl.clone()) };
            let mut tneg = false;
            if let Some(tr) = trial.as_mut() {
                let mut ok = true;
                for m in (t..j).rev() {
                    match try_swap(tr, m, h) {
                        Some(s) => tneg ^= s,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
            }
            let cand = trial.as_ref().unwrap_or(&sl);
            let mut tc = caps.clone();
            if cand[t].pos == offset + pp && slot_match(slot, &cand[t].gen, &mut tc) {
                if let Some(tr) = trial {
                    sl = tr;
                }
                negate ^= tneg;
                caps = tc;
                found = true;
                break;
            }
        }
        if !found {
            return None;
        }
    }
    Some(WindowMatch { slices: sl, start, len: l, offset, negate, captures: caps })
}

fn splice(
    domain: &ObjectWord,
    slices: &[Slice],
    start: usize,
    len: usize,
    w: &[Sign],
    offset: usize,
    width: usize,
    repl: &Morphism,
    coef: &Scalar,
) -> Vec<(Diagram, Scalar)> {
    let left = &w[..offset];
    let right = &w[offset + width..];
    repl.terms
        .iter()
        .map(|(rd, c)| {
            let mut s = slices[..start].to_vec();
            s.extend(rd.shifted(left, right).slices);
            s.extend_from_slice(&slices[start + len..]);
            (Diagram { domain: domain.clone(), slices: s }, c * coef)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Bubbles

/// A closed loop made of a cup, decorations on its two legs and a cap.
#[derive(Clone, Debug)]
pub struct FoundBubble {
    pub orient: Orient,
    /// Slice indices, cup first and cap last.
    pub members: Vec<usize>,
    /// Decorations as (slice index, on the left leg).
    decos: Vec<(usize, bool)>,
}

/// The bubble whose cup is slice `i`, if the loop it starts carries only
/// decorations and nothing lies inside it.
pub fn bubble_at(d: &Diagram, i: usize) -> Option<FoundBubble> {
    let (orient, close) = match d.slices[i].gen {
        Gen::LeftCup => (Orient::Cw, Gen::Cap),
        Gen::Cup => (Orient::Ccw, Gen::LeftCap),
        _ => return None,
    };
    let mut p = d.slices[i].pos;
    let mut members = vec![i];
    let mut decos = Vec::new();
    for j in i + 1..d.slices.len() {
        let s = &d.slices[j];
        let (w, c) = widths(&s.gen);
        if s.pos + w <= p {
            p = p + c - w;
        } else if s.pos >= p + 2 {
        } else if s.pos == p && s.gen == close {
            members.push(j);
            return Some(FoundBubble { orient, members, decos });
        } else if matches!(s.gen, Gen::Dot | Gen::DownDot | Gen::Token(_) | Gen::DownToken(_)) {
            members.push(j);
            decos.push((j, s.pos == p));
        } else {
            return None;
        }
    }
    None
}

/// A bubble brought to standard form: ±(cw_rev(dots, token)) for `Cw` and
/// ±(ccw(dots, token)) for `Ccw`; both mean the token sits below all dots on
/// the upward leg.
#[derive(Clone, Debug, PartialEq)]
pub struct BubbleForm {
    pub orient: Orient,
    pub dots: u32,
    pub token: Element,
    pub negate: bool,
}

impl BubbleForm {
    /// Label of the bubble in the placement of `Heis::cw` / `Heis::ccw`.
    pub fn standard_label(&self, h: &Heis) -> Element {
        match self.orient {
            Orient::Cw => h.psi(&self.token, -(self.dots as i64)),
            Orient::Ccw => self.token.clone(),
        }
    }

    /// Scalar value when the bubble lies in the range fixed by the
    /// infinite Grassmannian relations.
    pub fn value(&self, h: &Heis) -> Option<Scalar> {
        let d = self.dots as i64;
        let v = match self.orient {
            Orient::Cw if d <= h.k - 1 => {
                if d == h.k - 1 {
                    -h.tr(&self.token)
                } else {
                    Scalar::zero()
                }
            }
            Orient::Ccw if d <= -h.k - 1 => {
                if d == -h.k - 1 {
                    h.tr(&self.token)
                } else {
                    Scalar::zero()
                }
            }
            _ => return None,
        };
        Some(if self.negate { -v } else { v })
    }

    pub fn is_central(&self, h: &Heis) -> bool {
        let d = self.dots as i64;
        match self.orient {
            Orient::Cw => d == h.k,
            Orient::Ccw => d == -h.k,
        }
    }

    /// The bubble as a morphism of the unit object.
    pub fn morphism(&self, h: &Heis) -> Morphism {
        let d = self.dots as i64;
        let m = match self.orient {
            Orient::Cw => h.cw_rev(d, &self.token),
            Orient::Ccw => h.ccw(d, &self.token),
        };
        if self.negate {
            m.neg()
        } else {
            m
        }
    }
}

/// Reads off the standard form of a contiguous or interleaved bubble.
pub fn bubble_form(h: &Heis, d: &Diagram, b: &FoundBubble) -> BubbleForm {
    let mut left: Vec<usize> = b.decos.iter().filter(|x| x.1).map(|x| x.0).collect();
    let mut right: Vec<usize> = b.decos.iter().filter(|x| !x.1).map(|x| x.0).collect();
    left.sort();
    right.sort();
    let order: Vec<usize> = match b.orient {
        Orient::Cw => left.iter().copied().chain(right.iter().rev().copied()).collect(),
        Orient::Ccw => left.iter().rev().copied().chain(right.iter().copied()).collect(),
    };
    let odd_idx: Vec<usize> = order.iter().copied().filter(|&i| d.slices[i].gen.is_odd(&h.alg)).collect();
    let mut inversions = 0usize;
    for x in 0..odd_idx.len() {
        for y in x + 1..odd_idx.len() {
            if odd_idx[x] > odd_idx[y] {
                inversions += 1;
            }
        }
    }
    let mut f = h.one();
    let mut dots = 0u32;
    for i in order {
        match &d.slices[i].gen {
            Gen::Dot | Gen::DownDot => dots += 1,
            Gen::Token(x) | Gen::DownToken(x) => f = h.mul(&h.psi(x, dots as i64), &f),
            _ => unreachable!(),
        }
    }
    BubbleForm { orient: b.orient, dots, token: f, negate: inversions % 2 == 1 }
}

/// Moves the slices interleaved with a bubble below its cup so that the
/// bubble occupies consecutive slices. Returns the new slice list, the index
/// of the cup and the sign.
fn gather(h: &Heis, d: &Diagram, b: &FoundBubble) -> (Vec<Slice>, usize, bool) {
    let mut sl = d.slices.clone();
    let cup = b.members[0];
    let cap = *b.members.last().unwrap();
    let mut negate = false;
    let mut cup_at = cup;
    for j in cup + 1..cap {
        if b.members.contains(&j) {
            continue;
        }
        for m in (cup_at..j).rev() {
            negate ^= try_swap(&mut sl, m, h).expect("interleaved slice is disjoint from its bubble");
        }
        cup_at += 1;
    }
    (sl, cup_at, negate)
}

struct Gathered {
    slices: Vec<Slice>,
    start: usize,
    len: usize,
    pos: usize,
    below: ObjectWord,
    form: BubbleForm,
    negate: bool,
}

fn gathered(h: &Heis, d: &Diagram, b: &FoundBubble) -> Gathered {
    let form = bubble_form(h, d, b);
    let (slices, start, negate) = gather(h, d, b);
    let below = Diagram { domain: d.domain.clone(), slices: slices[..start].to_vec() }.codomain();
    let pos = slices[start].pos;
    Gathered { slices, start, len: b.members.len(), pos, below, form, negate }
}

impl Gathered {
    /// Replaces the bubble together with `extra` strands to its left and
    /// `extra_right` to its right by `repl`.
    fn replace(&self, d: &Diagram, left_strands: usize, right_strands: usize, repl: &Morphism) -> Vec<(Diagram, Scalar)> {
        let coef = Scalar::sign(self.negate);
        splice(
            &d.domain,
            &self.slices,
            self.start,
            self.len,
            &self.below,
            self.pos - left_strands,
            left_strands + right_strands,
            repl,
            &coef,
        )
    }

    /// The bubble moved to the bottom: (sign, remaining diagram).
    fn extract(&self, h: &Heis, d: &Diagram) -> (bool, Diagram) {
        let members = &self.slices[self.start..self.start + self.len];
        let odd_members = members.iter().filter(|s| s.gen.is_odd(&h.alg)).count();
        let odd_below = self.slices[..self.start].iter().filter(|s| s.gen.is_odd(&h.alg)).count();
        let mut rest = self.slices[..self.start].to_vec();
        rest.extend_from_slice(&self.slices[self.start + self.len..]);
        let sign = self.negate ^ ((odd_members * odd_below) % 2 == 1);
        (sign, Diagram { domain: d.domain.clone(), slices: rest })
    }
}

/// inf-grass3 solved for the bubble of the eliminated orientation.
fn grassmannian_expansion(h: &Heis, form: &BubbleForm) -> Morphism {
    let k = h.k;
    let d = form.dots as i64;
    let label = form.standard_label(h);
    let mut out = Morphism::zero(vec![], vec![]);
    match form.orient {
        Orient::Cw => {
            let t = d - k + 1;
            if t == 0 {
                out.add_scaled(&Morphism::scalar(-h.tr(&label)), &Scalar::one());
            }
            for r in 0..t {
                for b in 0..h.dim() {
                    let top = h.cw(r + k - 1, &h.mul(&label, &h.b(b)));
                    let bottom = h.ccw(t - r - k - 1, &h.bdual(b));
                    if top.is_zero() || bottom.is_zero() {
                        continue;
                    }
                    out.add_scaled(&bottom.then(&top), &Scalar::from_int(-1));
                }
            }
        }
        Orient::Ccw => {
            let t = d + k + 1;
            if t == 0 {
                out.add_scaled(&Morphism::scalar(h.tr(&label)), &Scalar::one());
            }
            for r in 1..=t {
                for b in 0..h.dim() {
                    let top = h.cw(r + k - 1, &h.b(b));
                    let bottom = h.ccw(t - r - k - 1, &h.mul(&h.bdual(b), &label));
                    if top.is_zero() || bottom.is_zero() {
                        continue;
                    }
                    out.add_scaled(&bottom.then(&top), &Scalar::one());
                }
            }
        }
    }
    out
}

/// Expression for the bubble beside an upward strand after moving it to the
/// other side: `from_right` means the bubble starts right of the strand.
fn slide_expression(h: &Heis, form: &BubbleForm, from_right: bool) -> Morphism {
    let up = word("+");
    let d = form.dots as i64;
    let plain = |o: Orient| match o {
        Orient::Cw => h.cw_rev(d, &form.token),
        Orient::Ccw => h.ccw(d, &form.token),
    };
    let b = plain(form.orient);
    let corr = h.bubble_slide_terms(form.orient, d, &form.token);
    match (form.orient, from_right) {
        (Orient::Cw, true) => b.whisker(&[], &up).plus(&corr),
        (Orient::Cw, false) => b.whisker(&up, &[]).minus(&corr),
        (Orient::Ccw, true) => b.whisker(&[], &up).minus(&corr),
        (Orient::Ccw, false) => b.whisker(&up, &[]).plus(&corr),
    }
}

// ---------------------------------------------------------------------------
// Applying rules

/// Rewrites diagram `d` with `rule` at slice `i`; the result is the linear
/// combination replacing `d`.
fn rewrite_at(h: &Heis, rule: &RewriteRule, d: &Diagram, words: &[ObjectWord], i: usize) -> Option<Vec<(Diagram, Scalar)>> {
    match &rule.matcher {
        Matcher::Window(pat, repl) => {
            let m = match_window(h, d, words, i, pat)?;
            let r = repl(&m.captures)?;
            Some(splice(
                &d.domain,
                &m.slices,
                m.start,
                m.len,
                &words[i],
                m.offset,
                pat.domain.len(),
                &r,
                &Scalar::sign(m.negate),
            ))
        }
        Matcher::BubbleValue(o) => {
            let b = bubble_at(d, i)?;
            if b.orient != *o {
                return None;
            }
            let g = gathered(h, d, &b);
            let v = g.form.value(h)?;
            Some(g.replace(d, 0, 0, &Morphism::scalar(v)))
        }
        Matcher::Grassmannian(o) => {
            let b = bubble_at(d, i)?;
            if b.orient != *o {
                return None;
            }
            let g = gathered(h, d, &b);
            if g.form.value(h).is_some() {
                return None;
            }
            let mut e = grassmannian_expansion(h, &g.form);
            if g.form.negate {
                e = e.neg();
            }
            Some(g.replace(d, 0, 0, &e))
        }
        Matcher::Slide(o) => {
            let b = bubble_at(d, i)?;
            if b.orient != *o {
                return None;
            }
            let g = gathered(h, d, &b);
            if g.form.value(h).is_some() {
                return None;
            }
            let mut e_left = None;
            if g.pos > 0 && g.below[g.pos - 1] == Sign::Up {
                e_left = Some((1, 0, slide_expression(h, &g.form, true)));
            } else if g.pos < g.below.len() && g.below[g.pos] == Sign::Up {
                e_left = Some((0, 1, slide_expression(h, &g.form, false)));
            }
            let (l, r, mut e) = e_left?;
            if g.form.negate {
                e = e.neg();
            }
            let g2 = Gathered { negate: g.negate, ..g };
            Some(g2.replace(d, l, r, &e))
        }
        Matcher::Central => {
            let b = bubble_at(d, i)?;
            let g = gathered(h, d, &b);
            if !g.form.is_central(h) || g.pos == 0 {
                return None;
            }
            let mut sl = g.slices.clone();
            for s in &mut sl[g.start..g.start + g.len] {
                s.pos -= g.pos;
            }
            let coef = Scalar::sign(g.negate);
            let orig = Diagram { domain: d.domain.clone(), slices: g.slices[g.start..g.start + g.len].to_vec() };
            let _ = orig;
            Some(vec![(Diagram { domain: d.domain.clone(), slices: sl }, coef)])
        }
        Matcher::Reverse => {
            let b = bubble_at(d, i)?;
            if b.orient != Orient::Cw || h.k != 0 {
                return None;
            }
            let g = gathered(h, d, &b);
            if g.form.dots != 0 {
                return None;
            }
            let mut e = h.ccw(0, &g.form.token);
            if g.form.negate {
                e = e.neg();
            }
            Some(g.replace(d, 0, 0, &e))
        }
    }
}

/// Drops diagrams carrying a zero token.
fn clean(m: Morphism) -> Morphism {
    let mut out = Morphism::zero(m.domain.clone(), m.codomain.clone());
    for (d, c) in m.terms {
        if d.slices.iter().all(|s| s.gen.token_element().is_none_or(|f| !frobenius::is_zero(f))) {
            out.add_term(d, c);
        }
    }
    out
}

/// Applies `rule` at slice `site` of every term where it matches.
pub fn apply_rule(h: &Heis, m: &Morphism, rule: &RewriteRule, site: usize) -> Result<Morphism, RewriteError> {
    let m = clean(m.homogenized(&h.alg));
    let mut out = Morphism::zero(m.domain.clone(), m.codomain.clone());
    let mut hit = false;
    for (d, c) in &m.terms {
        let words = d.words().expect("well-formed diagram");
        match (site < d.slices.len()).then(|| rewrite_at(h, rule, d, &words, site)).flatten() {
            Some(repl) => {
                hit = true;
                for (nd, a) in repl {
                    out.add_term(nd, &a * c);
                }
            }
            None => out.add_term(d.clone(), c.clone()),
        }
    }
    if !hit {
        return Err(RewriteError::NoMatch(rule.id.to_string()));
    }
    Ok(clean(out))
}

/// Slice indices of the first term of `m` where `rule` applies.
pub fn find_sites(h: &Heis, m: &Morphism, rule: &RewriteRule) -> Vec<usize> {
    let m = clean(m.homogenized(&h.alg));
    let mut out = Vec::new();
    for d in m.terms.keys() {
        let words = d.words().expect("well-formed diagram");
        for i in 0..d.slices.len() {
            if rewrite_at(h, rule, d, &words, i).is_some() {
                out.push(i);
            }
        }
        if !out.is_empty() {
            break;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Status {
    Normalized,
    FuelExhausted,
}

#[derive(Clone, Debug)]
pub struct Simplified {
    pub morphism: Morphism,
    pub status: Status,
    pub steps: usize,
    /// Rule ids in the order they fired.
    pub trace: Vec<&'static str>,
}

/// Greedy rewriting: the highest-priority rule at the lowest slice of the
/// first reducible term, repeated until nothing applies or `fuel` steps ran.
/// Expansion rules are skipped.
pub fn simplify(h: &Heis, m: &Morphism, rules: &[RewriteRule], fuel: usize) -> Simplified {
    let active: Vec<&RewriteRule> = rules.iter().filter(|r| r.priority != Priority::Expand).collect();
    run(h, m, &active, fuel)
}

fn run(h: &Heis, m: &Morphism, active: &[&RewriteRule], fuel: usize) -> Simplified {
    let mut cur = clean(m.homogenized(&h.alg));
    let mut normal: HashSet<Diagram> = HashSet::new();
    let mut steps = 0;
    let mut trace = Vec::new();
    let classes: Vec<Priority> = {
        let mut v: Vec<Priority> = active.iter().map(|r| r.priority).collect();
        v.dedup();
        v
    };
    loop {
        let mut hit: Option<(Diagram, Vec<(Diagram, Scalar)>, &'static str)> = None;
        'search: for d in cur.terms.keys() {
            if normal.contains(d) {
                continue;
            }
            let words = d.words().expect("well-formed diagram");
            for pr in &classes {
                for i in 0..d.slices.len() {
                    for rule in active.iter().filter(|r| r.priority == *pr) {
                        if let Some(repl) = rewrite_at(h, rule, d, &words, i) {
                            hit = Some((d.clone(), repl, rule.id));
                            break 'search;
                        }
                    }
                }
            }
            normal.insert(d.clone());
        }
        let Some((d, repl, id)) = hit else {
            return Simplified { morphism: cur, status: Status::Normalized, steps, trace };
        };
        if steps >= fuel {
            return Simplified { morphism: cur, status: Status::FuelExhausted, steps, trace };
        }
        let c = cur.terms.remove(&d).unwrap();
        for (nd, a) in repl {
            if nd.slices.iter().all(|s| s.gen.token_element().is_none_or(|f| !frobenius::is_zero(f))) {
                cur.add_term(nd, &a * &c);
            }
        }
        steps += 1;
        trace.push(id);
    }
}

// ---------------------------------------------------------------------------
// Bubble polynomials

/// `Heis::cw(dots, b_i)` or `Heis::ccw(dots, b_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct BubbleVar {
    pub orient: Orient,
    pub dots: u32,
    pub basis: usize,
}

/// Polynomial in bubbles; monomials list their factors bottom to top and
/// are kept sorted with Koszul signs for odd factors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BubblePolynomial {
    pub terms: BTreeMap<Vec<BubbleVar>, Scalar>,
}

impl BubblePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Self::default();
        p.add_mono(vec![], c);
        p
    }

    fn add_mono(&mut self, m: Vec<BubbleVar>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Scalar::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&mut self, other: &BubblePolynomial, c: &Scalar) {
        for (m, a) in &other.terms {
            self.add_mono(m.clone(), a * c);
        }
    }

    /// `top ∘ bottom`.
    pub fn stack(h: &Heis, top: &BubblePolynomial, bottom: &BubblePolynomial) -> BubblePolynomial {
        let mut out = BubblePolynomial::zero();
        for (mb, cb) in &bottom.terms {
            for (mt, ct) in &top.terms {
                let mut m = mb.clone();
                m.extend_from_slice(mt);
                if let Some((m, neg)) = normalize_mono(h, m) {
                    let c = cb * ct;
                    out.add_mono(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    pub fn scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&vec![]).cloned(),
            _ => None,
        }
    }

    /// The polynomial as a morphism of the unit object.
    pub fn to_morphism(&self, h: &Heis) -> Morphism {
        let mut out = Morphism::zero(vec![], vec![]);
        for (m, c) in &self.terms {
            let mut acc = Morphism::identity(vec![]);
            for v in m {
                let b = h.b(v.basis);
                let f = match v.orient {
                    Orient::Cw => h.cw(v.dots as i64, &b),
                    Orient::Ccw => h.ccw(v.dots as i64, &b),
                };
                acc = acc.then(&f);
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    pub fn display(&self, h: &Heis) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_empty() {
                    return c.to_string();
                }
                let vars: Vec<String> = m
                    .iter()
                    .map(|v| {
                        let o = match v.orient {
                            Orient::Cw => "cw",
                            Orient::Ccw => "ccw",
                        };
                        format!("{o}({}, {})", v.dots, h.alg.basis[v.basis].symbol)
                    })
                    .collect();
                format!("{c}*{}", vars.join("*"))
            })
            .collect();
        parts.join(" + ")
    }
}

fn normalize_mono(h: &Heis, mut m: Vec<BubbleVar>) -> Option<(Vec<BubbleVar>, bool)> {
    let odd = |v: &BubbleVar| h.parity(v.basis);
    let mut neg = false;
    let n = m.len();
    for i in 0..n {
        for j in 0..n - 1 - i {
            if m[j] > m[j + 1] {
                if odd(&m[j]) && odd(&m[j + 1]) {
                    neg = !neg;
                }
                m.swap(j, j + 1);
            }
        }
    }
    for w in m.windows(2) {
        if w[0] == w[1] && odd(&w[0]) {
            return None;
        }
    }
    Some((m, neg))
}

/// Reduces bubbles to polynomials in the surviving family (counterclockwise
/// for k ≤ 0, clockwise for k > 0) using inf-grass1–3.
pub struct BubbleReducer<'a> {
    h: &'a Heis,
    memo: HashMap<(Orient, i64, usize), BubblePolynomial>,
}

impl<'a> BubbleReducer<'a> {
    pub fn new(h: &'a Heis) -> Self {
        BubbleReducer { h, memo: HashMap::new() }
    }

    /// `Heis::cw(d, f)` / `Heis::ccw(d, f)` as a polynomial.
    pub fn reduce(&mut self, orient: Orient, d: i64, f: &[Scalar]) -> BubblePolynomial {
        let mut out = BubblePolynomial::zero();
        for (i, c) in f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = self.reduce_basis(orient, d, i);
            out.add_scaled(&p, c);
        }
        out
    }

    fn reduce_basis(&mut self, orient: Orient, d: i64, i: usize) -> BubblePolynomial {
        if let Some(p) = self.memo.get(&(orient, d, i)) {
            return p.clone();
        }
        let h = self.h;
        let k = h.k;
        let bi = h.b(i);
        let var = |o| BubblePolynomial { terms: [(vec![BubbleVar { orient: o, dots: d as u32, basis: i }], Scalar::one())].into() };
        let p = match orient {
            Orient::Ccw if d <= -k - 1 => {
                BubblePolynomial::constant(if d == -k - 1 { h.tr(&bi) } else { Scalar::zero() })
            }
            Orient::Cw if d <= k - 1 => {
                BubblePolynomial::constant(if d == k - 1 { -h.tr(&bi) } else { Scalar::zero() })
            }
            Orient::Ccw if k <= 0 => var(Orient::Ccw),
            Orient::Cw if k > 0 => var(Orient::Cw),
            Orient::Cw => {
                let t = d - k + 1;
                let mut acc = BubblePolynomial::zero();
                for r in 0..t {
                    for b in 0..h.dim() {
                        let top = self.reduce(Orient::Cw, r + k - 1, &h.mul(&bi, &h.b(b)));
                        let bottom = self.reduce(Orient::Ccw, t - r - k - 1, &h.bdual(b));
                        acc.add_scaled(&BubblePolynomial::stack(h, &top, &bottom), &Scalar::from_int(-1));
                    }
                }
                acc
            }
            Orient::Ccw => {
                let t = d + k + 1;
                let mut acc = BubblePolynomial::zero();
                for r in 1..=t {
                    for b in 0..h.dim() {
                        let top = self.reduce(Orient::Cw, r + k - 1, &h.b(b));
                        let bottom = self.reduce(Orient::Ccw, t - r - k - 1, &h.mul(&h.bdual(b), &bi));
                        acc.add_scaled(&BubblePolynomial::stack(h, &top, &bottom), &Scalar::one());
                    }
                }
                acc
            }
        };
        self.memo.insert((orient, d, i), p.clone());
        p
    }

    fn reduce_form(&mut self, form: &BubbleForm) -> BubblePolynomial {
        let p = self.reduce(form.orient, form.dots as i64, &form.standard_label(self.h));
        if form.negate {
            let mut q = BubblePolynomial::zero();
            q.add_scaled(&p, &Scalar::from_int(-1));
            q
        } else {
            p
        }
    }
}

/// Result of evaluating a closed diagram.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedValue {
    Scalar(Scalar),
    Polynomial(BubblePolynomial),
    /// Reduction got stuck; the partially reduced morphism is returned.
    Irreducible(Morphism),
}

/// Reduces a closed morphism to a polynomial in bubbles: simplification,
/// extraction of bubbles from the outer region (or of central bubbles), and
/// on-demand curl expansions and bubble slides.
pub fn eval_closed(h: &Heis, m: &Morphism, rules: &[RewriteRule], fuel: usize) -> Result<ClosedValue, RewriteError> {
    if !m.domain.is_empty() || !m.codomain.is_empty() {
        return Err(RewriteError::NotClosed);
    }
    let mut red = BubbleReducer::new(h);
    let mut budget = fuel;
    match closed_poly(h, m, rules, &mut red, &mut budget) {
        Ok(p) => Ok(match p.scalar() {
            Some(s) => ClosedValue::Scalar(s),
            None => ClosedValue::Polynomial(p),
        }),
        Err(stuck) => Ok(ClosedValue::Irreducible(stuck)),
    }
}

fn closed_poly(
    h: &Heis,
    m: &Morphism,
    rules: &[RewriteRule],
    red: &mut BubbleReducer,
    budget: &mut usize,
) -> Result<BubblePolynomial, Morphism> {
    let s = simplify(h, m, rules, *budget);
    *budget = budget.saturating_sub(s.steps);
    if s.status == Status::FuelExhausted {
        return Err(s.morphism);
    }
    let mut total = BubblePolynomial::zero();
    for (d, c) in &s.morphism.terms {
        if d.slices.is_empty() {
            total.add_mono(vec![], c.clone());
            continue;
        }
        if *budget == 0 {
            return Err(s.morphism.clone());
        }
        *budget -= 1;
        let words = d.words().expect("well-formed diagram");
        let mut done = false;
        for i in 0..d.slices.len() {
            let Some(b) = bubble_at(d, i) else { continue };
            let g = gathered(h, d, &b);
            let width = g.below.len();
            if !(g.pos == 0 || g.pos == width || g.form.is_central(h)) {
                continue;
            }
            let (neg, rest) = g.extract(h, d);
            let var = red.reduce_form(&g.form);
            let above = closed_poly(h, &Morphism::from_diagram(rest), rules, red, budget)?;
            let prod = BubblePolynomial::stack(h, &above, &var);
            total.add_scaled(&prod, &(if neg { -c.clone() } else { c.clone() }));
            done = true;
            break;
        }
        if done {
            continue;
        }
        let expand: Vec<&RewriteRule> = rules
            .iter()
            .filter(|r| r.priority == Priority::Expand && !matches!(r.matcher, Matcher::Central | Matcher::Grassmannian(_)))
            .collect();
        let mut expanded = None;
        'outer: for rule in &expand {
            for i in 0..d.slices.len() {
                if let Some(repl) = rewrite_at(h, rule, d, &words, i) {
                    let mut mm = Morphism::zero(vec![], vec![]);
                    for (nd, a) in repl {
                        mm.add_term(nd, a);
                    }
                    expanded = Some(mm);
                    break 'outer;
                }
            }
        }
        match expanded {
            Some(mm) => {
                let p = closed_poly(h, &mm, rules, red, budget)?;
                total.add_scaled(&p, c);
            }
            None => return Err(Morphism::from_diagram(d.clone())),
        }
    }
    Ok(total)
}
