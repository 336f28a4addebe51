//! The defining relations and their consequences as pairs of morphisms,
//! keyed by label and instantiated over a basis of F.

use crate::diagram::{word, Builder, Gen, Morphism};
use crate::frobenius::{self, Element};
use crate::macros::{Heis, Orient};
use crate::scalar::Scalar;

/// One instance of a relation: `lhs = rhs` for fixed parameters.
#[derive(Clone, Debug)]
pub struct RelationInstance {
    pub id: &'static str,
    pub params: String,
    pub lhs: Morphism,
    pub rhs: Morphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Defining,
    Presentation,
    Consequences,
    Central,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "defining" => Suite::Defining,
            "presentation" => Suite::Presentation,
            "consequences" => Suite::Consequences,
            "central" => Suite::Central,
            _ => return None,
        })
    }

    pub fn ids(self) -> &'static [&'static str] {
        match self {
            Suite::Defining => &[
                "token-homom",
                "braid-up",
                "doublecross-up",
                "dot-token-up-slide",
                "tokenslide-up-right",
                "tokenslide-up-left",
                "dotslide1",
                "dotslide2",
                "right-adjunction-up",
                "right-adjunction-down",
            ],
            Suite::Presentation => &[
                "doublecross-up-down",
                "doublecross-down-up",
                "right-curl",
                "clockwise-circ",
                "left-curl",
                "counterclockwise-circ",
                "t-def-alt",
            ],
            Suite::Consequences => &[
                "inf-grass1",
                "inf-grass2",
                "inf-grass3",
                "zigzag-leftdown",
                "zigzag-leftup",
                "token-rotation",
                "dot-rotation",
                "crossing-rotation",
                "left-dotted-curl",
                "right-dotted-curl",
                "clockwise-bubble-slide",
                "counterclockwise-bubble-slide",
                "braid-alternating",
                "central-bubble-reverse",
            ],
            Suite::Central => &["central-bubbles"],
        }
    }
}

pub fn all_ids() -> Vec<&'static str> {
    [Suite::Defining, Suite::Presentation, Suite::Consequences, Suite::Central]
        .iter()
        .flat_map(|s| s.ids().iter().copied())
        .collect()
}

/// Bounds for the infinite families.
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub t_max: i64,
    pub r_max: u32,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { t_max: 4, r_max: 3 }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown relation id {0}")]
pub struct UnknownRelation(pub String);

/// Composes bottom to top.
pub fn seq(parts: &[Morphism]) -> Morphism {
    let mut it = parts.iter();
    let mut acc = it.next().expect("empty composite").clone();
    for p in it {
        acc = acc.then(p);
    }
    acc
}

fn sc(n: i64) -> Scalar {
    Scalar::from_int(n)
}

struct Ctx<'a> {
    h: &'a Heis,
}

impl Ctx<'_> {
    fn basis(&self) -> Vec<(usize, Element, Element, bool)> {
        (0..self.h.dim()).map(|i| (i, self.h.b(i), self.h.bdual(i), self.h.parity(i))).collect()
    }
    fn m(&self, f: &[Scalar], g: &[Scalar]) -> Element {
        self.h.mul(f, g)
    }
    fn label(&self, i: usize) -> String {
        self.h.alg.basis[i].symbol.clone()
    }
}

/// Every instance of relation `id` that applies at the category's k.
pub fn instances(h: &Heis, id: &str, opts: &SuiteOptions) -> Result<Vec<RelationInstance>, UnknownRelation> {
    let c = Ctx { h };
    let k = h.k;
    let basis = c.basis();
    let mut out = Vec::new();
    let mut push = |id: &'static str, params: String, lhs: Morphism, rhs: Morphism| {
        out.push(RelationInstance { id, params, lhs, rhs });
    };
    match id {
        "token-homom" => {
            for (i, f, _, _) in &basis {
                for (j, g, _, _) in &basis {
                    let lhs = Builder::from("+").token(0, g).token(0, f).build();
                    push("token-homom", format!("f={} g={}", c.label(*i), c.label(*j)), lhs, h.token(&c.m(f, g)));
                }
            }
        }
        "braid-up" => {
            let l = Builder::from("+++").gen(0, Gen::Crossing).gen(1, Gen::Crossing).gen(0, Gen::Crossing).build();
            let r = Builder::from("+++").gen(1, Gen::Crossing).gen(0, Gen::Crossing).gen(1, Gen::Crossing).build();
            push("braid-up", String::new(), l, r);
        }
        "doublecross-up" => {
            let l = Builder::from("++").gen(0, Gen::Crossing).gen(0, Gen::Crossing).build();
            push("doublecross-up", String::new(), l, h.id("++"));
        }
        "dot-token-up-slide" => {
            for (i, f, _, _) in &basis {
                let l = Builder::from("+").gen(0, Gen::Dot).token(0, f).build();
                let r = Builder::from("+").token(0, &h.psi(f, 1)).gen(0, Gen::Dot).build();
                push("dot-token-up-slide", format!("f={}", c.label(*i)), l, r);
            }
        }
        "tokenslide-up-right" => {
            for (i, f, _, _) in &basis {
                let l = Builder::from("++").token(0, f).gen(0, Gen::Crossing).build();
                let r = Builder::from("++").gen(0, Gen::Crossing).token(1, f).build();
                push("tokenslide-up-right", format!("f={}", c.label(*i)), l, r);
            }
        }
        "tokenslide-up-left" => {
            for (i, f, _, _) in &basis {
                let l = Builder::from("++").token(1, f).gen(0, Gen::Crossing).build();
                let r = Builder::from("++").gen(0, Gen::Crossing).token(0, f).build();
                push("tokenslide-up-left", format!("f={}", c.label(*i)), l, r);
            }
        }
        "dotslide1" => {
            let l = Builder::from("++")
                .gen(0, Gen::Crossing)
                .gen(0, Gen::Dot)
                .build()
                .minus(&Builder::from("++").gen(1, Gen::Dot).gen(0, Gen::Crossing).build());
            let r = h.sum_basis(|b, bd, _| Builder::from("++").token(0, bd).token(1, b).build());
            push("dotslide1", String::new(), l, r);
        }
        "dotslide2" => {
            let l = Builder::from("++")
                .gen(0, Gen::Dot)
                .gen(0, Gen::Crossing)
                .build()
                .minus(&Builder::from("++").gen(0, Gen::Crossing).gen(1, Gen::Dot).build());
            let r = h.sum_basis(|b, bd, _| Builder::from("++").token(1, bd).token(0, b).build());
            push("dotslide2", String::new(), l, r);
        }
        "right-adjunction-up" => push("right-adjunction-up", String::new(), h.zigzag_right_up(), h.id("+")),
        "right-adjunction-down" => push("right-adjunction-down", String::new(), h.zigzag_right_down(), h.id("-")),

        "doublecross-up-down" => {
            let lhs = Builder::from("+-").gen(0, Gen::TCross).gen(0, Gen::TCrossPrime).build();
            let bound = k.abs();
            let mut rhs = h.id("+-");
            for r in 0..=bound {
                for s in 0..=(bound - r) {
                    for (_, a, ad, _) in &basis {
                        for (_, b, bd, _) in &basis {
                            let bub = h.ccw_rev(-r - s - 2, &c.m(ad, b));
                            if bub.is_zero() {
                                continue;
                            }
                            let low = Builder::from("+-").token(0, bd).dots(0, r as u32).gen(0, Gen::Cap).build();
                            let high = Builder::from("").gen(0, Gen::LeftCup).dots(1, s as u32).token(0, a).build();
                            rhs.add_scaled(&seq(&[low, bub, high]), &Scalar::one());
                        }
                    }
                }
            }
            push("doublecross-up-down", "general".into(), lhs.clone(), rhs);
            if k <= 1 {
                let mut short = h.id("+-");
                if k == 1 {
                    short.add_scaled(
                        &h.sum_basis(|b, bd, _| {
                            seq(&[
                                Builder::from("+-").token(0, bd).gen(0, Gen::Cap).build(),
                                Builder::from("").gen(0, Gen::LeftCup).token(0, b).build(),
                            ])
                        }),
                        &Scalar::one(),
                    );
                }
                push("doublecross-up-down", "closed form".into(), lhs, short);
            }
        }
        "doublecross-down-up" => {
            let lhs = Builder::from("-+").gen(0, Gen::TCrossPrime).gen(0, Gen::TCross).build();
            let bound = k.abs();
            let mut rhs = h.id("-+");
            for r in 0..=bound {
                for s in 0..=(bound - r) {
                    for (_, a, ad, pa) in &basis {
                        for (_, b, bd, pb) in &basis {
                            let bub = h.cw(-r - s - 2, &c.m(ad, b));
                            if bub.is_zero() {
                                continue;
                            }
                            let sign = Scalar::sign((pa & pb) ^ pa ^ pb);
                            let low = Builder::from("-+").dots(1, s as u32).token(0, a).gen(0, Gen::LeftCap).build();
                            let high = Builder::from("").gen(0, Gen::Cup).token(1, bd).dots(1, r as u32).build();
                            rhs.add_scaled(&seq(&[low, bub, high]), &sign);
                        }
                    }
                }
            }
            push("doublecross-down-up", "general".into(), lhs.clone(), rhs);
            if k >= -1 {
                let mut short = h.id("-+");
                if k == -1 {
                    short.add_scaled(
                        &h.sum_basis(|b, bd, pb| {
                            seq(&[
                                Builder::from("-+").token(0, b).gen(0, Gen::LeftCap).build(),
                                Builder::from("").gen(0, Gen::Cup).token(1, bd).build(),
                            ])
                            .scaled(&Scalar::sign(pb))
                        }),
                        &sc(-1),
                    );
                }
                push("doublecross-down-up", "closed form".into(), lhs, short);
            }
        }
        "right-curl" => {
            if k >= 0 {
                let rhs = if k == 0 { h.id("+") } else { Morphism::zero(word("+"), word("+")) };
                push("right-curl", String::new(), h.right_curl(0), rhs);
            }
        }
        "left-curl" => {
            if k <= 0 {
                let rhs = if k == 0 { h.id("+") } else { Morphism::zero(word("+"), word("+")) };
                push("left-curl", String::new(), h.left_curl(0), rhs);
            }
        }
        "clockwise-circ" => {
            for r in 0..k.max(0) {
                for (i, f, _, _) in &basis {
                    let v = if r == k - 1 { -h.tr(f) } else { Scalar::zero() };
                    push("clockwise-circ", format!("r={r} f={}", c.label(*i)), h.cw(r, f), Morphism::scalar(v));
                }
            }
        }
        "counterclockwise-circ" => {
            for r in 0..(-k).max(0) {
                for (i, f, _, _) in &basis {
                    let v = if r == -k - 1 { h.tr(f) } else { Scalar::zero() };
                    push("counterclockwise-circ", format!("r={r} f={}", c.label(*i)), h.ccw(r, f), Morphism::scalar(v));
                }
            }
        }
        "t-def-alt" => push("t-def-alt", String::new(), h.tp(), h.tp_alt()),

        "inf-grass1" => {
            for r in (k - 3)..=(k - 1) {
                for (i, f, _, _) in &basis {
                    let v = if r == k - 1 { -h.tr(f) } else { Scalar::zero() };
                    push("inf-grass1", format!("r={r} f={}", c.label(*i)), h.cw(r, f), Morphism::scalar(v));
                }
            }
        }
        "inf-grass2" => {
            for r in (-k - 3)..=(-k - 1) {
                for (i, f, _, _) in &basis {
                    let v = if r == -k - 1 { h.tr(f) } else { Scalar::zero() };
                    push("inf-grass2", format!("r={r} f={}", c.label(*i)), h.ccw(r, f), Morphism::scalar(v));
                }
            }
        }
        "inf-grass3" => {
            for t in 0..=opts.t_max {
                for (i, f, _, _) in &basis {
                    for (j, g, _, _) in &basis {
                        let expect = Morphism::scalar(if t == 0 { -h.tr(&c.m(f, g)) } else { Scalar::zero() });
                        // r ranges over all integers; outside [k-1 ∧ 0, t-2-((-k-1) ∧ 0)] a factor vanishes
                        let lo = (k - 1).min(0);
                        let hi = t - 2 - (-k - 1).min(0);
                        let mut full = Morphism::scalar(Scalar::zero());
                        for r in lo..=hi {
                            let s = t - 2 - r;
                            full.add_scaled(&grass_term(&c, r, s, f, g), &Scalar::one());
                        }
                        let mut shifted = Morphism::scalar(Scalar::zero());
                        for r in 0..=t {
                            let s = t - r;
                            shifted.add_scaled(&grass_term(&c, r + k - 1, s - k - 1, f, g), &Scalar::one());
                        }
                        let p = format!("t={t} f={} g={}", c.label(*i), c.label(*j));
                        push("inf-grass3", p.clone(), full, expect.clone());
                        push("inf-grass3", format!("{p} shifted"), shifted, expect);
                    }
                }
            }
        }
        "zigzag-leftdown" => push("zigzag-leftdown", String::new(), h.zigzag_left_down(), h.id("-")),
        "zigzag-leftup" => push("zigzag-leftup", String::new(), h.zigzag_left_up(), h.id("+")),
        "token-rotation" => {
            for (i, f, _, _) in &basis {
                let p = format!("f={}", c.label(*i));
                push("token-rotation", format!("{p} right mate"), h.down_token(f), h.dtoken_def(f));
                push("token-rotation", format!("{p} left mate"), h.down_token(f), h.dtoken_left_mate(&h.psi(f, k)));
            }
        }
        "dot-rotation" => {
            push("dot-rotation", "right mate".into(), h.down_dots(1), h.ddot_def());
            let corr = h.sum_basis(|b, bd, _| {
                let label = frobenius::sub(&h.psi(b, -1), b);
                seq(&[Builder::from("-").token(0, bd).build(), h.cw(k, &label).whisker(&word("-"), &[])])
            });
            push("dot-rotation", "left mate".into(), h.down_dots(1), h.ddot_left_mate().minus(&corr));
        }
        "crossing-rotation" => {
            push("crossing-rotation", "right mate".into(), Morphism::gen(Gen::DownCrossing), h.ds_def());
            push("crossing-rotation", "left mate".into(), Morphism::gen(Gen::DownCrossing), h.ds_left_mate());
        }
        "left-dotted-curl" => {
            for r in 0..=opts.r_max as i64 {
                let mut rhs = Morphism::zero(word("+"), word("+"));
                for s in 0..=(r + k.max(0) + 1) {
                    for (_, b, bd, _) in &basis {
                        let bub = h.ccw_rev(r - s - 1, b);
                        if bub.is_zero() {
                            continue;
                        }
                        let strand = Builder::from("+").token(0, bd).dots(0, s as u32).build();
                        rhs.add_scaled(&seq(&[strand, bub.whisker(&[], &word("+"))]), &Scalar::one());
                    }
                }
                push("left-dotted-curl", format!("r={r}"), h.left_curl(r as u32), rhs);
            }
        }
        "right-dotted-curl" => {
            for r in 0..=opts.r_max as i64 {
                let mut rhs = Morphism::zero(word("+"), word("+"));
                for s in 0..=(r + (-k).max(0) + 1) {
                    for (_, b, bd, _) in &basis {
                        let bub = h.cw_rev(r - s - 1, bd);
                        if bub.is_zero() {
                            continue;
                        }
                        let strand = Builder::from("+").dots(0, s as u32).token(0, b).build();
                        rhs.add_scaled(&seq(&[bub.whisker(&word("+"), &[]), strand]), &sc(-1));
                    }
                }
                push("right-dotted-curl", format!("r={r}"), h.right_curl(r as u32), rhs);
            }
        }
        "clockwise-bubble-slide" | "counterclockwise-bubble-slide" => {
            let cw = id == "clockwise-bubble-slide";
            let orient = if cw { Orient::Cw } else { Orient::Ccw };
            let up = word("+");
            for r in 0..=opts.r_max as i64 {
                for (i, f, _, _) in &basis {
                    let bub = if cw { h.cw_rev(r, f) } else { h.ccw(r, f) };
                    let left_of = bub.whisker(&[], &up);
                    let right_of = bub.whisker(&up, &[]);
                    let (lhs, rhs) = if cw { (left_of, right_of) } else { (right_of, left_of) };
                    let rhs = rhs.minus(&h.bubble_slide_terms(orient, r, f));
                    let name = if cw { "clockwise-bubble-slide" } else { "counterclockwise-bubble-slide" };
                    push(name, format!("r={r} f={}", c.label(*i)), lhs, rhs);
                }
            }
        }
        "braid-alternating" => {
            let lhs = Builder::from("+-+")
                .gen(0, Gen::TCross)
                .gen(1, Gen::Crossing)
                .gen(0, Gen::TCrossPrime)
                .build()
                .minus(&Builder::from("+-+").gen(1, Gen::TCrossPrime).gen(0, Gen::Crossing).gen(1, Gen::TCross).build());
            let mut rhs = Morphism::zero(word("+-+"), word("+-+"));
            let bound = k.abs();
            if k >= 2 || k <= -2 {
                for r in 0..=bound {
                    for s in 0..=(bound - r) {
                        for t in 0..=(bound - r - s) {
                            let d = -r - s - t - 3;
                            for (_, a, ad, pa) in &basis {
                                for (_, b, bd, pb) in &basis {
                                    let bub = if k >= 2 { h.ccw_rev(d, &c.m(ad, b)) } else { h.cw(d, &c.m(ad, b)) };
                                    if bub.is_zero() {
                                        continue;
                                    }
                                    for (_, e, ed, pe) in &basis {
                                        let term = if k >= 2 {
                                            seq(&[
                                                Builder::from("+-+")
                                                    .token(2, bd)
                                                    .dots(2, t as u32)
                                                    .dots(1, s as u32)
                                                    .token(0, ed)
                                                    .gen(0, Gen::Cap)
                                                    .token(0, e)
                                                    .build(),
                                                bub.whisker(&[], &word("+")),
                                                Builder::from("+").gen(0, Gen::LeftCup).dots(1, r as u32).token(0, a).build(),
                                            ])
                                        } else {
                                            let sign = Scalar::sign((pa & pb) ^ pa ^ pb ^ (pb & pe));
                                            seq(&[
                                                Builder::from("+-+")
                                                    .dots(2, s as u32)
                                                    .token(1, a)
                                                    .gen(1, Gen::LeftCap)
                                                    .build(),
                                                bub.whisker(&word("+"), &[]),
                                                Builder::from("+")
                                                    .token(0, ed)
                                                    .dots(0, t as u32)
                                                    .gen(1, Gen::Cup)
                                                    .dots(2, r as u32)
                                                    .token(2, &c.m(e, &h.psi(bd, -r)))
                                                    .build(),
                                            ])
                                            .scaled(&sign)
                                        };
                                        rhs.add_scaled(&term, &Scalar::one());
                                    }
                                }
                            }
                        }
                    }
                }
            }
            push("braid-alternating", String::new(), lhs, rhs);
        }
        "central-bubble-reverse" => {
            for (i, f, _, _) in &basis {
                let p = format!("f={}", c.label(*i));
                push("central-bubble-reverse", format!("{p} standard"), h.ccw(-k, f), h.cw(k, f));
                push("central-bubble-reverse", format!("{p} reversed"), h.ccw_rev(-k, f), h.cw_rev(k, f));
            }
        }
        "central-bubbles" => {
            for (i, f, _, _) in &basis {
                let bub = h.central_bubble(f);
                for w in ["+", "-"] {
                    let ww = word(w);
                    push(
                        "central-bubbles",
                        format!("f={} strand={w}", c.label(*i)),
                        bub.whisker(&ww, &[]),
                        bub.whisker(&[], &ww),
                    );
                }
            }
        }
        _ => return Err(UnknownRelation(id.to_string())),
    }
    Ok(out)
}

/// Clockwise bubble (r dots, token fb) above a counterclockwise bubble
/// (s dots, token b̌g), summed over b.
fn grass_term(c: &Ctx, r: i64, s: i64, f: &[Scalar], g: &[Scalar]) -> Morphism {
    let h = c.h;
    let mut out = Morphism::scalar(Scalar::zero());
    for (_, b, bd, _) in c.basis() {
        let top = h.cw(r, &c.m(f, &b));
        if top.is_zero() {
            continue;
        }
        let bottom = h.ccw(s, &c.m(&bd, g));
        if bottom.is_zero() {
            continue;
        }
        out.add_scaled(&top.compose(&bottom).unwrap(), &Scalar::one());
    }
    out
}

/// All instances of a suite.
pub fn suite_instances(h: &Heis, suite: Suite, opts: &SuiteOptions) -> Vec<RelationInstance> {
    suite.ids().iter().flat_map(|id| instances(h, id, opts).unwrap()).collect()
}
