//! Random homogeneous elements and random diagrams for property tests.

use crate::diagram::{word, Builder, Diagram, Gen, Morphism, Sign, Slice};
use crate::frobenius::{Element, FrobeniusAlgebra};
use crate::macros::Heis;
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::Rng;

/// A random nonzero homogeneous element: a combination of basis vectors of
/// one grading with small integer coefficients.
pub fn homogeneous_element<R: Rng>(alg: &FrobeniusAlgebra, rng: &mut R) -> Element {
    let i = rng.gen_range(0..alg.dim());
    let g = alg.grading(i);
    let mut e = alg.zero();
    for j in 0..alg.dim() {
        if alg.grading(j) == g && (j == i || rng.gen_bool(0.3)) {
            let mut c = rng.gen_range(-2i64..=2);
            if j == i && c == 0 {
                c = 1;
            }
            e[j] = Scalar::from_int(c);
        }
    }
    e
}

/// Odd elements only; `None` when the algebra is purely even.
pub fn odd_element<R: Rng>(alg: &FrobeniusAlgebra, rng: &mut R) -> Option<Element> {
    let odd: Vec<usize> = (0..alg.dim()).filter(|&i| alg.parity(i)).collect();
    let i = *odd.choose(rng)?;
    let mut e = alg.zero();
    e[i] = Scalar::from_int(*[1i64, -1, 2].choose(rng).unwrap());
    Some(e)
}

#[derive(Clone, Copy, Debug)]
pub struct DiagramShape {
    pub max_slices: usize,
    pub max_width: usize,
    /// Allow the named composites t, t', down dots, down tokens, down crossings.
    pub composites: bool,
}

impl Default for DiagramShape {
    fn default() -> Self {
        DiagramShape { max_slices: 8, max_width: 4, composites: true }
    }
}

fn candidates(w: &[Sign], shape: &DiagramShape, alg: &FrobeniusAlgebra, rng: &mut impl Rng) -> Vec<Slice> {
    let mut out = Vec::new();
    let n = w.len();
    let tok = |rng: &mut _| homogeneous_element(alg, rng);
    for p in 0..n {
        match w[p] {
            Sign::Up => {
                out.push(Slice { pos: p, gen: Gen::Dot });
                out.push(Slice { pos: p, gen: Gen::Token(tok(rng)) });
            }
            Sign::Down if shape.composites => {
                out.push(Slice { pos: p, gen: Gen::DownDot });
                out.push(Slice { pos: p, gen: Gen::DownToken(tok(rng)) });
            }
            Sign::Down => {}
        }
        if p + 1 < n {
            match (w[p], w[p + 1]) {
                (Sign::Up, Sign::Up) => out.push(Slice { pos: p, gen: Gen::Crossing }),
                (Sign::Up, Sign::Down) => {
                    out.push(Slice { pos: p, gen: Gen::Cap });
                    if shape.composites {
                        out.push(Slice { pos: p, gen: Gen::TCross });
                    }
                }
                (Sign::Down, Sign::Up) => {
                    out.push(Slice { pos: p, gen: Gen::LeftCap });
                    if shape.composites {
                        out.push(Slice { pos: p, gen: Gen::TCrossPrime });
                    }
                }
                (Sign::Down, Sign::Down) if shape.composites => out.push(Slice { pos: p, gen: Gen::DownCrossing }),
                _ => {}
            }
        }
    }
    if n + 2 <= shape.max_width {
        for p in 0..=n {
            out.push(Slice { pos: p, gen: Gen::Cup });
            out.push(Slice { pos: p, gen: Gen::LeftCup });
        }
    }
    out
}

/// A random diagram with the given domain and at most `shape.max_slices` slices.
pub fn random_diagram<R: Rng>(alg: &FrobeniusAlgebra, domain: &[Sign], shape: &DiagramShape, rng: &mut R) -> Diagram {
    let mut w = domain.to_vec();
    let mut slices = Vec::new();
    let len = rng.gen_range(1..=shape.max_slices.max(1));
    for _ in 0..len {
        let c = candidates(&w, shape, alg, rng);
        let Some(s) = c.choose(rng).cloned() else { break };
        let (pos, d, cd) = (s.pos, s.gen.domain(), s.gen.codomain());
        w.splice(pos..pos + d.len(), cd);
        slices.push(s);
    }
    Diagram { domain: domain.to_vec(), slices }
}

/// A random word of length `1..=max_len`.
pub fn random_word<R: Rng>(max_len: usize, rng: &mut R) -> Vec<Sign> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| if rng.gen_bool(0.6) { Sign::Up } else { Sign::Down }).collect()
}

/// A random endomorphism of one upward strand built from dots, tokens,
/// curls and bubbles beside the strand.
pub fn random_strand_endo<R: Rng>(h: &Heis, max_pieces: usize, rng: &mut R) -> Morphism {
    let up = word("+");
    let mut m = h.id("+");
    for _ in 0..rng.gen_range(0..=max_pieces) {
        let f = h.b(rng.gen_range(0..h.dim()));
        let x = match rng.gen_range(0..7) {
            0 => h.dots(1),
            1 => h.token(&f),
            2 => h.left_curl(rng.gen_range(0..2)),
            3 => h.right_curl(rng.gen_range(0..2)),
            4 => h.cw(rng.gen_range(0..3), &f).whisker(&[], &up),
            5 => h.ccw(rng.gen_range(0..3), &f).whisker(&up, &[]),
            _ => h.zigzag_right_up(),
        };
        m = m.then(&x);
    }
    m
}

/// Closes an endomorphism of an upward strand into a clockwise or
/// counterclockwise loop.
pub fn close_strand(m: &Morphism, clockwise: bool) -> Morphism {
    let down = word("-");
    if clockwise {
        Builder::from("")
            .gen(0, Gen::LeftCup)
            .build()
            .then(&m.whisker(&[], &down))
            .then(&Builder::from("+-").gen(0, Gen::Cap).build())
    } else {
        Builder::from("")
            .gen(0, Gen::Cup)
            .build()
            .then(&m.whisker(&down, &[]))
            .then(&Builder::from("-+").gen(0, Gen::LeftCap).build())
    }
}

/// A random closed diagram: one or two closed strands, possibly with a
/// bubble inside a loop.
pub fn random_closed<R: Rng>(h: &Heis, rng: &mut R) -> Morphism {
    let a = close_strand(&random_strand_endo(h, 3, rng), rng.gen_bool(0.5));
    if rng.gen_bool(0.3) {
        let b = close_strand(&random_strand_endo(h, 2, rng), rng.gen_bool(0.5));
        a.then(&b)
    } else {
        a
    }
}
