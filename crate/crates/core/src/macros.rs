//! Named composites in Heis_{F,k}: crossings, mates, left cups and caps,
//! bubbles (including negatively dotted ones), curls and zigzags.

use crate::diagram::{word, Builder, DiagramError, Gen, Morphism};
use crate::frobenius::{Element, FrobeniusAlgebra};
use crate::scalar::Scalar;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, serde::Serialize)]
pub enum Orient {
    Cw,
    Ccw,
}

/// Decoration on one leg of a bubble.
#[derive(Clone, PartialEq, Debug)]
pub enum Deco {
    Dots(u32),
    Token(Element),
}

/// The category Heis_{F,k} as a morphism factory.
#[derive(Clone, Debug)]
pub struct Heis {
    pub alg: Arc<FrobeniusAlgebra>,
    pub k: i64,
}

impl Heis {
    pub fn new(alg: Arc<FrobeniusAlgebra>, k: i64) -> Heis {
        Heis { alg, k }
    }

    /// Target of ω. Token vectors are kept, so the algebra is unchanged and
    /// only the level is negated.
    pub fn flipped(&self) -> Heis {
        Heis { alg: self.alg.clone(), k: -self.k }
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }
    pub fn one(&self) -> Element {
        self.alg.unit().clone()
    }
    pub fn b(&self, i: usize) -> Element {
        self.alg.basis_elem(i)
    }
    pub fn bdual(&self, i: usize) -> Element {
        self.alg.dual(i).clone()
    }
    pub fn mul(&self, f: &[Scalar], g: &[Scalar]) -> Element {
        self.alg.mul(f, g)
    }
    pub fn psi(&self, f: &[Scalar], r: i64) -> Element {
        self.alg.apply_psi_pow(f, r)
    }
    pub fn parity(&self, i: usize) -> bool {
        self.alg.parity(i)
    }
    pub fn tr(&self, f: &[Scalar]) -> Scalar {
        self.alg.tr(f)
    }

    pub fn id(&self, w: &str) -> Morphism {
        Morphism::identity(word(w))
    }

    // ---- single boxes ----------------------------------------------------

    pub fn dots(&self, n: u32) -> Morphism {
        Builder::from("+").dots(0, n).build()
    }
    pub fn token(&self, f: &[Scalar]) -> Morphism {
        Morphism::gen(Gen::Token(f.to_vec()))
    }
    pub fn down_dots(&self, n: u32) -> Morphism {
        Builder::from("-").dots(0, n).build()
    }
    pub fn down_token(&self, f: &[Scalar]) -> Morphism {
        Morphism::gen(Gen::DownToken(f.to_vec()))
    }
    pub fn s(&self) -> Morphism {
        Morphism::gen(Gen::Crossing)
    }
    pub fn cup(&self) -> Morphism {
        Morphism::gen(Gen::Cup)
    }
    pub fn cap(&self) -> Morphism {
        Morphism::gen(Gen::Cap)
    }
    pub fn lcup(&self) -> Morphism {
        Morphism::gen(Gen::LeftCup)
    }
    pub fn lcap(&self) -> Morphism {
        Morphism::gen(Gen::LeftCap)
    }
    pub fn t(&self) -> Morphism {
        Morphism::gen(Gen::TCross)
    }
    pub fn tp(&self) -> Morphism {
        Morphism::gen(Gen::TCrossPrime)
    }

    // ---- defining composites ---------------------------------------------

    /// t = (1 1 d)(1 s 1)(c 1 1)
    pub fn t_def(&self) -> Morphism {
        Builder::from("+-").gen(0, Gen::Cup).gen(1, Gen::Crossing).gen(2, Gen::Cap).build()
    }

    /// t' = (d' 1 1)(1 s 1)(1 1 c')
    pub fn tp_alt(&self) -> Morphism {
        Builder::from("-+").gen(2, Gen::LeftCup).gen(1, Gen::Crossing).gen(0, Gen::LeftCap).build()
    }

    /// Right mate of the dot.
    pub fn ddot_def(&self) -> Morphism {
        Builder::from("-").gen(0, Gen::Cup).gen(1, Gen::Dot).gen(1, Gen::Cap).build()
    }

    /// Right mate of a token.
    pub fn dtoken_def(&self, f: &[Scalar]) -> Morphism {
        Builder::from("-").gen(0, Gen::Cup).gen(1, Gen::Token(f.to_vec())).gen(1, Gen::Cap).build()
    }

    /// Right mate of the crossing.
    pub fn ds_def(&self) -> Morphism {
        Builder::from("--").gen(0, Gen::Cup).gen(1, Gen::TCross).gen(2, Gen::Cap).build()
    }

    /// Downward crossing rotated with left cups and caps.
    pub fn ds_left_mate(&self) -> Morphism {
        Builder::from("--")
            .gen(2, Gen::LeftCup)
            .gen(3, Gen::LeftCup)
            .gen(2, Gen::Crossing)
            .gen(1, Gen::LeftCap)
            .gen(0, Gen::LeftCap)
            .build()
    }

    /// Left mate of a token: (d' 1)(1 β_f 1)(1 c').
    pub fn dtoken_left_mate(&self, f: &[Scalar]) -> Morphism {
        Builder::from("-").gen(1, Gen::LeftCup).gen(1, Gen::Token(f.to_vec())).gen(0, Gen::LeftCap).build()
    }

    /// Left mate of the dot.
    pub fn ddot_left_mate(&self) -> Morphism {
        Builder::from("-").gen(1, Gen::LeftCup).gen(1, Gen::Dot).gen(0, Gen::LeftCap).build()
    }

    /// c' in terms of the other generators.
    pub fn lcup_def(&self) -> Morphism {
        if self.k > 0 {
            Morphism::gen(Gen::DecLeftCup((self.k - 1) as u32, self.one())).neg()
        } else {
            Builder::from("").gen(0, Gen::Cup).dots(1, (-self.k) as u32).gen(0, Gen::TCrossPrime).build()
        }
    }

    /// d' in terms of the other generators.
    pub fn lcap_def(&self) -> Morphism {
        if self.k < 0 {
            Morphism::gen(Gen::DecLeftCap((-self.k - 1) as u32, self.one()))
        } else {
            Builder::from("-+").gen(0, Gen::TCrossPrime).dots(1, self.k as u32).gen(0, Gen::Cap).build()
        }
    }

    /// Decorated right cup of the inversion column (k < 0): token `e` then r dots.
    pub fn inversion_cup(&self, r: u32, e: &[Scalar]) -> Morphism {
        Builder::from("").gen(0, Gen::Cup).token(1, e).dots(1, r).build()
    }

    /// Decorated right cap of the inversion column (k > 0): token `e` then r dots.
    pub fn inversion_cap(&self, r: u32, e: &[Scalar]) -> Morphism {
        Builder::from("+-").token(0, e).dots(0, r).gen(0, Gen::Cap).build()
    }

    /// Linear extension of the decorated left cap in its element label.
    pub fn dec_lcap_linear(&self, r: u32, f: &[Scalar]) -> Morphism {
        let mut out = Morphism::zero(word("-+"), vec![]);
        for b in 0..self.dim() {
            let c = self.tr(&self.mul(&self.bdual(b), f));
            out.add_scaled(&Morphism::gen(Gen::DecLeftCap(r, self.b(b))), &c);
        }
        out
    }

    // ---- bubbles -----------------------------------------------------------

    /// A bubble with decorations listed bottom to top on each leg; the left leg
    /// sits above the right one where they share a height.
    pub fn bubble(&self, orient: Orient, left: &[Deco], right: &[Deco]) -> Morphism {
        let (open, close) = match orient {
            Orient::Cw => (Gen::LeftCup, Gen::Cap),
            Orient::Ccw => (Gen::Cup, Gen::LeftCap),
        };
        let mut b = Builder::from("").gen(0, open);
        for d in right {
            b = apply_deco(b, 1, d);
        }
        for d in left {
            b = apply_deco(b, 0, d);
        }
        b.gen(0, close).build()
    }

    /// Clockwise bubble, `d` dots on the upward (left) leg and token f on the
    /// downward (right) leg; negative d by the determinant formula.
    pub fn cw(&self, d: i64, f: &[Scalar]) -> Morphism {
        if d >= 0 {
            return self.bubble(Orient::Cw, &[Deco::Dots(d as u32)], &[Deco::Token(f.to_vec())]);
        }
        let r = d - self.k + 1;
        if r < 0 {
            return Morphism::zero(vec![], vec![]);
        }
        if r == 0 {
            return Morphism::scalar(-self.tr(f));
        }
        let sign = Scalar::sign(r % 2 == 0);
        let k = self.k;
        self.det_sum(r as usize, f, |i, j, e| self.ccw(i - j - k, e)).scaled(&sign)
    }

    /// Counterclockwise bubble, `d` dots on the upward (right) leg and token f
    /// on the downward (left) leg; negative d by the determinant formula.
    pub fn ccw(&self, d: i64, f: &[Scalar]) -> Morphism {
        if d >= 0 {
            return self.bubble(Orient::Ccw, &[Deco::Token(f.to_vec())], &[Deco::Dots(d as u32)]);
        }
        let r = d + self.k + 1;
        if r < 0 {
            return Morphism::zero(vec![], vec![]);
        }
        if r == 0 {
            return Morphism::scalar(self.tr(f));
        }
        let k = self.k;
        self.det_sum(r as usize, f, |i, j, e| self.cw(i - j + k, e))
    }

    /// Clockwise bubble with the token on the upward leg and dots on the
    /// downward leg.
    pub fn cw_rev(&self, d: i64, f: &[Scalar]) -> Morphism {
        if d >= 0 {
            self.bubble(Orient::Cw, &[Deco::Token(f.to_vec())], &[Deco::Dots(d as u32)])
        } else {
            self.cw(d, &self.psi(f, -d))
        }
    }

    /// Counterclockwise bubble with the token on the upward leg and dots on the
    /// downward leg.
    pub fn ccw_rev(&self, d: i64, f: &[Scalar]) -> Morphism {
        if d >= 0 {
            self.bubble(Orient::Ccw, &[Deco::Dots(d as u32)], &[Deco::Token(f.to_vec())])
        } else {
            self.ccw(d, &self.psi(f, d))
        }
    }

    /// Σ_{b_1..b_{r-1}} det(entry(i, j, b̌_{j-1} b_j)) with b̌_0 = f, b_r = 1.
    fn det_sum<E>(&self, r: usize, f: &[Scalar], entry: E) -> Morphism
    where
        E: Fn(i64, i64, &[Scalar]) -> Morphism,
    {
        let n = self.dim();
        let mut total = Morphism::zero(vec![], vec![]);
        let tuples = n.pow((r - 1) as u32);
        for code in 0..tuples {
            let mut bs = Vec::with_capacity(r - 1);
            let mut c = code;
            for _ in 0..r - 1 {
                bs.push(c % n);
                c /= n;
            }
            // left[j] = b̌_{j-1}, right[j] = b_j for j = 1..r
            let mut m = vec![vec![Morphism::zero(vec![], vec![]); r]; r];
            for j in 1..=r {
                let left = if j == 1 { f.to_vec() } else { self.bdual(bs[j - 2]) };
                let right = if j == r { self.one() } else { self.b(bs[j - 1]) };
                let e = self.mul(&left, &right);
                for (i, row) in m.iter_mut().enumerate() {
                    row[j - 1] = entry(i as i64 + 1, j as i64, &e);
                }
            }
            total.add_scaled(&det(&m), &Scalar::one());
        }
        total
    }

    /// Correction sum of the bubble slide past an upward strand:
    /// Σ_{t≥0} Σ_{s≤t} Σ_{a,b} (-1)^{āb̄} [bubble(r-t-2, ǎf) beside the strand,
    /// then t dots and the token b ψ^{-s}(a) ψ^{-t}(b̌) on the strand].
    /// The small bubble is `cw_rev` to the right of the strand for `Cw` and
    /// `ccw` to its left for `Ccw`.
    pub fn bubble_slide_terms(&self, orient: Orient, r: i64, f: &[Scalar]) -> Morphism {
        let up = word("+");
        let mut out = Morphism::zero(up.clone(), up.clone());
        for t in 0..=(r + self.k.abs() + 1) {
            for a in 0..self.dim() {
                let af = self.mul(&self.bdual(a), f);
                let small = match orient {
                    Orient::Cw => self.cw_rev(r - t - 2, &af),
                    Orient::Ccw => self.ccw(r - t - 2, &af),
                };
                if small.is_zero() {
                    continue;
                }
                let placed = match orient {
                    Orient::Cw => small.whisker(&up, &[]),
                    Orient::Ccw => small.whisker(&[], &up),
                };
                let av = self.b(a);
                for s in 0..=t {
                    for b in 0..self.dim() {
                        let lab = self.mul(&self.mul(&self.b(b), &self.psi(&av, -s)), &self.psi(&self.bdual(b), -t));
                        if crate::frobenius::is_zero(&lab) {
                            continue;
                        }
                        let strand = Builder::from("+").dots(0, t as u32).token(0, &lab).build();
                        let sign = Scalar::sign(self.parity(a) && self.parity(b));
                        out.add_scaled(&placed.then(&strand), &sign);
                    }
                }
            }
        }
        out
    }

    /// The strictly central bubble ○_f.
    pub fn central_bubble(&self, f: &[Scalar]) -> Morphism {
        self.ccw(-self.k, f)
    }

    // ---- curls and zigzags -----------------------------------------------

    pub fn right_curl(&self, r: u32) -> Morphism {
        Builder::from("+").gen(1, Gen::LeftCup).dots(2, r).gen(0, Gen::Crossing).gen(1, Gen::Cap).build()
    }

    pub fn left_curl(&self, r: u32) -> Morphism {
        Builder::from("+").gen(0, Gen::Cup).dots(0, r).gen(1, Gen::Crossing).gen(0, Gen::LeftCap).build()
    }

    pub fn zigzag_right_up(&self) -> Morphism {
        Builder::from("+").gen(1, Gen::Cup).gen(0, Gen::Cap).build()
    }
    pub fn zigzag_right_down(&self) -> Morphism {
        Builder::from("-").gen(0, Gen::Cup).gen(1, Gen::Cap).build()
    }
    pub fn zigzag_left_down(&self) -> Morphism {
        Builder::from("-").gen(1, Gen::LeftCup).gen(0, Gen::LeftCap).build()
    }
    pub fn zigzag_left_up(&self) -> Morphism {
        Builder::from("+").gen(0, Gen::LeftCup).gen(1, Gen::LeftCap).build()
    }

    /// Σ_b of a closure producing a morphism from (b, b̌, parity of b).
    pub fn sum_basis<G>(&self, mut g: G) -> Morphism
    where
        G: FnMut(&Element, &Element, bool) -> Morphism,
    {
        let mut out: Option<Morphism> = None;
        for i in 0..self.dim() {
            let m = g(&self.b(i), &self.bdual(i), self.parity(i));
            match &mut out {
                None => out = Some(m),
                Some(acc) => acc.add_scaled(&m, &Scalar::one()),
            }
        }
        out.expect("empty basis")
    }
}

fn apply_deco(b: Builder, pos: usize, d: &Deco) -> Builder {
    match d {
        Deco::Dots(n) => b.dots(pos, *n),
        Deco::Token(f) => b.token(pos, f),
    }
}

/// Determinant of a square matrix of endomorphisms of the unit object,
/// expanded along the first column; products are compositions with the
/// earlier factor on top.
pub fn det(m: &[Vec<Morphism>]) -> Morphism {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = Morphism::zero(vec![], vec![]);
    for s in 0..n {
        if m[s][0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Morphism>> =
            (0..n).filter(|&i| i != s).map(|i| m[i][1..].to_vec()).collect();
        let sub = det(&minor);
        if sub.is_zero() {
            continue;
        }
        let prod = m[s][0].compose(&sub).expect("closed diagrams compose");
        total.add_scaled(&prod, &Scalar::sign(s % 2 == 1));
    }
    total
}

/// Stacks closed or open morphisms: `upper ∘ lower` with boundary checks.
pub fn stack(lower: &Morphism, upper: &Morphism) -> Result<Morphism, DiagramError> {
    upper.compose(lower)
}
