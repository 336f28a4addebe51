//! String diagrams for Heis_{F,k}: sign words, generator boxes, sliced
//! diagrams and formal linear combinations of them.
//!
//! A diagram is a domain word plus a list of slices read bottom to top, each
//! slice carrying exactly one box at a given position. Tensor products put the
//! left factor above the right one.

use crate::frobenius::{Element, FrobeniusAlgebra};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sign {
    Up,
    Down,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Up => Sign::Down,
            Sign::Down => Sign::Up,
        }
    }
    pub fn to_char(self) -> char {
        match self {
            Sign::Up => '+',
            Sign::Down => '-',
        }
    }
}

pub type ObjectWord = Vec<Sign>;

pub fn word(s: &str) -> ObjectWord {
    s.chars()
        .filter_map(|c| match c {
            '+' => Some(Sign::Up),
            '-' => Some(Sign::Down),
            _ => None,
        })
        .collect()
}

pub fn word_str(w: &[Sign]) -> String {
    w.iter().map(|s| s.to_char()).collect()
}

pub fn parse_word(s: &str) -> Result<ObjectWord, DiagramError> {
    let mut out = Vec::new();
    for c in s.chars() {
        match c {
            '+' => out.push(Sign::Up),
            '-' => out.push(Sign::Down),
            ' ' => {}
            _ => return Err(DiagramError::Parse(format!("bad sign letter {c:?} in {s:?}"))),
        }
    }
    Ok(out)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("boundary mismatch: expected {expected}, found {found}")]
    BoundaryMismatch { expected: String, found: String },
    #[error("box {gen} does not fit at position {pos} of {word}")]
    BadSlice { gen: String, pos: usize, word: String },
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Generator boxes. The first seven are the generators of the presentation
/// with x, s, c, d, c', d', β_f; the rest are named composites kept as boxes so
/// that ω acts on diagrams slice by slice.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Gen {
    Dot,
    Token(Element),
    Crossing,
    /// c : 1 → Q_- Q_+
    Cup,
    /// d : Q_+ Q_- → 1
    Cap,
    /// c' : 1 → Q_+ Q_-
    LeftCup,
    /// d' : Q_- Q_+ → 1
    LeftCap,
    DownDot,
    DownToken(Element),
    DownCrossing,
    /// t : Q_+ Q_- → Q_- Q_+
    TCross,
    /// t' : Q_- Q_+ → Q_+ Q_-
    TCrossPrime,
    /// decorated left cap (r, f) : Q_- Q_+ → 1, available when k < 0
    DecLeftCap(u32, Element),
    /// decorated left cup (r, f) : 1 → Q_+ Q_-, available when k > 0
    DecLeftCup(u32, Element),
}

use Sign::{Down, Up};

impl Gen {
    pub fn domain(&self) -> Vec<Sign> {
        match self {
            Gen::Dot | Gen::Token(_) => vec![Up],
            Gen::Crossing => vec![Up, Up],
            Gen::Cup | Gen::LeftCup | Gen::DecLeftCup(..) => vec![],
            Gen::Cap | Gen::TCross => vec![Up, Down],
            Gen::LeftCap | Gen::TCrossPrime | Gen::DecLeftCap(..) => vec![Down, Up],
            Gen::DownDot | Gen::DownToken(_) => vec![Down],
            Gen::DownCrossing => vec![Down, Down],
        }
    }

    pub fn codomain(&self) -> Vec<Sign> {
        match self {
            Gen::Dot | Gen::Token(_) => vec![Up],
            Gen::Crossing => vec![Up, Up],
            Gen::Cup | Gen::TCross => vec![Down, Up],
            Gen::LeftCup | Gen::DecLeftCup(..) | Gen::TCrossPrime => vec![Up, Down],
            Gen::Cap | Gen::LeftCap | Gen::DecLeftCap(..) => vec![],
            Gen::DownDot | Gen::DownToken(_) => vec![Down],
            Gen::DownCrossing => vec![Down, Down],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gen::Dot => "dot",
            Gen::Token(_) => "token",
            Gen::Crossing => "s",
            Gen::Cup => "cup",
            Gen::Cap => "cap",
            Gen::LeftCup => "lcup",
            Gen::LeftCap => "lcap",
            Gen::DownDot => "ddot",
            Gen::DownToken(_) => "dtoken",
            Gen::DownCrossing => "ds",
            Gen::TCross => "t",
            Gen::TCrossPrime => "t'",
            Gen::DecLeftCap(..) => "dlcap",
            Gen::DecLeftCup(..) => "dlcup",
        }
    }

    pub fn token_element(&self) -> Option<&Element> {
        match self {
            Gen::Token(f) | Gen::DownToken(f) | Gen::DecLeftCap(_, f) | Gen::DecLeftCup(_, f) => Some(f),
            _ => None,
        }
    }

    /// Degree and parity; `None` when the attached element is inhomogeneous.
    pub fn grading(&self, alg: &FrobeniusAlgebra, k: i64) -> Option<(i64, bool)> {
        let delta = alg.top_degree();
        match self {
            Gen::Dot | Gen::DownDot => Some((delta, false)),
            Gen::Token(f) | Gen::DownToken(f) => elem_grading(alg, f),
            Gen::Crossing | Gen::DownCrossing | Gen::Cup | Gen::Cap | Gen::TCross | Gen::TCrossPrime => {
                Some((0, false))
            }
            Gen::LeftCup => Some((-k * delta, false)),
            Gen::LeftCap => Some((k * delta, false)),
            Gen::DecLeftCap(r, f) | Gen::DecLeftCup(r, f) => {
                elem_grading(alg, f).map(|(d, p)| (d - (*r as i64 + 1) * delta, p))
            }
        }
    }

    /// Parity read off the basis support (odd iff every nonzero component is odd).
    pub fn is_odd(&self, alg: &FrobeniusAlgebra) -> bool {
        match self.token_element() {
            Some(f) => elem_grading(alg, f).map(|g| g.1).unwrap_or(false),
            None => false,
        }
    }

    /// Image under ω together with its sign (decorated cups and caps pick up a
    /// further (-1)^{f̄}, applied in [`Diagram::omega`]).
    pub fn omega(&self) -> (Gen, bool) {
        match self {
            Gen::Dot => (Gen::DownDot, false),
            Gen::DownDot => (Gen::Dot, false),
            Gen::Token(f) => (Gen::DownToken(f.clone()), false),
            Gen::DownToken(f) => (Gen::Token(f.clone()), false),
            Gen::Crossing => (Gen::DownCrossing, true),
            Gen::DownCrossing => (Gen::Crossing, true),
            Gen::Cup => (Gen::Cap, false),
            Gen::Cap => (Gen::Cup, false),
            Gen::LeftCup => (Gen::LeftCap, true),
            Gen::LeftCap => (Gen::LeftCup, true),
            Gen::TCross => (Gen::TCross, true),
            Gen::TCrossPrime => (Gen::TCrossPrime, true),
            Gen::DecLeftCap(r, f) => (Gen::DecLeftCup(*r, f.clone()), false),
            Gen::DecLeftCup(r, f) => (Gen::DecLeftCap(*r, f.clone()), false),
        }
    }
}

pub fn elem_grading(alg: &FrobeniusAlgebra, f: &[Scalar]) -> Option<(i64, bool)> {
    match alg.homogeneous_grading(f) {
        Some(g) => Some((g.degree, g.parity)),
        None => {
            if f.iter().all(|c| c.is_zero()) {
                Some((0, false))
            } else {
                None
            }
        }
    }
}

/// Same box with its element replaced.
pub fn with_element(g: &Gen, e: Element) -> Gen {
    match g {
        Gen::Token(_) => Gen::Token(e),
        Gen::DownToken(_) => Gen::DownToken(e),
        Gen::DecLeftCap(r, _) => Gen::DecLeftCap(*r, e),
        Gen::DecLeftCup(r, _) => Gen::DecLeftCup(*r, e),
        other => other.clone(),
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Slice {
    pub pos: usize,
    pub gen: Gen,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Diagram {
    pub domain: ObjectWord,
    pub slices: Vec<Slice>,
}

/// Applies a box at `pos` to `w`, returning the new word.
pub fn apply_slice(w: &[Sign], slice: &Slice) -> Result<ObjectWord, DiagramError> {
    let dom = slice.gen.domain();
    let p = slice.pos;
    if p + dom.len() > w.len() || w[p..p + dom.len()] != dom[..] {
        return Err(DiagramError::BadSlice { gen: slice.gen.name().into(), pos: p, word: word_str(w) });
    }
    let mut out = w[..p].to_vec();
    out.extend(slice.gen.codomain());
    out.extend_from_slice(&w[p + dom.len()..]);
    Ok(out)
}

impl Diagram {
    pub fn identity(w: ObjectWord) -> Diagram {
        Diagram { domain: w, slices: vec![] }
    }

    /// Word after each slice (`words()[0]` is the domain).
    pub fn words(&self) -> Result<Vec<ObjectWord>, DiagramError> {
        let mut out = vec![self.domain.clone()];
        for s in &self.slices {
            let next = apply_slice(out.last().unwrap(), s)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn codomain(&self) -> ObjectWord {
        self.words().expect("inconsistent diagram").pop().unwrap()
    }

    pub fn check(&self) -> Result<(), DiagramError> {
        self.words().map(|_| ())
    }

    pub fn grading(&self, alg: &FrobeniusAlgebra, k: i64) -> Option<(i64, bool)> {
        let mut deg = 0;
        let mut par = false;
        for s in &self.slices {
            let (d, p) = s.gen.grading(alg, k)?;
            deg += d;
            par ^= p;
        }
        Some((deg, par))
    }

    pub fn num_crossings(&self) -> usize {
        self.slices
            .iter()
            .filter(|s| matches!(s.gen, Gen::Crossing | Gen::DownCrossing | Gen::TCross | Gen::TCrossPrime))
            .count()
    }

    /// Reflection in the horizontal axis with the ω sign; returns (diagram, negative).
    pub fn omega(&self, alg: &FrobeniusAlgebra) -> (Diagram, bool) {
        let cod = self.codomain();
        let mut neg = false;
        let mut odd = 0usize;
        let mut slices = Vec::with_capacity(self.slices.len());
        for s in self.slices.iter().rev() {
            let (g, sg) = s.gen.omega();
            neg ^= sg;
            if s.gen.is_odd(alg) {
                odd += 1;
                if matches!(s.gen, Gen::DecLeftCap(..) | Gen::DecLeftCup(..)) {
                    neg ^= true;
                }
            }
            slices.push(Slice { pos: s.pos, gen: g });
        }
        if (odd * odd.saturating_sub(1) / 2) % 2 == 1 {
            neg ^= true;
        }
        let domain = cod.iter().map(|s| s.flip()).collect();
        (Diagram { domain, slices }, neg)
    }

    pub fn shifted(&self, left: &[Sign], right: &[Sign]) -> Diagram {
        let mut domain = left.to_vec();
        domain.extend_from_slice(&self.domain);
        domain.extend_from_slice(right);
        let slices = self.slices.iter().map(|s| Slice { pos: s.pos + left.len(), gen: s.gen.clone() }).collect();
        Diagram { domain, slices }
    }
}

/// Formal ℚ-linear combination of diagrams with common boundary.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    pub domain: ObjectWord,
    pub codomain: ObjectWord,
    pub terms: BTreeMap<Diagram, Scalar>,
}

impl Morphism {
    pub fn zero(domain: ObjectWord, codomain: ObjectWord) -> Morphism {
        Morphism { domain, codomain, terms: BTreeMap::new() }
    }

    pub fn identity(w: ObjectWord) -> Morphism {
        Morphism::from_diagram(Diagram::identity(w))
    }

    pub fn from_diagram(d: Diagram) -> Morphism {
        let cod = d.codomain();
        let mut terms = BTreeMap::new();
        terms.insert(d.clone(), Scalar::one());
        Morphism { domain: d.domain, codomain: cod, terms }
    }

    /// A single box on its own boundary.
    pub fn gen(g: Gen) -> Morphism {
        let d = Diagram { domain: g.domain(), slices: vec![Slice { pos: 0, gen: g }] };
        Morphism::from_diagram(d)
    }

    /// The empty diagram times a scalar.
    pub fn scalar(c: Scalar) -> Morphism {
        Morphism::identity(vec![]).scaled(&c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, d: Diagram, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(d.domain, self.domain);
        let entry = self.terms.entry(d);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Morphism, c: &Scalar) {
        assert_eq!(self.domain, other.domain, "domain mismatch in sum");
        assert_eq!(self.codomain, other.codomain, "codomain mismatch in sum");
        for (d, a) in &other.terms {
            self.add_term(d.clone(), a * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Morphism {
        let mut out = Morphism::zero(self.domain.clone(), self.codomain.clone());
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Morphism {
        self.scaled(&Scalar::from_int(-1))
    }

    pub fn plus(&self, other: &Morphism) -> Morphism {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn minus(&self, other: &Morphism) -> Morphism {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    /// `self ∘ f`: f first, then self.
    pub fn compose(&self, f: &Morphism) -> Result<Morphism, DiagramError> {
        if f.codomain != self.domain {
            return Err(DiagramError::BoundaryMismatch {
                expected: word_str(&self.domain),
                found: word_str(&f.codomain),
            });
        }
        let mut out = Morphism::zero(f.domain.clone(), self.codomain.clone());
        for (d1, c1) in &f.terms {
            for (d2, c2) in &self.terms {
                let mut slices = d1.slices.clone();
                slices.extend(d2.slices.iter().cloned());
                out.add_term(Diagram { domain: d1.domain.clone(), slices }, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Panicking composition for builders whose boundaries are known to match.
    pub fn then(&self, g: &Morphism) -> Morphism {
        g.compose(self).expect("boundary mismatch in builder")
    }

    /// `(f ⊗ id) ∘ (id ⊗ g)`: the right factor acts first, the left one above it.
    pub fn tensor(&self, g: &Morphism) -> Morphism {
        let right = g.whisker(&self.domain, &[]);
        let left = self.whisker(&[], &g.codomain);
        left.compose(&right).unwrap()
    }

    pub fn whisker(&self, left: &[Sign], right: &[Sign]) -> Morphism {
        let mut dom = left.to_vec();
        dom.extend_from_slice(&self.domain);
        dom.extend_from_slice(right);
        let mut cod = left.to_vec();
        cod.extend_from_slice(&self.codomain);
        cod.extend_from_slice(right);
        let mut out = Morphism::zero(dom, cod);
        for (d, c) in &self.terms {
            out.add_term(d.shifted(left, right), c.clone());
        }
        out
    }

    pub fn check(&self) -> Result<(), DiagramError> {
        for d in self.terms.keys() {
            if d.domain != self.domain {
                return Err(DiagramError::BoundaryMismatch {
                    expected: word_str(&self.domain),
                    found: word_str(&d.domain),
                });
            }
            let cod = d.words()?.pop().unwrap();
            if cod != self.codomain {
                return Err(DiagramError::BoundaryMismatch {
                    expected: word_str(&self.codomain),
                    found: word_str(&cod),
                });
            }
        }
        Ok(())
    }

    /// Per-term grading; `None` entries mark inhomogeneous tokens.
    pub fn gradings(&self, alg: &FrobeniusAlgebra, k: i64) -> Vec<Option<(i64, bool)>> {
        self.terms.keys().map(|d| d.grading(alg, k)).collect()
    }

    /// Common grading of all terms, if homogeneous.
    pub fn grading(&self, alg: &FrobeniusAlgebra, k: i64) -> Option<(i64, bool)> {
        let gs = self.gradings(alg, k);
        let first = *gs.first()?;
        let first = first?;
        if gs.iter().all(|g| *g == Some(first)) {
            Some(first)
        } else {
            None
        }
    }

    /// ω : Heis_{F,k} → Heis_{F,-k}^op, contravariant with the super sign
    /// for reordering odd slices. Tokens keep their coefficient vectors;
    /// `alg` is used only for parities.
    pub fn omega(&self, alg: &FrobeniusAlgebra) -> Morphism {
        let this = self.homogenized(alg);
        let dom = self.codomain.iter().map(|s| s.flip()).collect();
        let cod = self.domain.iter().map(|s| s.flip()).collect();
        let mut out = Morphism::zero(dom, cod);
        for (d, c) in &this.terms {
            let (od, neg) = d.omega(alg);
            out.add_term(od, if neg { -c } else { c.clone() });
        }
        out
    }

    /// Splits every token into homogeneous components so that each term has
    /// well-defined slice parities.
    pub fn homogenized(&self, alg: &FrobeniusAlgebra) -> Morphism {
        let mut out = Morphism::zero(self.domain.clone(), self.codomain.clone());
        for (d, c) in &self.terms {
            let mut partial: Vec<Vec<Slice>> = vec![vec![]];
            for s in &d.slices {
                let pieces: Vec<Gen> = match s.gen.token_element() {
                    Some(f) if elem_grading(alg, f).is_none() => alg
                        .homogeneous_components(f)
                        .into_iter()
                        .map(|(_, e)| with_element(&s.gen, e))
                        .collect(),
                    _ => vec![s.gen.clone()],
                };
                let mut next = Vec::with_capacity(partial.len() * pieces.len());
                for p in &partial {
                    for g in &pieces {
                        let mut q = p.clone();
                        q.push(Slice { pos: s.pos, gen: g.clone() });
                        next.push(q);
                    }
                }
                partial = next;
            }
            for slices in partial {
                out.add_term(Diagram { domain: d.domain.clone(), slices }, c.clone());
            }
        }
        out
    }

    pub fn max_slices(&self) -> usize {
        self.terms.keys().map(|d| d.slices.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", word_str(&self.domain))?;
        for s in &self.slices {
            match &s.gen {
                Gen::DecLeftCap(r, _) | Gen::DecLeftCup(r, _) => write!(f, " {}({})@{}", s.gen.name(), r, s.pos)?,
                _ => write!(f, " {}@{}", s.gen.name(), s.pos)?,
            }
            if let Some(e) = s.gen.token_element() {
                let nz: Vec<String> =
                    e.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| format!("{c}*b{i}")).collect();
                write!(f, "<{}>", nz.join("+"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 : {} -> {}", word_str(&self.domain), word_str(&self.codomain));
        }
        let parts: Vec<String> = self.terms.iter().map(|(d, c)| format!("({c}) {d}")).collect();
        write!(f, "{}", parts.join("\n+ "))
    }
}

/// Step-by-step builder over a running word.
#[derive(Clone, Debug)]
pub struct Builder {
    diagram: Diagram,
    current: ObjectWord,
}

impl Builder {
    pub fn new(domain: ObjectWord) -> Builder {
        Builder { current: domain.clone(), diagram: Diagram::identity(domain) }
    }

    pub fn from(s: &str) -> Builder {
        Builder::new(word(s))
    }

    pub fn current(&self) -> &[Sign] {
        &self.current
    }

    pub fn gen(mut self, pos: usize, gen: Gen) -> Builder {
        let slice = Slice { pos, gen };
        self.current = apply_slice(&self.current, &slice).unwrap_or_else(|e| panic!("{e}"));
        self.diagram.slices.push(slice);
        self
    }

    /// `n` dots on the strand at `pos`, up or down according to its orientation.
    pub fn dots(mut self, pos: usize, n: u32) -> Builder {
        for _ in 0..n {
            let g = if self.current[pos] == Up { Gen::Dot } else { Gen::DownDot };
            self = self.gen(pos, g);
        }
        self
    }

    pub fn token(self, pos: usize, f: &[Scalar]) -> Builder {
        let g = if self.current[pos] == Up { Gen::Token(f.to_vec()) } else { Gen::DownToken(f.to_vec()) };
        self.gen(pos, g)
    }

    pub fn diagram(self) -> Diagram {
        self.diagram
    }

    pub fn build(self) -> Morphism {
        Morphism::from_diagram(self.diagram)
    }
}
