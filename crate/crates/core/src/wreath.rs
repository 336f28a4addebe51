//! Affine wreath product algebras A_n(F) and their cyclotomic quotients.
//!
//! Words are stored in the normal form `π · f · x^α` (permutation, pure tensor
//! of basis elements, x-monomial). Products are computed by left
//! multiplication with generators: permutations compose, tensors move right
//! through π by superpermutation, and x_i moves right through π by peeling off
//! left descents with the dotted-crossing relation
//!
//!   x_j s_j = s_j x_{j+1} − τ'_j,   x_{j+1} s_j = s_j x_j + τ_j,
//!
//! where τ_j = Σ_b b_j b̌_{j+1} and τ'_j = s_j τ_j s_j. Finally x_i f = ψ_i^{-1}(f) x_i.
//!
//! In the cyclotomic quotient an exponent reaching ℓ is rewritten with the
//! precomputed normal form N_i of x_i^ℓ. N_1 comes from the cyclotomic
//! polynomial, and N_{i+1} = s_i (x_i + s_i τ_i)^ℓ s_i.
//!
//! Slots are 0-based internally. The unit of F must be basis element 0, so
//! that padding a word with trivial slots embeds A_n into A_{n+1}.

use crate::frobenius::{Element, FrobeniusAlgebra};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::Scalar;
use rustc_hash::FxHashMap;
use std::sync::Arc;

pub const MAX_N: usize = 8;

pub type Perm = [u8; MAX_N];

pub const ID_PERM: Perm = [0, 1, 2, 3, 4, 5, 6, 7];

/// Normal-form word π · f_1 ⊗ … ⊗ f_n · x^α.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word {
    /// perm[j] = π(j)
    pub perm: Perm,
    /// basis index of F in each slot (0 = unit)
    pub tok: [u8; MAX_N],
    pub exp: [u8; MAX_N],
}

impl Word {
    pub const ONE: Word = Word { perm: ID_PERM, tok: [0; MAX_N], exp: [0; MAX_N] };

    pub fn s(j: usize) -> Word {
        let mut w = Word::ONE;
        w.perm.swap(j, j + 1);
        w
    }
    pub fn x(i: usize, e: u8) -> Word {
        let mut w = Word::ONE;
        w.exp[i] = e;
        w
    }
    pub fn token(i: usize, b: u8) -> Word {
        let mut w = Word::ONE;
        w.tok[i] = b;
        w
    }
    pub fn perm_word(p: Perm) -> Word {
        Word { perm: p, ..Word::ONE }
    }
    pub fn is_perm_identity(&self) -> bool {
        self.perm == ID_PERM
    }
    /// Smallest n such that the word lives in A_n.
    pub fn support(&self) -> usize {
        (0..MAX_N).rev().find(|&i| self.perm[i] != i as u8 || self.tok[i] != 0 || self.exp[i] != 0).map_or(0, |i| i + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WreathError {
    #[error("inadmissible cyclotomic parameters: {0}")]
    InadmissibleParams(String),
    #[error("rank defect: candidate basis of A_{n} spans only {rank} of {dim} dimensions")]
    RankDefect { n: usize, rank: usize, dim: usize },
    #[error("relation fails in the regular representation: {0}")]
    RelationFailure(String),
    #[error("the unit of F must be basis element 0")]
    UnitNotFirst,
    #[error("level {0} exceeds the supported bound {1}")]
    LevelBound(usize, usize),
    #[error("{0} is not idempotent")]
    NotIdempotent(String),
    #[error("elements belong to different algebras")]
    AmbientMismatch,
}

/// Linear combination of normal-form words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AWElement {
    pub terms: FxHashMap<Word, Scalar>,
}

impl AWElement {
    pub fn zero() -> Self {
        AWElement::default()
    }
    pub fn from_word(w: Word) -> Self {
        Self::term(w, Scalar::one())
    }
    pub fn term(w: Word, c: Scalar) -> Self {
        let mut e = AWElement::zero();
        e.add_term(w, c);
        e
    }
    pub fn one() -> Self {
        Self::from_word(Word::ONE)
    }
    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let nv = o.get() + &c;
                if nv.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = nv;
                }
            }
        }
    }
    pub fn add_scaled(&mut self, other: &AWElement, c: &Scalar) {
        for (w, v) in &other.terms {
            self.add_term(*w, v * c);
        }
    }
    pub fn scaled(&self, c: &Scalar) -> AWElement {
        let mut e = AWElement::zero();
        e.add_scaled(self, c);
        e
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
    pub fn sorted_terms(&self) -> Vec<(Word, Scalar)> {
        let mut v: Vec<_> = self.terms.iter().map(|(w, c)| (*w, c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

impl std::ops::Add for &AWElement {
    type Output = AWElement;
    fn add(self, rhs: &AWElement) -> AWElement {
        let mut e = self.clone();
        e.add_scaled(rhs, &Scalar::one());
        e
    }
}
impl std::ops::Sub for &AWElement {
    type Output = AWElement;
    fn sub(self, rhs: &AWElement) -> AWElement {
        let mut e = self.clone();
        e.add_scaled(rhs, &-Scalar::one());
        e
    }
}

/// Cyclotomic parameters: a list of (r, c^{(r,j)}) with Σ r = ℓ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloParams {
    pub factors: Vec<(u32, Element)>,
}

impl CycloParams {
    /// All parameters zero with r = 1: the polynomial x^ℓ.
    pub fn zero(f: &FrobeniusAlgebra, ell: usize) -> Self {
        CycloParams { factors: (0..ell).map(|_| (1, f.zero())).collect() }
    }
    pub fn level(&self) -> usize {
        self.factors.iter().map(|(r, _)| *r as usize).sum()
    }
}

#[derive(serde::Deserialize)]
struct CycloFile {
    factor: Vec<CycloFactor>,
}

#[derive(serde::Deserialize)]
struct CycloFactor {
    #[serde(default = "one_u32")]
    r: u32,
    #[serde(default)]
    c: std::collections::BTreeMap<String, Scalar>,
}

fn one_u32() -> u32 {
    1
}

/// Reads parameters from TOML: a list of `[[factor]]` tables with `r` and an
/// optional element `c = { symbol = "coeff" }` of `f`.
pub fn parse_cyclo_toml(f: &FrobeniusAlgebra, text: &str) -> Result<CycloParams, WreathError> {
    let file: CycloFile = toml::from_str(text).map_err(|e| WreathError::InadmissibleParams(e.to_string()))?;
    let mut factors = Vec::new();
    for fac in file.factor {
        let mut e = f.zero();
        for (sym, c) in fac.c {
            let i = f.index_of(&sym).ok_or_else(|| WreathError::InadmissibleParams(format!("unknown symbol {sym}")))?;
            e[i] = c;
        }
        factors.push((fac.r, e));
    }
    Ok(CycloParams { factors })
}

/// Checks the admissibility conditions on cyclotomic parameters over `f`.
pub fn check_admissible(f: &FrobeniusAlgebra, params: &CycloParams) -> Result<(), WreathError> {
    let th = f.nakayama_order() as u32;
    let delta = f.top_degree();
    for (idx, (r, c)) in params.factors.iter().enumerate() {
        if *r == 0 || *r > th {
            return Err(WreathError::InadmissibleParams(format!("factor {idx}: r = {r} must lie in 1..={th}")));
        }
        if crate::frobenius::is_zero(c) {
            continue;
        }
        let g = f
            .homogeneous_grading(c)
            .ok_or_else(|| WreathError::InadmissibleParams(format!("factor {idx}: parameter is not homogeneous")))?;
        if g.parity {
            return Err(WreathError::InadmissibleParams(format!("factor {idx}: parameter is odd")));
        }
        if g.degree != *r as i64 * delta {
            return Err(WreathError::InadmissibleParams(format!(
                "factor {idx}: parameter has degree {} instead of rΔ = {}",
                g.degree,
                *r as i64 * delta
            )));
        }
        if &f.apply_psi(c) != c {
            return Err(WreathError::InadmissibleParams(format!("factor {idx}: parameter is not ψ-fixed")));
        }
        for b in 0..f.dim() {
            let be = f.basis_elem(b);
            let lhs = f.mul(&be, c);
            let rhs = f.mul(c, &f.apply_psi_pow(&be, *r as i64));
            if lhs != rhs {
                return Err(WreathError::InadmissibleParams(format!(
                    "factor {idx}: g c = c ψ^r(g) fails for g = {}",
                    f.basis[b].symbol
                )));
            }
        }
    }
    Ok(())
}

type Terms = Vec<(u8, Scalar)>;

/// The multiplication engine shared by all A_n over one F (and one choice of
/// cyclotomic quotient, if any).
pub struct WreathRing {
    f: Arc<FrobeniusAlgebra>,
    d: usize,
    parity: Vec<bool>,
    degree: Vec<i64>,
    prod: Vec<Vec<Terms>>,
    psi_inv: Vec<Terms>,
    /// τ = Σ_b b ⊗ b̌ as (left, right, coefficient)
    tau: Vec<(u8, u8, Scalar)>,
    ell: Option<u8>,
    params: Option<CycloParams>,
    /// normal form of x_i^ℓ for i < max_n
    nf: Vec<AWElement>,
    max_n: usize,
}

fn sparse_terms(v: &[Scalar]) -> Terms {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as u8, c.clone())).collect()
}

fn compose(a: &Perm, b: &Perm) -> Perm {
    let mut out = ID_PERM;
    for j in 0..MAX_N {
        out[j] = a[b[j] as usize];
    }
    out
}

fn invert(p: &Perm) -> Perm {
    let mut out = ID_PERM;
    for j in 0..MAX_N {
        out[p[j] as usize] = j as u8;
    }
    out
}

impl WreathRing {
    /// The affine algebra (no cyclotomic reduction).
    pub fn affine(f: Arc<FrobeniusAlgebra>) -> Result<Self, WreathError> {
        Self::new(f, None, MAX_N)
    }

    /// The cyclotomic quotient, supporting A_n for n ≤ max_n.
    pub fn cyclotomic(f: Arc<FrobeniusAlgebra>, params: CycloParams, max_n: usize) -> Result<Self, WreathError> {
        check_admissible(&f, &params)?;
        if params.level() == 0 {
            return Err(WreathError::InadmissibleParams("level ℓ must be positive".into()));
        }
        if params.level() > 250 {
            return Err(WreathError::InadmissibleParams("level too large".into()));
        }
        if max_n > MAX_N {
            return Err(WreathError::LevelBound(max_n, MAX_N));
        }
        Self::new(f, Some(params), max_n)
    }

    fn new(f: Arc<FrobeniusAlgebra>, params: Option<CycloParams>, max_n: usize) -> Result<Self, WreathError> {
        if f.unit_index() != Some(0) {
            return Err(WreathError::UnitNotFirst);
        }
        let d = f.dim();
        assert!(d < 256, "basis too large");
        let prod = (0..d).map(|a| (0..d).map(|b| sparse_terms(f.basis_product(a, b))).collect()).collect();
        let psi_inv = (0..d).map(|a| sparse_terms(f.psi_inv_basis(a))).collect();
        let mut tau = Vec::new();
        for b in 0..d {
            for (e, c) in sparse_terms(f.dual(b)) {
                tau.push((b as u8, e, c));
            }
        }
        let mut ring = WreathRing {
            parity: (0..d).map(|i| f.parity(i)).collect(),
            degree: (0..d).map(|i| f.degree(i)).collect(),
            f,
            d,
            prod,
            psi_inv,
            tau,
            ell: params.as_ref().map(|p| p.level() as u8),
            params,
            nf: Vec::new(),
            max_n,
        };
        if ring.ell.is_some() {
            ring.build_reductions();
        }
        Ok(ring)
    }

    pub fn algebra(&self) -> &Arc<FrobeniusAlgebra> {
        &self.f
    }
    pub fn dim_f(&self) -> usize {
        self.d
    }
    pub fn ell(&self) -> Option<usize> {
        self.ell.map(|e| e as usize)
    }
    pub fn params(&self) -> Option<&CycloParams> {
        self.params.as_ref()
    }
    pub fn max_n(&self) -> usize {
        self.max_n
    }

    fn build_reductions(&mut self) {
        let ell = self.ell.unwrap();
        let f = self.f.clone();
        // expand ∏ (x^r − c) as Σ_e x^e q_e
        let mut poly: Vec<Element> = vec![f.unit().clone()];
        for (r, c) in &self.params.as_ref().unwrap().factors {
            let r = *r as usize;
            let mut next = vec![f.zero(); poly.len() + r];
            for (e, q) in poly.iter().enumerate() {
                crate::frobenius::add_scaled(&mut next[e + r], q, &Scalar::one());
                let qc = f.mul(q, c);
                crate::frobenius::add_scaled(&mut next[e], &qc, &-Scalar::one());
            }
            poly = next;
        }
        let mut n0 = AWElement::zero();
        for (e, q) in poly.iter().enumerate().take(ell as usize) {
            for (b, c) in sparse_terms(q) {
                let mut w = Word::ONE;
                w.tok[0] = b;
                w.exp[0] = e as u8;
                n0.add_term(w, -c);
            }
        }
        self.nf.push(n0);
        for i in 1..self.max_n {
            let j = i - 1;
            // U = s_j τ_j
            let mut u = AWElement::zero();
            for (b, e, c) in &self.tau {
                let mut w = Word::s(j);
                w.tok[j] = *b;
                w.tok[j + 1] = *e;
                u.add_term(w, c.clone());
            }
            let mut v = AWElement::one();
            for _ in 0..ell {
                let xv = self.lmul_x_elem(j, &v);
                let uv = self.mul(&u, &v);
                v = &xv + &uv;
            }
            let sv = self.lmul_perm_elem(&Word::s(j).perm, &v);
            let n_i = self.mul(&sv, &AWElement::from_word(Word::s(j)));
            self.nf.push(n_i);
        }
    }

    /// Superpermutation: returns p·t and its Koszul sign.
    pub fn superperm(&self, p: &Perm, t: &[u8; MAX_N]) -> ([u8; MAX_N], bool) {
        let mut out = [0u8; MAX_N];
        let mut sign = false;
        for j in 0..MAX_N {
            out[p[j] as usize] = t[j];
            if self.parity[t[j] as usize] {
                for j2 in j + 1..MAX_N {
                    if self.parity[t[j2] as usize] && p[j] > p[j2] {
                        sign = !sign;
                    }
                }
            }
        }
        (out, sign)
    }

    pub fn word_parity(&self, w: &Word) -> bool {
        w.tok.iter().fold(false, |a, &t| a ^ self.parity[t as usize])
    }
    pub fn word_degree(&self, w: &Word) -> i64 {
        let delta = self.f.top_degree();
        w.tok.iter().map(|&t| self.degree[t as usize]).sum::<i64>() + delta * w.exp.iter().map(|&e| e as i64).sum::<i64>()
    }
    pub fn tensor_parity(&self, t: &[u8; MAX_N]) -> bool {
        t.iter().fold(false, |a, &x| a ^ self.parity[x as usize])
    }

    pub fn lmul_perm_elem(&self, p: &Perm, e: &AWElement) -> AWElement {
        let mut out = AWElement::zero();
        for (w, c) in &e.terms {
            let mut nw = *w;
            nw.perm = compose(p, &w.perm);
            out.add_term(nw, c.clone());
        }
        out
    }

    /// out += c · (g · w) for a pure tensor g.
    fn lmul_tensor(&self, g: &[u8; MAX_N], w: &Word, c: &Scalar, out: &mut AWElement) {
        let pinv = invert(&w.perm);
        let (h, s1) = self.superperm(&pinv, g);
        // (h)(f): sign (-1)^{Σ_{i>j} h̄_i f̄_j}
        let mut s2 = false;
        let mut fpar_below = false;
        for i in 0..MAX_N {
            if self.parity[h[i] as usize] && fpar_below {
                s2 = !s2;
            }
            fpar_below ^= self.parity[w.tok[i] as usize];
        }
        let coeff = if s1 ^ s2 { -c } else { c.clone() };
        let mut partial: Vec<([u8; MAX_N], Scalar)> = vec![(w.tok, coeff)];
        for i in 0..MAX_N {
            if h[i] == 0 {
                continue;
            }
            let terms = &self.prod[h[i] as usize][w.tok[i] as usize];
            if terms.len() == 1 {
                let (e, v) = &terms[0];
                for (t, cc) in partial.iter_mut() {
                    t[i] = *e;
                    if !v.is_one() {
                        *cc = &*cc * v;
                    }
                }
            } else {
                let mut next = Vec::with_capacity(partial.len() * terms.len());
                for (t, cc) in &partial {
                    for (e, v) in terms {
                        let mut t2 = *t;
                        t2[i] = *e;
                        next.push((t2, cc * v));
                    }
                }
                partial = next;
            }
        }
        for (t, cc) in partial {
            out.add_term(Word { perm: w.perm, tok: t, exp: w.exp }, cc);
        }
    }

    pub fn lmul_tensor_elem(&self, g: &[u8; MAX_N], e: &AWElement) -> AWElement {
        let mut out = AWElement::zero();
        for (w, c) in &e.terms {
            self.lmul_tensor(g, w, c, &mut out);
        }
        out
    }

    fn lmul_tau(&self, j: usize, w: &Word, c: &Scalar, out: &mut AWElement) {
        for (b, e, v) in &self.tau {
            let mut g = [0u8; MAX_N];
            g[j] = *b;
            g[j + 1] = *e;
            self.lmul_tensor(&g, w, &(c * v), out);
        }
    }

    /// τ'_j = s_j τ_j s_j = Σ_b (-1)^{b̄} b̌_j b_{j+1}.
    fn lmul_tau_swapped(&self, j: usize, w: &Word, c: &Scalar, out: &mut AWElement) {
        for (b, e, v) in &self.tau {
            let mut g = [0u8; MAX_N];
            g[j] = *e;
            g[j + 1] = *b;
            let cv = c * v;
            let cv = if self.parity[*b as usize] { -cv } else { cv };
            self.lmul_tensor(&g, w, &cv, out);
        }
    }

    /// out += c · (x_i · w).
    fn lmul_x(&self, i: usize, w: &Word, c: &Scalar, out: &mut AWElement) {
        if w.is_perm_identity() {
            let fi = w.tok[i] as usize;
            for (e, v) in &self.psi_inv[fi] {
                let mut nw = *w;
                nw.tok[i] = *e;
                nw.exp[i] += 1;
                let cv = c * v;
                match self.ell {
                    Some(l) if nw.exp[i] >= l => self.reduce(&nw, i, &cv, out),
                    _ => out.add_term(nw, cv),
                }
            }
            return;
        }
        let pinv = invert(&w.perm);
        let j = (0..MAX_N - 1).find(|&j| pinv[j] > pinv[j + 1]).expect("non-identity permutation has a left descent");
        let mut rest = *w;
        rest.perm = compose(&Word::s(j).perm, &w.perm);
        let sj = Word::s(j).perm;
        let mut inner = AWElement::zero();
        if i == j {
            self.lmul_x(j + 1, &rest, c, &mut inner);
            for (nw, v) in inner.terms {
                out.add_term(Word { perm: compose(&sj, &nw.perm), ..nw }, v);
            }
            self.lmul_tau_swapped(j, &rest, &-c, out);
        } else if i == j + 1 {
            self.lmul_x(j, &rest, c, &mut inner);
            for (nw, v) in inner.terms {
                out.add_term(Word { perm: compose(&sj, &nw.perm), ..nw }, v);
            }
            self.lmul_tau(j, &rest, c, out);
        } else {
            self.lmul_x(i, &rest, c, &mut inner);
            for (nw, v) in inner.terms {
                out.add_term(Word { perm: compose(&sj, &nw.perm), ..nw }, v);
            }
        }
    }

    /// Rewrites f x^α with α_i = ℓ (permutation trivial) via N_i.
    fn reduce(&self, w: &Word, i: usize, c: &Scalar, out: &mut AWElement) {
        debug_assert!(w.is_perm_identity());
        assert!(i < self.nf.len(), "x_{} overflow needs a level beyond the supported bound {}", i + 1, self.max_n);
        let mut e = self.nf[i].clone();
        for m in 0..MAX_N {
            let mut k = w.exp[m];
            if m == i {
                k -= self.ell.unwrap();
            }
            for _ in 0..k {
                e = self.lmul_x_elem(m, &e);
            }
        }
        for (nw, v) in &e.terms {
            self.lmul_tensor(&w.tok, nw, &(c * v), out);
        }
    }

    pub fn lmul_x_elem(&self, i: usize, e: &AWElement) -> AWElement {
        let mut out = AWElement::zero();
        for (w, c) in &e.terms {
            self.lmul_x(i, w, c, &mut out);
        }
        out
    }

    /// out += c · (u · v) for words u, v.
    pub fn mul_words_into(&self, u: &Word, v: &Word, c: &Scalar, out: &mut AWElement) {
        let mut e = AWElement::term(*v, c.clone());
        for m in 0..MAX_N {
            for _ in 0..u.exp[m] {
                e = self.lmul_x_elem(m, &e);
            }
        }
        let e = if u.tok.iter().any(|&t| t != 0) { self.lmul_tensor_elem(&u.tok, &e) } else { e };
        if u.is_perm_identity() {
            for (w, v) in e.terms {
                out.add_term(w, v);
            }
        } else {
            for (w, v) in e.terms {
                out.add_term(Word { perm: compose(&u.perm, &w.perm), ..w }, v);
            }
        }
    }

    pub fn mul_words(&self, u: &Word, v: &Word) -> AWElement {
        let mut out = AWElement::zero();
        self.mul_words_into(u, v, &Scalar::one(), &mut out);
        out
    }

    pub fn mul(&self, a: &AWElement, b: &AWElement) -> AWElement {
        let mut out = AWElement::zero();
        for (u, cu) in &a.terms {
            for (v, cv) in &b.terms {
                self.mul_words_into(u, v, &(cu * cv), &mut out);
            }
        }
        out
    }

    /// The element τ_j = Σ_b b_j b̌_{j+1}.
    pub fn tau_elem(&self, j: usize) -> AWElement {
        let mut e = AWElement::zero();
        for (b, c, v) in &self.tau {
            let mut w = Word::ONE;
            w.tok[j] = *b;
            w.tok[j + 1] = *c;
            e.add_term(w, v.clone());
        }
        e
    }

    /// Embeds an element of F at slot i.
    pub fn token_elem(&self, i: usize, f: &[Scalar]) -> AWElement {
        let mut e = AWElement::zero();
        for (b, c) in sparse_terms(f) {
            e.add_term(Word::token(i, b), c);
        }
        e
    }

    pub fn format_word(&self, w: &Word, n: usize) -> String {
        let mut parts = Vec::new();
        if (0..n).any(|j| w.perm[j] != j as u8) {
            let p: Vec<String> = (0..n).map(|j| (w.perm[j] + 1).to_string()).collect();
            parts.push(format!("[{}]", p.join("")));
        }
        for i in 0..n {
            if w.tok[i] != 0 {
                parts.push(format!("{}_{}", self.f.basis[w.tok[i] as usize].symbol, i + 1));
            }
        }
        for i in 0..n {
            match w.exp[i] {
                0 => {}
                1 => parts.push(format!("x_{}", i + 1)),
                e => parts.push(format!("x_{}^{}", i + 1, e)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    pub fn format_elem(&self, e: &AWElement, n: usize) -> String {
        if e.is_zero() {
            return "0".into();
        }
        e.sorted_terms()
            .iter()
            .map(|(w, c)| if c.is_one() { self.format_word(w, n) } else { format!("({c}) {}", self.format_word(w, n)) })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

// ---------------------------------------------------------------------------
// permutations and basis enumeration

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Lehmer rank of a permutation of 0..n.
pub fn perm_rank(p: &Perm, n: usize) -> usize {
    let mut rank = 0;
    for i in 0..n {
        let smaller = (i + 1..n).filter(|&j| p[j] < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

pub fn perm_unrank(mut r: usize, n: usize) -> Perm {
    let mut digits = vec![0usize; n];
    for i in (0..n).rev() {
        let base = n - i;
        digits[i] = r % base;
        r /= base;
    }
    let mut avail: Vec<u8> = (0..n as u8).collect();
    let mut p = ID_PERM;
    for i in 0..n {
        p[i] = avail.remove(digits[i]);
    }
    p
}

/// Handle to the cyclotomic algebra A_n^C(F) for a fixed n.
#[derive(Clone)]
pub struct CyclotomicAlgebra {
    pub ring: Arc<WreathRing>,
    pub n: usize,
    ell: usize,
    d: usize,
}

impl CyclotomicAlgebra {
    pub fn new(ring: Arc<WreathRing>, n: usize) -> Result<Self, WreathError> {
        let ell = ring.ell().ok_or_else(|| WreathError::InadmissibleParams("ring is not cyclotomic".into()))?;
        if n > ring.max_n() {
            return Err(WreathError::LevelBound(n, ring.max_n()));
        }
        let d = ring.dim_f();
        Ok(CyclotomicAlgebra { ring, n, ell, d })
    }

    pub fn dim(&self) -> usize {
        (self.ell * self.d).pow(self.n as u32) * factorial(self.n)
    }

    pub fn index(&self, w: &Word) -> usize {
        let mut t = 0;
        let mut x = 0;
        for i in 0..self.n {
            t = t * self.d + w.tok[i] as usize;
            x = x * self.ell + w.exp[i] as usize;
        }
        let td = self.d.pow(self.n as u32);
        let xd = self.ell.pow(self.n as u32);
        (perm_rank(&w.perm, self.n) * td + t) * xd + x
    }

    pub fn word(&self, mut idx: usize) -> Word {
        let td = self.d.pow(self.n as u32);
        let xd = self.ell.pow(self.n as u32);
        let mut w = Word::ONE;
        for i in (0..self.n).rev() {
            w.exp[i] = (idx % self.ell) as u8;
            idx /= self.ell;
        }
        let _ = xd;
        for i in (0..self.n).rev() {
            w.tok[i] = (idx % self.d) as u8;
            idx /= self.d;
        }
        let _ = td;
        w.perm = perm_unrank(idx, self.n);
        w
    }

    pub fn basis(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.dim()).map(|i| self.word(i))
    }

    pub fn to_vec(&self, e: &AWElement) -> SparseVec {
        let mut v: SparseVec = e.terms.iter().map(|(w, c)| (self.index(w) as u32, c.clone())).collect();
        v.sort_unstable_by_key(|x| x.0);
        v
    }

    pub fn from_vec(&self, v: &SparseVec) -> AWElement {
        let mut e = AWElement::zero();
        for (i, c) in v {
            e.add_term(self.word(*i as usize), c.clone());
        }
        e
    }

    /// Matrix of left multiplication by `a` on the canonical basis.
    pub fn left_mult_matrix(&self, a: &AWElement) -> SparseMatrix {
        let dim = self.dim();
        let cols = (0..dim)
            .map(|j| {
                let w = self.word(j);
                let mut out = AWElement::zero();
                for (u, c) in &a.terms {
                    self.ring.mul_words_into(u, &w, c, &mut out);
                }
                self.to_vec(&out)
            })
            .collect();
        SparseMatrix { rows: dim, cols }
    }

    pub fn regular_rep(&self) -> RegularRep {
        let f = self.ring.algebra();
        let x = (0..self.n).map(|i| self.left_mult_matrix(&AWElement::from_word(Word::x(i, 1)))).collect();
        let s = (0..self.n.saturating_sub(1)).map(|j| self.left_mult_matrix(&AWElement::from_word(Word::s(j)))).collect();
        let tokens = (0..self.n)
            .map(|i| (0..f.dim()).map(|b| self.left_mult_matrix(&AWElement::from_word(Word::token(i, b as u8)))).collect())
            .collect();
        RegularRep { x, s, tokens }
    }

    /// Certifies the candidate basis: the regular representation matrices
    /// satisfy the defining relations and the orbit of 1 has full rank.
    pub fn certify(&self) -> Result<(), WreathError> {
        let rep = self.regular_rep();
        rep.check_relations(self)?;
        let dim = self.dim();
        // ρ(w) e_1 for every basis word, evaluated through generators
        let one = self.index(&Word::ONE) as u32;
        let mut elim = crate::linalg::Eliminator::new(dim);
        let mut acc = crate::linalg::Accumulator::new(dim);
        for w in self.basis() {
            let mut v: SparseVec = vec![(one, Scalar::one())];
            for m in 0..self.n {
                for _ in 0..w.exp[m] {
                    v = rep.x[m].apply(&v, &mut acc);
                }
            }
            for m in 0..self.n {
                if w.tok[m] != 0 {
                    v = rep.tokens[m][w.tok[m] as usize].apply(&v, &mut acc);
                }
            }
            for j in reduced_word(&w.perm, self.n).into_iter().rev() {
                v = rep.s[j].apply(&v, &mut acc);
            }
            elim.insert(v);
        }
        if elim.rank() != dim {
            return Err(WreathError::RankDefect { n: self.n, rank: elim.rank(), dim });
        }
        Ok(())
    }

    pub fn symmetrizer(&self, f: &[Scalar]) -> Result<AWElement, WreathError> {
        symmetrizer(&self.ring, f, self.n)
    }
}

/// Reduced expression π = s_{j_1} s_{j_2} ⋯ s_{j_m} (left to right).
pub fn reduced_word(p: &Perm, n: usize) -> Vec<usize> {
    let mut p = *p;
    let mut out = Vec::new();
    loop {
        let pinv = invert(&p);
        let Some(j) = (0..n.saturating_sub(1)).find(|&j| pinv[j] > pinv[j + 1]) else { break };
        out.push(j);
        p = compose(&Word::s(j).perm, &p);
    }
    out
}

/// Left multiplication matrices of the generators x_i, s_j and b_i.
pub struct RegularRep {
    pub x: Vec<SparseMatrix>,
    pub s: Vec<SparseMatrix>,
    pub tokens: Vec<Vec<SparseMatrix>>,
}

impl RegularRep {
    pub fn check_relations(&self, alg: &CyclotomicAlgebra) -> Result<(), WreathError> {
        let ring = &alg.ring;
        let f = ring.algebra();
        let d = f.dim();
        let n = alg.n;
        let dim = alg.dim();
        let id = SparseMatrix::identity(dim);
        let fail = |s: String| Err(WreathError::RelationFailure(s));
        let tok_mat = |i: usize, v: &[Scalar]| {
            let mut m = SparseMatrix::zero(dim, dim);
            for (b, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    m.add_scaled(&self.tokens[i][b], c);
                }
            }
            m
        };
        for i in 0..n {
            if self.tokens[i][0] != id {
                return fail(format!("1_{} is not the identity", i + 1));
            }
            for a in 0..d {
                for b in 0..d {
                    let lhs = self.tokens[i][a].compose(&self.tokens[i][b]);
                    if lhs != tok_mat(i, f.basis_product(a, b)) {
                        return fail(format!("token product at slot {}", i + 1));
                    }
                    for i2 in 0..n {
                        if i2 == i {
                            continue;
                        }
                        let l = self.tokens[i][a].compose(&self.tokens[i2][b]);
                        let r = self.tokens[i2][b].compose(&self.tokens[i][a]);
                        let s = Scalar::sign(f.parity(a) && f.parity(b));
                        if l != r.scale(&s) {
                            return fail(format!("tokens at slots {} and {} do not supercommute", i + 1, i2 + 1));
                        }
                    }
                }
                // f x_i = x_i ψ_i(f); f x_j = x_j f for j ≠ i
                for m in 0..n {
                    let l = self.tokens[i][a].compose(&self.x[m]);
                    let r = if m == i {
                        self.x[m].compose(&tok_mat(i, f.psi_basis(a)))
                    } else {
                        self.x[m].compose(&self.tokens[i][a])
                    };
                    if l != r {
                        return fail(format!("token/dot relation at slots {} and {}", i + 1, m + 1));
                    }
                }
            }
        }
        for i in 0..n {
            for m in 0..n {
                if self.x[i].compose(&self.x[m]) != self.x[m].compose(&self.x[i]) {
                    return fail(format!("x_{} and x_{} do not commute", i + 1, m + 1));
                }
            }
        }
        for j in 0..n.saturating_sub(1) {
            if self.s[j].compose(&self.s[j]) != id {
                return fail(format!("s_{} does not square to 1", j + 1));
            }
            for j2 in 0..n - 1 {
                let (a, b) = (&self.s[j], &self.s[j2]);
                if j2 == j + 1 {
                    if a.compose(b).compose(a) != b.compose(a).compose(b) {
                        return fail(format!("braid relation for s_{}, s_{}", j + 1, j2 + 1));
                    }
                } else if j2 > j + 1 && a.compose(b) != b.compose(a) {
                    return fail(format!("s_{} and s_{} do not commute", j + 1, j2 + 1));
                }
            }
            // s_j x_m = x_m s_j away from j, j+1
            for m in 0..n {
                if m != j && m != j + 1 && self.s[j].compose(&self.x[m]) != self.x[m].compose(&self.s[j]) {
                    return fail(format!("s_{} and x_{} do not commute", j + 1, m + 1));
                }
            }
            // s_j x_j = x_{j+1} s_j − τ_j
            let mut rhs = self.x[j + 1].compose(&self.s[j]);
            let tau = alg.left_mult_matrix(&ring.tau_elem(j));
            rhs.add_scaled(&tau, &-Scalar::one());
            if self.s[j].compose(&self.x[j]) != rhs {
                return fail(format!("dotted crossing relation at s_{}", j + 1));
            }
            // s_j f = (s_j·f) s_j for f at slot j
            for a in 0..d {
                for m in 0..n {
                    let target = if m == j {
                        j + 1
                    } else if m == j + 1 {
                        j
                    } else {
                        m
                    };
                    let l = self.s[j].compose(&self.tokens[m][a]);
                    let r = self.tokens[target][a].compose(&self.s[j]);
                    if l != r {
                        return fail(format!("s_{} does not permute the token at slot {}", j + 1, m + 1));
                    }
                }
            }
        }
        // cyclotomic relation ∏ (x_1^r − c) = 0
        if n > 0 {
            let params = ring.params().expect("cyclotomic");
            let mut acc = id.clone();
            for (r, c) in &params.factors {
                let mut xr = id.clone();
                for _ in 0..*r {
                    xr = self.x[0].compose(&xr);
                }
                xr.add_scaled(&tok_mat(0, c), &-Scalar::one());
                acc = acc.compose(&xr);
            }
            if !acc.is_zero() {
                return fail("cyclotomic relation".into());
            }
        }
        Ok(())
    }
}

/// e_{f,(n)} = f^{⊗n} · (1/n!) Σ_π π.
pub fn symmetrizer(ring: &WreathRing, f: &[Scalar], n: usize) -> Result<AWElement, WreathError> {
    let alg = ring.algebra();
    if alg.mul(f, f) != f {
        return Err(WreathError::NotIdempotent(alg.format_element(f)));
    }
    let mut tensor = AWElement::one();
    for i in 0..n {
        tensor = ring.mul(&tensor, &ring.token_elem(i, f));
    }
    let inv = Scalar::factorial(n as u32).inv().unwrap();
    let mut avg = AWElement::zero();
    for r in 0..factorial(n) {
        avg.add_term(Word::perm_word(perm_unrank(r, n)), inv.clone());
    }
    Ok(ring.mul(&tensor, &avg))
}

/// Per-word degree and parity.
pub fn degree_parity(ring: &WreathRing, a: &AWElement) -> (Vec<(Word, i64, bool)>, bool) {
    let mut v: Vec<_> = a.terms.keys().map(|w| (*w, ring.word_degree(w), ring.word_parity(w))).collect();
    v.sort();
    let homogeneous = v.windows(2).all(|p| p[0].1 == p[1].1 && p[0].2 == p[1].2);
    (v, homogeneous)
}

// ---------------------------------------------------------------------------
// free right A_n-basis of A_{n+1}

/// Coset representatives u = w_j · g_{n+1} · x_{n+1}^a for A_{n+1} over A_n,
/// where w_j = s_j s_{j+1} ⋯ s_n sends slot n+1 to slot j.
#[derive(Clone, Debug)]
pub struct RepTable {
    pub n: usize,
    pub d: usize,
    pub ell: usize,
}

impl RepTable {
    pub fn new(n: usize, d: usize, ell: usize) -> Self {
        RepTable { n, d, ell }
    }
    pub fn len(&self) -> usize {
        (self.n + 1) * self.d * self.ell
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn cycle(n: usize, j: usize) -> Perm {
        let mut p = ID_PERM;
        for i in j..n {
            p[i] = (i + 1) as u8;
        }
        p[n] = j as u8;
        p
    }
    pub fn rep(&self, idx: usize) -> Word {
        let a = idx % self.ell;
        let g = (idx / self.ell) % self.d;
        let j = idx / (self.ell * self.d);
        let mut w = Word::ONE;
        w.perm = Self::cycle(self.n, j);
        w.tok[self.n] = g as u8;
        w.exp[self.n] = a as u8;
        w
    }
    /// Index of the representative of the identity coset with trivial decoration.
    pub fn identity_index(&self) -> usize {
        self.n * self.d * self.ell
    }
    /// Writes a word of A_{n+1} as sign · u · a with u a representative and a
    /// a word of A_n. Returns (rep index, a, sign is negative).
    pub fn decompose(&self, ring: &WreathRing, w: &Word) -> (usize, Word, bool) {
        let n = self.n;
        let j = w.perm[n] as usize;
        let mut a = Word::ONE;
        for i in 0..n {
            let p = w.perm[i] as usize;
            a.perm[i] = if p < j { p as u8 } else { (p - 1) as u8 };
            a.tok[i] = w.tok[i];
            a.exp[i] = w.exp[i];
        }
        let g = w.tok[n] as usize;
        let sign = ring.parity[g] && ring.tensor_parity(&a.tok);
        let idx = (j * self.d + g) * self.ell + w.exp[n] as usize;
        (idx, a, sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius;

    #[test]
    fn perm_rank_roundtrip() {
        for n in 0..5 {
            for r in 0..factorial(n) {
                assert_eq!(perm_rank(&perm_unrank(r, n), n), r);
            }
        }
    }

    #[test]
    fn decompose_reconstructs_word() {
        let f = Arc::new(frobenius::clifford().opposite());
        let ring = WreathRing::cyclotomic(f.clone(), CycloParams::zero(&f, 2), 4).unwrap();
        let alg = CyclotomicAlgebra::new(Arc::new(ring), 3).unwrap();
        let table = RepTable::new(2, 2, 2);
        for w in alg.basis() {
            let (idx, a, neg) = table.decompose(&alg.ring, &w);
            let prod = alg.ring.mul_words(&table.rep(idx), &a);
            let expect = AWElement::term(w, Scalar::sign(neg));
            assert_eq!(prod, expect);
        }
    }
}
