//! The action of Heis_{G,k}, k < 0, on modules over the cyclotomic wreath
//! algebras A_n^C(F) with F = G^op and level ℓ = -k.
//!
//! A word in Q_± applied to the regular module A_m is realised on an explicit
//! basis: Q_+ is induction A_{n+1} ⊗_{A_n} -, free over the coset
//! representatives of [`RepTable`], and Q_- is restriction. The index of a
//! basis vector is a mixed-radix number whose digits are the representatives
//! of the Q_+ letters, with the basis of A_m as the least significant digit.
//!
//! Generators act by the standard bimodule maps. The left crossing t' and the
//! decorated left caps are obtained by inverting the matrix of the inversion
//! relation on the regular module of each level; naturality then determines
//! them everywhere. Every other generator is expanded into these.

use crate::diagram::{self, DiagramError, Gen, Morphism, ObjectWord, Sign, Slice};
use crate::frobenius::FrobeniusAlgebra;
use crate::linalg::{sparse_solve, SparseMatrix, SparseVec};
use crate::macros::Heis;
use crate::scalar::Scalar;
use crate::wreath::{AWElement, CycloParams, CyclotomicAlgebra, RepTable, WreathError, WreathRing, Word};
use rustc_hash::FxHashMap;
use std::sync::{Arc, Mutex, RwLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ActionError {
    #[error("no action is available for k = 0")]
    LevelZero,
    #[error("level {0} exceeds the configured bound {1}")]
    LevelBound(i64, usize),
    #[error("the inversion matrix is singular at level {0}")]
    Singular(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Wreath(#[from] WreathError),
}

type Decomp = Arc<Vec<(u32, Word, Scalar)>>;

/// Left crossing and decorated left caps on the regular module at one level.
struct InversionBlock {
    /// per representative u: t'(u ⊗ 1) = Σ coef · z ⊗ a
    tp: Vec<Vec<(u32, Word, Scalar)>>,
    /// per representative u and label r·d + b: the decorated left cap of u ⊗ 1
    caps: Vec<Vec<AWElement>>,
}

/// A word of Q_± applied to the regular module A_base.
#[derive(Clone, Debug)]
pub struct Space {
    pub word: ObjectWord,
    pub base: usize,
    levels: Vec<i64>,
    dims: Vec<usize>,
}

impl Space {
    pub fn dim(&self) -> usize {
        self.dims[0]
    }
    pub fn is_zero(&self) -> bool {
        self.dims[0] == 0
    }
    /// Level of the module reached after the letters from `i` on.
    pub fn level(&self, i: usize) -> i64 {
        self.levels[i]
    }
}

pub struct ActionContext {
    pub heis: Heis,
    ring: Arc<WreathRing>,
    algs: Vec<CyclotomicAlgebra>,
    tables: Vec<RepTable>,
    d: usize,
    ell: usize,
    max_level: usize,
    parity: Vec<bool>,
    decomp: RwLock<FxHashMap<(u8, Word, u32, Word), Decomp>>,
    inversion: Mutex<FxHashMap<usize, Arc<InversionBlock>>>,
}

fn collect(pairs: impl IntoIterator<Item = (u32, Scalar)>) -> SparseVec {
    let mut m: FxHashMap<u32, Scalar> = FxHashMap::default();
    for (i, c) in pairs {
        *m.entry(i).or_insert_with(Scalar::zero) += &c;
    }
    crate::linalg::sparse_from_map(m)
}

fn add_into(out: &mut FxHashMap<u32, Scalar>, v: &SparseVec, offset: usize, c: &Scalar) {
    for (i, x) in v {
        *out.entry(offset as u32 + *i).or_insert_with(Scalar::zero) += &(x * c);
    }
}

impl ActionContext {
    /// Context for Heis_{G,k} with k < 0, the zero cyclotomic parameters and
    /// levels up to `max_level`.
    pub fn new(alg: Arc<FrobeniusAlgebra>, k: i64, max_level: usize) -> Result<Self, ActionError> {
        if k == 0 {
            return Err(ActionError::LevelZero);
        }
        if k > 0 {
            return Err(ActionError::Unsupported("direct action needs k < 0; use the flip symmetry".into()));
        }
        let f = Arc::new(alg.opposite());
        let params = CycloParams::zero(&f, (-k) as usize);
        Self::with_params(alg, k, params, max_level)
    }

    /// Context with explicit cyclotomic parameters, given as elements of G^op.
    pub fn with_params(
        alg: Arc<FrobeniusAlgebra>,
        k: i64,
        params: CycloParams,
        max_level: usize,
    ) -> Result<Self, ActionError> {
        if k >= 0 {
            return Err(if k == 0 {
                ActionError::LevelZero
            } else {
                ActionError::Unsupported("direct action needs k < 0".into())
            });
        }
        if params.level() != (-k) as usize {
            return Err(ActionError::Unsupported(format!(
                "cyclotomic level {} does not match k = {k}",
                params.level()
            )));
        }
        let f = Arc::new(alg.opposite());
        let ring = Arc::new(WreathRing::cyclotomic(f, params, max_level)?);
        let algs = (0..=max_level).map(|n| CyclotomicAlgebra::new(ring.clone(), n)).collect::<Result<Vec<_>, _>>()?;
        let d = alg.dim();
        let ell = (-k) as usize;
        let tables = (0..max_level).map(|n| RepTable::new(n, d, ell)).collect();
        let parity = (0..d).map(|i| alg.parity(i)).collect();
        Ok(ActionContext {
            heis: Heis::new(alg, k),
            ring,
            algs,
            tables,
            d,
            ell,
            max_level,
            parity,
            decomp: RwLock::new(FxHashMap::default()),
            inversion: Mutex::new(FxHashMap::default()),
        })
    }

    pub fn k(&self) -> i64 {
        self.heis.k
    }
    pub fn max_level(&self) -> usize {
        self.max_level
    }
    pub fn algebra(&self, n: usize) -> &CyclotomicAlgebra {
        &self.algs[n]
    }
    pub fn ring(&self) -> &Arc<WreathRing> {
        &self.ring
    }

    fn reps(&self, n: usize) -> usize {
        (n + 1) * self.d * self.ell
    }

    fn rep_parity(&self, u: usize) -> bool {
        self.parity[(u / self.ell) % self.d]
    }

    pub fn space(&self, word: &[Sign], base: usize) -> Result<Space, ActionError> {
        let len = word.len();
        let mut levels = vec![0i64; len + 1];
        levels[len] = base as i64;
        let mut zero = false;
        for i in (0..len).rev() {
            levels[i] = levels[i + 1] + if word[i] == Sign::Up { 1 } else { -1 };
            if levels[i] < 0 {
                zero = true;
            }
            if levels[i] > self.max_level as i64 {
                return Err(ActionError::LevelBound(levels[i], self.max_level));
            }
        }
        if base > self.max_level {
            return Err(ActionError::LevelBound(base as i64, self.max_level));
        }
        let mut dims = vec![0usize; len + 1];
        if !zero {
            dims[len] = self.algs[base].dim();
            for i in (0..len).rev() {
                dims[i] = match word[i] {
                    Sign::Up => self.reps(levels[i + 1] as usize) * dims[i + 1],
                    Sign::Down => dims[i + 1],
                };
            }
        }
        Ok(Space { word: word.to_vec(), base, levels, dims })
    }

    /// Index of `outer ⊗ 1` with the unit of A_base as the last digit.
    pub fn unit_index(&self, base: usize) -> usize {
        self.algs[base].index(&Word::ONE)
    }

    /// Vectors outer ⊗ 1 for every choice of representatives; they generate
    /// the space as a right A_base-module.
    pub fn generator_vectors(&self, sp: &Space) -> Vec<usize> {
        if sp.is_zero() {
            return vec![];
        }
        let da = sp.dims[sp.word.len()];
        let count = sp.dim() / da;
        let one = self.unit_index(sp.base);
        (0..count).map(|o| o * da + one).collect()
    }

    /// a · rep_n(u) · right, written as Σ coef · rep_n(u') · a'.
    fn decompose(&self, n: usize, left: &Word, u: usize, right: &Word) -> Decomp {
        let key = (n as u8, *left, u as u32, *right);
        if let Some(v) = self.decomp.read().unwrap().get(&key) {
            return v.clone();
        }
        let table = &self.tables[n];
        let mut e = self.ring.mul_words(left, &table.rep(u));
        if *right != Word::ONE {
            // normalise the right factor first: x^e may need cyclotomic reduction
            let r = self.ring.mul_words(right, &Word::ONE);
            e = self.ring.mul(&e, &r);
        }
        let mut out = Vec::with_capacity(e.len());
        for (w, c) in e.sorted_terms() {
            let (u2, a2, neg) = table.decompose(&self.ring, &w);
            out.push((u2 as u32, a2, if neg { -c } else { c }));
        }
        let v = Arc::new(out);
        self.decomp.write().unwrap().insert(key, v.clone());
        v
    }

    /// Left action of `a` ∈ A_{level(i)} on the suffix space starting at `i`.
    pub fn act(&self, sp: &Space, i: usize, a: &AWElement, v: &SparseVec) -> SparseVec {
        if v.is_empty() || a.is_zero() {
            return vec![];
        }
        let len = sp.word.len();
        if i == len {
            let alg = &self.algs[sp.base];
            let mut out = AWElement::zero();
            for (idx, c) in v {
                let w = alg.word(*idx as usize);
                for (aw, ac) in &a.terms {
                    self.ring.mul_words_into(aw, &w, &(c * ac), &mut out);
                }
            }
            return alg.to_vec(&out);
        }
        match sp.word[i] {
            Sign::Down => self.act(sp, i + 1, a, v),
            Sign::Up => {
                let n = sp.levels[i + 1] as usize;
                let inner = sp.dims[i + 1];
                let mut groups: FxHashMap<(u32, Word), Vec<(u32, Scalar)>> = FxHashMap::default();
                for (idx, c) in v {
                    let u = *idx as usize / inner;
                    let j = (*idx as usize % inner) as u32;
                    for (aw, ac) in &a.terms {
                        let cc = c * ac;
                        for (u2, a2, coef) in self.decompose(n, aw, u, &Word::ONE).iter() {
                            groups.entry((*u2, *a2)).or_default().push((j, &cc * coef));
                        }
                    }
                }
                self.tensor_out(sp, i + 1, groups)
            }
        }
    }

    /// Σ rep(u') ⊗ a' · w over groups keyed by (u', a'), where the suffix at
    /// `ix` is the inner space.
    fn tensor_out(&self, sp: &Space, ix: usize, groups: FxHashMap<(u32, Word), Vec<(u32, Scalar)>>) -> SparseVec {
        let inner = sp.dims[ix];
        let mut out: FxHashMap<u32, Scalar> = FxHashMap::default();
        for ((u2, a2), pairs) in groups {
            let w = collect(pairs);
            if w.is_empty() {
                continue;
            }
            let r = self.act(sp, ix, &AWElement::from_word(a2), &w);
            add_into(&mut out, &r, u2 as usize * inner, &Scalar::one());
        }
        crate::linalg::sparse_from_map(out)
    }

    fn is_primitive(g: &Gen) -> bool {
        matches!(
            g,
            Gen::Dot | Gen::Token(_) | Gen::Crossing | Gen::Cup | Gen::Cap | Gen::TCrossPrime | Gen::DecLeftCap(..)
        )
    }

    fn expansion(&self, g: &Gen) -> Result<Morphism, ActionError> {
        let h = &self.heis;
        Ok(match g {
            Gen::DownDot => h.ddot_def(),
            Gen::DownToken(f) => h.dtoken_def(f),
            Gen::DownCrossing => h.ds_def(),
            Gen::TCross => h.t_def(),
            Gen::LeftCup => h.lcup_def(),
            Gen::LeftCap => h.lcap_def(),
            Gen::DecLeftCup(..) => {
                return Err(ActionError::Unsupported("decorated left cups exist only for k > 0".into()))
            }
            _ => unreachable!("primitive generator"),
        })
    }

    /// Applies one slice to a vector of `sp`, returning the target space.
    pub fn apply_slice(&self, sp: &Space, pos: usize, gen: &Gen, v: &SparseVec) -> Result<(Space, SparseVec), ActionError> {
        let w2 = diagram::apply_slice(&sp.word, &Slice { pos, gen: gen.clone() })?;
        let sp2 = self.space(&w2, sp.base)?;
        if sp.is_zero() || sp2.is_zero() || v.is_empty() {
            return Ok((sp2, vec![]));
        }
        if !Self::is_primitive(gen) {
            let e = self.expansion(gen)?;
            let mut out: FxHashMap<u32, Scalar> = FxHashMap::default();
            for (d, c) in &e.terms {
                let mut cur = sp.clone();
                let mut vec = v.clone();
                for s in &d.slices {
                    let (nsp, nv) = self.apply_slice(&cur, pos + s.pos, &s.gen, &vec)?;
                    cur = nsp;
                    vec = nv;
                }
                add_into(&mut out, &vec, 0, c);
            }
            return Ok((sp2, crate::linalg::sparse_from_map(out)));
        }
        let inner = sp.dims[pos];
        let inner2 = sp2.dims[pos];
        let mut by_outer: FxHashMap<usize, Vec<(u32, Scalar)>> = FxHashMap::default();
        for (idx, c) in v {
            by_outer.entry(*idx as usize / inner).or_default().push(((*idx as usize % inner) as u32, c.clone()));
        }
        let mut out: FxHashMap<u32, Scalar> = FxHashMap::default();
        for (outer, pairs) in by_outer {
            let pp = self.prefix_parity(sp, pos, outer);
            let r = self.apply_local(sp, &sp2, pos, gen, &pairs, pp)?;
            add_into(&mut out, &r, outer * inner2, &Scalar::one());
        }
        Ok((sp2, crate::linalg::sparse_from_map(out)))
    }

    fn prefix_parity(&self, sp: &Space, pos: usize, mut outer: usize) -> bool {
        let mut p = false;
        for i in (0..pos).rev() {
            if sp.word[i] == Sign::Up {
                let r = self.reps(sp.levels[i + 1] as usize);
                p ^= self.rep_parity(outer % r);
                outer /= r;
            }
        }
        p
    }

    /// A primitive generator on the suffix at `p`; `pp` is the parity of the
    /// representatives to its left.
    fn apply_local(
        &self,
        sp: &Space,
        sp2: &Space,
        p: usize,
        gen: &Gen,
        v: &[(u32, Scalar)],
        pp: bool,
    ) -> Result<SparseVec, ActionError> {
        let mut groups: FxHashMap<(u32, Word), Vec<(u32, Scalar)>> = FxHashMap::default();
        match gen {
            Gen::Dot | Gen::Token(_) => {
                let n = sp.levels[p + 1] as usize;
                let dim_x = sp.dims[p + 1];
                let factors: Vec<(Word, Scalar, bool)> = match gen {
                    Gen::Dot => vec![(Word::x(n, 1), Scalar::one(), false)],
                    Gen::Token(f) => f
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(b, c)| (Word::token(n, b as u8), c.clone(), self.parity[b]))
                        .collect(),
                    _ => unreachable!(),
                };
                for (idx, c) in v {
                    let u = *idx as usize / dim_x;
                    let j = (*idx as usize % dim_x) as u32;
                    for (y, fc, odd) in &factors {
                        let neg = *odd && (pp ^ self.rep_parity(u));
                        let cc = if neg { -(c * fc) } else { c * fc };
                        for (u2, a2, coef) in self.decompose(n, &Word::ONE, u, y).iter() {
                            groups.entry((*u2, *a2)).or_default().push((j, &cc * coef));
                        }
                    }
                }
                Ok(self.tensor_out(sp2, p + 1, groups))
            }
            Gen::Crossing => {
                let n = sp.levels[p + 2] as usize;
                let dim_x = sp.dims[p + 2];
                let r_n = self.reps(n);
                let id_n = self.tables[n].identity_index();
                let mut ys: FxHashMap<usize, Vec<(Word, Scalar)>> = FxHashMap::default();
                for (idx, c) in v {
                    let idx = *idx as usize;
                    let j = idx % dim_x;
                    let u2 = (idx / dim_x) % r_n;
                    let u1 = idx / dim_x / r_n;
                    let y = ys.entry(u2).or_insert_with(|| {
                        self.ring.mul_words(&self.tables[n].rep(u2), &Word::s(n)).sorted_terms()
                    });
                    for (yw, yc) in y.iter() {
                        let cc = c * yc;
                        for (u1b, a2, coef) in self.decompose(n + 1, &Word::ONE, u1, yw).iter() {
                            groups
                                .entry((*u1b, *a2))
                                .or_default()
                                .push(((id_n * dim_x + j) as u32, &cc * coef));
                        }
                    }
                }
                Ok(self.tensor_out(sp2, p + 1, groups))
            }
            Gen::Cup => {
                let n = sp.levels[p] as usize;
                let dim_x = sp.dims[p];
                let off = self.tables[n].identity_index() * dim_x;
                Ok(collect(v.iter().map(|(i, c)| (*i + off as u32, c.clone()))))
            }
            Gen::Cap => {
                let n = sp.levels[p + 2] as usize;
                let dim_x = sp.dims[p + 2];
                let table = &self.tables[n - 1];
                let mut by_u: FxHashMap<usize, Vec<(u32, Scalar)>> = FxHashMap::default();
                for (idx, c) in v {
                    by_u.entry(*idx as usize / dim_x).or_default().push(((*idx as usize % dim_x) as u32, c.clone()));
                }
                let mut out: FxHashMap<u32, Scalar> = FxHashMap::default();
                for (u, pairs) in by_u {
                    let r = self.act(sp2, p, &AWElement::from_word(table.rep(u)), &collect(pairs));
                    add_into(&mut out, &r, 0, &Scalar::one());
                }
                Ok(crate::linalg::sparse_from_map(out))
            }
            Gen::TCrossPrime => {
                let n = sp.levels[p + 2] as usize;
                if n == 0 {
                    return Ok(vec![]);
                }
                let dim_x = sp.dims[p + 2];
                let block = self.inversion_block(n)?;
                for (idx, c) in v {
                    let u = *idx as usize / dim_x;
                    let j = (*idx as usize % dim_x) as u32;
                    for (z, a, coef) in &block.tp[u] {
                        groups.entry((*z, *a)).or_default().push((j, c * coef));
                    }
                }
                // "+-"X: the representative z sits over the inner space "-"X
                Ok(self.tensor_out(sp2, p + 1, groups))
            }
            Gen::DecLeftCap(r, f) => {
                let r = *r as usize;
                if r >= self.ell {
                    return Err(DiagramError::ParamOutOfRange(format!(
                        "decorated left cap needs r < {}, got {r}",
                        self.ell
                    ))
                    .into());
                }
                let n = sp.levels[p + 2] as usize;
                let dim_x = sp.dims[p + 2];
                let block = self.inversion_block(n)?;
                let alg = &self.heis.alg;
                let coeffs: Vec<(usize, Scalar)> = (0..self.d)
                    .map(|b| (b, alg.tr(&alg.mul(alg.dual(b), f))))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                let mut out: FxHashMap<u32, Scalar> = FxHashMap::default();
                let mut by_u: FxHashMap<usize, Vec<(u32, Scalar)>> = FxHashMap::default();
                for (idx, c) in v {
                    by_u.entry(*idx as usize / dim_x).or_default().push(((*idx as usize % dim_x) as u32, c.clone()));
                }
                for (u, pairs) in by_u {
                    let w = collect(pairs);
                    for (b, cb) in &coeffs {
                        let e = &block.caps[u][r * self.d + b];
                        let sign = Scalar::sign(self.parity[*b] && pp);
                        let res = self.act(sp2, p, e, &w);
                        add_into(&mut out, &res, 0, &(cb * &sign));
                    }
                }
                Ok(crate::linalg::sparse_from_map(out))
            }
            _ => unreachable!("not primitive"),
        }
    }

    /// Solves the inversion relation on the regular module A_n.
    fn inversion_block(&self, n: usize) -> Result<Arc<InversionBlock>, ActionError> {
        if let Some(b) = self.inversion.lock().unwrap().get(&n) {
            return Ok(b.clone());
        }
        let block = Arc::new(self.build_inversion(n)?);
        self.inversion.lock().unwrap().insert(n, block.clone());
        Ok(block)
    }

    fn build_inversion(&self, n: usize) -> Result<InversionBlock, ActionError> {
        let h = &self.heis;
        let dn = self.algs[n].dim();
        let target = self.space(&diagram::word("-+"), n)?;
        let src = self.space(&diagram::word("+-"), n)?;
        let n_src = src.dim();
        let t = h.t_def();
        let mut cols: Vec<SparseVec> = Vec::with_capacity(target.dim());
        for e in 0..n_src {
            cols.push(self.apply_on(&t, &src, &vec![(e as u32, Scalar::one())])?);
        }
        let base = self.space(&[], n)?;
        for r in 0..self.ell {
            for b in 0..self.d {
                let cup = h.inversion_cup(r as u32, &h.bdual(b));
                for a in 0..dn {
                    cols.push(self.apply_on(&cup, &base, &vec![(a as u32, Scalar::one())])?);
                }
            }
        }
        let size = target.dim();
        debug_assert_eq!(cols.len(), size);
        let mat = SparseMatrix { rows: size, cols };
        let one = self.unit_index(n);
        let nreps = self.reps(n);
        let rhs: Vec<SparseVec> = (0..nreps).map(|u| vec![((u * dn + one) as u32, Scalar::one())]).collect();
        let sol = sparse_solve(&mat, &rhs).ok_or(ActionError::Singular(n))?;
        let alg = &self.algs[n];
        let mut tp = Vec::with_capacity(nreps);
        let mut caps = Vec::with_capacity(nreps);
        for y in sol {
            let mut t_part = Vec::new();
            let mut c_part = vec![AWElement::zero(); self.ell * self.d];
            for (i, c) in y {
                let i = i as usize;
                if i < n_src {
                    t_part.push(((i / dn) as u32, alg.word(i % dn), c));
                } else {
                    let rest = i - n_src;
                    c_part[rest / dn].add_term(alg.word(rest % dn), c);
                }
            }
            tp.push(t_part);
            caps.push(c_part);
        }
        Ok(InversionBlock { tp, caps })
    }

    /// Forces the inversion block at level n (for timing and invertibility checks).
    pub fn check_inversion(&self, n: usize) -> Result<(), ActionError> {
        self.inversion_block(n).map(|_| ())
    }

    /// Applies every term of `m` to a vector of `sp`.
    pub fn apply_on(&self, m: &Morphism, sp: &Space, v: &SparseVec) -> Result<SparseVec, ActionError> {
        let mut out: FxHashMap<u32, Scalar> = FxHashMap::default();
        for (d, c) in &m.terms {
            let mut cur = sp.clone();
            let mut vec = v.clone();
            for s in &d.slices {
                if vec.is_empty() {
                    break;
                }
                let (nsp, nv) = self.apply_slice(&cur, s.pos, &s.gen, &vec)?;
                cur = nsp;
                vec = nv;
            }
            add_into(&mut out, &vec, 0, c);
        }
        Ok(crate::linalg::sparse_from_map(out))
    }

    /// Applies `m` to the basis vector `idx` of its domain over A_base.
    pub fn apply(&self, m: &Morphism, base: usize, v: &SparseVec) -> Result<SparseVec, ActionError> {
        let sp = self.space(&m.domain, base)?;
        self.apply_on(m, &sp, v)
    }

    /// Full matrix of `m` at A_base, columns indexed by the domain basis.
    pub fn matrix(&self, m: &Morphism, base: usize) -> Result<EvalResult, ActionError> {
        let sp = self.space(&m.domain, base)?;
        let sp2 = self.space(&m.codomain, base)?;
        let mut cols = Vec::with_capacity(sp.dim());
        for e in 0..sp.dim() {
            cols.push(self.apply_on(m, &sp, &vec![(e as u32, Scalar::one())])?);
        }
        Ok(EvalResult { base, domain_dim: sp.dim(), codomain_dim: sp2.dim(), matrix: SparseMatrix { rows: sp2.dim(), cols } })
    }

    /// Compares two parallel morphisms on the generators outer ⊗ 1 at each base
    /// level. Returns the first level where they differ.
    pub fn check_equal(&self, lhs: &Morphism, rhs: &Morphism, levels: &[usize]) -> Result<Option<usize>, ActionError> {
        if lhs.domain != rhs.domain || lhs.codomain != rhs.codomain {
            return Err(DiagramError::BoundaryMismatch {
                expected: format!("{} -> {}", diagram::word_str(&lhs.domain), diagram::word_str(&lhs.codomain)),
                found: format!("{} -> {}", diagram::word_str(&rhs.domain), diagram::word_str(&rhs.codomain)),
            }
            .into());
        }
        let diff = lhs.minus(rhs);
        for &m in levels {
            if !self.vanishes(&diff, m)? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    /// Whether `m` acts as zero on A_base.
    pub fn vanishes(&self, m: &Morphism, base: usize) -> Result<bool, ActionError> {
        let sp = self.space(&m.domain, base)?;
        for g in self.generator_vectors(&sp) {
            if !self.apply_on(m, &sp, &vec![(g as u32, Scalar::one())])?.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Action of a closed diagram on 1 ∈ A_base, as an element of A_base.
    pub fn closed_value(&self, m: &Morphism, base: usize) -> Result<AWElement, ActionError> {
        let sp = self.space(&[], base)?;
        let v = self.apply_on(m, &sp, &vec![(self.unit_index(base) as u32, Scalar::one())])?;
        Ok(self.algs[base].from_vec(&v))
    }
}

/// Matrix of a morphism at one base level.
#[derive(Clone, Debug)]
pub struct EvalResult {
    pub base: usize,
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub matrix: SparseMatrix,
}

impl EvalResult {
    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

/// Evaluation for any k ≠ 0: directly when k < 0, through ω otherwise.
pub struct Oracle {
    pub heis: Heis,
    ctx: ActionContext,
    flipped: bool,
}

impl Oracle {
    pub fn new(alg: Arc<FrobeniusAlgebra>, k: i64, max_level: usize) -> Result<Self, ActionError> {
        if k == 0 {
            return Err(ActionError::LevelZero);
        }
        let heis = Heis::new(alg.clone(), k);
        if k < 0 {
            Ok(Oracle { ctx: ActionContext::new(alg, k, max_level)?, heis, flipped: false })
        } else {
            Ok(Oracle { ctx: ActionContext::new(alg, -k, max_level)?, heis, flipped: true })
        }
    }

    /// Oracle with explicit cyclotomic parameters (elements of G^op) for the
    /// context at level -|k|.
    pub fn with_params(alg: Arc<FrobeniusAlgebra>, k: i64, params: CycloParams, max_level: usize) -> Result<Self, ActionError> {
        if k == 0 {
            return Err(ActionError::LevelZero);
        }
        let heis = Heis::new(alg.clone(), k);
        let ctx = ActionContext::with_params(alg, -k.abs(), params, max_level)?;
        Ok(Oracle { ctx, heis, flipped: k > 0 })
    }

    pub fn context(&self) -> &ActionContext {
        &self.ctx
    }
    pub fn is_flipped(&self) -> bool {
        self.flipped
    }

    /// The morphism the underlying action evaluates.
    pub fn transport(&self, m: &Morphism) -> Morphism {
        if self.flipped {
            m.omega(&self.heis.alg)
        } else {
            m.clone()
        }
    }

    pub fn check_equal(&self, lhs: &Morphism, rhs: &Morphism, levels: &[usize]) -> Result<Option<usize>, ActionError> {
        self.ctx.check_equal(&self.transport(lhs), &self.transport(rhs), levels)
    }

    pub fn vanishes(&self, m: &Morphism, base: usize) -> Result<bool, ActionError> {
        self.ctx.vanishes(&self.transport(m), base)
    }

    pub fn matrix(&self, m: &Morphism, base: usize) -> Result<EvalResult, ActionError> {
        self.ctx.matrix(&self.transport(m), base)
    }
}
