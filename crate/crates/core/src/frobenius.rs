//! Graded Frobenius superalgebras with even trace.
//!
//! An algebra is given by a homogeneous basis, structure constants and a
//! trace vector. Construction validates the data and derives the top degree,
//! the left dual basis, the Nakayama automorphism and its order.

use crate::linalg::Matrix;
use crate::scalar::Scalar;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Coefficient vector over the basis of an algebra.
pub type Element = Vec<Scalar>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Grading {
    pub degree: i64,
    pub parity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSymbol {
    pub symbol: String,
    pub grading: Grading,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrobeniusError {
    #[error("multiplication is not associative on ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("no two-sided unit exists")]
    NoUnit,
    #[error("trace is not even: tr({0}) != 0 for an odd basis element")]
    TraceNotEven(String),
    #[error("trace is degenerate: the pairing matrix tr(ab) is singular (first dependent row at {0})")]
    TraceDegenerate(String),
    #[error("grading violation: {0}")]
    GradingViolation(String),
    #[error("Nakayama automorphism is underdetermined or not an automorphism: {0}")]
    Underdetermined(String),
    #[error("Nakayama automorphism has no finite order up to {0}")]
    InfiniteOrder(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown basis symbol `{0}`")]
    UnknownSymbol(String),
}

/// Raw description of an algebra prior to validation.
#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    pub name: String,
    pub basis: Vec<BasisSymbol>,
    /// products[a][b] = coefficient vector of basis_a * basis_b
    pub products: Vec<Vec<Element>>,
    pub trace: Element,
}

#[derive(Clone, Debug)]
pub struct FrobeniusAlgebra {
    pub name: String,
    pub basis: Vec<BasisSymbol>,
    mult: Vec<Vec<Element>>,
    trace: Element,
    top_degree: i64,
    unit: Element,
    dual: Vec<Element>,
    psi: Vec<Element>,
    psi_inv: Vec<Element>,
    order: usize,
}

const MAX_ORDER: usize = 4096;

fn zero_vec(n: usize) -> Element {
    vec![Scalar::zero(); n]
}

fn unit_vec(n: usize, i: usize) -> Element {
    let mut v = zero_vec(n);
    v[i] = Scalar::one();
    v
}

pub fn add_scaled(acc: &mut [Scalar], v: &[Scalar], c: &Scalar) {
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += &(b * c);
        }
    }
}

pub fn is_zero(v: &[Scalar]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn scale(v: &[Scalar], c: &Scalar) -> Element {
    v.iter().map(|x| x * c).collect()
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Element {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Element {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl FrobeniusAlgebra {
    pub fn build(spec: AlgebraSpec) -> Result<Self, FrobeniusError> {
        let AlgebraSpec { name, basis, products, trace } = spec;
        let d = basis.len();
        let syms: Vec<String> = basis.iter().map(|b| b.symbol.clone()).collect();
        let sym = |i: usize| syms[i].clone();
        if d == 0 {
            return Err(FrobeniusError::GradingViolation("empty basis".into()));
        }
        if products.len() != d || products.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) {
            return Err(FrobeniusError::Parse("product table has wrong shape".into()));
        }
        if trace.len() != d {
            return Err(FrobeniusError::Parse("trace vector has wrong length".into()));
        }
        for b in &basis {
            if b.grading.degree < 0 {
                return Err(FrobeniusError::GradingViolation(format!("basis element {} has negative degree", b.symbol)));
            }
        }
        for a in 0..d {
            for b in 0..d {
                let ga = basis[a].grading;
                let gb = basis[b].grading;
                for (e, c) in products[a][b].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let ge = basis[e].grading;
                    if ge.degree != ga.degree + gb.degree || ge.parity != (ga.parity ^ gb.parity) {
                        return Err(FrobeniusError::GradingViolation(format!(
                            "product ({}, {}) has a component along {} of the wrong grading",
                            sym(a),
                            sym(b),
                            sym(e)
                        )));
                    }
                }
            }
        }
        let mut alg = FrobeniusAlgebra {
            name,
            basis,
            mult: products,
            trace,
            top_degree: 0,
            unit: Vec::new(),
            dual: Vec::new(),
            psi: Vec::new(),
            psi_inv: Vec::new(),
            order: 1,
        };
        // associativity on basis triples
        for a in 0..d {
            for b in 0..d {
                let ab = alg.mult[a][b].clone();
                for c in 0..d {
                    let left = alg.mul(&ab, &unit_vec(d, c));
                    let right = alg.mul(&unit_vec(d, a), &alg.mult[b][c].clone());
                    if left != right {
                        return Err(FrobeniusError::NotAssociative(sym(a), sym(b), sym(c)));
                    }
                }
            }
        }
        alg.unit = alg.find_unit().ok_or(FrobeniusError::NoUnit)?;
        alg.top_degree = alg.basis.iter().map(|b| b.grading.degree).max().unwrap();
        for (i, t) in alg.trace.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            if alg.basis[i].grading.parity {
                return Err(FrobeniusError::TraceNotEven(sym(i)));
            }
            if alg.basis[i].grading.degree != alg.top_degree {
                return Err(FrobeniusError::GradingViolation(format!(
                    "trace is nonzero on {} which is not in the top degree {}",
                    sym(i),
                    alg.top_degree
                )));
            }
        }
        let pairing = alg.pairing_matrix();
        let Some(pinv) = pairing.inverse() else {
            let rank_rows = {
                let mut m = pairing.clone();
                m.rref().len()
            };
            return Err(FrobeniusError::TraceDegenerate(sym(rank_rows.min(d - 1))));
        };
        // dual basis: M P = I, so M = P^{-1}; row a of M is the coordinate vector of ǎ
        alg.dual = (0..d).map(|a| pinv.row(a).to_vec()).collect();
        // Nakayama: Σ_c P[g][c] N_{f,c} = (-1)^{f̄ḡ} P[f][g]
        let mut psi = Vec::with_capacity(d);
        for f in 0..d {
            let rhs: Element = (0..d)
                .map(|g| {
                    let s = Scalar::sign(alg.basis[f].grading.parity && alg.basis[g].grading.parity);
                    &s * pairing.get(f, g)
                })
                .collect();
            let sol = pairing.solve(&rhs).ok_or_else(|| FrobeniusError::Underdetermined(sym(f)))?;
            psi.push(sol);
        }
        alg.psi = psi;
        alg.check_psi_automorphism()?;
        let psi_m = alg.psi_matrix();
        let inv = psi_m.inverse().ok_or_else(|| FrobeniusError::Underdetermined("psi singular".into()))?;
        // psi_matrix has columns = images, so the inverse's columns are images of ψ^{-1}
        alg.psi_inv = (0..d).map(|j| (0..d).map(|i| inv.get(i, j).clone()).collect()).collect();
        let mut pow = psi_m.clone();
        let id = Matrix::identity(d);
        let mut order = 1;
        while pow != id {
            order += 1;
            if order > MAX_ORDER {
                return Err(FrobeniusError::InfiniteOrder(MAX_ORDER));
            }
            pow = psi_m.mul(&pow);
        }
        alg.order = order;
        Ok(alg)
    }

    fn find_unit(&self) -> Option<Element> {
        let d = self.dim();
        // unknown e = Σ e_i basis_i; conditions e·b = b and b·e = b for all b
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for b in 0..d {
            for out in 0..d {
                let target = if out == b { Scalar::one() } else { Scalar::zero() };
                rows.push((0..d).map(|i| self.mult[i][b][out].clone()).collect::<Vec<_>>());
                rhs.push(target.clone());
                rows.push((0..d).map(|i| self.mult[b][i][out].clone()).collect::<Vec<_>>());
                rhs.push(target);
            }
        }
        Matrix::from_rows(rows).solve(&rhs)
    }

    fn check_psi_automorphism(&self) -> Result<(), FrobeniusError> {
        let d = self.dim();
        for a in 0..d {
            for (e, c) in self.psi[a].iter().enumerate() {
                if !c.is_zero() && self.basis[e].grading != self.basis[a].grading {
                    return Err(FrobeniusError::Underdetermined(format!("ψ({}) is not homogeneous", self.basis[a].symbol)));
                }
            }
            for b in 0..d {
                let lhs = self.apply_psi(&self.mult[a][b]);
                let rhs = self.mul(&self.psi[a], &self.psi[b]);
                if lhs != rhs {
                    return Err(FrobeniusError::Underdetermined(format!(
                        "ψ is not multiplicative on ({}, {})",
                        self.basis[a].symbol, self.basis[b].symbol
                    )));
                }
            }
        }
        Ok(())
    }

    fn psi_matrix(&self) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                m.set(i, j, self.psi[j][i].clone());
            }
        }
        m
    }

    pub fn pairing_matrix(&self) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                m.set(a, b, self.tr(&self.mult[a][b]));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn top_degree(&self) -> i64 {
        self.top_degree
    }
    pub fn nakayama_order(&self) -> usize {
        self.order
    }
    pub fn grading(&self, i: usize) -> Grading {
        self.basis[i].grading
    }
    pub fn parity(&self, i: usize) -> bool {
        self.basis[i].grading.parity
    }
    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].grading.degree
    }
    pub fn unit(&self) -> &Element {
        &self.unit
    }
    /// Index of the unit when it is itself a basis element.
    pub fn unit_index(&self) -> Option<usize> {
        (0..self.dim()).find(|&i| self.unit == unit_vec(self.dim(), i))
    }
    pub fn basis_elem(&self, i: usize) -> Element {
        unit_vec(self.dim(), i)
    }
    pub fn zero(&self) -> Element {
        zero_vec(self.dim())
    }
    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.symbol == symbol)
    }
    pub fn element(&self, terms: &[(Scalar, &str)]) -> Result<Element, FrobeniusError> {
        let mut v = self.zero();
        for (c, s) in terms {
            let i = self.index_of(s).ok_or_else(|| FrobeniusError::UnknownSymbol(s.to_string()))?;
            v[i] += c;
        }
        Ok(v)
    }
    /// Structure constants of basis_a * basis_b.
    pub fn basis_product(&self, a: usize, b: usize) -> &Element {
        &self.mult[a][b]
    }
    pub fn trace_vector(&self) -> &Element {
        &self.trace
    }

    pub fn mul(&self, f: &[Scalar], g: &[Scalar]) -> Element {
        let d = self.dim();
        let mut out = zero_vec(d);
        for (a, fa) in f.iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for (b, gb) in g.iter().enumerate() {
                if gb.is_zero() {
                    continue;
                }
                add_scaled(&mut out, &self.mult[a][b], &(fa * gb));
            }
        }
        out
    }

    pub fn tr(&self, f: &[Scalar]) -> Scalar {
        f.iter().zip(&self.trace).map(|(a, b)| a * b).sum()
    }

    /// Left dual basis element ǎ, characterized by tr(ǎ b) = δ_ab.
    pub fn dual(&self, a: usize) -> &Element {
        &self.dual[a]
    }
    pub fn dual_basis(&self) -> &[Element] {
        &self.dual
    }

    pub fn psi_basis(&self, a: usize) -> &Element {
        &self.psi[a]
    }
    pub fn psi_inv_basis(&self, a: usize) -> &Element {
        &self.psi_inv[a]
    }
    pub fn apply_psi(&self, f: &[Scalar]) -> Element {
        self.apply_map(&self.psi, f)
    }
    pub fn apply_psi_inv(&self, f: &[Scalar]) -> Element {
        self.apply_map(&self.psi_inv, f)
    }
    /// ψ^r for any integer r.
    pub fn apply_psi_pow(&self, f: &[Scalar], r: i64) -> Element {
        let th = self.order as i64;
        let r = r.rem_euclid(th);
        let mut v = f.to_vec();
        for _ in 0..r {
            v = self.apply_psi(&v);
        }
        v
    }
    fn apply_map(&self, images: &[Element], f: &[Scalar]) -> Element {
        let mut out = self.zero();
        for (a, c) in f.iter().enumerate() {
            add_scaled(&mut out, &images[a], c);
        }
        out
    }

    /// (degree, parity) if `f` is nonzero and homogeneous.
    pub fn homogeneous_grading(&self, f: &[Scalar]) -> Option<Grading> {
        let mut g = None;
        for (i, c) in f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match g {
                None => g = Some(self.grading(i)),
                Some(h) if h != self.grading(i) => return None,
                _ => {}
            }
        }
        g
    }

    /// Splits `f` into homogeneous components, ordered by grading.
    pub fn homogeneous_components(&self, f: &[Scalar]) -> Vec<(Grading, Element)> {
        let mut map: BTreeMap<Grading, Element> = BTreeMap::new();
        for (i, c) in f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = map.entry(self.grading(i)).or_insert_with(|| zero_vec(f.len()));
            e[i] = c.clone();
        }
        map.into_iter().collect()
    }

    /// Super-opposite algebra: a ·op b = (-1)^{āb̄} b a, same trace.
    pub fn opposite(&self) -> FrobeniusAlgebra {
        let d = self.dim();
        let products = (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| scale(&self.mult[b][a], &Scalar::sign(self.parity(a) && self.parity(b))))
                    .collect()
            })
            .collect();
        let name = match self.name.strip_suffix("^op") {
            Some(n) => n.to_string(),
            None => format!("{}^op", self.name),
        };
        FrobeniusAlgebra::build(AlgebraSpec { name, basis: self.basis.clone(), products, trace: self.trace.clone() })
            .expect("the opposite of a Frobenius superalgebra is Frobenius")
    }

    /// Graded super tensor product: (a⊗b)(a'⊗b') = (-1)^{b̄ ā'} aa' ⊗ bb'.
    pub fn tensor(&self, other: &FrobeniusAlgebra) -> FrobeniusAlgebra {
        let (d1, d2) = (self.dim(), other.dim());
        let idx = |i: usize, j: usize| i * d2 + j;
        let mut basis = Vec::with_capacity(d1 * d2);
        for i in 0..d1 {
            for j in 0..d2 {
                let (g1, g2) = (self.grading(i), other.grading(j));
                basis.push(BasisSymbol {
                    symbol: format!("{}*{}", self.basis[i].symbol, other.basis[j].symbol),
                    grading: Grading { degree: g1.degree + g2.degree, parity: g1.parity ^ g2.parity },
                });
            }
        }
        let n = d1 * d2;
        let mut products = vec![vec![zero_vec(n); n]; n];
        for a in 0..d1 {
            for b in 0..d2 {
                for a2 in 0..d1 {
                    for b2 in 0..d2 {
                        let s = Scalar::sign(other.parity(b) && self.parity(a2));
                        let p1 = &self.mult[a][a2];
                        let p2 = &other.mult[b][b2];
                        let out = &mut products[idx(a, b)][idx(a2, b2)];
                        for (e1, c1) in p1.iter().enumerate() {
                            if c1.is_zero() {
                                continue;
                            }
                            for (e2, c2) in p2.iter().enumerate() {
                                if !c2.is_zero() {
                                    out[idx(e1, e2)] += &(&s * &(c1 * c2));
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut trace = zero_vec(n);
        for i in 0..d1 {
            for j in 0..d2 {
                trace[idx(i, j)] = &self.trace[i] * &other.trace[j];
            }
        }
        FrobeniusAlgebra::build(AlgebraSpec {
            name: format!("{}*{}", self.name, other.name),
            basis,
            products,
            trace,
        })
        .expect("tensor product of Frobenius superalgebras is Frobenius")
    }

    /// Re-expresses the algebra in a new homogeneous basis; `change[i]` is the
    /// coordinate vector of the i-th new basis element in the old basis.
    pub fn change_basis(&self, change: &[Element], name: &str) -> Result<FrobeniusAlgebra, FrobeniusError> {
        let d = self.dim();
        let mut cm = Matrix::zeros(d, d);
        for (j, col) in change.iter().enumerate() {
            for i in 0..d {
                cm.set(i, j, col[i].clone());
            }
        }
        let inv = cm.inverse().ok_or_else(|| FrobeniusError::Parse("basis change is singular".into()))?;
        let to_new = |v: &[Scalar]| -> Element {
            (0..d).map(|i| (0..d).map(|j| inv.get(i, j) * &v[j]).sum()).collect()
        };
        let mut basis = Vec::with_capacity(d);
        for (j, col) in change.iter().enumerate() {
            let g = self
                .homogeneous_grading(col)
                .ok_or_else(|| FrobeniusError::GradingViolation(format!("new basis element {j} is not homogeneous")))?;
            basis.push(BasisSymbol { symbol: format!("e{j}"), grading: g });
        }
        let products = (0..d)
            .map(|a| (0..d).map(|b| to_new(&self.mul(&change[a], &change[b]))).collect())
            .collect();
        let trace = change.iter().map(|c| self.tr(c)).collect();
        FrobeniusAlgebra::build(AlgebraSpec { name: name.to_string(), basis, products, trace })
    }

    /// Random homogeneous change of basis (block-wise on each grading).
    pub fn random_basis_change<R: Rng>(&self, rng: &mut R, name: &str) -> FrobeniusAlgebra {
        let d = self.dim();
        let mut blocks: BTreeMap<Grading, Vec<usize>> = BTreeMap::new();
        for i in 0..d {
            blocks.entry(self.grading(i)).or_default().push(i);
        }
        loop {
            let mut change = vec![zero_vec(d); d];
            for idxs in blocks.values() {
                for &j in idxs {
                    for &i in idxs {
                        let v: i64 = rng.gen_range(-3..=3);
                        change[j][i] = Scalar::from_int(v);
                    }
                }
            }
            if let Ok(a) = self.change_basis(&change, name) {
                return a;
            }
        }
    }

    /// Left dual of an arbitrary basis given by coordinate vectors:
    /// returns Ě with tr(Ě_a E_b) = δ_ab.
    pub fn dual_of(&self, elems: &[Element]) -> Option<Vec<Element>> {
        let d = self.dim();
        let mut q = Matrix::zeros(d, d);
        for c in 0..d {
            for (b, e) in elems.iter().enumerate() {
                q.set(c, b, self.tr(&self.mul(&self.basis_elem(c), e)));
            }
        }
        let m = q.inverse()?;
        Some((0..d).map(|a| m.row(a).to_vec()).collect())
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        AlgebraSpec { name: self.name.clone(), basis: self.basis.clone(), products: self.mult.clone(), trace: self.trace.clone() }
    }

    pub fn format_element(&self, f: &[Scalar]) -> String {
        let mut parts = Vec::new();
        for (i, c) in f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = &self.basis[i].symbol;
            parts.push(if c.is_one() { s.clone() } else { format!("{c}*{s}") });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

// ---------------------------------------------------------------------------
// built-in algebras

pub fn trivial() -> FrobeniusAlgebra {
    FrobeniusAlgebra::build(AlgebraSpec {
        name: "trivial".into(),
        basis: vec![BasisSymbol { symbol: "1".into(), grading: Grading { degree: 0, parity: false } }],
        products: vec![vec![vec![Scalar::one()]]],
        trace: vec![Scalar::one()],
    })
    .unwrap()
}

/// 𝕜[z]/(z^n) with z even of degree 2 and tr(z^{n-1}) = 1.
pub fn trunc_poly(n: usize) -> FrobeniusAlgebra {
    assert!(n >= 1);
    let basis = (0..n)
        .map(|i| BasisSymbol {
            symbol: match i {
                0 => "1".to_string(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            },
            grading: Grading { degree: 2 * i as i64, parity: false },
        })
        .collect();
    let products = (0..n)
        .map(|a| (0..n).map(|b| if a + b < n { unit_vec(n, a + b) } else { zero_vec(n) }).collect())
        .collect();
    FrobeniusAlgebra::build(AlgebraSpec { name: format!("trunc-poly-{n}"), basis, products, trace: unit_vec(n, n - 1) })
        .unwrap()
}

/// 𝕜⟨c⟩/(c² − 1) with c odd of degree 0, tr(1) = 1, tr(c) = 0.
pub fn clifford() -> FrobeniusAlgebra {
    let e = |v: &[i64]| v.iter().map(|&x| Scalar::from_int(x)).collect::<Element>();
    FrobeniusAlgebra::build(AlgebraSpec {
        name: "clifford".into(),
        basis: vec![
            BasisSymbol { symbol: "1".into(), grading: Grading { degree: 0, parity: false } },
            BasisSymbol { symbol: "c".into(), grading: Grading { degree: 0, parity: true } },
        ],
        products: vec![vec![e(&[1, 0]), e(&[0, 1])], vec![e(&[0, 1]), e(&[1, 0])]],
        trace: e(&[1, 0]),
    })
    .unwrap()
}

/// Looks up a built-in algebra by name.
pub fn builtin(name: &str) -> Option<FrobeniusAlgebra> {
    match name {
        "trivial" => Some(trivial()),
        "clifford" => Some(clifford()),
        "exterior-2" => Some(exterior_two()),
        "matrix-2" => Some(matrix_two()),
        "quantum-plane" => Some(quantum_plane(-Scalar::one())),
        _ => {
            let n: usize = name.strip_prefix("trunc-poly-")?.parse().ok()?;
            (n >= 2).then(|| trunc_poly(n))
        }
    }
}

// ---------------------------------------------------------------------------
// TOML format

#[derive(Deserialize, Serialize)]
struct TomlAlgebra {
    algebra: TomlHeader,
    basis: Vec<TomlBasis>,
    #[serde(default)]
    product: Vec<TomlProduct>,
    trace: BTreeMap<String, Scalar>,
}
#[derive(Deserialize, Serialize)]
struct TomlHeader {
    name: String,
}
#[derive(Deserialize, Serialize)]
struct TomlBasis {
    symbol: String,
    degree: i64,
    parity: u8,
}
#[derive(Deserialize, Serialize)]
struct TomlProduct {
    left: String,
    right: String,
    result: Vec<(Scalar, String)>,
}

pub fn parse_toml(text: &str) -> Result<AlgebraSpec, FrobeniusError> {
    let raw: TomlAlgebra = toml::from_str(text).map_err(|e| FrobeniusError::Parse(e.to_string()))?;
    let basis: Vec<BasisSymbol> = raw
        .basis
        .iter()
        .map(|b| {
            if b.parity > 1 {
                return Err(FrobeniusError::Parse(format!("parity of {} must be 0 or 1", b.symbol)));
            }
            Ok(BasisSymbol { symbol: b.symbol.clone(), grading: Grading { degree: b.degree, parity: b.parity == 1 } })
        })
        .collect::<Result<_, _>>()?;
    let d = basis.len();
    let index = |s: &str| {
        basis.iter().position(|b| b.symbol == s).ok_or_else(|| FrobeniusError::UnknownSymbol(s.to_string()))
    };
    let mut products = vec![vec![zero_vec(d); d]; d];
    for p in &raw.product {
        let (a, b) = (index(&p.left)?, index(&p.right)?);
        let mut v = zero_vec(d);
        for (c, s) in &p.result {
            v[index(s)?] += c;
        }
        products[a][b] = v;
    }
    let mut trace = zero_vec(d);
    for (s, c) in &raw.trace {
        trace[index(s)?] = c.clone();
    }
    Ok(AlgebraSpec { name: raw.algebra.name, basis, products, trace })
}

pub fn to_toml(alg: &FrobeniusAlgebra) -> String {
    let d = alg.dim();
    let mut product = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let v = alg.basis_product(a, b);
            if is_zero(v) {
                continue;
            }
            product.push(TomlProduct {
                left: alg.basis[a].symbol.clone(),
                right: alg.basis[b].symbol.clone(),
                result: v
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(e, c)| (c.clone(), alg.basis[e].symbol.clone()))
                    .collect(),
            });
        }
    }
    let raw = TomlAlgebra {
        algebra: TomlHeader { name: alg.name.clone() },
        basis: alg
            .basis
            .iter()
            .map(|b| TomlBasis { symbol: b.symbol.clone(), degree: b.grading.degree, parity: b.grading.parity as u8 })
            .collect(),
        product,
        trace: alg
            .trace
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (alg.basis[i].symbol.clone(), c.clone()))
            .collect(),
    };
    toml::to_string(&raw).expect("serializable")
}

/// Resolves a built-in name or reads a TOML file.
pub fn load(name_or_path: &str) -> Result<FrobeniusAlgebra, FrobeniusError> {
    if let Some(a) = builtin(name_or_path) {
        return Ok(a);
    }
    let text = std::fs::read_to_string(name_or_path)
        .map_err(|e| FrobeniusError::Parse(format!("{name_or_path}: {e}")))?;
    FrobeniusAlgebra::build(parse_toml(&text)?)
}

// ---------------------------------------------------------------------------
// identity checks

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Element of F ⊗ F as a d×d coefficient table.
fn tensor_zero(d: usize) -> Vec<Element> {
    vec![zero_vec(d); d]
}

fn tensor_add(t: &mut [Element], a: &[Scalar], b: &[Scalar], c: &Scalar) {
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let xc = x * c;
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                t[i][j] += &(&xc * y);
            }
        }
    }
}

pub fn check_frobenius_identities(f: &FrobeniusAlgebra) -> Vec<IdentityCheck> {
    let d = f.dim();
    let mut out = Vec::new();
    let mut record = |identity: &'static str, witness: Option<String>| {
        out.push(IdentityCheck { identity, passed: witness.is_none(), witness });
    };
    let sym = |i: usize| f.basis[i].symbol.clone();

    let mut w = None;
    for a in 0..d {
        for b in 0..d {
            let v = f.tr(&f.mul(f.dual(a), &f.basis_elem(b)));
            let expect = if a == b { Scalar::one() } else { Scalar::zero() };
            if v != expect && w.is_none() {
                w = Some(format!("({}, {})", sym(a), sym(b)));
            }
        }
    }
    record("dual-basis-def", w);

    let mut w = None;
    for a in 0..d {
        for b in 0..d {
            let fa = f.basis_elem(a);
            let gb = f.basis_elem(b);
            let lhs = f.tr(&f.mul(&fa, &gb));
            let s = Scalar::sign(f.parity(a) && f.parity(b));
            let rhs = &s * &f.tr(&f.mul(&gb, f.psi_basis(a)));
            let inv = f.tr(f.psi_basis(a)) == f.tr(&fa);
            if (lhs != rhs || !inv) && w.is_none() {
                w = Some(format!("({}, {})", sym(a), sym(b)));
            }
        }
    }
    record("Nakayama-def", w);

    let mut w1 = None;
    let mut w2 = None;
    for i in 0..d {
        let fe = f.basis_elem(i);
        let mut s1 = f.zero();
        let mut s2 = f.zero();
        for b in 0..d {
            add_scaled(&mut s1, &f.basis_elem(b), &f.tr(&f.mul(f.dual(b), &fe)));
            add_scaled(&mut s2, f.dual(b), &f.tr(&f.mul(&fe, &f.basis_elem(b))));
        }
        if s1 != fe && w1.is_none() {
            w1 = Some(sym(i));
        }
        if s2 != fe && w2.is_none() {
            w2 = Some(sym(i));
        }
    }
    record("f-in-basis", w1);
    record("f-in-dual-basis", w2);

    let mut w = None;
    for i in 0..d {
        let fe = f.basis_elem(i);
        let mut lhs = tensor_zero(d);
        let mut rhs = tensor_zero(d);
        for b in 0..d {
            let be = f.basis_elem(b);
            tensor_add(&mut lhs, &f.mul(&fe, &be), f.dual(b), &Scalar::one());
            tensor_add(&mut rhs, &be, &f.mul(f.dual(b), &fe), &Scalar::one());
        }
        if lhs != rhs && w.is_none() {
            w = Some(sym(i));
        }
    }
    record("f-Euler-commute", w);

    let mut w = None;
    match f.dual_of(f.dual_basis()) {
        None => w = Some("dual basis is not a basis".to_string()),
        Some(dd) => {
            for b in 0..d {
                let rhs = scale(f.psi_inv_basis(b), &Scalar::sign(f.parity(b)));
                if dd[b] != rhs && w.is_none() {
                    w = Some(sym(b));
                }
            }
        }
    }
    record("double-dual", w);

    let mut w = None;
    let pm = f.psi_matrix();
    let mut pow = Matrix::identity(d);
    for _ in 0..f.nakayama_order() {
        pow = pm.mul(&pow);
    }
    if pow != Matrix::identity(d) {
        w = Some(format!("θ = {}", f.nakayama_order()));
    }
    record("nakayama-order", w);
    out
}

/// A seeded family of valid algebras: built-ins, super tensor products and
/// the exterior algebra on two odd generators, each under a random change of
/// basis and trace rescaling.
pub fn random_algebra<R: Rng>(rng: &mut R, idx: usize) -> FrobeniusAlgebra {
    let base = match rng.gen_range(0..6) {
        0 => trunc_poly(rng.gen_range(2..=4)),
        1 => clifford(),
        2 => clifford().tensor(&trunc_poly(2)),
        3 => clifford().tensor(&clifford()),
        4 => exterior_two(),
        _ => trunc_poly(2).tensor(&trunc_poly(3)),
    };
    let changed = base.random_basis_change(rng, &format!("random-{idx}"));
    let lambda = loop {
        let v: i64 = rng.gen_range(-4..=4);
        if v != 0 {
            break Scalar::new(v, rng.gen_range(1..=3));
        }
    };
    let mut spec = changed.to_spec();
    spec.trace = scale(&spec.trace, &lambda);
    FrobeniusAlgebra::build(spec).expect("rescaled trace stays nondegenerate")
}

/// Λ(u, v) with u, v odd of degree 1, tr(uv) = 1.
pub fn exterior_two() -> FrobeniusAlgebra {
    let n = 4;
    let basis = vec![
        BasisSymbol { symbol: "1".into(), grading: Grading { degree: 0, parity: false } },
        BasisSymbol { symbol: "u".into(), grading: Grading { degree: 1, parity: true } },
        BasisSymbol { symbol: "v".into(), grading: Grading { degree: 1, parity: true } },
        BasisSymbol { symbol: "uv".into(), grading: Grading { degree: 2, parity: false } },
    ];
    let mut p = vec![vec![zero_vec(n); n]; n];
    for i in 0..n {
        p[0][i] = unit_vec(n, i);
        p[i][0] = unit_vec(n, i);
    }
    p[1][2] = unit_vec(n, 3);
    p[2][1] = scale(&unit_vec(n, 3), &Scalar::from_int(-1));
    FrobeniusAlgebra::build(AlgebraSpec { name: "exterior-2".into(), basis, products: p, trace: unit_vec(n, 3) }).unwrap()
}

/// 2×2 matrices in the basis 1, e12, e21, h = e11 − e22 with the matrix trace.
pub fn matrix_two() -> FrobeniusAlgebra {
    let n = 4;
    let v = |xs: [i64; 4], den: i64| xs.iter().map(|&x| Scalar::new(x, den)).collect::<Element>();
    let basis = ["1", "e12", "e21", "h"]
        .iter()
        .map(|s| BasisSymbol { symbol: s.to_string(), grading: Grading { degree: 0, parity: false } })
        .collect();
    let mut p = vec![vec![zero_vec(n); n]; n];
    for i in 0..n {
        p[0][i] = unit_vec(n, i);
        p[i][0] = unit_vec(n, i);
    }
    p[1][2] = v([1, 0, 0, 1], 2);
    p[2][1] = v([1, 0, 0, -1], 2);
    p[3][1] = unit_vec(n, 1);
    p[1][3] = scale(&unit_vec(n, 1), &Scalar::from_int(-1));
    p[3][2] = scale(&unit_vec(n, 2), &Scalar::from_int(-1));
    p[2][3] = unit_vec(n, 2);
    p[3][3] = unit_vec(n, 0);
    FrobeniusAlgebra::build(AlgebraSpec { name: "matrix-2".into(), basis, products: p, trace: v([2, 0, 0, 0], 1) }).unwrap()
}

/// 𝕜⟨x, y⟩/(x², y², yx − q xy) with tr(xy) = 1; its Nakayama automorphism is
/// nontrivial for q ≠ 1.
pub fn quantum_plane(q: Scalar) -> FrobeniusAlgebra {
    let n = 4;
    let basis = [("1", 0), ("x", 1), ("y", 1), ("xy", 2)]
        .iter()
        .map(|(s, d)| BasisSymbol { symbol: s.to_string(), grading: Grading { degree: *d, parity: false } })
        .collect();
    let mut p = vec![vec![zero_vec(n); n]; n];
    for i in 0..n {
        p[0][i] = unit_vec(n, i);
        p[i][0] = unit_vec(n, i);
    }
    p[1][2] = unit_vec(n, 3);
    p[2][1] = scale(&unit_vec(n, 3), &q);
    FrobeniusAlgebra::build(AlgebraSpec { name: "quantum-plane".into(), basis, products: p, trace: unit_vec(n, 3) })
        .unwrap()
}
