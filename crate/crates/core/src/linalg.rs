//! Exact linear algebra: small dense matrices and sparse column matrices.

use crate::scalar::Scalar;
use rustc_hash::FxHashMap;

/// Sparse vector: sorted `(index, nonzero value)` pairs.
pub type SparseVec = Vec<(u32, Scalar)>;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<Scalar> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c);
        Matrix { rows: r, cols: c, data }
    }
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inv().unwrap();
            for j in 0..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let b = self.get(r, j);
                    if !b.is_zero() {
                        let v = self.get(i, j) - &(&f * b);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Solve `self * x = b` for one solution, if any.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let piv = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &c) in piv.iter().enumerate() {
            x[c] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Scalar::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pv = m.get(c, c).clone();
            det *= &pv;
            let inv = pv.inv().unwrap();
            for i in c + 1..n {
                let f = m.get(i, c) * &inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        det
    }
}

/// Scratch accumulator for building sparse vectors of a fixed length.
pub struct Accumulator {
    vals: Vec<Scalar>,
    touched: Vec<u32>,
    seen: Vec<bool>,
}

impl Accumulator {
    pub fn new(len: usize) -> Self {
        Accumulator { vals: vec![Scalar::zero(); len], touched: Vec::new(), seen: vec![false; len] }
    }
    pub fn add(&mut self, i: u32, v: &Scalar) {
        let iu = i as usize;
        if !self.seen[iu] {
            self.seen[iu] = true;
            self.touched.push(i);
            self.vals[iu] = v.clone();
        } else {
            self.vals[iu] += v;
        }
    }
    pub fn add_scaled(&mut self, vec: &SparseVec, c: &Scalar) {
        if c.is_one() {
            for (i, v) in vec {
                self.add(*i, v);
            }
        } else {
            for (i, v) in vec {
                self.add(*i, &(v * c));
            }
        }
    }
    pub fn drain(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            let iu = i as usize;
            self.seen[iu] = false;
            let v = std::mem::take(&mut self.vals[iu]);
            if !v.is_zero() {
                out.push((i, v));
            }
        }
        self.touched.clear();
        out
    }
}

pub fn sparse_from_map(map: FxHashMap<u32, Scalar>) -> SparseVec {
    let mut v: SparseVec = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_unstable_by_key(|x| x.0);
    v
}

pub fn sparse_scale(v: &SparseVec, c: &Scalar) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x * c)).collect()
}

/// `a + c * b` for sorted sparse vectors.
pub fn sparse_axpy(a: &SparseVec, c: &Scalar, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = c * &b[j].1;
            if !v.is_zero() {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = &a[i].1 + &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Sparse matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, ncols: usize) -> Self {
        SparseMatrix { rows, cols: vec![Vec::new(); ncols] }
    }
    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: (0..n).map(|i| vec![(i as u32, Scalar::one())]).collect() }
    }
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn apply(&self, v: &SparseVec, acc: &mut Accumulator) -> SparseVec {
        for (j, x) in v {
            acc.add_scaled(&self.cols[*j as usize], x);
        }
        acc.drain()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols.len(), other.rows, "dimension mismatch in compose");
        let mut acc = Accumulator::new(self.rows);
        let cols = other.cols.iter().map(|c| self.apply(c, &mut acc)).collect();
        SparseMatrix { rows: self.rows, cols }
    }

    pub fn add_scaled(&mut self, other: &SparseMatrix, c: &Scalar) {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols.len(), other.cols.len());
        for (a, b) in self.cols.iter_mut().zip(&other.cols) {
            if !b.is_empty() {
                *a = sparse_axpy(a, c, b);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> SparseMatrix {
        SparseMatrix { rows: self.rows, cols: self.cols.iter().map(|v| sparse_scale(v, c)).collect() }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols.len());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                m.set(*i as usize, j, v.clone());
            }
        }
        m
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.rows, other.rows);
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        SparseMatrix { rows: self.rows, cols }
    }

    pub fn rank(&self) -> usize {
        let mut e = Eliminator::new(self.rows);
        for c in &self.cols {
            e.insert(c.clone());
        }
        e.rank()
    }
}

/// Incremental row-reduction of sparse vectors (used for ranks and spans).
pub struct Eliminator {
    dim: usize,
    /// pivot index -> reduced vector whose leading index is the pivot
    basis: FxHashMap<u32, SparseVec>,
}

impl Eliminator {
    pub fn new(dim: usize) -> Self {
        Eliminator { dim, basis: FxHashMap::default() }
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut idx = 0;
        while idx < v.len() {
            let (i, c) = v[idx].clone();
            if let Some(b) = self.basis.get(&i) {
                v = sparse_axpy(&v, &-c, b);
                // entries before `idx` are untouched because `b` starts at `i`
            } else {
                idx += 1;
            }
        }
        v
    }
    /// Inserts `v`; returns true when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(v);
        if r.is_empty() {
            return false;
        }
        let inv = r[0].1.inv().unwrap();
        let r = sparse_scale(&r, &inv);
        self.basis.insert(r[0].0, r);
        true
    }
}

/// Solves `A x = b_t` for a square sparse `A` (given by columns) and several
/// right-hand sides, by sparse Gaussian elimination. Returns `None` when `A`
/// is singular.
pub fn sparse_solve(a: &SparseMatrix, rhs: &[SparseVec]) -> Option<Vec<SparseVec>> {
    let n = a.rows;
    if a.ncols() != n {
        return None;
    }
    // row storage
    let mut rows: Vec<SparseVec> = vec![Vec::new(); n];
    for (j, col) in a.cols.iter().enumerate() {
        for (i, v) in col {
            rows[*i as usize].push((j as u32, v.clone()));
        }
    }
    for r in rows.iter_mut() {
        r.sort_unstable_by_key(|x| x.0);
    }
    let mut brows: Vec<SparseVec> = vec![Vec::new(); n];
    for (t, b) in rhs.iter().enumerate() {
        for (i, v) in b {
            brows[*i as usize].push((t as u32, v.clone()));
        }
    }
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, r) in rows.iter().enumerate() {
        for (j, _) in r {
            col_rows[*j as usize].push(i as u32);
        }
    }
    let mut pivoted = vec![false; n];
    let mut pivot_of_col: Vec<u32> = vec![u32::MAX; n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    for j in 0..n {
        let cands: Vec<u32> = {
            let mut v: Vec<u32> = col_rows[j].iter().copied().filter(|&r| !pivoted[r as usize]).collect();
            v.sort_unstable();
            v.dedup();
            v.retain(|&r| rows[r as usize].iter().any(|(c, _)| *c as usize == j));
            v
        };
        let &p = cands.iter().min_by_key(|&&r| rows[r as usize].len())?;
        pivoted[p as usize] = true;
        pivot_of_col[j] = p;
        order.push(j as u32);
        let prow = rows[p as usize].clone();
        let pb = brows[p as usize].clone();
        let pval = prow.iter().find(|(c, _)| *c as usize == j).unwrap().1.clone();
        let pinv = pval.inv().unwrap();
        for &r in &cands {
            if r == p {
                continue;
            }
            let ru = r as usize;
            let Some(v) = rows[ru].iter().find(|(c, _)| *c as usize == j).map(|x| x.1.clone()) else {
                continue;
            };
            let f = -(&v * &pinv);
            let old: rustc_hash::FxHashSet<u32> = rows[ru].iter().map(|x| x.0).collect();
            rows[ru] = sparse_axpy(&rows[ru], &f, &prow);
            for (c, _) in &rows[ru] {
                if !old.contains(c) {
                    col_rows[*c as usize].push(r);
                }
            }
            if !pb.is_empty() {
                brows[ru] = sparse_axpy(&brows[ru], &f, &pb);
            }
        }
    }
    // back substitution in reverse pivot order
    let mut x: Vec<Vec<Scalar>> = vec![Vec::new(); n];
    let nr = rhs.len();
    for &j in order.iter().rev() {
        let p = pivot_of_col[j as usize] as usize;
        let mut val = vec![Scalar::zero(); nr];
        for (t, v) in &brows[p] {
            val[*t as usize] = v.clone();
        }
        let mut piv = Scalar::zero();
        for (c, a) in &rows[p] {
            if *c == j {
                piv = a.clone();
                continue;
            }
            let xc = &x[*c as usize];
            for t in 0..nr {
                if !xc[t].is_zero() {
                    val[t] -= a * &xc[t];
                }
            }
        }
        let pinv = piv.inv()?;
        for v in val.iter_mut() {
            *v = &*v * &pinv;
        }
        x[j as usize] = val;
    }
    Some(
        (0..nr)
            .map(|t| {
                (0..n)
                    .filter_map(|j| {
                        let v = &x[j][t];
                        (!v.is_zero()).then(|| (j as u32, v.clone()))
                    })
                    .collect()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn dense_inverse_roundtrip() {
        let m = Matrix::from_rows(vec![vec![s(2), s(1)], vec![s(7), s(4)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.determinant(), s(1));
    }

    #[test]
    fn sparse_solve_matches_dense() {
        let m = Matrix::from_rows(vec![
            vec![s(0), s(1), s(3)],
            vec![s(2), s(0), s(1)],
            vec![s(1), s(1), s(0)],
        ]);
        let mut sm = SparseMatrix::zero(3, 3);
        for j in 0..3 {
            for i in 0..3 {
                if !m.get(i, j).is_zero() {
                    sm.cols[j].push((i as u32, m.get(i, j).clone()));
                }
            }
        }
        let b = vec![(1u32, s(1))];
        let x = sparse_solve(&sm, &[b]).unwrap();
        let mut acc = Accumulator::new(3);
        assert_eq!(sm.apply(&x[0], &mut acc), vec![(1u32, s(1))]);
    }
}
