//! Python bindings: algebras, morphisms, the evaluation oracle and the
//! rewriting engine. Scalars cross the boundary as exact strings ("-3/4").

use ::frobheis::action::Oracle as RsOracle;
use ::frobheis::diagram::{parse_word, word_str, Morphism as RsMorphism};
use ::frobheis::frobenius::{self, FrobeniusAlgebra};
use ::frobheis::io;
use ::frobheis::macros::Heis as RsHeis;
use ::frobheis::relations::{self, SuiteOptions};
use ::frobheis::rewrite::{self, ClosedValue};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use std::sync::Arc;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(module = "frobheis", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Algebra {
    inner: Arc<FrobeniusAlgebra>,
}

#[pymethods]
impl Algebra {
    /// Built-in name (trivial, clifford, trunc-poly-N) or a TOML path.
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Algebra { inner: Arc::new(frobenius::load(name).map_err(err)?) })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn symbols(&self) -> Vec<String> {
        self.inner.basis.iter().map(|b| b.symbol.clone()).collect()
    }

    #[getter]
    fn top_degree(&self) -> i64 {
        self.inner.top_degree()
    }

    #[getter]
    fn nakayama_order(&self) -> usize {
        self.inner.nakayama_order()
    }

    /// (identity, passed) for each Frobenius identity.
    fn validate(&self) -> Vec<(String, bool)> {
        frobenius::check_frobenius_identities(&self.inner).into_iter().map(|c| (c.identity.to_string(), c.passed)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Algebra('{}', dim={})", self.inner.name, self.inner.dim())
    }
}

#[pyclass(module = "frobheis", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Morphism {
    inner: RsMorphism,
    alg: Arc<FrobeniusAlgebra>,
}

impl Morphism {
    fn wrap(&self, m: RsMorphism) -> Morphism {
        Morphism { inner: m, alg: self.alg.clone() }
    }

    fn same_boundary(&self, o: &Morphism) -> PyResult<()> {
        if self.inner.domain != o.inner.domain || self.inner.codomain != o.inner.codomain {
            return Err(PyValueError::new_err("boundaries differ"));
        }
        Ok(())
    }
}

#[pymethods]
impl Morphism {
    #[getter]
    fn domain(&self) -> String {
        word_str(&self.inner.domain)
    }

    #[getter]
    fn codomain(&self) -> String {
        word_str(&self.inner.codomain)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __add__(&self, o: &Morphism) -> PyResult<Morphism> {
        self.same_boundary(o)?;
        Ok(self.wrap(self.inner.plus(&o.inner)))
    }

    fn __sub__(&self, o: &Morphism) -> PyResult<Morphism> {
        self.same_boundary(o)?;
        Ok(self.wrap(self.inner.minus(&o.inner)))
    }

    fn __neg__(&self) -> Morphism {
        self.wrap(self.inner.neg())
    }

    /// Multiplies by an exact scalar given as a string or integer.
    fn scaled(&self, c: &str) -> PyResult<Morphism> {
        let s: ::frobheis::Scalar = c.parse().map_err(err)?;
        Ok(self.wrap(self.inner.scaled(&s)))
    }

    /// `other` stacked on top of `self`.
    fn then(&self, other: &Morphism) -> PyResult<Morphism> {
        Ok(self.wrap(other.inner.compose(&self.inner).map_err(err)?))
    }

    /// Left factor above the right one.
    fn tensor(&self, other: &Morphism) -> Morphism {
        self.wrap(self.inner.tensor(&other.inner))
    }

    #[pyo3(signature = (left = "", right = ""))]
    fn whisker(&self, left: &str, right: &str) -> PyResult<Morphism> {
        let l = parse_word(left).map_err(err)?;
        let r = parse_word(right).map_err(err)?;
        Ok(self.wrap(self.inner.whisker(&l, &r)))
    }

    fn omega(&self) -> Morphism {
        self.wrap(self.inner.omega(&self.alg))
    }

    fn to_json(&self) -> String {
        io::morphism_to_string(&self.alg, &self.inner)
    }

    fn __eq__(&self, o: &Morphism) -> bool {
        self.inner == o.inner
    }

    fn __repr__(&self) -> String {
        format!("Morphism({} -> {}, {} terms)", self.domain(), self.codomain(), self.inner.len())
    }
}

/// The category for a fixed algebra and level k.
#[pyclass(module = "frobheis", frozen)]
struct Heis {
    inner: RsHeis,
}

#[pymethods]
impl Heis {
    #[new]
    fn new(algebra: &Algebra, k: i64) -> Self {
        Heis { inner: RsHeis::new(algebra.inner.clone(), k) }
    }

    #[getter]
    fn k(&self) -> i64 {
        self.inner.k
    }

    fn identity(&self, word: &str) -> PyResult<Morphism> {
        Ok(self.wrap(RsMorphism::identity(parse_word(word).map_err(err)?)))
    }

    /// A named macro; `params` is a JSON object.
    #[pyo3(signature = (name, params = "{}"))]
    fn r#macro(&self, name: &str, params: &str) -> PyResult<Morphism> {
        let p: serde_json::Value = serde_json::from_str(params).map_err(err)?;
        Ok(self.wrap(io::macro_morphism(&self.inner, name, &p).map_err(err)?))
    }

    /// A morphism from its JSON description.
    fn parse(&self, text: &str) -> PyResult<Morphism> {
        Ok(self.wrap(io::parse_morphism(&self.inner, text).map_err(err)?))
    }

    fn rule_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = rewrite::rule_set(&self.inner).iter().map(|r| r.id.to_string()).collect();
        ids.dedup();
        ids
    }

    /// Returns (result, normalized, steps).
    #[pyo3(signature = (m, fuel = 500))]
    fn simplify(&self, m: &Morphism, fuel: usize) -> (Morphism, bool, usize) {
        let rules = rewrite::rule_set(&self.inner);
        let s = rewrite::simplify(&self.inner, &m.inner, &rules, fuel);
        (self.wrap(s.morphism), s.status == rewrite::Status::Normalized, s.steps)
    }

    /// A scalar string, a polynomial string, or None when reduction is stuck.
    #[pyo3(signature = (m, fuel = 5000))]
    fn eval_closed(&self, m: &Morphism, fuel: usize) -> PyResult<Option<String>> {
        let rules = rewrite::rule_set(&self.inner);
        Ok(match rewrite::eval_closed(&self.inner, &m.inner, &rules, fuel).map_err(err)? {
            ClosedValue::Scalar(s) => Some(s.to_string()),
            ClosedValue::Polynomial(p) => Some(p.display(&self.inner)),
            ClosedValue::Irreducible(_) => None,
        })
    }

    /// (lhs, rhs, params) for every instance of a relation id.
    #[pyo3(signature = (id, t_max = 4, r_max = 3))]
    fn relation(&self, id: &str, t_max: i64, r_max: u32) -> PyResult<Vec<(Morphism, Morphism, String)>> {
        let insts = relations::instances(&self.inner, id, &SuiteOptions { t_max, r_max })
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        Ok(insts.into_iter().map(|i| (self.wrap(i.lhs), self.wrap(i.rhs), i.params)).collect())
    }
}

impl Heis {
    fn wrap(&self, m: RsMorphism) -> Morphism {
        Morphism { inner: m, alg: self.inner.alg.clone() }
    }
}

/// Evaluation through the action on cyclotomic wreath algebra modules.
#[pyclass(module = "frobheis", frozen)]
struct Oracle {
    inner: RsOracle,
}

#[pymethods]
impl Oracle {
    #[new]
    #[pyo3(signature = (algebra, k, max_level = 4))]
    fn new(algebra: &Algebra, k: i64, max_level: usize) -> PyResult<Self> {
        Ok(Oracle { inner: RsOracle::new(algebra.inner.clone(), k, max_level).map_err(err)? })
    }

    /// First level where the two sides act differently, or None.
    #[pyo3(signature = (lhs, rhs, levels = vec![0, 1]))]
    fn check_equal(&self, lhs: &Morphism, rhs: &Morphism, levels: Vec<usize>) -> PyResult<Option<usize>> {
        self.inner.check_equal(&lhs.inner, &rhs.inner, &levels).map_err(err)
    }

    /// Dense matrix of exact scalar strings.
    fn matrix(&self, m: &Morphism, level: usize) -> PyResult<Vec<Vec<String>>> {
        let r = self.inner.matrix(&m.inner, level).map_err(err)?;
        let mut rows = vec![vec!["0".to_string(); r.domain_dim]; r.codomain_dim];
        for (j, col) in r.matrix.cols.iter().enumerate() {
            for (i, c) in col {
                rows[*i as usize][j] = c.to_string();
            }
        }
        Ok(rows)
    }
}

#[pymodule]
#[pyo3(name = "frobheis")]
fn frobheis_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add_class::<Morphism>()?;
    m.add_class::<Heis>()?;
    m.add_class::<Oracle>()?;
    m.add("RELATIONS", relations::all_ids())?;
    Ok(())
}
