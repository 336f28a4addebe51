//! Exact computer algebra for Frobenius Heisenberg categories.
//!
//! * [`frobenius`]: graded Frobenius superalgebras, dual bases, Nakayama automorphism.
//! * [`wreath`]: affine and cyclotomic wreath product algebras.
//! * [`diagram`]: string diagrams, morphisms, macros and the flip symmetry ω.
//! * [`action`]: the evaluation functor into modules over cyclotomic wreath algebras.
//! * [`relations`]: the defining and derived relations as pairs of morphisms.
//! * [`io`]: JSON reading and writing of morphisms.
//! * [`rewrite`]: oriented rewrite rules, a fuel-bounded simplifier and closed-diagram evaluation.
//! * [`sample`]: random elements and diagrams for property tests.

pub mod action;
pub mod diagram;
pub mod frobenius;
pub mod io;
pub mod macros;
pub mod relations;
pub mod rewrite;
pub mod sample;
pub mod linalg;
pub mod wreath;
pub mod scalar;

pub use scalar::Scalar;
