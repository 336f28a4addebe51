use frobheis::frobenius::{self, FrobeniusAlgebra};
use frobheis::scalar::Scalar;
use frobheis::wreath::*;
use std::sync::Arc;

fn ring(f: FrobeniusAlgebra, ell: usize, max_n: usize) -> Arc<WreathRing> {
    let f = Arc::new(f);
    Arc::new(WreathRing::cyclotomic(f.clone(), CycloParams::zero(&f, ell), max_n).unwrap())
}

fn grid() -> Vec<(FrobeniusAlgebra, usize)> {
    let mut v = Vec::new();
    for f in [frobenius::trivial(), frobenius::trunc_poly(2), frobenius::clifford()] {
        for ell in [1, 2] {
            v.push((f.opposite(), ell));
        }
    }
    v
}

#[test]
fn crossing_times_dot_for_trivial_algebra() {
    let r = WreathRing::affine(Arc::new(frobenius::trivial())).unwrap();
    let lhs = r.mul_words(&Word::s(0), &Word::x(0, 1));
    let mut rhs = r.mul_words(&Word::x(1, 1), &Word::s(0));
    rhs.add_term(Word::ONE, -Scalar::one());
    assert_eq!(lhs, rhs);
}

#[test]
fn dots_commute() {
    let r = WreathRing::affine(Arc::new(frobenius::clifford())).unwrap();
    let a = AWElement::from_word(Word::x(0, 1));
    let b = AWElement::from_word(Word::x(1, 1));
    assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
}

#[test]
fn clifford_token_anticommutes_with_dot() {
    let f = frobenius::clifford();
    let r = WreathRing::affine(Arc::new(f)).unwrap();
    let lhs = r.mul_words(&Word::token(0, 1), &Word::x(0, 1));
    let rhs = r.mul_words(&Word::x(0, 1), &Word::token(0, 1)).scaled(&-Scalar::one());
    assert_eq!(lhs, rhs);
}

#[test]
fn dimensions_and_certification_on_grid() {
    for (f, ell) in grid() {
        let d = f.dim();
        let r = ring(f, ell, 3);
        for n in 0..=3 {
            let a = CyclotomicAlgebra::new(r.clone(), n).unwrap();
            assert_eq!(a.dim(), (ell * d).pow(n as u32) * factorial(n));
            a.certify().unwrap_or_else(|e| panic!("ell={ell} d={d} n={n}: {e}"));
        }
    }
}

#[test]
fn trivial_level_one_quotient_is_group_algebra() {
    let r = ring(frobenius::trivial(), 1, 2);
    let a = CyclotomicAlgebra::new(r.clone(), 2).unwrap();
    assert_eq!(a.dim(), 2);
    assert!(r.lmul_x_elem(0, &AWElement::one()).is_zero());
    let rep = a.regular_rep();
    assert_eq!(rep.s[0].compose(&rep.s[0]), frobheis::linalg::SparseMatrix::identity(2));
}

#[test]
fn symmetrizers_are_idempotent() {
    for f in [frobenius::trivial(), frobenius::trunc_poly(2), frobenius::clifford()] {
        let r = WreathRing::affine(Arc::new(f.clone())).unwrap();
        for n in 1..=4 {
            let e = symmetrizer(&r, f.unit(), n).unwrap();
            assert_eq!(r.mul(&e, &e), e, "n = {n}");
        }
    }
    let r = WreathRing::affine(Arc::new(frobenius::trivial())).unwrap();
    let e = symmetrizer(&r, &[Scalar::one()], 2).unwrap();
    let mut expect = AWElement::zero();
    expect.add_term(Word::ONE, Scalar::new(1, 2));
    expect.add_term(Word::s(0), Scalar::new(1, 2));
    assert_eq!(e, expect);
}

#[test]
fn non_idempotent_rejected() {
    let f = frobenius::trunc_poly(2);
    let r = WreathRing::affine(Arc::new(f.clone())).unwrap();
    assert!(matches!(symmetrizer(&r, &f.basis_elem(1), 2), Err(WreathError::NotIdempotent(_))));
}

#[test]
fn grading_of_generators() {
    let f = frobenius::trunc_poly(2);
    let r = WreathRing::affine(Arc::new(f)).unwrap();
    assert_eq!(r.word_degree(&Word::x(0, 1)), 2);
    assert_eq!(r.word_degree(&Word::s(0)), 0);
    let c = WreathRing::affine(Arc::new(frobenius::clifford())).unwrap();
    assert!(c.word_parity(&Word::token(0, 1)));
    let (_, homogeneous) = degree_parity(&c, &AWElement::from_word(Word::token(0, 1)));
    assert!(homogeneous);
}

#[test]
fn inadmissible_clifford_parameter_rejected() {
    let f = frobenius::clifford().opposite();
    let p = CycloParams { factors: vec![(1, vec![Scalar::one(), Scalar::zero()])] };
    assert!(matches!(check_admissible(&f, &p), Err(WreathError::InadmissibleParams(_))));
}
