use frobheis::frobenius::{self, AlgebraSpec, BasisSymbol, Element, FrobeniusAlgebra, FrobeniusError, Grading};
use frobheis::Scalar;
use proptest::prelude::*;
use rand::SeedableRng;

fn sc(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn v(xs: &[i64]) -> Element {
    xs.iter().map(|&x| sc(x)).collect()
}

fn sign(odd: bool) -> Scalar {
    if odd {
        sc(-1)
    } else {
        sc(1)
    }
}

/// Direct evaluation of every structural identity from the multiplication
/// table and trace, without going through the library's own checker.
fn assert_identities(f: &FrobeniusAlgebra) {
    let d = f.dim();
    let e = |i: usize| f.basis_elem(i);
    let par = |i: usize| f.parity(i);
    for a in 0..d {
        for b in 0..d {
            let expect = if a == b { sc(1) } else { sc(0) };
            assert_eq!(f.tr(&f.mul(f.dual(a), &e(b))), expect, "{}: pairing ({a},{b})", f.name);
            let lhs = f.tr(&f.mul(&e(a), &e(b)));
            let rhs = &sign(par(a) && par(b)) * &f.tr(&f.mul(&e(b), &f.apply_psi(&e(a))));
            assert_eq!(lhs, rhs, "{}: Nakayama ({a},{b})", f.name);
            let psi_ab = f.apply_psi(&f.mul(&e(a), &e(b)));
            assert_eq!(psi_ab, f.mul(&f.apply_psi(&e(a)), &f.apply_psi(&e(b))), "{}: ψ multiplicative", f.name);
        }
        assert_eq!(f.tr(&f.apply_psi(&e(a))), f.tr(&e(a)));
        let mut s1 = f.zero();
        let mut s2 = f.zero();
        for b in 0..d {
            frobenius::add_scaled(&mut s1, &e(b), &f.tr(&f.mul(f.dual(b), &e(a))));
            frobenius::add_scaled(&mut s2, f.dual(b), &f.tr(&f.mul(&e(a), &e(b))));
        }
        assert_eq!(s1, e(a), "{}: expansion in the basis", f.name);
        assert_eq!(s2, e(a), "{}: expansion in the dual basis", f.name);
        // teleportation in F ⊗ F as a d×d table
        let mut t1 = vec![vec![sc(0); d]; d];
        let mut t2 = vec![vec![sc(0); d]; d];
        for b in 0..d {
            let fb = f.mul(&e(a), &e(b));
            let bdf = f.mul(f.dual(b), &e(a));
            for i in 0..d {
                for j in 0..d {
                    t1[i][j] += &(&fb[i] * &f.dual(b)[j]);
                    t2[i][j] += &(&e(b)[i] * &bdf[j]);
                }
            }
        }
        assert_eq!(t1, t2, "{}: teleportation for basis {a}", f.name);
        let dd = f.dual_of(f.dual_basis()).expect("dual basis of the dual basis");
        let expect = frobenius::scale(&f.apply_psi_inv(&e(a)), &sign(par(a)));
        assert_eq!(dd[a], expect, "{}: double dual", f.name);
    }
    let theta = f.nakayama_order();
    for a in 0..d {
        assert_eq!(f.apply_psi_pow(&e(a), theta as i64), e(a));
    }
}

#[test]
fn trivial_algebra() {
    let f = frobenius::trivial();
    assert_eq!((f.top_degree(), f.nakayama_order()), (0, 1));
    assert_eq!(f.dual(0), &v(&[1]));
    assert_identities(&f);
}

#[test]
fn dual_numbers() {
    let f = frobenius::trunc_poly(2);
    assert_eq!(f.top_degree(), 2);
    assert_eq!(f.nakayama_order(), 1);
    assert_eq!(f.dual(0), &v(&[0, 1]));
    assert_eq!(f.dual(1), &v(&[1, 0]));
    assert_identities(&f);
}

#[test]
fn truncated_cubic_duals() {
    let f = frobenius::trunc_poly(3);
    assert_eq!(f.top_degree(), 4);
    assert_eq!(f.dual(0), &v(&[0, 0, 1]));
    assert_eq!(f.dual(1), &v(&[0, 1, 0]));
    assert_eq!(f.dual(2), &v(&[1, 0, 0]));
    assert_identities(&f);
}

#[test]
fn clifford_nakayama_and_duals() {
    let f = frobenius::clifford();
    assert_eq!(f.top_degree(), 0);
    assert_eq!(f.nakayama_order(), 2);
    assert_eq!(f.apply_psi(&v(&[0, 1])), v(&[0, -1]));
    assert_eq!(f.dual(0), &v(&[1, 0]));
    assert_eq!(f.dual(1), &v(&[0, 1]));
    // (č)̌ = -ψ^{-1}(c) = c
    assert_eq!(f.dual_of(f.dual_basis()).unwrap()[1], v(&[0, 1]));
    assert_identities(&f);
}

#[test]
fn dual_numbers_teleportation_instance() {
    // f = z: z·1 ⊗ 1̌ + z·z ⊗ ž = z ⊗ z, and 1 ⊗ 1̌·z + z ⊗ ž·z = z ⊗ z as well.
    let f = frobenius::trunc_poly(2);
    let z = v(&[0, 1]);
    assert_eq!(f.mul(&z, &v(&[1, 0])), z);
    assert_eq!(f.mul(f.dual(0), &z), v(&[0, 0]));
    assert_eq!(f.mul(f.dual(1), &z), z);
}

#[test]
fn other_examples_satisfy_identities() {
    for f in [
        frobenius::exterior_two(),
        frobenius::matrix_two(),
        frobenius::quantum_plane(sc(-1)),
        frobenius::clifford().tensor(&frobenius::trunc_poly(2)),
    ] {
        assert_identities(&f);
    }
}

#[test]
fn opposite_algebras() {
    let c = frobenius::clifford();
    let op = c.opposite();
    assert_eq!(op.mul(&v(&[0, 1]), &v(&[0, 1])), v(&[-1, 0]));
    assert_eq!(op.apply_psi(&v(&[0, 1])), v(&[0, -1]));
    assert_identities(&op);
    for f in [frobenius::trunc_poly(3), frobenius::clifford(), frobenius::matrix_two(), frobenius::exterior_two()] {
        let oo = f.opposite().opposite();
        for a in 0..f.dim() {
            for b in 0..f.dim() {
                assert_eq!(oo.basis_product(a, b), f.basis_product(a, b));
            }
        }
        // ψ of the opposite is ψ^{-1}
        let op = f.opposite();
        for a in 0..f.dim() {
            assert_eq!(op.apply_psi(&f.basis_elem(a)), f.apply_psi_inv(&f.basis_elem(a)));
        }
    }
    let t = frobenius::trunc_poly(3);
    let top = t.opposite();
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(top.basis_product(a, b), t.basis_product(a, b));
        }
    }
}

fn spec(trace: Element, products: Vec<Vec<Element>>, parities: &[bool]) -> AlgebraSpec {
    AlgebraSpec {
        name: "test".into(),
        basis: parities
            .iter()
            .enumerate()
            .map(|(i, &p)| BasisSymbol { symbol: format!("e{i}"), grading: Grading { degree: 0, parity: p } })
            .collect(),
        products,
        trace,
    }
}

#[test]
fn invalid_data_is_rejected() {
    let unit_table = vec![vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[0, 1]), v(&[0, 0])]];
    let r = FrobeniusAlgebra::build(spec(v(&[1, 0]), unit_table.clone(), &[false, false]));
    assert!(matches!(r, Err(FrobeniusError::TraceDegenerate(_))), "{r:?}");
    let r = FrobeniusAlgebra::build(spec(v(&[0, 0]), unit_table, &[false, false]));
    assert!(matches!(r, Err(FrobeniusError::TraceDegenerate(_))));
    let cl = vec![vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[0, 1]), v(&[1, 0])]];
    let r = FrobeniusAlgebra::build(spec(v(&[0, 1]), cl, &[false, true]));
    assert!(matches!(r, Err(FrobeniusError::TraceNotEven(_))));
    let no_unit = vec![vec![v(&[0, 0]), v(&[0, 0])], vec![v(&[0, 0]), v(&[0, 0])]];
    let r = FrobeniusAlgebra::build(spec(v(&[1, 1]), no_unit, &[false, false]));
    assert!(matches!(r, Err(FrobeniusError::NoUnit)));
    let bad_parity = vec![vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[0, 1]), v(&[0, 1])]];
    let r = FrobeniusAlgebra::build(spec(v(&[1, 0]), bad_parity, &[false, true]));
    assert!(matches!(r, Err(FrobeniusError::GradingViolation(_))), "{r:?}");
}

#[test]
fn toml_round_trip() {
    for f in [frobenius::trunc_poly(3), frobenius::clifford(), frobenius::exterior_two()] {
        let text = frobenius::to_toml(&f);
        let g = FrobeniusAlgebra::build(frobenius::parse_toml(&text).unwrap()).unwrap();
        assert_eq!(g.dim(), f.dim());
        for a in 0..f.dim() {
            assert_eq!(g.dual(a), f.dual(a));
            for b in 0..f.dim() {
                assert_eq!(g.basis_product(a, b), f.basis_product(a, b));
            }
        }
    }
}

#[test]
fn builtin_lookup() {
    assert!(frobenius::builtin("trunc-poly-4").is_some());
    assert!(frobenius::builtin("trunc-poly-1").is_none());
    assert!(frobenius::builtin("nope").is_none());
    assert!(frobenius::load("clifford").is_ok());
    assert_eq!(frobenius::builtin("quantum-plane").unwrap().nakayama_order(), 2);
    assert!(frobenius::builtin("matrix-2").is_some() && frobenius::builtin("exterior-2").is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_algebras_satisfy_identities(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = frobenius::random_algebra(&mut rng, 0);
        assert_identities(&f);
        prop_assert!(frobenius::check_frobenius_identities(&f).iter().all(|c| c.passed));
    }

    #[test]
    fn derived_data_is_basis_independent(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = frobenius::random_algebra(&mut rng, 0);
        let g = f.random_basis_change(&mut rng, "changed");
        prop_assert_eq!(f.top_degree(), g.top_degree());
        prop_assert_eq!(f.nakayama_order(), g.nakayama_order());
        assert_identities(&g);
    }
}
