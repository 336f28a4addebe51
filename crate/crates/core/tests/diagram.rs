mod common;

use frobheis::action::Oracle;
use frobheis::diagram::{word, Builder, Diagram, DiagramError, Gen, Morphism};
use frobheis::frobenius::{self, FrobeniusAlgebra};
use frobheis::macros::Heis;
use frobheis::relations::{self, SuiteOptions};
use frobheis::sample::{self, DiagramShape};
use frobheis::Scalar;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn heis(name: &str, k: i64) -> Heis {
    Heis::new(Arc::new(frobenius::builtin(name).unwrap()), k)
}

#[test]
fn composition_checks_boundaries() {
    let h = heis("trivial", -1);
    let r = h.cap().compose(&h.cup());
    assert!(matches!(r, Err(DiagramError::BoundaryMismatch { .. })));
    let z = h.zigzag_right_up();
    assert_eq!(z.domain, word("+"));
    assert_eq!(z.codomain, word("+"));
    assert_eq!(z.max_slices(), 2);
    let f = h.dots(2);
    assert_eq!(h.id("+").then(&f), f);
    assert_eq!(f.then(&h.id("+")), f);
}

#[test]
fn bad_slice_is_reported() {
    let d = Diagram { domain: word("+-"), slices: vec![frobheis::diagram::Slice { pos: 0, gen: Gen::Crossing }] };
    assert!(matches!(d.check(), Err(DiagramError::BadSlice { .. })));
}

#[test]
fn tensor_puts_left_factor_on_top() {
    let h = heis("trunc-poly-2", -2);
    let b = h.b(1);
    let bd = h.bdual(1);
    let m = h.token(&b).tensor(&h.token(&bd));
    assert_eq!(m.len(), 1);
    let d = m.terms.keys().next().unwrap();
    assert_eq!(d.slices.len(), 2);
    assert_eq!(d.slices[0].pos, 1);
    assert_eq!(d.slices[1].pos, 0);
    assert_eq!(d.slices[1].gen, Gen::Token(b));
    let e = Morphism::identity(vec![]);
    assert_eq!(h.dots(1).tensor(&e), h.dots(1));
}

#[test]
fn gradings_of_generators() {
    let t = heis("trunc-poly-2", -1);
    assert_eq!(t.dots(1).grading(&t.alg, -1), Some((2, false)));
    assert_eq!(t.lcup().grading(&t.alg, -1), Some((2, false)));
    assert_eq!(t.lcap().grading(&t.alg, -1), Some((-2, false)));
    assert_eq!(t.token(&t.b(1)).grading(&t.alg, -1), Some((2, false)));
    let c = heis("clifford", -1);
    assert_eq!(c.token(&c.b(1)).grading(&c.alg, -1), Some((0, true)));
    let mixed = c.token(&c.one()).plus(&c.token(&c.b(1)));
    assert_eq!(mixed.grading(&c.alg, -1), None);
    assert_eq!(mixed.homogenized(&c.alg).len(), 2);
}

fn has_zero_token(g: &Gen) -> bool {
    match g {
        Gen::Token(f) | Gen::DownToken(f) | Gen::DecLeftCap(_, f) | Gen::DecLeftCup(_, f) => frobenius::is_zero(f),
        _ => false,
    }
}

#[test]
fn defining_relations_are_homogeneous() {
    for name in ["trunc-poly-2", "clifford"] {
        for k in [-2i64, -1, 1, 2] {
            let h = heis(name, k);
            for id in relations::Suite::Defining.ids() {
                for inst in relations::instances(&h, id, &SuiteOptions::default()).unwrap() {
                    // a zero token makes a term vanish; it carries no grading
                    let gs: Vec<_> = inst
                        .lhs
                        .terms
                        .keys()
                        .chain(inst.rhs.terms.keys())
                        .filter(|d| !d.slices.iter().any(|s| has_zero_token(&s.gen)))
                        .map(|d| d.grading(&h.alg, k))
                        .collect();
                    let g = gs[0];
                    assert!(g.is_some(), "{id}");
                    assert!(gs.iter().all(|x| *x == g), "{id} [{}] at k={k}", inst.params);
                }
            }
        }
    }
}

#[test]
fn omega_on_generators() {
    let h = heis("clifford", -1);
    assert_eq!(h.cup().omega(&h.alg), h.cap());
    assert_eq!(h.cap().omega(&h.alg), h.cup());
    assert_eq!(h.s().omega(&h.alg), Morphism::gen(Gen::DownCrossing).neg());
    assert_eq!(h.dots(1).omega(&h.alg), h.down_dots(1));
    assert_eq!(h.lcup().omega(&h.alg), h.lcap().neg());
    let c = h.b(1);
    let dlcup = Morphism::gen(Gen::DecLeftCup(0, c.clone()));
    assert_eq!(dlcup.omega(&h.alg), Morphism::gen(Gen::DecLeftCap(0, c)).neg());
    let one = h.one();
    let dlcup = Morphism::gen(Gen::DecLeftCup(1, one.clone()));
    assert_eq!(dlcup.omega(&h.alg), Morphism::gen(Gen::DecLeftCap(1, one)));
}

fn random_diagram(alg: &FrobeniusAlgebra, rng: &mut ChaCha8Rng) -> Diagram {
    let dom = sample::random_word(3, rng);
    sample::random_diagram(alg, &dom, &DiagramShape::default(), rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn omega_is_an_involution(seed in any::<u64>(), which in 0usize..3) {
        let alg = [frobenius::clifford(), frobenius::trunc_poly(2), frobenius::exterior_two()][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_diagram(&alg, &mut rng);
        prop_assert!(d.check().is_ok());
        let m = Morphism::from_diagram(d).scaled(&Scalar::new(rng.gen_range(-5..5), 3));
        prop_assert_eq!(m.omega(&alg).omega(&alg), m);
    }

    #[test]
    fn omega_is_contravariant(seed in any::<u64>()) {
        let alg = frobenius::clifford();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_diagram(&alg, &mut rng);
        let g = sample::random_diagram(&alg, &f.codomain(), &DiagramShape::default(), &mut rng);
        let pf = f.slices.iter().filter(|s| s.gen.is_odd(&alg)).count() % 2 == 1;
        let pg = g.slices.iter().filter(|s| s.gen.is_odd(&alg)).count() % 2 == 1;
        let (f, g) = (Morphism::from_diagram(f), Morphism::from_diagram(g));
        let lhs = f.then(&g).omega(&alg);
        let rhs = g.omega(&alg).then(&f.omega(&alg)).scaled(&Scalar::sign(pf && pg));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn grading_is_additive(seed in any::<u64>()) {
        let alg = frobenius::trunc_poly(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_diagram(&alg, &mut rng);
        let g = sample::random_diagram(&alg, &f.codomain(), &DiagramShape::default(), &mut rng);
        let (gf, gg) = (f.grading(&alg, -2).unwrap(), g.grading(&alg, -2).unwrap());
        let h = Morphism::from_diagram(f.clone()).then(&Morphism::from_diagram(g.clone()));
        prop_assert_eq!(h.grading(&alg, -2), Some((gf.0 + gg.0, gf.1 ^ gg.1)));
        let t = Morphism::from_diagram(f).tensor(&Morphism::from_diagram(g));
        prop_assert_eq!(t.grading(&alg, -2), Some((gf.0 + gg.0, gf.1 ^ gg.1)));
    }

    #[test]
    fn slices_stay_consistent(seed in any::<u64>()) {
        let alg = frobenius::trunc_poly(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Morphism::from_diagram(random_diagram(&alg, &mut rng));
        let g = Morphism::from_diagram(random_diagram(&alg, &mut rng));
        prop_assert!(f.tensor(&g).check().is_ok());
        prop_assert!(f.whisker(&word("-+"), &word("+")).check().is_ok());
    }
}

#[test]
fn super_interchange_under_the_action() {
    let alg = Arc::new(frobenius::clifford());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in [-1i64, -2] {
        let o = Oracle::new(alg.clone(), k, 4).unwrap();
        for _ in 0..25 {
            let f = sample::odd_element(&alg, &mut rng).unwrap();
            let g = sample::odd_element(&alg, &mut rng).unwrap();
            common::super_interchange(&o, &f, &g, &mut rng).unwrap();
        }
    }
}

#[test]
fn builder_picks_orientation() {
    let h = heis("trivial", -1);
    let m = Builder::from("+-").dots(0, 1).dots(1, 1).build();
    let d = m.terms.keys().next().unwrap();
    assert_eq!(d.slices[0].gen, Gen::Dot);
    assert_eq!(d.slices[1].gen, Gen::DownDot);
    let _ = h;
}
