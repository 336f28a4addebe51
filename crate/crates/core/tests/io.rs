use frobheis::diagram::{Gen, Morphism};
use frobheis::frobenius;
use frobheis::io::{self, IoError};
use frobheis::macros::Heis;
use frobheis::sample::{self, DiagramShape};
use frobheis::Scalar;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::sync::Arc;

fn heis(name: &str, k: i64) -> Heis {
    Heis::new(Arc::new(frobenius::builtin(name).unwrap()), k)
}

#[test]
fn explicit_diagram() {
    let h = heis("trunc-poly-2", -1);
    let m = io::parse_morphism(
        &h,
        r#"{"domain": "+", "terms": [
            {"coeff": "2/3", "slices": [{"pos": 0, "gen": "dot"}, {"pos": 0, "gen": {"token": {"z": "1"}}}]},
            {"coeff": -1, "slices": []}
        ]}"#,
    )
    .unwrap();
    let z = h.b(1);
    let expect = h.dots(1).then(&h.token(&z)).scaled(&Scalar::new(2, 3)).minus(&h.id("+"));
    assert_eq!(m, expect);
}

#[test]
fn single_diagram_shorthand() {
    let h = heis("trivial", -1);
    let m = io::parse_morphism(&h, r#"{"domain": "++", "slices": [{"pos": 0, "gen": "s"}, {"pos": 0, "gen": "s"}]}"#).unwrap();
    assert_eq!(m, h.s().then(&h.s()));
}

#[test]
fn macro_terms_with_whiskers() {
    let h = heis("clifford", -1);
    let m = io::parse_morphism(
        &h,
        r#"{"domain": "+", "terms": [{"macro": "ccbubble", "params": {"dots": 1, "token": {"c": "1"}}, "right": "+"}]}"#,
    )
    .unwrap();
    assert_eq!(m, h.ccw(1, &h.b(1)).whisker(&[], &frobheis::diagram::word("+")));
    let top = io::morphism_from_value(&h, &json!({"macro": "right-curl", "params": {"r": 2}})).unwrap();
    assert_eq!(top, h.right_curl(2));
}

#[test]
fn every_macro_expands() {
    let h = heis("trunc-poly-2", -2);
    let p = json!({"dots": 1, "r": 1, "token": {"z": "1"}, "orient": "ccw", "left": [{"dots": 1}], "right": [{"token": {"1": "1"}}]});
    for name in io::MACROS {
        let m = io::macro_morphism(&h, name, &p).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(m.check().is_ok(), "{name}");
    }
}

#[test]
fn decorated_caps_round_trip() {
    let h = heis("clifford", -2);
    let m = Morphism::gen(Gen::DecLeftCap(1, h.b(1))).then(&Morphism::gen(Gen::DecLeftCup(0, h.one())));
    let back = io::parse_morphism(&h, &io::morphism_to_string(&h.alg, &m)).unwrap();
    assert_eq!(back, m);
}

#[test]
fn errors_are_reported() {
    let h = heis("trivial", -1);
    assert!(matches!(io::parse_morphism(&h, "{"), Err(IoError::Json(_))));
    assert!(matches!(io::parse_morphism(&h, r#"{"domain": "+", "slices": [{"pos": 0, "gen": "bogus"}]}"#), Err(_)));
    assert!(matches!(
        io::parse_morphism(&h, r#"{"domain": "+", "slices": [{"pos": 0, "gen": "s"}]}"#),
        Err(IoError::Diagram(_))
    ));
    let r = io::parse_morphism(&h, r#"{"domain": "+", "terms": [{"slices": []}, {"slices": [{"pos": 0, "gen": "cup"}]}]}"#);
    assert!(matches!(r, Err(IoError::Diagram(_))));
    assert!(io::macro_morphism(&h, "no-such-macro", &json!({})).is_err());
    assert!(io::macro_morphism(&h, "right-curl", &json!({"r": -1})).is_err());
}

#[test]
fn empty_sum_keeps_its_boundary() {
    let h = heis("trivial", -1);
    let m = io::parse_morphism(&h, r#"{"domain": "+-", "codomain": "", "terms": []}"#).unwrap();
    assert!(m.is_zero());
    assert_eq!(m.codomain, vec![]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(seed in any::<u64>(), which in 0usize..3) {
        let name = ["trunc-poly-3", "clifford", "trivial"][which];
        let h = heis(name, -1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dom = sample::random_word(3, &mut rng);
        let a = Morphism::from_diagram(sample::random_diagram(&h.alg, &dom, &DiagramShape::default(), &mut rng));
        let b = Morphism::from_diagram(sample::random_diagram(&h.alg, &dom, &DiagramShape::default(), &mut rng));
        let m = if a.codomain == b.codomain { a.plus(&b.scaled(&Scalar::new(-7, 2))) } else { a };
        let text = io::morphism_to_string(&h.alg, &m);
        let back = io::parse_morphism(&h, &text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(io::morphism_to_string(&h.alg, &back), text);
    }
}
