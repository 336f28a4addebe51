use frobheis::action::{ActionContext, Oracle};
use frobheis::diagram::Morphism;
use frobheis::frobenius::{self, FrobeniusAlgebra};
use frobheis::macros::Heis;
use frobheis::Scalar;
use std::sync::Arc;
use std::time::Instant;

fn alg(name: &str) -> Arc<FrobeniusAlgebra> {
    Arc::new(frobenius::builtin(name).unwrap())
}

fn assert_eq_on(o: &Oracle, lhs: &Morphism, rhs: &Morphism, levels: &[usize], what: &str) {
    let r = o.check_equal(lhs, rhs, levels).unwrap();
    assert!(r.is_none(), "{what} fails at level {:?}", r);
}

#[test]
fn adjunction_and_mates() {
    for name in ["trivial", "trunc-poly-2", "clifford"] {
        for k in [-1i64, -2] {
            let o = Oracle::new(alg(name), k, 4).unwrap();
            let h = o.heis.clone();
            assert_eq_on(&o, &h.zigzag_right_up(), &h.id("+"), &[0, 1, 2], "right zigzag up");
            assert_eq_on(&o, &h.zigzag_right_down(), &h.id("-"), &[0, 1, 2], "right zigzag down");
            assert_eq_on(&o, &h.zigzag_left_up(), &h.id("+"), &[0, 1, 2], "left zigzag up");
            assert_eq_on(&o, &h.zigzag_left_down(), &h.id("-"), &[0, 1, 2], "left zigzag down");
            assert_eq_on(&o, &h.tp(), &h.tp_alt(), &[0, 1, 2], "t' alternative");
        }
    }
}

#[test]
fn fake_bubbles_at_negative_level() {
    for name in ["trivial", "trunc-poly-2", "clifford"] {
        let a = alg(name);
        for k in [-1i64, -2] {
            let o = Oracle::new(a.clone(), k, 4).unwrap();
            let h = o.heis.clone();
            for i in 0..h.dim() {
                let f = h.b(i);
                let tr = h.tr(&f);
                for r in 0..(-k) {
                    let expect = if r == -k - 1 { Morphism::scalar(tr.clone()) } else { Morphism::scalar(Scalar::zero()) };
                    assert_eq_on(&o, &h.ccw(r, &f), &expect, &[0, 1, 2], "ccw bubble");
                }
                assert_eq_on(&o, &h.cw(k - 1, &f), &Morphism::scalar(-tr.clone()), &[0, 1], "cw negative");
            }
        }
    }
}

#[test]
fn inversion_block_timing() {
    let ctx = ActionContext::new(alg("trunc-poly-2"), -2, 5).unwrap();
    for n in 0..=4 {
        let t = Instant::now();
        ctx.check_inversion(n).unwrap();
        eprintln!("level {n}: {:?}", t.elapsed());
    }
    let _ = Heis::new(alg("trivial"), -1);
}
