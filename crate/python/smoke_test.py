"""Quick end-to-end check of the Python bindings."""

import json

import frobheis


def main():
    cl = frobheis.Algebra("clifford")
    assert cl.dim == 2 and cl.nakayama_order == 2
    assert all(ok for _, ok in cl.validate())

    h = frobheis.Heis(frobheis.Algebra("trivial"), -1)
    o = frobheis.Oracle(frobheis.Algebra("trivial"), -1, 4)

    bubble = h.macro("ccbubble")
    assert o.matrix(bubble, 0) == [["1"]]
    assert h.eval_closed(bubble) == "1"

    s = h.parse(json.dumps({"domain": "++", "slices": [{"pos": 0, "gen": "s"}, {"pos": 0, "gen": "s"}]}))
    reduced, normalized, steps = h.simplify(s)
    assert normalized and steps == 1
    assert reduced == h.identity("++")

    zig = h.macro("zigzag-right-up")
    assert o.check_equal(zig, h.identity("+"), [0, 1, 2]) is None
    assert zig.omega().omega() == zig

    for lhs, rhs, params in h.relation("dotslide1"):
        assert o.check_equal(lhs, rhs, [0, 1, 2]) is None, params

    hc = frobheis.Heis(cl, 2)
    oc = frobheis.Oracle(cl, 2, 4)
    for lhs, rhs, params in hc.relation("clockwise-circ"):
        assert oc.check_equal(lhs, rhs, [0, 1]) is None, params

    print("python smoke test ok:", len(frobheis.RELATIONS), "relation ids")


if __name__ == "__main__":
    main()
