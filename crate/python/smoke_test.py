"""Smoke test for the torusvc_py extension module.

Build and run from the repository root:

    cargo build -p torusvc-python --release
    cp target/release/libtorusvc_py.so python/torusvc_py.so
    python3 python/smoke_test.py
"""

import os
import sys
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import torusvc_py as tv


def main():
    # three points on the circle are shattered by arcs, four are not
    three = tv.PointSet(1, 3, [[0], [1], [2]])
    assert tv.shatter(three, "boxes")["shattered"]
    four = tv.PointSet(1, 4, [[0], [1], [2], [3]])
    report = tv.shatter(four, "boxes")
    assert not report["shattered"] and report["missing"] == 5
    assert tv.growth_count(four, "boxes") == 14
    assert tv.PointSet.from_text(four.to_text()).numers() == four.numers()

    shape = tv.realize(three, 0b101, "boxes")
    assert shape["kind"] == "box"
    start, end, closed = shape["arcs"][0]
    assert isinstance(start, Fraction) and closed

    # stripes of length 1/2 shatter n + 1 points in dimension 2^n
    xs = tv.build_stripe_set(2, "1/2")
    assert (xs.dim, len(xs)) == (4, 3)
    assert tv.shatter(xs, "stripes", Fraction(1, 2))["shattered"]

    m = tv.SymbolMatrix(4, [[0, 1, 2, 3, 0, 1, 2, 3]] * 2)
    assert tv.check_extraction(m, "exhaustive")["holds"]
    cols = tv.extract_columns(m, [3, 1])
    assert cols is not None and len(cols) == 2
    bad = tv.SymbolMatrix(2, [[0, 1], [0, 1], [0, 1]])
    verdict = tv.check_extraction(bad)
    assert not verdict["holds"] and verdict["failure_witness"] is not None

    lifted = tv.lift(xs, m, "1/2")
    assert (lifted.dim, len(lifted)) == (8, 6)
    checked, failures = tv.certify_lift(xs, m, "1/2")
    assert checked == 64 and failures == []

    ledger = tv.failure_probability_bound(2, 14, 4)
    assert ledger["ext_req"] and ledger["ratio_bound"] < Fraction(1, 2)
    assert tv.failure_probability_bound(2, 1, 2)["ratio_bound"] == 0

    rows = tv.bounds_table([1, 2])
    assert [(r["stripe_ub"], r["trivial_ub"], r["refined_ub"]) for r in rows] == [(6, 6, 7), (8, 17, 17)]
    p = tv.choose_parameters(2**20)
    assert (p["q"], p["m"], p["k"]) == (Fraction(21, 20), 9600, 104)
    assert tv.lower_bound_value(2**20) == 6988800

    res = tv.vc_exact(1, "boxes", n_max=5)
    assert res["value"] == 3 and res["refuted_at"] == 4
    assert len(res["witnesses"]) == 8

    hit = tv.search_shattered(2, 4, budget=2000, seed=1)
    assert hit is not None and tv.shatter(hit[0], "boxes")["shattered"]

    try:
        tv.vc_exact(2, "cubes", n_max=3)
    except tv.GuardError:
        pass
    else:
        raise AssertionError("expected a guard refusal")
    try:
        tv.PointSet(1, 2, [[5]])
    except tv.TorusVcError:
        pass
    else:
        raise AssertionError("expected a range error")

    print("smoke test passed")


if __name__ == "__main__":
    main()
