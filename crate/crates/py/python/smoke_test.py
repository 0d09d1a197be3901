"""Smoke test for the normplane_py extension.

Run after building, with the module on PYTHONPATH:

    cargo build --release -p normplane-py --features extension-module
    cp target/release/libnormplane_py.so /tmp/np/normplane_py.so
    PYTHONPATH=/tmp/np python3 crates/py/python/smoke_test.py
"""
import math

import normplane_py as np_


def main():
    g = np_.Gauge.euclidean()
    assert abs(g.norm((3.0, 4.0)) - 5.0) < 1e-12
    l3 = np_.Gauge.lp(3.0)
    assert l3.is_strictly_convex()
    skew = np_.Gauge.from_json('{"type":"linear-image","matrix":[[1.3,0.4],[-0.2,0.8]],"base":{"type":"lp","p":3}}')
    assert "linear-image" in repr(skew)

    try:
        np_.Gauge.lp(1.0)
    except ValueError as e:
        assert "range" in str(e)
    else:
        raise AssertionError("p = 1 accepted")

    pts = [(0.0, 0.0), (2.0, 0.0), (1.0, math.sqrt(3.0))]
    r, c = np_.circumradius(g, pts)
    assert abs(r - 2.0 / math.sqrt(3.0)) < 1e-6, r
    assert abs(c[0] - 1.0) < 1e-6 and abs(c[1] - 1.0 / math.sqrt(3.0)) < 1e-6

    bi = np_.ball_intersection(g, pts, 2.0)
    assert bi.kind == "region" and len(bi) == 3
    assert bi.contains(c)
    assert np_.ball_intersection(g, pts, 0.5 * r).is_empty()

    hull = np_.ball_hull(g, pts, 2.0)
    assert sorted(hull.vertex_indices) == [0, 1, 2]
    assert all(hull.chain.contains(p) for p in pts)
    assert hull.chain.contains(c)

    cheb = np_.chebyshev_set(g, pts)
    assert cheb.kind == "point", cheb

    two = [(0.0, 0.0), (0.2, 0.0), (10.0, 0.0), (10.0, 0.2)]
    d = np_.decide(l3, two, 0.25, 0.2)
    assert d.yes and bool(d)
    for p in two:
        assert l3.dist(p, d.center1) <= 0.25 * (1 + 1e-9) or l3.dist(p, d.center2) <= 0.2 * (1 + 1e-9)
    assert not np_.decide(l3, two, 0.02, 0.01)
    print("smoke test ok", np_.__version__)


if __name__ == "__main__":
    main()
