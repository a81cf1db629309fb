import random
from fractions import Fraction

import pytest

from finegraph.arc_graphs import (
    ChainCertificate,
    NonGenericInput,
    PointNotOnCurve,
    PointsDiffer,
    _arc_crossings,
    _arc_simple,
    bouquet_chain,
    cut_along,
    unicorn_path,
    verify_chain,
)
from finegraph.fine_graph import NotAClique, classify_clique3
from finegraph.generators import rand_chain_triple
from finegraph.geom_core import pt
from finegraph.surfaces import TorusCurve, torus_rep

F = Fraction


def horizontal(y):
    return TorusCurve([pt(0, y), pt(1, y)])


def vertical(x):
    return TorusCurve([pt(x, 0), pt(x, 1)])


# -------------------------------------------------------------- cut surface


def test_cut_along_origin():
    S = cut_along(horizontal(0), (F(0), F(0)))
    lo, hi = S.marked
    assert torus_rep(lo) == (0, 0) and torus_rep(hi) == (0, 0)
    assert hi[1] - lo[1] == 1


def test_cut_along_rejects_point_off_curve():
    with pytest.raises(PointNotOnCurve):
        cut_along(horizontal(F(1, 2)), (F(0), F(0)))


def test_chart_round_trip():
    S = cut_along(horizontal(0), (F(0), F(0)))
    rng = random.Random(3)
    for _ in range(100):
        p = (F(rng.randrange(0, 97), 97), F(rng.randrange(1, 89), 89))
        q = S.chart(p)
        assert S.chart_inv(q) == torus_rep(p)


def test_chart_rejects_point_on_cut():
    S = cut_along(horizontal(0), (F(0), F(0)))
    with pytest.raises(PointNotOnCurve):
        S.chart((F(1, 3), F(0)))


def test_vertical_becomes_arc_joining_marked_points():
    S = cut_along(horizontal(0), (F(0), F(0)))
    arc = S.curve_to_arc(vertical(0))
    assert arc[0] == S.marked[0]
    assert arc[-1] == S.marked[1]
    back = S.arc_to_curve(arc)
    assert back.homology in ((0, 1), (0, -1))


def test_curve_to_arc_rejects_double_crossing():
    S = cut_along(horizontal(0), (F(0), F(0)))
    zig = TorusCurve(
        [pt(0, 0), pt(F(1, 4), F(1, 2)), pt(F(1, 2), 0), pt(F(3, 4), F(-1, 2)),
         pt(1, 0)]
    )
    with pytest.raises(NonGenericInput):
        S.curve_to_arc(zig)


def test_curve_to_arc_rejects_wrong_point():
    S = cut_along(horizontal(0), (F(0), F(0)))
    with pytest.raises(PointsDiffer):
        S.curve_to_arc(vertical(F(1, 2)))


# ------------------------------------------------------------ unicorn paths


def zig_arc(S, x0, xs):
    pts = [(x0, F(1, 2))]
    for i, x in enumerate(xs):
        pts.append((x, F(1, 2) + F(i + 1, len(xs) + 1)))
    pts.append((x0, F(3, 2)))
    return S.curve_to_arc(TorusCurve(pts))


def assert_valid_path(S, path):
    boundary = S.boundary_set()
    for arc in path:
        assert _arc_simple(arc)
    for u, v in zip(path, path[1:]):
        assert _arc_crossings(u, v) == []


def test_unicorn_disjoint_arcs():
    S = cut_along(horizontal(F(1, 2)), (F(1, 4), F(1, 2)))
    g1 = S.curve_to_arc(vertical(F(1, 4)))
    g2 = zig_arc(S, F(1, 4), [F(1, 8)])
    path = unicorn_path(S, g1, g2)
    assert len(path) == 2
    assert_valid_path(S, path)


def test_unicorn_one_crossing():
    S = cut_along(horizontal(F(1, 2)), (F(1, 4), F(1, 2)))
    g1 = S.curve_to_arc(vertical(F(1, 4)))
    g2 = zig_arc(S, F(1, 4), [F(3, 8), F(1, 8)])
    assert len(_arc_crossings(g1, g2)) == 1
    path = unicorn_path(S, g1, g2)
    assert len(path) <= 4
    assert_valid_path(S, path)


def test_unicorn_ten_crossings_strictly_decreasing():
    S = cut_along(horizontal(F(1, 2)), (F(1, 4), F(1, 2)))
    g1 = S.curve_to_arc(vertical(F(1, 4)))
    xs = [F(3, 8) if i % 2 == 0 else F(1, 8) for i in range(11)]
    g2 = zig_arc(S, F(1, 4), xs)
    assert len(_arc_crossings(g1, g2)) == 10
    path = unicorn_path(S, g1, g2)
    assert_valid_path(S, path)
    # crossing counts with g1 strictly decrease from g2 back toward g1
    counts = [len(_arc_crossings(path[0], arc)) for arc in path[1:]]
    assert counts == sorted(counts) and len(set(counts)) == len(counts)
    assert counts[-1] == 10


# ------------------------------------------------------------ bouquet chains


def test_chain_identical_curves():
    a = horizontal(F(1, 2))
    b = vertical(F(1, 4))
    cert = bouquet_chain(a, b, b)
    assert len(cert.edges) == 1 and cert.moves == []
    assert verify_chain(cert) == []


def test_chain_rejects_different_points():
    a = horizontal(F(1, 2))
    with pytest.raises(PointsDiffer):
        bouquet_chain(a, vertical(F(1, 4)), vertical(F(3, 4)))


def test_chain_touching_pair_inserts_auxiliary():
    a = horizontal(F(1, 2))
    b = vertical(F(1, 4))
    c = TorusCurve([pt(F(1, 8), 0), pt(F(1, 4), F(1, 2)), pt(F(1, 8), 1)])
    cert = bouquet_chain(a, b, c)
    # both germs of c sit on one side of b, so one auxiliary hop is needed
    assert len(cert.moves) == 2
    assert verify_chain(cert) == []


def test_chain_many_extra_crossings():
    a = horizontal(F(1, 2))
    b = vertical(F(1, 4))
    pts = [pt(F(1, 4), F(1, 2))]
    xs = [F(3, 8) if i % 2 == 0 else F(1, 8) for i in range(6)]
    for i, x in enumerate(xs):
        pts.append((x, F(1, 2) + F(i + 1, len(xs) + 1)))
    pts.append(pt(F(1, 4), F(3, 2)))
    c = TorusCurve(pts)
    cert = bouquet_chain(a, b, c)
    assert verify_chain(cert) == []
    for m in cert.moves:
        assert classify_clique3(*m).type == "bouquet"
    x = torus_rep(cert.edges[0].point)
    assert all(torus_rep(e.point) == x for e in cert.edges)


def test_chain_random_triples():
    rng = random.Random(19)
    for _ in range(5):
        trio = rand_chain_triple(rng)
        cert = bouquet_chain(*trio)
        assert verify_chain(cert) == []


def test_verifier_rejects_tampered_chain():
    a = horizontal(F(1, 2))
    b = vertical(F(1, 4))
    c = TorusCurve([pt(F(1, 8), 0), pt(F(1, 4), F(1, 2)), pt(F(1, 8), 1)])
    cert = bouquet_chain(a, b, c)
    bad = ChainCertificate(edges=cert.edges, moves=list(cert.moves))
    bad.moves[0] = (a, b, vertical(F(3, 4)))
    assert verify_chain(bad) != []
