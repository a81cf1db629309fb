import random
from fractions import Fraction

import pytest

from finegraph.curves_ops import intersect_curves
from finegraph.fine_graph import (
    ALL_DISJOINT,
    BOUQUET,
    NECKLACE,
    TWO_PAIR,
    DisjointEdge,
    IsNecklace,
    NotAClique,
    NotAVertex,
    NotFar,
    NonEdge,
    TransverseEdge,
    check_vertex,
    classify_clique3,
    faces_met,
    far_witness,
    is_edge,
    necklace_witness_F,
    refute_N,
)
from finegraph.generators import REALIZABLE_TYPES, rand_clique3, rand_vertex
from finegraph.geom_core import pt, Segment
from finegraph.routing import curves_segment_set, torus_route
from finegraph.surfaces import TorusCurve, complement_components

F = Fraction


def geodesic(p, q, x0, y0):
    return TorusCurve([pt(x0, y0), pt(F(x0) + p, F(y0) + q)])


def necklace_trio():
    a = geodesic(1, 0, 0, F(1, 2))
    b = geodesic(0, 1, F(1, 2), 0)
    c = TorusCurve([pt(0, F(1, 4)), pt(F(3, 4), 1), pt(1, F(5, 4))])
    return a, b, c


def bouquet_trio():
    return (
        geodesic(1, 0, 0, F(1, 2)),
        geodesic(0, 1, F(1, 2), 0),
        geodesic(1, 1, 0, 0),
    )


# ------------------------------------------------------------------ edges


def test_edge_tags():
    a = geodesic(1, 0, 0, F(1, 2))
    assert isinstance(is_edge(a, geodesic(1, 0, 0, F(1, 4))), DisjointEdge)
    tag = is_edge(a, geodesic(0, 1, F(1, 3), 0))
    assert tag == TransverseEdge((F(1, 3), F(1, 2)))


def test_edge_rejects_multi_crossing():
    a = geodesic(1, 0, 0, F(1, 2))
    b = geodesic(0, 1, F(1, 4), 0)
    c = geodesic(2, 1, 0, 0)  # crosses b twice
    assert isinstance(is_edge(b, c), NonEdge)


def test_edge_rejects_touching():
    a = geodesic(1, 0, 0, F(1, 3))
    b = TorusCurve([pt(0, F(2, 3)), pt(F(1, 2), F(1, 3)), pt(1, F(2, 3))])
    assert isinstance(is_edge(a, b), NonEdge)


def test_nonvertex_raises():
    a = geodesic(1, 0, 0, F(1, 2))
    sep = TorusCurve(
        [pt(F(1, 8), F(1, 8)), pt(F(3, 8), F(1, 8)), pt(F(3, 8), F(3, 8)),
         pt(F(1, 8), F(3, 8)), pt(F(1, 8), F(1, 8))]
    )
    with pytest.raises(NotAVertex):
        is_edge(a, sep)


# ------------------------------------------------------------ clique types


def test_classify_necklace():
    rep = classify_clique3(*necklace_trio())
    assert rep.profile == (1, 1, 1)
    assert rep.type == NECKLACE
    assert len(set(rep.points)) == 3


def test_classify_bouquet():
    rep = classify_clique3(*bouquet_trio())
    assert rep.type == BOUQUET
    assert set(rep.points) == {(F(1, 2), F(1, 2))}


def test_classify_all_disjoint_and_two_pair():
    a = geodesic(1, 0, 0, F(1, 6))
    b = geodesic(1, 0, 0, F(1, 2))
    c = geodesic(1, 0, 0, F(5, 6))
    assert classify_clique3(a, b, c).type == ALL_DISJOINT
    rep = classify_clique3(a, geodesic(0, 1, F(1, 3), 0), c)
    assert rep.type == TWO_PAIR
    assert rep.profile == (1, 1, 0)


def test_classify_rejects_non_clique():
    a = geodesic(1, 0, 0, F(1, 2))
    b = geodesic(0, 1, F(1, 4), 0)
    c = geodesic(2, 1, 0, 0)
    with pytest.raises(NotAClique):
        classify_clique3(a, b, c)


def test_generated_cliques_classify(seeded=11):
    rng = random.Random(seeded)
    for typ in REALIZABLE_TYPES:
        for _ in range(3):
            trio = rand_clique3(rng, typ)
            assert classify_clique3(*trio).type == typ


# --------------------------------------------------------------- witnesses


def test_necklace_witness_F_standard():
    Fset = necklace_witness_F(*necklace_trio())
    assert len(Fset) == 6
    classes = sorted(f.homology for f in Fset)
    assert classes == [(-1, -1), (-1, 0), (0, -1), (0, 1), (1, 0), (1, 1)]
    for f in Fset:
        check_vertex(f)


def test_necklace_witness_F_random_necklaces():
    rng = random.Random(5)
    for _ in range(3):
        trio = rand_clique3(rng, NECKLACE)
        Fset = necklace_witness_F(*trio)
        assert 4 <= len(Fset) <= 8
        for f in Fset:
            check_vertex(f)


def test_far_witness_properties():
    a = geodesic(1, 0, 0, F(1, 2))
    b = geodesic(0, 1, F(1, 2), 0)
    c = geodesic(1, 0, 0, F(1, 8))
    a2, b2 = far_witness(a, b, c)
    tag = is_edge(a2, b2)
    assert tag == TransverseEdge((F(1, 2), F(1, 2)))
    rep = classify_clique3(a2, b2, c)
    assert rep.type != BOUQUET
    # germ sharing: both witnesses pass through the edge point along the
    # original curves, so they meet a and b there too
    assert (F(1, 2), F(1, 2)) in [p for p, _ in intersect_curves(a2, b).points]


def test_far_witness_rejects_point_on_c():
    a, b, c = bouquet_trio()
    with pytest.raises(NotFar):
        far_witness(a, b, c)


# ---------------------------------------------------------------- refuting


def test_refute_rejects_necklace():
    with pytest.raises(IsNecklace):
        refute_N(*necklace_trio())


@pytest.mark.parametrize(
    "trio",
    [
        bouquet_trio(),
        (geodesic(1, 0, 0, F(1, 6)), geodesic(1, 0, 0, F(1, 2)),
         geodesic(1, 0, 0, F(5, 6))),
        (geodesic(1, 0, 0, F(1, 4)), geodesic(0, 1, F(1, 2), 0),
         geodesic(1, 0, 0, F(3, 4))),
    ],
    ids=["bouquet", "all_disjoint", "two_pair"],
)
def test_refute_basic(trio):
    d = refute_N(*trio)
    check_vertex(d)
    for u in trio:
        assert not isinstance(is_edge(d, u), NonEdge)
    faces = complement_components(list(trio))
    assert set(faces_met(d, list(trio), faces)) == set(range(len(faces)))


def test_refute_with_alphas():
    trio = (geodesic(1, 0, 0, F(1, 4)), geodesic(0, 1, F(1, 2), 0),
            geodesic(1, 0, 0, F(3, 4)))
    alphas = [geodesic(0, 1, F(1, 3), 0), geodesic(1, 1, F(1, 7), 0)]
    d = refute_N(*trio, alphas=alphas)
    check_vertex(d)
    for al in alphas:
        assert len(intersect_curves(d, al).transverse_points()) >= 2
    for u in trio:
        assert not isinstance(is_edge(d, u), NonEdge)


# ----------------------------------------------------------------- routing


def test_route_avoids_obstacles():
    obstacles = curves_segment_set([geodesic(1, 0, 0, F(1, 2))])
    r = torus_route(obstacles, pt(F(1, 8), F(1, 8)), pt(F(7, 8), F(1, 4)))
    assert r is not None
    for i in range(len(r) - 1):
        assert not obstacles.hits(Segment(r[i], r[i + 1]))


def test_route_blocked_between_parallel_walls():
    # two homotopic walls trap the start in an annulus the end is outside of
    walls = curves_segment_set(
        [geodesic(0, 1, F(1, 4), 0), geodesic(0, 1, F(3, 4), 0)]
    )
    r = torus_route(
        walls, pt(F(1, 2), F(1, 2)), pt(F(7, 8), F(1, 2)), n=16, max_n=32
    )
    assert r is None
