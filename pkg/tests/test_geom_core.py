import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from finegraph.geom_core import (
    EMPTY,
    Empty,
    Overlap,
    PointHit,
    Segment,
    orient,
    polyline_self_intersects,
    pt,
    segment_intersection,
    vadd,
)

rats = st.fractions(min_value=-50, max_value=50, max_denominator=20)
points = st.tuples(rats, rats)


def test_orient_examples():
    assert orient(pt(0, 0), pt(1, 0), pt(0, 1)) == 1
    assert orient(pt(0, 0), pt(1, 0), pt(2, 0)) == 0
    # cross product by hand: 1*(-2/7) - 0*(1/3) < 0
    assert orient(pt(0, 0), pt(1, 0), pt(Fraction(1, 3), Fraction(-2, 7))) == -1


@given(points, points, points)
def test_orient_antisymmetry(p, q, r):
    assert orient(p, q, r) == -orient(p, r, q)


@given(points, points, points, points)
def test_orient_translation_invariance(p, q, r, t):
    assert orient(p, q, r) == orient(vadd(p, t), vadd(q, t), vadd(r, t))


def test_segment_intersection_crossing():
    res = segment_intersection(
        Segment(pt(0, 0), pt(1, 1)), Segment(pt(0, 1), pt(1, 0))
    )
    assert isinstance(res, PointHit)
    assert res.point == pt(Fraction(1, 2), Fraction(1, 2))
    assert res.interior1 and res.interior2


def test_segment_intersection_empty():
    res = segment_intersection(
        Segment(pt(0, 0), pt(1, 0)), Segment(pt(2, 0), pt(3, 0))
    )
    assert isinstance(res, Empty)


def test_segment_intersection_overlap():
    res = segment_intersection(
        Segment(pt(0, 0), pt(2, 0)), Segment(pt(1, 0), pt(3, 0))
    )
    assert isinstance(res, Overlap)
    assert {res.segment.p, res.segment.q} == {pt(1, 0), pt(2, 0)}


def test_segment_intersection_endpoint_touch():
    res = segment_intersection(
        Segment(pt(0, 0), pt(1, 0)), Segment(pt(1, 0), pt(1, 1))
    )
    assert isinstance(res, PointHit)
    assert res.point == pt(1, 0)
    assert not res.interior1 and not res.interior2


@given(points, points, points, points)
def test_segment_intersection_symmetric(a, b, c, d):
    if a == b or c == d:
        return
    s1, s2 = Segment(a, b), Segment(c, d)
    r12 = segment_intersection(s1, s2)
    r21 = segment_intersection(s2, s1)
    assert type(r12) is type(r21)
    if isinstance(r12, PointHit):
        assert r12.point == r21.point
        assert (r12.interior1, r12.interior2) == (r21.interior2, r21.interior1)
    if isinstance(r12, Overlap):
        assert {r12.segment.p, r12.segment.q} == {r21.segment.p, r21.segment.q}


@given(points, points, points, points)
def test_segment_intersection_vs_sampled_solver(a, b, c, d):
    # sampled parametric containment check: any sampled common point must be
    # reported, and a reported Empty forbids sampled hits
    if a == b or c == d:
        return
    s1, s2 = Segment(a, b), Segment(c, d)
    res = segment_intersection(s1, s2)
    rng = random.Random(7)
    for _ in range(10):
        t = Fraction(rng.randrange(0, 101), 100)
        p = vadd(a, ((b[0] - a[0]) * t, (b[1] - a[1]) * t))
        # is p on s2?
        on2 = False
        u_den = None
        dc = (d[0] - c[0], d[1] - c[1])
        w = (p[0] - c[0], p[1] - c[1])
        if dc[0] * w[1] - dc[1] * w[0] == 0:
            axis = 0 if dc[0] != 0 else 1
            u = w[axis] / dc[axis]
            on2 = 0 <= u <= 1
        if on2:
            assert not isinstance(res, Empty)


def test_polyline_square_simple():
    square = [pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]
    assert not polyline_self_intersects(square, closed=True)


def test_polyline_figure_eight():
    fig8 = [pt(0, 0), pt(1, 1), pt(1, 0), pt(0, 1)]
    assert polyline_self_intersects(fig8, closed=True)


def test_polyline_monotone_zigzag_simple():
    # x-monotone polylines are simple; checked against the O(n^2) oracle
    rng = random.Random(11)
    xs = sorted(
        {Fraction(rng.randrange(0, 10000), 7) for _ in range(100)}
    )
    path = [pt(x, Fraction(rng.randrange(-50, 50), 13)) for x in xs]
    assert not polyline_self_intersects(path, closed=False)


def test_polyline_adjacent_backtrack_detected():
    # adjacent edges overlapping beyond the shared vertex
    path = [pt(0, 0), pt(2, 0), pt(1, 0)]
    assert polyline_self_intersects(path, closed=False)
