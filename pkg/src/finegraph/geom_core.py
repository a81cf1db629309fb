"""Exact rational planar primitives.

Points are pairs of ``fractions.Fraction``.  All predicates are exact; no
floating point enters any decision.  Floats appear only inside the
conservative bounding-box prefilter used to skip obviously disjoint segment
pairs, and every candidate surviving the prefilter is confirmed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction
RatPoint = tuple[Fraction, Fraction]


def rat(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def pt(x, y) -> RatPoint:
    return (rat(x), rat(y))


def vadd(p: RatPoint, q: RatPoint) -> RatPoint:
    return (p[0] + q[0], p[1] + q[1])


def vsub(p: RatPoint, q: RatPoint) -> RatPoint:
    return (p[0] - q[0], p[1] - q[1])


def smul(t: Fraction, p: RatPoint) -> RatPoint:
    return (t * p[0], t * p[1])


def cross(u: RatPoint, v: RatPoint) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: RatPoint, v: RatPoint) -> Fraction:
    return u[0] * v[0] + u[1] * v[1]


def norm2(u: RatPoint) -> Fraction:
    return u[0] * u[0] + u[1] * u[1]


def dist2(p: RatPoint, q: RatPoint) -> Fraction:
    return norm2(vsub(p, q))


def sign(x: Fraction) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def orient(p: RatPoint, q: RatPoint, r: RatPoint) -> int:
    """Sign of the cross product (q-p) x (r-p)."""
    return sign(cross(vsub(q, p), vsub(r, p)))


@dataclass(frozen=True)
class Segment:
    p: RatPoint
    q: RatPoint

    def __post_init__(self):
        if self.p == self.q:
            raise ValueError("degenerate segment")


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class PointHit:
    point: RatPoint
    interior1: bool
    interior2: bool


@dataclass(frozen=True)
class Overlap:
    segment: Segment


IntersectionResult = Empty | PointHit | Overlap

EMPTY = Empty()


def _axis_interval(a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    return (a, b) if a <= b else (b, a)


def _collinear_overlap(s1: Segment, s2: Segment) -> IntersectionResult:
    # Parametrize both segments on the dominant axis of s1's direction.
    d = vsub(s1.q, s1.p)
    axis = 0 if abs(d[0]) >= abs(d[1]) else 1
    lo1, hi1 = _axis_interval(s1.p[axis], s1.q[axis])
    lo2, hi2 = _axis_interval(s2.p[axis], s2.q[axis])
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    if lo > hi:
        return EMPTY

    def at(seg: Segment, coord: Fraction) -> RatPoint:
        dd = vsub(seg.q, seg.p)
        t = (coord - seg.p[axis]) / dd[axis]
        return vadd(seg.p, smul(t, dd))

    if lo == hi:
        p = at(s1, lo)
        return PointHit(p, lo1 < lo < hi1, lo2 < lo < hi2)
    return Overlap(Segment(at(s1, lo), at(s1, hi)))


def segment_intersection(s1: Segment, s2: Segment) -> IntersectionResult:
    """Exact classification of the intersection of two segments."""
    d1 = vsub(s1.q, s1.p)
    d2 = vsub(s2.q, s2.p)
    denom = cross(d1, d2)
    w = vsub(s2.p, s1.p)
    if denom == 0:
        if cross(d1, w) != 0:
            return EMPTY
        return _collinear_overlap(s1, s2)
    t = cross(w, d2) / denom
    u = cross(w, d1) / denom
    if t < 0 or t > 1 or u < 0 or u > 1:
        return EMPTY
    p = vadd(s1.p, smul(t, d1))
    return PointHit(p, 0 < t < 1, 0 < u < 1)


def segments_touch(s1: Segment, s2: Segment) -> bool:
    return not isinstance(segment_intersection(s1, s2), Empty)


def polyline_edges(path: Sequence[RatPoint], closed: bool) -> list[Segment]:
    edges = [Segment(path[i], path[i + 1]) for i in range(len(path) - 1)]
    if closed and path[0] != path[-1]:
        edges.append(Segment(path[-1], path[0]))
    return edges


def polyline_self_intersects(path: Sequence[RatPoint], closed: bool = False) -> bool:
    """True iff non-adjacent edges meet, or adjacent edges meet off their
    shared vertex."""
    edges = polyline_edges(path, closed)
    n = len(edges)
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = j == i + 1 or (closed and i == 0 and j == n - 1)
            res = segment_intersection(edges[i], edges[j])
            if isinstance(res, Empty):
                continue
            if isinstance(res, Overlap):
                return True
            if not adjacent:
                return True
            shared = edges[i].q if j == i + 1 else edges[i].p
            if res.point != shared:
                return True
    return False


def bbox_candidate_pairs(
    segs1: Sequence[Segment], segs2: Sequence[Segment]
) -> Iterable[tuple[int, int]]:
    """Indices of segment pairs whose padded float boxes overlap.

    Conservative: float boxes are rounded outward, so no true intersection is
    ever skipped.  Callers must confirm candidates exactly.
    """
    import numpy as np

    def boxes(segs):
        arr = np.empty((len(segs), 4))
        for i, s in enumerate(segs):
            x0, x1 = sorted((float(s.p[0]), float(s.q[0])))
            y0, y1 = sorted((float(s.p[1]), float(s.q[1])))
            pad = 1e-9 * (1.0 + max(abs(x0), abs(x1), abs(y0), abs(y1)))
            arr[i] = (x0 - pad, x1 + pad, y0 - pad, y1 + pad)
        return arr

    b1 = boxes(segs1)
    b2 = boxes(segs2)
    if not len(b1) or not len(b2):
        return
    ok = (
        (b1[:, None, 0] <= b2[None, :, 1])
        & (b2[None, :, 0] <= b1[:, None, 1])
        & (b1[:, None, 2] <= b2[None, :, 3])
        & (b2[None, :, 2] <= b1[:, None, 3])
    )
    for i, j in zip(*ok.nonzero()):
        yield int(i), int(j)
