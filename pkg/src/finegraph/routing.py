"""Grid-based exact routing in the complement of PL obstacles.

Paths are found by BFS on a rational grid whose edges are tested exactly
against the obstacle segments (float boxes only prefilter).  Used to thread
witness curves through arrangement faces and strips; every result is an
exact PL path whose segments provably avoid the obstacles.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .geom_core import (
    Empty,
    RatPoint,
    Segment,
    segment_intersection,
    vadd,
)
from .surfaces import TorusCurve


def _surely_disjoint(px, py, qx, qy, ax, ay, bx, by) -> bool:
    """Float filter: True only when the two segments provably miss.

    A segment strictly on one side of the other's supporting line, by more
    than a conservative rounding margin, cannot touch it; anything closer
    falls through to the exact test."""
    m = 1e-9 * (1.0 + max(abs(px), abs(py), abs(qx), abs(qy), abs(ax), abs(ay), abs(bx), abs(by))) ** 2
    d1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    d2 = (bx - ax) * (qy - ay) - (by - ay) * (qx - ax)
    if (d1 > m and d2 > m) or (d1 < -m and d2 < -m):
        return True
    d3 = (qx - px) * (ay - py) - (qy - py) * (ax - px)
    d4 = (qx - px) * (by - py) - (qy - py) * (bx - px)
    return (d3 > m and d4 > m) or (d3 < -m and d4 < -m)


def _surely_crossing(px, py, qx, qy, ax, ay, bx, by) -> bool:
    """Float filter: True only when the segments provably cross properly."""
    m = 1e-9 * (1.0 + max(abs(px), abs(py), abs(qx), abs(qy), abs(ax), abs(ay), abs(bx), abs(by))) ** 2
    d1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    d2 = (bx - ax) * (qy - ay) - (by - ay) * (qx - ax)
    if not ((d1 > m and d2 < -m) or (d1 < -m and d2 > m)):
        return False
    d3 = (qx - px) * (ay - py) - (qy - py) * (ax - px)
    d4 = (qx - px) * (by - py) - (qy - py) * (bx - px)
    return (d3 > m and d4 < -m) or (d3 < -m and d4 > m)


class SegmentSet:
    """Obstacle segments with float box and orientation prefilters.

    ``wrap_x``/``wrap_y`` mark translation lattice directions under which the
    obstacles repeat ((1,0),(0,1) for torus curves, (1,0) for annulus lifts,
    none for plain planar obstacles)."""

    def __init__(
        self,
        segs: Sequence[Segment],
        wrap_x: bool = False,
        wrap_y: bool = False,
    ):
        self.segs = list(segs)
        self.wrap_x = wrap_x
        self.wrap_y = wrap_y
        self._pts = [p for s in self.segs for p in (s.p, s.q)]
        self._boxf = []
        self._segf = []
        for s in self.segs:
            px, py = float(s.p[0]), float(s.p[1])
            qx, qy = float(s.q[0]), float(s.q[1])
            x0, x1 = (px, qx) if px <= qx else (qx, px)
            y0, y1 = (py, qy) if py <= qy else (qy, py)
            pad = 1e-9 * (1.0 + max(abs(x0), abs(x1), abs(y0), abs(y1)))
            self._boxf.append((x0 - pad, x1 + pad, y0 - pad, y1 + pad))
            self._segf.append((px, py, qx, qy))
        if self._pts:
            xs = [float(p[0]) for p in self._pts]
            ys = [float(p[1]) for p in self._pts]
            self._obox = (min(xs), max(xs), min(ys), max(ys))
        else:
            self._obox = None

    def _translates(self, ax0, ax1, ay0, ay1) -> list[tuple[int, int]]:
        """Integer shifts whose obstacle copies can reach the probe box.

        Float bounds widened by a slack far above rounding error; a spurious
        extra translate only costs a rejected box test."""
        if not self.segs:
            return []
        if not (self.wrap_x or self.wrap_y):
            return [(0, 0)]
        bx0, bx1, by0, by1 = self._obox
        slack = 1e-6
        vx = (
            range(math.ceil(ax0 - bx1 - slack), math.floor(ax1 - bx0 + slack) + 1)
            if self.wrap_x
            else (0,)
        )
        vy = (
            range(math.ceil(ay0 - by1 - slack), math.floor(ay1 - by0 + slack) + 1)
            if self.wrap_y
            else (0,)
        )
        return [(i, j) for i in vx for j in vy]

    _GRID = 32

    def _cell_range(self, lo, hi, wrap):
        g = self._GRID
        lo, hi = lo - 1e-6, hi + 1e-6
        a, b = math.floor(lo * g), math.floor(hi * g)
        if wrap:
            if b - a >= g:
                return range(g)
            return [c % g for c in range(a, b + 1)]
        return range(a, b + 1)

    def _candidates(self, bx0, bx1, by0, by1):
        """Indices of obstacle segments whose box can meet the probe box
        under some translate; a conservative superset via cell buckets."""
        if not hasattr(self, "_cells"):
            cells: dict[tuple[int, int], list[int]] = {}
            for k, (sx0, sx1, sy0, sy1) in enumerate(self._boxf):
                for cx in self._cell_range(sx0, sx1, self.wrap_x):
                    for cy in self._cell_range(sy0, sy1, self.wrap_y):
                        cells.setdefault((cx, cy), []).append(k)
            self._cells = cells
        out: set[int] = set()
        for cx in self._cell_range(bx0, bx1, self.wrap_x):
            for cy in self._cell_range(by0, by1, self.wrap_y):
                out.update(self._cells.get((cx, cy), ()))
        return out

    def surely_free(self, px, py, qx, qy) -> bool:
        """True only when the float segment provably misses every obstacle
        copy; anything within the rounding margin counts as blocked."""
        if not self.segs:
            return True
        bx0, bx1 = (px, qx) if px <= qx else (qx, px)
        by0, by1 = (py, qy) if py <= qy else (qy, py)
        pad = 1e-9 * (1.0 + max(abs(bx0), abs(bx1), abs(by0), abs(by1)))
        cand = self._candidates(bx0, bx1, by0, by1)
        for (i, j) in self._translates(bx0, bx1, by0, by1):
            a0, a1 = bx0 - i - pad, bx1 - i + pad
            b0, b1 = by0 - j - pad, by1 - j + pad
            for k in cand:
                sx0, sx1, sy0, sy1 = self._boxf[k]
                if sx0 > a1 or a0 > sx1 or sy0 > b1 or b0 > sy1:
                    continue
                if not _surely_disjoint(px - i, py - j, qx - i, qy - j, *self._segf[k]):
                    return False
        return True

    def hits(self, seg: Segment, allow: Iterable[RatPoint] = ()) -> bool:
        """Does seg touch any obstacle (modulo wraps)?  Contacts exactly at
        points listed in ``allow`` are ignored."""
        if not self.segs:
            return False
        allow = set(allow)
        px, py = float(seg.p[0]), float(seg.p[1])
        qx, qy = float(seg.q[0]), float(seg.q[1])
        bx0, bx1 = (px, qx) if px <= qx else (qx, px)
        by0, by1 = (py, qy) if py <= qy else (qy, py)
        pad = 1e-9 * (1.0 + max(abs(bx0), abs(bx1), abs(by0), abs(by1)))
        cand = self._candidates(bx0, bx1, by0, by1)
        for (i, j) in self._translates(bx0, bx1, by0, by1):
            fi, fj = float(i), float(j)
            a0, a1 = bx0 - fi - pad, bx1 - fi + pad
            b0, b1 = by0 - fj - pad, by1 - fj + pad
            moved = None
            for k in cand:
                sx0, sx1, sy0, sy1 = self._boxf[k]
                if sx0 > a1 or a0 > sx1 or sy0 > b1 or b0 > sy1:
                    continue
                if _surely_disjoint(px - fi, py - fj, qx - fi, qy - fj, *self._segf[k]):
                    continue
                if not allow and _surely_crossing(
                    px - fi, py - fj, qx - fi, qy - fj, *self._segf[k]
                ):
                    return True
                if moved is None:
                    v = (Fraction(-i), Fraction(-j))
                    moved = Segment(vadd(seg.p, v), vadd(seg.q, v))
                res = segment_intersection(moved, self.segs[k])
                if isinstance(res, Empty):
                    continue
                if (
                    hasattr(res, "point")
                    and vadd(res.point, (Fraction(i), Fraction(j))) in allow
                ):
                    continue
                return True
        return False


def curves_segment_set(curves: Sequence[TorusCurve]) -> SegmentSet:
    segs = [s for c in curves for s in c.segments()]
    return SegmentSet(segs, wrap_x=True, wrap_y=True)


def shortcut(
    path: list[RatPoint], blocked: Callable[[Segment], bool]
) -> list[RatPoint]:
    """Greedy removal of interior vertices while the direct segment is free."""
    out = list(path)
    changed = True
    while changed and len(out) > 2:
        changed = False
        i = 0
        while i + 2 < len(out):
            if out[i] == out[i + 2]:
                del out[i + 1 : i + 3]
                changed = True
                continue
            if not blocked(Segment(out[i], out[i + 2])):
                del out[i + 1]
                changed = True
            else:
                i += 1
    return out


def torus_route(
    obstacles: SegmentSet,
    start: RatPoint,
    end: RatPoint,
    n: int = 16,
    max_n: int = 128,
) -> Optional[list[RatPoint]]:
    """A PL path from start to some integer translate of end avoiding the
    obstacles, found on a torus grid.  Returns lifted coordinates starting
    exactly at ``start``; None if no route was found up to max_n."""
    if start != end and not obstacles.hits(Segment(start, end), allow=[start, end]):
        return [start, end]
    while n <= max_n:
        path = _torus_route_once(obstacles, start, end, n)
        if path is not None:
            return shortcut(path, obstacles.hits)
        n *= 2
    return None


def _node_base(i: int, j: int, n: int) -> RatPoint:
    return (Fraction(i, n) + Fraction(1, 3 * n), Fraction(j, n) + Fraction(1, 5 * n))


def _attach(
    obstacles: SegmentSet, p: RatPoint, n: int
) -> list[tuple[tuple[int, int], tuple[int, int], RatPoint]]:
    """Grid nodes reachable from p by one clear segment.

    Returns (wrapped_key, raw_ints, lifted_node) triples where lifted_node
    is in p's frame."""
    out = []
    i0 = (p[0] - Fraction(1, 3 * n)) * n
    j0 = (p[1] - Fraction(1, 5 * n)) * n
    for i in range(math.floor(i0) - 1, math.floor(i0) + 3):
        for j in range(math.floor(j0) - 1, math.floor(j0) + 3):
            q = _node_base(i, j, n)
            if q == p:
                out.append(((i % n, j % n), (i, j), q))
                continue
            if not obstacles.hits(Segment(p, q), allow=[p]):
                out.append(((i % n, j % n), (i, j), q))
    return out


def _torus_route_once(
    obstacles: SegmentSet, start: RatPoint, end: RatPoint, n: int
) -> Optional[list[RatPoint]]:
    starts = _attach(obstacles, start, n)
    ends = _attach(obstacles, end, n)
    if not starts or not ends:
        return None
    end_keys = {key for key, _, _ in ends}
    end_lift = {key: q for key, _, q in ends}

    # the BFS runs on floats: an edge counts as free only when it clears the
    # obstacles by more than the rounding margin, so accepted edges are
    # provably clear and rejected ones merely wait for a finer grid
    h = 1.0 / n
    ox, oy = 1.0 / (3 * n), 1.0 / (5 * n)
    blocked_cache: dict[tuple, bool] = {}

    def edge_free(i, j, di, dj):
        key = (i, j, di, dj)
        if key not in blocked_cache:
            px, py = i * h + ox, j * h + oy
            blocked_cache[key] = obstacles.surely_free(
                px, py, px + di * h, py + dj * h
            )
        return blocked_cache[key]

    prev: dict[tuple[int, int], Optional[tuple[int, int]]] = {}
    raw: dict[tuple[int, int], tuple[int, int]] = {}
    dq = deque()
    for key, ints, _q in starts:
        if key not in prev:
            prev[key] = None
            raw[key] = ints
            dq.append(key)
    goal = None
    while dq:
        cur = dq.popleft()
        if cur in end_keys:
            goal = cur
            break
        ci, cj = cur
        ri, rj = raw[cur]
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nxt = ((ci + di) % n, (cj + dj) % n)
            if nxt in prev:
                continue
            if edge_free(ci, cj, di, dj):
                prev[nxt] = cur
                raw[nxt] = (ri + di, rj + dj)
                dq.append(nxt)
    if goal is None:
        return None
    chain = []
    cur = goal
    while cur is not None:
        chain.append(_node_base(*raw[cur], n))
        cur = prev[cur]
    chain.reverse()
    # the end attach was computed in end's own frame; realign by the integer
    # vector separating the two lifts of the goal node
    e_key_lift = end_lift[goal]
    shift = (chain[-1][0] - e_key_lift[0], chain[-1][1] - e_key_lift[1])
    end_pt = (end[0] + shift[0], end[1] + shift[1])
    return [start] + chain + [end_pt]
