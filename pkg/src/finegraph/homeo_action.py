"""Action of explicit torus homeomorphisms on curves.

A homeomorphism acts on vertices of the intersection graph; the action must
preserve edge tags, three-clique types, and crossing points exactly.  Three
map kinds are supported: integral linear maps with determinant +-1, rational
translations, and piecewise-linear maps given by vertex images on a
triangulation of the fundamental square.  All arithmetic is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .geom_core import (
    Empty,
    RatPoint,
    Segment,
    cross,
    segment_intersection,
    smul,
    vadd,
    vsub,
)
from .fine_graph import (
    DisjointEdge,
    NotAClique,
    TransverseEdge,
    check_vertex,
    classify_clique3,
    is_edge,
)
from .surfaces import TorusCurve, torus_rep

LINEAR = "linear"
TRANSLATION = "translation"
PL = "pl"


class InvalidMap(ValueError):
    pass


@dataclass(frozen=True)
class Triangulation:
    """A triangulation of the fundamental square with images per vertex.

    Vertices on opposite sides of the square must come in partner pairs
    whose images differ by the same deck translation, so the map descends
    to the torus with identity action on homology."""

    vertices: tuple
    images: tuple
    triangles: tuple


@dataclass(frozen=True)
class TorusMap:
    kind: str
    matrix: Optional[tuple] = None
    shift: Optional[tuple] = None
    tri: Optional[Triangulation] = None

    def to_json(self):
        if self.kind == LINEAR:
            return {"kind": self.kind, "matrix": [list(r) for r in self.matrix]}
        if self.kind == TRANSLATION:
            return {"kind": self.kind, "shift": [str(v) for v in self.shift]}
        return {
            "kind": self.kind,
            "vertices": [[str(x), str(y)] for x, y in self.tri.vertices],
            "images": [[str(x), str(y)] for x, y in self.tri.images],
            "triangles": [list(t) for t in self.tri.triangles],
        }


def linear_map(m) -> TorusMap:
    m = ((int(m[0][0]), int(m[0][1])), (int(m[1][0]), int(m[1][1])))
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det not in (1, -1):
        raise InvalidMap("linear map must have determinant +-1")
    return TorusMap(kind=LINEAR, matrix=m)


def translation_map(v) -> TorusMap:
    return TorusMap(kind=TRANSLATION, shift=(Fraction(v[0]), Fraction(v[1])))


def _tri_area2(a, b, c) -> Fraction:
    return cross(vsub(b, a), vsub(c, a))


def _point_in_tri(p, a, b, c, strict=False):
    s1, s2, s3 = (
        _tri_area2(a, b, p),
        _tri_area2(b, c, p),
        _tri_area2(c, a, p),
    )
    if strict:
        return s1 > 0 and s2 > 0 and s3 > 0
    return s1 >= 0 and s2 >= 0 and s3 >= 0


def _tris_overlap(t1, t2) -> bool:
    """Open-interior overlap of two positively oriented triangles."""
    for p in t1:
        if _point_in_tri(p, *t2, strict=True):
            return True
    for p in t2:
        if _point_in_tri(p, *t1, strict=True):
            return True
    e1 = [Segment(t1[i], t1[(i + 1) % 3]) for i in range(3)]
    e2 = [Segment(t2[i], t2[(i + 1) % 3]) for i in range(3)]
    for s in e1:
        for t in e2:
            res = segment_intersection(s, t)
            if not isinstance(res, Empty) and getattr(res, "interior1", False) \
                    and getattr(res, "interior2", False):
                return True
    # identical triangles have no strict vertex containment or proper edge
    # crossings, but they certainly overlap
    return sorted(t1) == sorted(t2)


def pl_map(vertices, images, triangles) -> TorusMap:
    vertices = tuple((Fraction(x), Fraction(y)) for x, y in vertices)
    images = tuple((Fraction(x), Fraction(y)) for x, y in images)
    triangles = tuple(tuple(t) for t in triangles)
    if len(vertices) != len(images):
        raise InvalidMap("each vertex needs exactly one image")
    for x, y in vertices:
        if not (0 <= x <= 1 and 0 <= y <= 1):
            raise InvalidMap("triangulation vertices must lie in the square")
    # deck compatibility: partner vertices across the square map to images
    # differing by the same unit translation
    idx = {v: i for i, v in enumerate(vertices)}
    for v, i in idx.items():
        for d in ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))):
            w = vadd(v, d)
            if w in idx:
                if vsub(images[idx[w]], images[i]) != d:
                    raise InvalidMap("boundary vertex images do not descend")
    area = Fraction(0)
    src = []
    img = []
    for t in triangles:
        a, b, c = (vertices[i] for i in t)
        s2 = _tri_area2(a, b, c)
        if s2 <= 0:
            raise InvalidMap("source triangles must be positively oriented")
        area += s2
        src.append((a, b, c))
        ia, ib, ic = (images[i] for i in t)
        if _tri_area2(ia, ib, ic) <= 0:
            raise InvalidMap("image triangle is degenerate or flipped")
        img.append((ia, ib, ic))
    if area != 2:
        raise InvalidMap("source triangles do not tile the square")
    for u, v in combinations(range(len(triangles)), 2):
        if _tris_overlap(src[u], src[v]):
            raise InvalidMap("source triangles overlap")
        if _tris_overlap(img[u], img[v]):
            raise InvalidMap("image triangles overlap")
    if sum(_tri_area2(*t) for t in img) != 2:
        raise InvalidMap("image triangles do not tile a fundamental domain")
    return TorusMap(kind=PL, tri=Triangulation(vertices, images, triangles))


def _pl_point(f: TorusMap, p: RatPoint) -> RatPoint:
    base = torus_rep(p)
    deck = vsub(p, base)
    tri = f.tri
    for t in tri.triangles:
        a, b, c = (tri.vertices[i] for i in t)
        if _point_in_tri(base, a, b, c):
            den = _tri_area2(a, b, c)
            wa = _tri_area2(base, b, c) / den
            wb = _tri_area2(a, base, c) / den
            wc = 1 - wa - wb
            ia, ib, ic = (tri.images[i] for i in t)
            out = (
                wa * ia[0] + wb * ib[0] + wc * ic[0],
                wa * ia[1] + wb * ib[1] + wc * ic[1],
            )
            return vadd(out, deck)
    raise InvalidMap("point escapes the triangulation")


def map_point(f: TorusMap, p: RatPoint) -> RatPoint:
    p = (Fraction(p[0]), Fraction(p[1]))
    if f.kind == LINEAR:
        m = f.matrix
        return (m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1])
    if f.kind == TRANSLATION:
        return vadd(p, f.shift)
    return _pl_point(f, p)


def _grid_refine(path: Sequence[RatPoint], f: TorusMap) -> list[RatPoint]:
    """Subdivide a lifted path at every crossing with a triangulation edge
    (all integer translates), so each piece maps by one affine map."""
    lines = set()
    tri = f.tri
    for t in tri.triangles:
        for i in range(3):
            a = tri.vertices[t[i]]
            b = tri.vertices[t[(i + 1) % 3]]
            lines.add((a, b))
    out = []
    for i in range(len(path) - 1):
        p, q = path[i], path[i + 1]
        cuts = {Fraction(0)}
        lo = min(p[0], q[0]), min(p[1], q[1])
        hi = max(p[0], q[0]), max(p[1], q[1])
        for a, b in lines:
            for kx in range(math.floor(lo[0] - 1), math.ceil(hi[0] + 1)):
                for ky in range(math.floor(lo[1] - 1), math.ceil(hi[1] + 1)):
                    aa = (a[0] + kx, a[1] + ky)
                    bb = (b[0] + kx, b[1] + ky)
                    d = cross(vsub(q, p), vsub(bb, aa))
                    if d == 0:
                        continue
                    t1 = cross(vsub(aa, p), vsub(bb, aa)) / d
                    t2 = cross(vsub(aa, p), vsub(q, p)) / d
                    if 0 < t1 < 1 and 0 <= t2 <= 1:
                        cuts.add(t1)
        out.append(p)
        for t1 in sorted(cuts - {Fraction(0)}):
            out.append(vadd(p, smul(t1, vsub(q, p))))
    out.append(path[-1])
    return out


def apply(f: TorusMap, c: TorusCurve) -> TorusCurve:
    check_vertex(c)
    path = c.period_path()
    if f.kind == PL:
        path = _grid_refine(path, f)
    image = TorusCurve([map_point(f, p) for p in path])
    check_vertex(image)
    return image


def check_automorphism(f: TorusMap, universe: Sequence[TorusCurve]) -> list:
    """Violations of graph-automorphism behaviour on the universe; [] = pass.

    Checks every pair for preserved edge tag and equivariant crossing point,
    and every pairwise-adjacent triple for preserved clique type."""
    for c in universe:
        check_vertex(c)
    images = [apply(f, c) for c in universe]
    violations = []
    n = len(universe)
    tags = {}
    for i, j in combinations(range(n), 2):
        t1 = is_edge(universe[i], universe[j])
        t2 = is_edge(images[i], images[j])
        tags[(i, j)] = t1
        if type(t1) is not type(t2):
            violations.append(
                {"pair": [i, j], "kind": "edge_tag",
                 "before": type(t1).__name__, "after": type(t2).__name__}
            )
            continue
        if isinstance(t1, TransverseEdge):
            want = torus_rep(map_point(f, t1.point))
            if torus_rep(t2.point) != want:
                violations.append(
                    {"pair": [i, j], "kind": "edge_point",
                     "expected": [str(want[0]), str(want[1])],
                     "got": [str(torus_rep(t2.point)[0]),
                             str(torus_rep(t2.point)[1])]}
                )
    for i, j, k in combinations(range(n), 3):
        pair_tags = [tags[(i, j)], tags[(i, k)], tags[(j, k)]]
        if any(not isinstance(t, (DisjointEdge, TransverseEdge)) for t in pair_tags):
            continue
        before = classify_clique3(universe[i], universe[j], universe[k]).type
        try:
            after = classify_clique3(images[i], images[j], images[k]).type
        except NotAClique:
            after = "not_a_clique"
        if before != after:
            violations.append(
                {"triple": [i, j, k], "kind": "clique_type",
                 "before": before, "after": after}
            )
    return violations


def compose(f: TorusMap, g: TorusMap) -> TorusMap:
    """f after g, for the affine kinds."""
    if f.kind == LINEAR and g.kind == LINEAR:
        a, b = f.matrix, g.matrix
        return linear_map(
            (
                (a[0][0] * b[0][0] + a[0][1] * b[1][0],
                 a[0][0] * b[0][1] + a[0][1] * b[1][1]),
                (a[1][0] * b[0][0] + a[1][1] * b[1][0],
                 a[1][0] * b[0][1] + a[1][1] * b[1][1]),
            )
        )
    if f.kind == TRANSLATION and g.kind == TRANSLATION:
        return translation_map(vadd(f.shift, g.shift))
    raise InvalidMap("composition is only closed for matching affine kinds")
