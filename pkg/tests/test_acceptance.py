"""End-to-end acceptance gate.

One test per acceptance criterion; every check compares the implementation
against an oracle computed by an independent route frozen in this file
(definitional re-reads of intersection reports, brute-force translate
enumeration, tail-copy enumeration, signed crossing counts).
"""

import math
import random
import time
from fractions import Fraction

import pytest

from finegraph.arc_graphs import _arc_crossings, bouquet_chain, cut_along, unicorn_path, verify_chain
from finegraph.curves_ops import SideChoice, intersect_curves, push_aside
from finegraph.fine_graph import (
    IsNecklace,
    NonEdge,
    classify_clique3,
    faces_met,
    is_edge,
    necklace_witness_F,
    refute_N,
)
from finegraph.generators import REALIZABLE_TYPES, rand_chain_triple, rand_clique3, rand_vertex
from finegraph.germs_width import (
    GermSpec,
    distance_path,
    germ_width,
    rand_neighbor,
    relative_width,
)
from finegraph.homeo_action import check_automorphism, linear_map, pl_map
from finegraph.surfaces import (
    INFINITE,
    AnnulusArc,
    SurfaceModel,
    TorusCurve,
    complement_components,
    path_homology,
    torus_rep,
)

F = Fraction


# ------------------------------------------------------------------ oracles


def oracle_clique_type(curves):
    """Type read directly off the pairwise intersection reports."""
    pts = []
    for i in range(3):
        for j in range(i + 1, 3):
            rep = intersect_curves(curves[i], curves[j])
            if rep.overlaps or any(kind != "transverse" for _, kind in rep.points):
                return None
            t = rep.transverse_points()
            if len(t) > 1:
                return None
            pts.extend(torus_rep(p) for p in t)
    if len(pts) <= 2:
        return ["all_disjoint", "one_pair", "two_pair"][len(pts)]
    if len(set(pts)) == 1:
        return "bouquet"
    if len(set(pts)) == 3:
        return "necklace"
    return None


def _ccw(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segs_touch(p1, q1, p2, q2):
    d1, d2 = _ccw(p2, q2, p1), _ccw(p2, q2, q1)
    d3, d4 = _ccw(p1, q1, p2), _ccw(p1, q1, q2)
    if ((d1 > 0) != (d2 > 0) or 0 in (d1, d2)) and (
        (d3 > 0) != (d4 > 0) or 0 in (d3, d4)
    ):
        def on(a, b, c):
            return (
                _ccw(a, b, c) == 0
                and min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
            )

        if 0 in (d1, d2, d3, d4):
            return on(p2, q2, p1) or on(p2, q2, q1) or on(p1, q1, p2) or on(p1, q1, q2)
        return True
    return False


def _paths_meet(u, v):
    return any(
        _segs_touch(u[i], u[i + 1], v[j], v[j + 1])
        for i in range(len(u) - 1)
        for j in range(len(v) - 1)
    )


def oracle_translate_set(a, b, span):
    """Brute-force {k : a + (k,0) meets b} over |k| <= span."""
    out = set()
    for k in range(-span, span + 1):
        if _paths_meet([(p[0] + k, p[1]) for p in a.lift], list(b.lift)):
            out.add(k)
    return out


def _cross_point(p1, q1, p2, q2):
    d = (q1[0] - p1[0]) * (q2[1] - p2[1]) - (q1[1] - p1[1]) * (q2[0] - p2[0])
    if d == 0:
        return None
    t = ((p2[0] - p1[0]) * (q2[1] - p2[1]) - (p2[1] - p1[1]) * (q2[0] - p2[0])) / d
    s = ((p2[0] - p1[0]) * (q1[1] - p1[1]) - (p2[1] - p1[1]) * (q1[0] - p1[0])) / d
    if 0 < t < 1 and 0 < s < 1:
        return (p1[0] + t * (q1[0] - p1[0]), p1[1] + t * (q1[1] - p1[1]))
    return None


def oracle_interior_crossings(u, v):
    """Proper interior crossing points of two PL paths."""
    out = []
    for i in range(len(u) - 1):
        for j in range(len(v) - 1):
            p = _cross_point(u[i], u[i + 1], v[j], v[j + 1])
            if p is not None:
                out.append(p)
    return out


def _turns_to(path, stop_seg, point):
    """Signed crossings of the positive x-axis along path up to point."""
    total = 0
    pts = list(path[: stop_seg + 1]) + [point]
    for i in range(len(pts) - 1):
        p, q = pts[i], pts[i + 1]
        if p[1] == 0 or q[1] == 0 or (p[1] > 0) == (q[1] > 0):
            continue
        x = p[0] + (q[0] - p[0]) * p[1] / (p[1] - q[1])
        if x > 0:
            total += 1 if q[1] > 0 else -1
    return total


def oracle_germ_classes(g1, g2, periods=12):
    """Winding discrepancies of tail-copy crossings over explicit periods."""
    ks = set()
    copies1 = [g1.copy_path(i) for i in range(periods)]
    copies2 = [g2.copy_path(j) for j in range(periods)]
    full1 = [p for c in copies1 for p in c[:-1]] + [copies1[-1][-1]]
    full2 = [p for c in copies2 for p in c[:-1]] + [copies2[-1][-1]]
    for i in range(len(full1) - 1):
        for j in range(len(full2) - 1):
            pt = _cross_point(full1[i], full1[i + 1], full2[j], full2[j + 1])
            if pt is not None:
                ks.add(_turns_to(full1, i, pt) - _turns_to(full2, j, pt))
    return ks


def oracle_loop_class(loop, c=F(1, 997)):
    """Homology of a closed lifted loop by signed crossings with the two
    families of lines x = c + Z and y = c + Z."""
    def count(vertical):
        total = 0
        for p, q in zip(loop, loop[1:]):
            a, b = (p[0], q[0]) if vertical else (p[1], q[1])
            lo, hi = (a, b) if a <= b else (b, a)
            for k in range(math.ceil(lo - c), math.floor(hi - c) + 1):
                line = c + k
                if a < line < b:
                    total += 1
                elif b < line < a:
                    total -= 1
        return total

    return (count(True), count(False))


# ----------------------------------------------------------- shared fixtures


def standard_necklace():
    return (
        TorusCurve([(0, F(1, 2)), (1, F(1, 2))]),
        TorusCurve([(F(1, 2), 0), (F(1, 2), 1)]),
        TorusCurve([(0, F(1, 4)), (1, F(5, 4))]),
    )


def vertical_arc(x):
    return AnnulusArc(SurfaceModel.COMPACT_ANNULUS, [(F(x), F(0)), (F(x), F(1))])


def winding_arc(k, dx=F(0)):
    pts = [(dx, F(0))]
    for i in range(k):
        pts.append((dx + F(i) + F(1, 2), F(2 * i + 1, 2 * k)))
    pts.append((dx + F(k), F(1)))
    return AnnulusArc(SurfaceModel.COMPACT_ANNULUS, pts)


RAY_UP = GermSpec([], [(0, 1), (0, F(1, 2))], F(1, 2), (1, 0))
RAY_DOWN_LEFT = GermSpec([], [(-1, F(-1, 3)), (F(-1, 2), F(-1, 6))], F(1, 2), (1, 0))
RAY_TILTED = GermSpec([], [(1, 2), (F(1, 2), 1)], F(1, 2), (1, 0))
SPIRAL = GermSpec(
    [],
    [(0, 1), (F(-3, 4), F(3, 5)), (F(-4, 5), F(-1, 5)), (F(-1, 5), F(-3, 4)),
     (F(1, 2), F(-1, 2)), (F(3, 5), F(1, 5)), (0, F(1, 2))],
    F(1, 2),
    (1, 0),
)


def bulged_spiral(prefix=()):
    t = F(7, 10)
    pts = [(t * x, t * y) for x, y in SPIRAL.generator]
    pts[0] = (F(1, 20), pts[0][1])
    pts[-1] = (F(1, 40), pts[-1][1])
    pts[2] = (3 * pts[2][0], 3 * pts[2][1])
    return GermSpec(list(prefix), pts, F(1, 2), (1, 0))


# ---------------------------------------------------------------- criteria


def test_criterion_1_clique_classifier_matches_oracle():
    rng = random.Random(101)
    corpus = []
    for i in range(500):
        corpus.append(rand_clique3(rng, REALIZABLE_TYPES[i % len(REALIZABLE_TYPES)]))
    t0 = time.monotonic()
    mismatches = 0
    seen = set()
    for trio in corpus:
        got = classify_clique3(*trio).type
        if got != oracle_clique_type(trio):
            mismatches += 1
        seen.add(got)
    elapsed = time.monotonic() - t0
    assert mismatches == 0
    assert seen == {"all_disjoint", "two_pair", "necklace", "bouquet"}
    # the fifth profile cannot occur: a single transverse crossing forces
    # homology classes with determinant +-1, and a third curve disjoint from
    # both would need a nonzero class parallel to each, which does not exist
    with pytest.raises(ValueError):
        rand_clique3(rng, "one_pair")
    assert elapsed < 10.0
    print(f"\nPASS criterion 1: 500 cliques, 0 oracle mismatches, {elapsed:.2f}s")


def test_criterion_2_necklace_witness_sets():
    rng = random.Random(202)
    std = standard_necklace()
    assert 4 <= len(necklace_witness_F(*std)) <= 8
    necklaces = [std] + [tuple(rand_clique3(rng, "necklace")) for _ in range(50)]
    completions = 0
    for trio in necklaces:
        witness = necklace_witness_F(*trio)
        assert 1 <= len(witness) <= 8
        for _ in range(4):
            u = trio[rng.randrange(3)]
            side = rng.choice([SideChoice.LEFT, SideChoice.RIGHT])
            d = push_aside(u, side, obstacles=[v for v in trio if v is not u])
            assert all(not isinstance(is_edge(d, v), NonEdge) for v in trio)
            assert any(not isinstance(is_edge(d, f), NonEdge) for f in witness)
            completions += 1
    assert completions >= 200
    print(f"\nPASS criterion 2: 51 necklaces, {completions} completions all meet F")


def test_criterion_3_non_necklace_refutation():
    rng = random.Random(303)
    for _ in range(200):
        typ = rng.choice(["all_disjoint", "two_pair", "bouquet"])
        trio = rand_clique3(rng, typ)
        alphas = [rand_vertex(rng) for _ in range(rng.randrange(0, 6))]
        d = refute_N(*trio, alphas=alphas)
        for u in trio:
            assert not isinstance(is_edge(d, u), NonEdge)
        faces = complement_components(list(trio))
        assert set(faces_met(d, list(trio), faces)) == set(range(len(faces)))
        for al in alphas:
            assert len(intersect_curves(d, al).transverse_points()) >= 2
    assert len(complement_components(list(standard_necklace()))) == 3
    with pytest.raises(IsNecklace):
        refute_N(*standard_necklace())
    print("\nPASS criterion 3: 200 refutations verified; necklace complement has 3 faces")


def test_criterion_4_distance_formula():
    t0 = time.monotonic()
    rng = random.Random(404)
    a = vertical_arc(F(1, 3))
    neighbors = [rand_neighbor(a, rng) for _ in range(50)]
    for nb in neighbors:
        assert oracle_translate_set(nb, a, 4) == set()
    for k in range(11):
        b = winding_arc(k) if k else vertical_arc(F(2, 3))
        res = relative_width(a, b)
        assert res.width == k
        assert set(res.K) == oracle_translate_set(a, b, k + 2)
        path = distance_path(a, b)
        assert len(path) == k + 2
        for u, v in zip(path, path[1:]):
            assert oracle_translate_set(u, v, k + 2) == set()
        for nb in neighbors:
            assert relative_width(nb, b).width >= k - 1
    for _ in range(1000):
        k1, k2 = rng.randrange(0, 4), rng.randrange(0, 4)
        d1, d2 = F(rng.randrange(0, 16), 16), F(rng.randrange(0, 16), 16)
        u = winding_arc(k1, d1) if k1 else vertical_arc(d1 + F(1, 32))
        v = winding_arc(k2, d2) if k2 else vertical_arc(d2 + F(1, 32))
        ru, rv = relative_width(u, v), relative_width(v, u)
        assert ru.width == rv.width
        if ru.K:
            assert ru.K[-1] - ru.K[0] == len(ru.K) - 1
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    print(f"\nPASS criterion 4: widths 0..10 with paths and neighbors, 1000 pairs, {elapsed:.1f}s")


def test_criterion_5_germ_comparability():
    res = germ_width(RAY_UP, RAY_DOWN_LEFT)
    assert res.width == 0 and res.comparable
    assert oracle_germ_classes(RAY_UP, RAY_DOWN_LEFT) == set()

    res = germ_width(RAY_TILTED, SPIRAL)
    assert res.width == INFINITE and not res.comparable
    assert germ_width(SPIRAL, RAY_TILTED).width == INFINITE
    assert len(oracle_germ_classes(RAY_TILTED, SPIRAL)) >= 10

    res = germ_width(SPIRAL, bulged_spiral())
    assert res.width == 2 and res.comparable
    assert len(oracle_germ_classes(SPIRAL, bulged_spiral())) == 2
    pre1 = GermSpec([(2, 2), (0, 1)], SPIRAL.generator, F(1, 2), (1, 0))
    pre2 = bulged_spiral(prefix=[(-3, 1), (F(1, 20), F(7, 10))])
    assert germ_width(pre1, pre2) == res
    assert germ_width(pre1, bulged_spiral()) == res
    assert germ_width(SPIRAL, pre2) == res
    print("\nPASS criterion 5: germ widths 0/inf/2 match tail-copy enumeration over 12 periods")


def test_criterion_6_bouquet_chains():
    rng = random.Random(606)
    for _ in range(100):
        trio = rand_chain_triple(rng)
        cert = bouquet_chain(*trio)
        assert verify_chain(cert) == []
        x = torus_rep(cert.edges[0].point)
        for e in cert.edges:
            assert torus_rep(e.point) == x
    print("\nPASS criterion 6: 100 chain certificates accepted by the verifier")


def test_criterion_7_unicorn_connectivity():
    S = cut_along(TorusCurve([(0, F(1, 2)), (1, F(1, 2))]), (F(1, 4), F(1, 2)))
    g1 = S.curve_to_arc(TorusCurve([(F(1, 4), 0), (F(1, 4), 1)]))

    def zig(n):
        pts = [(F(1, 4), F(1, 2))]
        xs = [F(3, 8) if i % 2 == 0 else F(1, 8) for i in range(n + 1)]
        for i, x in enumerate(xs):
            pts.append((x, F(1, 2) + F(i + 1, len(xs) + 1)))
        pts.append((F(1, 4), F(3, 2)))
        return S.curve_to_arc(TorusCurve(pts))

    last_elapsed = None
    for n in range(1, 101):
        g2 = zig(n)
        assert len(oracle_interior_crossings(g1, g2)) == n
        t0 = time.monotonic()
        path = unicorn_path(S, g1, g2)
        last_elapsed = time.monotonic() - t0
        counts = [len(oracle_interior_crossings(path[0], arc)) for arc in path[1:]]
        assert counts == sorted(counts) and len(set(counts)) == len(counts)
        assert counts[-1] == n
        for u, v in zip(path, path[1:]):
            assert oracle_interior_crossings(u, v) == []
            assert _arc_crossings(u, v) == []
    assert last_elapsed <= 5.0
    print(f"\nPASS criterion 7: 1..100 crossings strictly decreasing, {last_elapsed:.2f}s at 100")


def rand_pl_map(rng):
    """A random PL torus map: identity on the grid, jittered interior images."""
    step = F(1, 4)
    coords = [i * step for i in range(5)]
    verts = [(x, y) for y in coords for x in coords]
    idx = {v: i for i, v in enumerate(verts)}
    imgs = list(verts)
    for vy in coords[1:-1]:
        for vx in coords[1:-1]:
            jx = F(rng.randrange(-4, 5), 64)
            jy = F(rng.randrange(-4, 5), 64)
            imgs[idx[(vx, vy)]] = (vx + jx, vy + jy)
    tris = []
    for i in range(4):
        for j in range(4):
            a, b = idx[(coords[i], coords[j])], idx[(coords[i + 1], coords[j])]
            c, d = idx[(coords[i + 1], coords[j + 1])], idx[(coords[i], coords[j + 1])]
            tris.extend([(a, b, c), (a, c, d)])
    return pl_map(verts, imgs, tris)


def test_criterion_8_homeomorphisms_act_as_automorphisms():
    rng = random.Random(808)
    universe = [
        TorusCurve([(0, F(1, 2)), (1, F(1, 2))]),
        TorusCurve([(F(1, 2), 0), (F(1, 2), 1)]),
        TorusCurve([(0, 0), (1, 1)]),
    ]
    while len(universe) < 30:
        universe.append(rand_vertex(rng))
    maps = [
        linear_map([[0, -1], [1, 0]]),
        linear_map([[1, 1], [0, 1]]),
    ] + [rand_pl_map(rng) for _ in range(3)]
    for f in maps:
        assert check_automorphism(f, universe) == []
    print("\nPASS criterion 8: 5 maps on 30 curves, zero violations")


def test_criterion_9_arc_union_homology():
    rng = random.Random(909)
    zero_pairs = 0
    for _ in range(500):
        start = (F(rng.randrange(0, 8), 8), F(rng.randrange(0, 8), 8))
        gap = (F(rng.randrange(1, 8), 8), F(rng.randrange(1, 8), 8))
        shifts = [
            (rng.randrange(-2, 3), rng.randrange(-2, 3)) for _ in range(3)
        ]
        if rng.random() < 0.2:
            shifts = [shifts[0]] * 3
        elif rng.random() < 0.3:
            shifts[1] = shifts[0]
        arcs = []
        for sx, sy in shifts:
            end = (start[0] + gap[0] + sx, start[1] + gap[1] + sy)
            mid = (
                start[0] + F(rng.randrange(-16, 17), 16),
                start[1] + F(rng.randrange(-16, 17), 16),
            )
            arcs.append([start, mid, end])
        x, xp, xpp = arcs

        def impl_class(u, v):
            hu, hv = path_homology(u), path_homology(v)
            return (hu[0] - hv[0], hu[1] - hv[1])

        def oracle_class(u, v):
            shift = (u[-1][0] - v[-1][0], u[-1][1] - v[-1][1])
            loop = list(u) + [(p[0] + shift[0], p[1] + shift[1]) for p in reversed(v)]
            return oracle_loop_class(loop)

        lhs = impl_class(x, xpp)
        m1 = impl_class(x, xp)
        m2 = impl_class(xp, xpp)
        assert lhs == oracle_class(x, xpp)
        assert m1 == oracle_class(x, xp)
        assert m2 == oracle_class(xp, xpp)
        assert lhs == (m1[0] + m2[0], m1[1] + m2[1])
        if m1 == (0, 0) and m2 == (0, 0):
            zero_pairs += 1
            assert lhs == (0, 0)
    assert zero_pairs >= 20
    print(f"\nPASS criterion 9: 500 triples additive, {zero_pairs} separating cases implied")
