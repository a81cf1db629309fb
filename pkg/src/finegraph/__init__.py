"""Exact-arithmetic toolkit for fine graphs of curves on the torus and annuli.

Everything geometric is computed over arbitrary-precision rationals; there is
no floating point in any predicate.  The package is organized bottom-up:

- ``geom_core``: planar primitives (orientation, segment intersection).
- ``surfaces``: surface models, lifts, homology, arrangement faces.
- ``curves_ops``: curve intersection reports, push-aside, genericity.
- ``fine_graph``: edge predicate, 3-clique types, witness constructions.
- ``arc_graphs``: cutting, unicorn arc paths, bouquet-move chains.
- ``germs_width``: relative width, distance paths, spiral germ widths.
- ``homeo_action``: torus homeomorphisms acting on curves.
- ``cli``: command-line front end.
"""

SCHEMA = "finegraph/1"
