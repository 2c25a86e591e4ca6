"""Extending a non-expanding map of rational metric spaces by one point."""

from fractions import Fraction as F

from fraisse.phep import OnePointExtension, extend_one_point_metric
from fraisse.structures import MetricSpace, morphism

M = MetricSpace(("a", "b", "c"), {frozenset("ab"): F(4), frozenset("bc"): F(3), frozenset("ac"): F(5)})
N = MetricSpace(("p", "q"), {frozenset("pq"): F(2)})
phi = morphism({"a": "p", "b": "q", "c": "q"}, M, N)

ext = OnePointExtension.metric(M, {"a": F(1), "b": F(3), "c": F(9, 2)})
N2, phi2, info = extend_one_point_metric(phi, ext)
print("fibre order:", info.order)
print("deltas:", [str(d) for d in info.deltas])
for z in N.elements:
    print(f"d({z}, y') = {N2.d(z, phi2.mapping['y'])}")
