"""Free amalgams of graphs and posets, and a check of the pushout property."""

from fraisse.amalgamation import Amalgam, check_pushout_universal, pushout
from fraisse.structures import Graph, Poset

# two paths glued at their middle vertex
A = Graph(("m",))
B = Graph.from_edges("amb", [("a", "m"), ("m", "b")])
C = Graph.from_edges("cmd", [("c", "m"), ("m", "d")])
am = Amalgam(A, B, C, {"m": "m"}, {"m": "m"})
res = pushout(am)
print("graph pushout:", res.P.elements, res.P.sorted_edges())

# two chains sharing their bottom; order is closed transitively
A = Poset.chain(["x"])
B = Poset.chain(["x", "y"])
C = Poset.from_pairs(["w", "x"], [("w", "x")])
am = Amalgam(A, B, C, {"x": "x"}, {"x": "x"})
res = pushout(am)
print("poset pushout strict pairs:", sorted(res.P.strict_pairs()))

rep = check_pushout_universal(res, am, 4)
print(f"universal against every Q with <= 4 elements: {rep.ok} ({rep.pairs_checked} cocones)")
