"""Graphs and posets have the one-point homomorphism extension property; triangle-free graphs do not.

The failure is the familiar one: collapse nothing, map two non-adjacent
vertices onto an edge, and ask to extend over a point adjacent to both.
"""

from fraisse.phep import check_1phep_class

for name, n in [("graph", 3), ("poset", 3), ("triangle-free-graph", 3)]:
    rep = check_1phep_class(name, n)
    print(f"{name:>20}: {'ok' if rep.ok else 'fails'} after {rep.instances} instances")
    ce = rep.counterexample
    if ce is not None:
        print("   B  edges:", ce.B.sorted_edges(), "on", ce.B.elements)
        print("   B' edges:", ce.B_prime.sorted_edges())
        print("   phi:", ce.phi, " new point adjacent to", sorted(ce.ext.attachment))
