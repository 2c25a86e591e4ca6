"""Grow the first stages of the random graph from a single vertex.

Stage n+1 adds, for every subset A of stage n (here of size at most 1),
a vertex adjacent to exactly A.
"""

from fraisse.limit_builder import BuildBounds, build_tower, extension_property_audit
from fraisse.serialize import to_dot
from fraisse.structures import Graph

chain = build_tower(Graph(("v",)), 2, BuildBounds(max_substructure_size=1), compact=True)
for n in range(chain.depth + 1):
    s = chain.stage(n)
    print(f"stage {n}: {len(s)} vertices, {len(s.sorted_edges())} edges")
print("stage 1 edges:", chain.stage(1).sorted_edges())

audit = extension_property_audit(chain, 1)
print(f"every 1-point extension over stage 0 is realized: {audit.ok} ({audit.instances} checked)")
print()
print(to_dot(chain.stage(1), "stage1"))
