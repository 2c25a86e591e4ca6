"""Extend a homomorphism on a few vertices of stage 0 to all of stage 2."""

from fraisse.hom_extension import PartialHom, extend_to_stage, hom_homogeneity_witness
from fraisse.limit_builder import build_tower
from fraisse.structures import Graph

chain = build_tower(Graph.from_edges("ab", [("a", "b")]), 2)
print("stage sizes:", [len(chain.built_elements(n)) for n in range(3)])

p = PartialHom(chain, {"a": "b", "b": "a"})
total = extend_to_stage(p, 2)
print(f"swap of the edge extends to {len(total.mapping)} elements")

rep = hom_homogeneity_witness(chain, 2)
print(f"all {rep.instances} maps S -> stage 0 with |S| <= 2 extend: {rep.ok}; chain grew by {rep.chain_growth}")
