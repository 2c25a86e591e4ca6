"""Three endomorphisms that produce three chosen maps as words g3 g2^k g1."""

from fraisse.limit_builder import BuildBounds, build_tower
from fraisse.sierpinski import build_witness, embed_coproduct, sample_homomorphisms, verify_recovery
from fraisse.structures import Graph

chain = build_tower(Graph(("v",)), 2, BuildBounds(max_substructure_size=1), compact=True)
copies = embed_coproduct(chain, seed_depth=1, M=3)
fs = sample_homomorphisms(copies.truncation, chain.stage(2), 3, seed=0)
w = build_witness(copies, fs)
rep = verify_recovery(w)
for row in rep.per_k:
    print(f"k={row['k']}: recovered={row['recovered']} word length={row['length']}")
v = copies.truncation.elements[-1]
print(f"f_2({v}) = {fs[2][v]} = g3(g2(g2(g1({v})))) = {w.g3(w.g2(w.g2(w.g1(v))))}")
