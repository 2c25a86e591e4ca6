"""Independent brute-force references used to compute expected values.

Nothing here imports the package's oracle: relations are plain sets of
tuples and every search runs over all functions.
"""

from fractions import Fraction
from itertools import combinations, permutations, product


def closure_by_composition(elements, pairs):
    """Reflexive-transitive closure by composing the relation with itself until it stops growing."""
    rel = set(pairs) | {(a, a) for a in elements}
    while True:
        comp = {(a, d) for (a, b) in rel for (c, d) in rel if b == c}
        if comp <= rel:
            return rel
        rel |= comp


def graph_maps(dom_vertices, dom_edges, cod_vertices, cod_edges):
    cod = {frozenset(e) for e in cod_edges}
    out = []
    for values in product(cod_vertices, repeat=len(dom_vertices)):
        f = dict(zip(dom_vertices, values))
        if all(frozenset((f[a], f[b])) in cod and f[a] != f[b] for a, b in dom_edges):
            out.append(f)
    return out


def poset_maps(dom_elements, dom_le, cod_elements, cod_le):
    out = []
    for values in product(cod_elements, repeat=len(dom_elements)):
        f = dict(zip(dom_elements, values))
        if all((f[a], f[b]) in cod_le for a, b in dom_le):
            out.append(f)
    return out


def graph_iso_classes(n):
    """Number of unlabeled graphs on n vertices, by brute force over all labelled ones."""
    pairs = list(combinations(range(n), 2))
    seen = set()
    for bits in product((0, 1), repeat=len(pairs)):
        edges = {p for p, b in zip(pairs, bits) if b}
        codes = []
        for pi in permutations(range(n)):
            moved = {tuple(sorted((pi[x], pi[y]))) for x, y in edges}
            codes.append(tuple(p in moved for p in pairs))
        seen.add(min(codes))
    return len(seen)


def metric_deltas(to_y, image):
    """delta_0 = d(y,x_0); delta_i = min over k < i of d(y,x_i) and d(y,x_k) + d'(x_k, x_i)."""
    n = len(to_y)
    out = []
    for i in range(n):
        options = [Fraction(to_y[i])] + [Fraction(to_y[k]) + Fraction(image[k][i]) for k in range(i)]
        out.append(min(options))
    return out


# Unlabeled counts by size, used as a cross-check on enumeration.
GRAPH_COUNTS = {0: 1, 1: 1, 2: 2, 3: 4, 4: 11, 5: 34}
POSET_COUNTS = {0: 1, 1: 1, 2: 2, 3: 5, 4: 16, 5: 63}
