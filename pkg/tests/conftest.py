import os
import sys
from fractions import Fraction
from itertools import combinations

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from reference import closure_by_composition  # noqa: E402

from fraisse.structures import Graph, MetricSpace, Poset  # noqa: E402

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def names(n):
    return tuple(f"e{i}" for i in range(n))


@st.composite
def graphs(draw, min_size=0, max_size=5):
    n = draw(st.integers(min_size, max_size))
    els = names(n)
    pairs = list(combinations(els, 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(els, [p for p, k in zip(pairs, keep) if k])


@st.composite
def posets(draw, min_size=0, max_size=5):
    n = draw(st.integers(min_size, max_size))
    els = names(n)
    pairs = list(combinations(els, 2))  # only i < j: acyclic by construction
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    rel = closure_by_composition(els, [p for p, k in zip(pairs, keep) if k])
    return Poset(els, frozenset(rel))


@st.composite
def metric_spaces(draw, min_size=1, max_size=5):
    """Shortest-path metrics of random positive rational weights: always valid."""
    n = draw(st.integers(min_size, max_size))
    els = names(n)
    w = {}
    for a, b in combinations(range(n), 2):
        w[(a, b)] = w[(b, a)] = Fraction(draw(st.integers(1, 12)), draw(st.integers(1, 4)))
    d = [[Fraction(0) if i == j else w[(i, j)] for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return MetricSpace(els, {frozenset((els[i], els[j])): d[i][j] for i, j in combinations(range(n), 2)})


def structures(max_size=4):
    return st.one_of(graphs(max_size=max_size), posets(max_size=max_size))
