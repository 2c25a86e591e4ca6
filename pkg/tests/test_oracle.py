from itertools import combinations, permutations

import pytest
from conftest import graphs, metric_spaces, posets
from hypothesis import given
from hypothesis import strategies as st
from reference import GRAPH_COUNTS, POSET_COUNTS, graph_iso_classes, graph_maps, poset_maps

from fraisse import oracle
from fraisse.errors import MalformedInputError, ResourceBoundError
from fraisse.structures import Graph, Morphism, Poset, classify_morphism, relabel


def k(n):
    els = [f"k{i}" for i in range(n)]
    return Graph.from_edges(els, combinations(els, 2))


def test_hom_counts_small_cases():
    assert len(oracle.all_homomorphisms(Graph(("a", "b")), k(2))) == 4
    assert len(oracle.all_homomorphisms(k(2), k(2))) == 2
    chain = Poset.chain(["a", "b"])
    homs = oracle.all_homomorphisms(chain, chain)
    assert sorted(tuple(sorted(m.mapping.items())) for m in homs) == [
        (("a", "a"), ("b", "a")), (("a", "a"), ("b", "b")), (("a", "b"), ("b", "b"))]


def test_two_chain_hom_count_matches_exhaustive_check():
    chain = Poset.chain(["a", "b"])
    expected = poset_maps(["a", "b"], chain.le, ["a", "b"], chain.le)
    assert len(expected) == 3
    assert len(oracle.all_homomorphisms(chain, chain)) == len(expected)


def test_hom_cap_is_enforced():
    with pytest.raises(ResourceBoundError):
        oracle.all_homomorphisms(Graph(tuple("abcdefg")), k(1))
    assert len(oracle.all_homomorphisms(Graph(tuple("abcdefg")), k(1), cap=7)) == 1


@given(graphs(max_size=4), graphs(max_size=4))
def test_graph_homs_agree_with_reference(g, h):
    got = {tuple(sorted(m.mapping.items())) for m in oracle.all_homomorphisms(g, h)}
    ref = {tuple(sorted(f.items())) for f in graph_maps(g.elements, g.sorted_edges(), h.elements, h.sorted_edges())}
    assert got == ref
    for m in oracle.all_homomorphisms(g, h):
        assert isinstance(classify_morphism(m.mapping, g, h), Morphism)


@given(posets(max_size=4), posets(max_size=4))
def test_poset_homs_agree_with_reference(p, q):
    got = {tuple(sorted(m.mapping.items())) for m in oracle.all_homomorphisms(p, q)}
    ref = {tuple(sorted(f.items())) for f in poset_maps(p.elements, p.le, q.elements, q.le)}
    assert got == ref


@given(metric_spaces(max_size=3), metric_spaces(max_size=3))
def test_metric_homs_agree_with_brute_force(m, n):
    got = {tuple(sorted(f.items())) for f in oracle.iter_homomorphisms(m, n)}
    ref = {tuple(sorted(f.items())) for f in oracle.brute_force_homomorphisms(m, n)}
    assert got == ref


@given(st.one_of(graphs(max_size=4), posets(max_size=4)), st.randoms(use_true_random=False))
def test_hom_count_stable_under_relabeling(s, rnd):
    names = list(s.elements)
    shuffled = names[:]
    rnd.shuffle(shuffled)
    t = relabel(s, {a: "r" + b for a, b in zip(names, shuffled)})
    assert len(oracle.all_homomorphisms(s, s)) == len(oracle.all_homomorphisms(t, t))
    assert len(oracle.all_homomorphisms(s, t)) == len(oracle.all_homomorphisms(s, s))


def test_isomorphism_examples():
    ok, w = oracle.are_isomorphic(k(2), k(2))
    assert ok and classify_morphism(w, k(2), k(2)).kind == "isomorphism"
    assert oracle.are_isomorphic(k(2), Graph(("a", "b"))) == (False, None)
    assert not oracle.are_isomorphic(Poset.chain("abc"), Poset.antichain("abc"))[0]


def test_enumeration_counts_match_reference():
    for kind, ref in (("graph", GRAPH_COUNTS), ("poset", POSET_COUNTS)):
        out = oracle.enumerate_structures(kind, 5, include_empty=True)
        assert oracle.count_by_size(out) == ref
    assert oracle.count_by_size(oracle.enumerate_structures("graph", 3)) == {1: 1, 2: 2, 3: 4}
    assert oracle.count_by_size(oracle.enumerate_structures("poset", 2))[2] == 2
    assert oracle.count_by_size(oracle.enumerate_structures("graph", 4))[4] == 11


def test_graph_counts_cross_checked_by_labelled_brute_force():
    for n in range(5):
        assert graph_iso_classes(n) == GRAPH_COUNTS[n]


def test_enumeration_cap_and_class_errors():
    with pytest.raises(ResourceBoundError):
        oracle.enumerate_structures("graph", 6)
    with pytest.raises(MalformedInputError):
        oracle.enumerate_structures("metric", 2)


def _iso_by_permutation(a, b):
    if len(a) != len(b):
        return False
    for perm in permutations(b.elements):
        f = dict(zip(a.elements, perm))
        m = classify_morphism(f, a, b)
        if isinstance(m, Morphism) and m.kind == "isomorphism":
            return True
    return False


@pytest.mark.parametrize("kind", ["graph", "poset"])
def test_canonical_form_matches_isomorphism_on_all_small_pairs(kind):
    out = oracle.enumerate_structures(kind, 4, include_empty=True)
    forms = [oracle.canonical_form(s) for s in out]
    for i, j in combinations(range(len(out)), 2):
        same = forms[i] == forms[j]
        assert same == oracle.are_isomorphic(out[i], out[j])[0]
        assert not same


@given(st.one_of(graphs(max_size=5), posets(max_size=5)), st.randoms(use_true_random=False))
def test_canonical_form_is_an_invariant(s, rnd):
    names = list(s.elements)
    shuffled = names[:]
    rnd.shuffle(shuffled)
    t = relabel(s, dict(zip(names, shuffled)))
    assert oracle.canonical_form(s) == oracle.canonical_form(t)
    assert _iso_by_permutation(s, t)


@given(graphs(max_size=4), graphs(max_size=4))
def test_canonical_equality_agrees_with_permutation_search(a, b):
    assert (oracle.canonical_form(a) == oracle.canonical_form(b)) == _iso_by_permutation(a, b)
