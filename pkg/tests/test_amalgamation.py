from itertools import islice, product

import pytest
from hypothesis import given
from hypothesis import strategies as st
from reference import closure_by_composition

from fraisse.amalgamation import (
    Amalgam,
    PushoutResult,
    check_pushout_universal,
    coproduct,
    iter_amalgams,
    pushout,
    pushout_graph,
    pushout_poset,
)
from fraisse.errors import PreconditionError, ResourceBoundError, UnsupportedClassError
from fraisse.oracle import are_isomorphic
from fraisse.structures import Graph, MetricSpace, Morphism, Poset, classify_morphism, induced_substructure, validate

GRAPH_SAMPLE = list(islice(iter_amalgams("graph", 2, 3), 0, None, 7))
POSET_SAMPLE = list(islice(iter_amalgams("poset", 2, 3), 0, None, 11))


def star_amalgam():
    A = Graph(("a",))
    B = Graph.from_edges("ab", [("a", "b")])
    C = Graph.from_edges("ac", [("a", "c")])
    return Amalgam(A, B, C, {"a": "a"}, {"a": "a"})


def poset_line_amalgam():
    A = Poset.chain(["a"])
    B = Poset.chain(["a", "b"])
    C = Poset.chain(["c", "a"])
    return Amalgam(A, B, C, {"a": "a"}, {"a": "a"})


def test_graph_pushout_keeps_edges_of_both_sides_only():
    res = pushout_graph(star_amalgam())
    assert set(res.P.elements) == {"a", "b", "c"}
    assert {tuple(e) for e in res.P.sorted_edges()} == {("a", "b"), ("a", "c")}


def test_identity_amalgam_gives_back_the_side():
    B = Graph.from_edges("xyz", [("x", "y")])
    res = pushout(Amalgam(B, B, B, {e: e for e in "xyz"}, {e: e for e in "xyz"}))
    assert res.P == B and res.i1 == res.i2 == {e: e for e in "xyz"}
    p = Poset.chain(["x", "y"])
    assert pushout(Amalgam(p, p, p, {"x": "x", "y": "y"}, {"x": "x", "y": "y"})).P == p


def test_empty_base_is_disjoint_union():
    k2 = Graph.from_edges("ab", [("a", "b")])
    res = pushout(Amalgam(Graph(()), k2, k2, {}, {}))
    assert len(res.P) == 4 and len(res.P.edges) == 2


def test_poset_pushout_adds_transitive_pair():
    res = pushout_poset(poset_line_amalgam())
    P = res.P
    assert P.lt("c", "a") and P.lt("a", "b") and P.lt("c", "b")


def test_poset_pushout_over_point_with_incomparable_sides():
    A = Poset.antichain(["a"])
    B = Poset.antichain(["a", "b"])
    C = Poset.antichain(["a", "c"])
    res = pushout(Amalgam(A, B, C, {"a": "a"}, {"a": "a"}))
    union = set(B.le) | set(C.le)
    assert set(res.P.le) == closure_by_composition(["a", "b", "c"], union)
    assert res.P.strict_pairs() == []


def test_legs_must_be_embeddings():
    A = Graph(("a", "b"))
    B = Graph.from_edges("ab", [("a", "b")])
    with pytest.raises(PreconditionError):
        Amalgam(A, B, A, {"a": "a", "b": "b"}, {"a": "a", "b": "b"})


def test_metric_pushout_and_coproduct_are_unsupported():
    m = MetricSpace.from_pairs("x", {})
    with pytest.raises(UnsupportedClassError):
        pushout(Amalgam(m, m, m, {"x": "x"}, {"x": "x"}))
    with pytest.raises(UnsupportedClassError):
        coproduct("metric", [m])


def test_coproduct_examples():
    k2 = Graph.from_edges("ab", [("a", "b")])
    one, inj = coproduct("graph", [k2])
    assert are_isomorphic(one, k2)[0] and classify_morphism(inj[0], k2, one).kind == "isomorphism"
    two, _ = coproduct("graph", [k2, k2])
    assert len(two) == 4 and len(two.edges) == 2
    c2 = Poset.chain(["a", "b"])
    three, inj = coproduct("poset", [c2, c2, c2])
    assert len(three) == 6 and len(three.strict_pairs()) == 3
    for i, j in product(range(3), repeat=2):
        if i != j:
            assert not any(three.leq(inj[i][x], inj[j][y]) for x in c2.elements for y in c2.elements)


@pytest.mark.parametrize("make", [star_amalgam, poset_line_amalgam])
def test_universal_property_on_worked_examples(make):
    am = make()
    rep = check_pushout_universal(pushout(am), am, 3)
    assert rep.ok and rep.pairs_checked > 0
    assert check_pushout_universal(pushout(am), am, 3, naive=True).pairs_checked == rep.pairs_checked


def _mediators(res, j1, j2, Q):
    """All h: P -> Q with h i1 = j1, h i2 = j2, found by trying every function."""
    out = []
    for values in product(Q.elements, repeat=len(res.P)):
        h = dict(zip(res.P.elements, values))
        if any(h[res.i1[b]] != j1[b] for b in j1) or any(h[res.i2[c]] != j2[c] for c in j2):
            continue
        if isinstance(classify_morphism(h, res.P, Q), Morphism):
            out.append(h)
    return out


@pytest.mark.parametrize("naive", [False, True])
def test_corrupted_pushout_fails_with_witness(naive):
    am = star_amalgam()
    good = pushout(am)
    bad_P = Graph(good.P.elements, good.P.edges | {frozenset({"b", "c"})})
    bad = PushoutResult(bad_P, good.i1, good.i2, am)
    rep = check_pushout_universal(bad, am, 3, naive=naive)
    assert not rep.ok
    ce = rep.counterexample
    assert _mediators(bad, ce["j1"], ce["j2"], ce["Q"]) == []


def test_size_bound_cap():
    am = star_amalgam()
    with pytest.raises(ResourceBoundError):
        check_pushout_universal(pushout(am), am, 6)


@given(st.sampled_from(GRAPH_SAMPLE + POSET_SAMPLE))
def test_pushout_invariants(am):
    res = pushout(am)
    P = res.P
    assert validate(P).ok
    assert len(P) == len(am.B) + len(am.C) - len(am.A)
    for a in am.A.elements:
        assert res.i1[am.f1[a]] == res.i2[am.f2[a]]
    assert set(res.i1.values()) | set(res.i2.values()) == P.element_set
    for leg, X in ((res.i1, am.B), (res.i2, am.C)):
        m = classify_morphism(leg, X, P)
        assert m.is_at_least("embedding")
        sub = induced_substructure(P, [leg[x] for x in X.elements])
        assert classify_morphism(leg, X, sub).kind == "isomorphism"
    if isinstance(P, Graph):
        shared = induced_substructure(am.B, [am.f1[a] for a in am.A.elements])
        assert len(P.edges) == len(am.B.edges) + len(am.C.edges) - len(shared.edges)


@pytest.mark.parametrize("am", GRAPH_SAMPLE[::4] + POSET_SAMPLE[::4])
def test_fast_and_naive_universal_checks_agree(am):
    res = pushout(am)
    fast = check_pushout_universal(res, am, 3)
    slow = check_pushout_universal(res, am, 3, naive=True)
    assert fast.ok and slow.ok
    assert fast.pairs_checked == slow.pairs_checked
