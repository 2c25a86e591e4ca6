import random
from fractions import Fraction
from itertools import combinations

import pytest
from conftest import graphs, posets
from hypothesis import given
from hypothesis import strategies as st
from reference import metric_deltas
from sweeps import check_metric_instance, extender_soundness, random_metric_instance, tie_sweep

from fraisse import oracle
from fraisse.errors import InternalConsistencyError, MalformedInputError, PreconditionError, UnsupportedClassError
from fraisse.phep import (
    OnePointExtension,
    check_1phep_class,
    enumerate_one_point_extensions,
    extend_one_point_graph,
    extend_one_point_metric,
    extend_one_point_poset,
    raw_attachments,
    structure_class,
)
from fraisse.structures import Graph, MetricSpace, Poset, identity, morphism


def _iso_over_base(e1, e2):
    """Is there an isomorphism of the extensions carrying base onto base and new onto new?"""
    for f in oracle.iter_homomorphisms(e1.structure, e2.structure, embedding=True,
                                       fixed={e1.new: e2.new}):
        if {f[b] for b in e1.base.elements} == e2.base.element_set:
            return True
    return False


def test_extension_counts():
    assert len(enumerate_one_point_extensions(Graph(("v",)))) == 2
    k2 = Graph.from_edges("ab", [("a", "b")])
    assert sorted(len(e.attachment) for e in enumerate_one_point_extensions(k2)) == [0, 1, 2]
    chain = Poset.chain(["a", "b"])
    atts = {e.attachment for e in enumerate_one_point_extensions(chain)}
    F = frozenset
    assert atts == {(F(), F()), (F("a"), F()), (F("ab"), F()), (F(), F("b")), (F(), F("ab")), (F("a"), F("b"))}


@given(st.one_of(graphs(max_size=3), posets(max_size=3)))
def test_extension_list_is_complete_and_irredundant(B):
    listed = enumerate_one_point_extensions(B)
    for e1, e2 in combinations(listed, 2):
        assert not _iso_over_base(e1, e2)
    for att in raw_attachments(B):
        raw = OnePointExtension(B, listed[0].new, att)
        assert any(_iso_over_base(raw, e) for e in listed)


def test_metric_extensions_are_not_enumerated():
    with pytest.raises(UnsupportedClassError):
        enumerate_one_point_extensions(MetricSpace.from_pairs("x", {}))


def test_invalid_poset_attachment_is_reported():
    chain = Poset.chain(["a", "b"])
    assert OnePointExtension.poset(chain, ["b"], []).problems()
    assert OnePointExtension.poset(chain, ["a"], ["a"]).problems()
    assert not OnePointExtension.poset(chain, ["a"], ["b"]).problems()
    with pytest.raises(MalformedInputError):
        OnePointExtension.graph(chain, [], new="a")


# ---- graphs


def test_graph_identity_extension():
    g = Graph.from_edges("abc", [("a", "b")])
    ext = OnePointExtension.graph(g, ["a", "c"])
    Hp, phip = extend_one_point_graph(identity(g), ext)
    assert phip.mapping["x"] not in g
    assert oracle.are_isomorphic(Hp, ext.structure)[0]


def test_graph_collapse_sends_neighbour_to_image():
    G = Graph(("u1", "u2"))
    H = Graph(("v",))
    phi = morphism({"u1": "v", "u2": "v"}, G, H)
    Hp, phip = extend_one_point_graph(phi, OnePointExtension.graph(G, ["u1"]))
    xp = phip.mapping["x"]
    assert Hp.related(xp, "v") and len(Hp) == 2


def test_non_surjective_input_is_refused():
    G = Graph(("a",))
    H = Graph(("a", "b"))
    with pytest.raises(PreconditionError):
        extend_one_point_graph(morphism({"a": "a"}, G, H), OnePointExtension.graph(G, []))


def test_graph_extender_exhaustive_small():
    instances, failures = extender_soundness("graph", 3)
    assert instances > 300 and failures == []


# ---- posets


def test_poset_forced_value():
    B = Poset.chain(["a", "b"])
    Bp = Poset.chain(["p"])
    phi = morphism({"a": "p", "b": "p"}, B, Bp)
    Cp, phip = extend_one_point_poset(phi, OnePointExtension.poset(B, ["a"], ["b"]))
    assert Cp == Bp and phip.mapping["x"] == "p"


def test_poset_insertion_between():
    B = Poset.from_pairs("abc", [("a", "b")])
    Cp, phip = extend_one_point_poset(identity(B), OnePointExtension.poset(B, ["a"], ["b"]))
    y = phip.mapping["x"]
    assert Cp.lt("a", y) and Cp.lt(y, "b")
    assert not Cp.leq("c", y) and not Cp.leq(y, "c")


def test_poset_insertion_uses_closures():
    B = Poset.antichain(["a", "b", "c"])
    Bp = Poset.chain(["p", "q", "r"])
    phi = morphism({"a": "p", "b": "q", "c": "r"}, B, Bp)
    Cp, phip = extend_one_point_poset(phi, OnePointExtension.poset(B, ["b"], []))
    y = phip.mapping["x"]
    assert Cp.below(y) == {"p", "q"} and Cp.above(y) == set()


def test_poset_meet_of_two_is_an_internal_error(monkeypatch):
    # unreachable from a real homomorphism, so skip the input guard to reach the defensive branch
    import fraisse.phep as phep
    from fraisse.structures import Morphism
    monkeypatch.setattr(phep, "_require_surjective_hom", lambda phi, ext: None)
    B = Poset.chain(["a", "b", "c", "d"])
    Bp = Poset.antichain(["p", "q"])
    phi = Morphism(B, Bp, {"a": "p", "b": "q", "c": "p", "d": "q"}, "homomorphism")
    with pytest.raises(InternalConsistencyError):
        extend_one_point_poset(phi, OnePointExtension.poset(B, ["a", "b"], ["c", "d"]))


def test_poset_extender_exhaustive_small():
    instances, failures = extender_soundness("poset", 3)
    assert instances > 500 and failures == []


# ---- metric spaces


def _pair(d, dp):
    M = MetricSpace.from_pairs(["x0", "x1"], {("x0", "x1"): d})
    Mp = MetricSpace.from_pairs(["z0", "z1"], {("z0", "z1"): dp})
    return M, Mp, {"x0": "z0", "x1": "z1"}


def test_metric_single_point():
    M = MetricSpace.from_pairs(["x0"], {})
    q = Fraction(7, 3)
    M1p, phip, detail = extend_one_point_metric(identity(M), OnePointExtension.metric(M, {"x0": q}))
    assert detail.deltas == (q,)
    assert M1p.d(phip.mapping["y"], "x0") == q


def test_metric_two_points_no_truncation():
    M, Mp, phi = _pair(2, 1)
    to_y = {"x0": 1, "x1": 1}
    _, _, detail = extend_one_point_metric(morphism(phi, M, Mp), OnePointExtension.metric(M, to_y))
    expected = metric_deltas([1, 1], [[0, 1], [1, 0]])
    assert list(detail.deltas) == expected == [1, 1]


def test_metric_two_points_truncation_branch():
    M, Mp, phi = _pair(5, 1)
    to_y = {"x0": 1, "x1": 4}
    _, _, detail = extend_one_point_metric(morphism(phi, M, Mp), OnePointExtension.metric(M, to_y))
    expected = metric_deltas([1, 4], [[0, 1], [1, 0]])
    assert list(detail.deltas) == expected == [1, 2]
    assert check_metric_instance(M, Mp, phi, {k: Fraction(v) for k, v in to_y.items()}) == []


def test_metric_representatives_prefer_nearest_then_name():
    M = MetricSpace.from_pairs(["a", "b", "c"], {("a", "b"): 2, ("a", "c"): 2, ("b", "c"): 2})
    Mp = MetricSpace.from_pairs(["z"], {})
    phi = morphism({"a": "z", "b": "z", "c": "z"}, M, Mp)
    _, _, detail = extend_one_point_metric(phi, OnePointExtension.metric(M, {"a": 2, "b": 1, "c": 1}))
    assert detail.representatives == {"z": "b"}
    assert detail.deltas == (1,)


def test_metric_zero_distance_is_refused():
    M, Mp, phi = _pair(2, 1)
    with pytest.raises(PreconditionError):
        extend_one_point_metric(morphism(phi, M, Mp), OnePointExtension.metric(M, {"x0": 0, "x1": 2}))


@given(st.integers(0, 10_000))
def test_metric_random_instances(seed):
    inst = random_metric_instance(random.Random(seed))
    assert check_metric_instance(*inst) == []


def test_metric_tie_orders_small():
    checked, failures = tie_sweep(40, seed=3)
    assert checked > 40 and failures == []


# ---- class checks


def test_triangle_free_counterexample_is_anticlique_to_clique():
    rep = check_1phep_class("triangle-free-graph", 3)
    ce = rep.counterexample
    assert ce is not None
    assert len(ce.B) == 2 and not ce.B.edges
    assert len(ce.B_prime) == 2 and len(ce.B_prime.edges) == 1
    assert len(set(ce.phi.values())) == 2
    assert ce.ext.attachment == ce.B.element_set


def test_all_graphs_and_posets_pass_small():
    assert check_1phep_class("graph", 3).ok
    assert check_1phep_class("poset", 3).ok


def test_complement_free_class_passes_and_kn_free_fails():
    assert check_1phep_class("coK3-free-graph", 3).ok
    assert not check_1phep_class("K4-free-graph", 4).ok


def test_unknown_class_and_cap():
    with pytest.raises(MalformedInputError):
        structure_class("lattice")
    from fraisse.errors import ResourceBoundError
    with pytest.raises(ResourceBoundError):
        check_1phep_class("graph", 6)
