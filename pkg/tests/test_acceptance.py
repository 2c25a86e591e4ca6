"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every criterion returns a JSON artifact.  The determinism check reruns the
other seven and compares the serialized bytes.
"""

import json
import time

import pytest
from sweeps import extender_soundness, metric_sweep, tie_sweep

from fraisse.amalgamation import check_pushout_universal, iter_amalgams, pushout
from fraisse.cli import main
from fraisse.hom_extension import hom_homogeneity_witness
from fraisse.limit_builder import BuildBounds, build_tower, extension_property_audit
from fraisse.phep import check_1phep_class
from fraisse.serialize import chain_to_json, counterexample_to_json, dumps, structure_to_json
from fraisse.sierpinski import build_witness, embed_coproduct, sample_homomorphisms, verify_recovery
from fraisse.structures import Graph, Poset

K1 = Graph(("v",))
P3 = Graph.from_edges("abc", [("a", "b"), ("b", "c")])
C2 = Poset.chain(["a", "b"])

ARTIFACTS = {}


def report(pytestconfig, n, title, ok, seconds, budget, detail=""):
    verdict = "PASS" if ok and seconds < budget else "FAIL"
    line = f"criterion {n} {verdict}: {title} ({seconds:.2f}s, budget {budget:g}s)"
    if detail:
        line += f" {detail}"
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print("\n" + line)
    assert ok, line
    assert seconds < budget, line


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


# ---- artifact producers


def c1():
    chain = build_tower(K1, 1, BuildBounds(max_substructure_size=1), compact=True)
    s = chain.stage(1)
    ok = (len(s) == 3 and set(s.elements) == {"v", "u{}", "u{v}"} and s.sorted_edges() == [("v", "u{v}")])
    return ok, chain_to_json(chain)


def c2():
    towers = [build_tower(K1, 2), build_tower(P3, 2), build_tower(C2, 2)]
    out, ok = [], True
    for t in towers:
        rep = extension_property_audit(t, 2)
        ok &= rep.ok and rep.instances > 0
        out.append({"chain": chain_to_json(t), "instances": rep.instances, "failures": len(rep.failures)})
    return ok, out


def c3():
    out, ok = {}, True
    for kind in ("graph", "poset"):
        cache, amalgams, pairs, bad = {}, 0, 0, 0
        for am in iter_amalgams(kind, 2, 4):
            rep = check_pushout_universal(pushout(am), am, 5, cache=cache)
            amalgams += 1
            pairs += rep.pairs_checked
            bad += not rep.ok
        ok &= bad == 0 and amalgams > 0
        out[kind] = {"amalgams": amalgams, "pairs": pairs, "failures": bad}
    return ok, out


def c4():
    out, ok = {}, True
    for kind in ("graph", "poset"):
        n, fails = extender_soundness(kind, 4)
        ok &= not fails and n > 0
        out[kind] = {"instances": n, "failures": len(fails)}
    bad = metric_sweep(500, seed=0)
    checked, tie_bad = tie_sweep(200, seed=0)
    ok &= not bad and not tie_bad and checked > 0
    out["metric"] = {"instances": 500, "failures": len(bad)}
    out["ties"] = {"orders": checked, "failures": len(tie_bad)}
    return ok, out


def c5():
    rep = check_1phep_class("triangle-free-graph", 3)
    ce = rep.counterexample
    if ce is None:
        return False, {"counterexample": None}
    ok = (len(ce.B) == 2 and not ce.B.sorted_edges()
          and len(ce.B_prime) == 2 and len(ce.B_prime.sorted_edges()) == 1
          and len(set(ce.phi.values())) == 2
          and ce.ext.attachment == frozenset(ce.B.elements))
    return ok, counterexample_to_json(ce)


def c6():
    out, ok = [], True
    for chain in (build_tower(K1, 2), build_tower(C2, 2)):
        rep = hom_homogeneity_witness(chain, 3)
        ok &= rep.ok and rep.instances > 0
        out.append({"instances": rep.instances, "expected": rep.expected, "failures": len(rep.failures),
                    "chain": chain_to_json(chain)})
    return ok, out


def c7():
    configs = [(build_tower(K1, 2, BuildBounds(max_substructure_size=1), compact=True), 1, 3),
               (build_tower(C2, 2), 0, 2)]
    out, ok = [], True
    for chain, seed_depth, M in configs:
        cs = embed_coproduct(chain, seed_depth, M)
        fs = sample_homomorphisms(cs.truncation, chain.stage(chain.depth), M, seed=0)
        w = build_witness(cs, fs)
        rep = verify_recovery(w)
        ok &= rep.ok and [r["length"] for r in rep.per_k] == [k + 2 for k in range(M)]
        out.append({"per_k": rep.per_k, "fs": fs, "g1": w.g1.memo, "g2": w.g2.memo, "g3": w.g3.memo,
                    "chain": chain_to_json(chain)})
    return ok, out


PRODUCERS = [c1, c2, c3, c4, c5, c6, c7]


def run(n):
    (ok, artifact), secs = timed(PRODUCERS[n - 1])
    ARTIFACTS[n] = dumps(artifact).encode()
    return ok, secs


# ---- criteria


def test_criterion_1_random_graph_stage(pytestconfig):
    ok, secs = run(1)
    report(pytestconfig, 1, "compact stage over one vertex is {v, u{}, u{v}} with edge v-u{v}", ok, secs, 1)


def test_criterion_2_extension_property_audit(pytestconfig):
    ok, secs = run(2)
    report(pytestconfig, 2, "extension audit k=2 over K1, P3 and the 2-chain", ok, secs, 60)


def test_criterion_3_pushout_universality(pytestconfig):
    ok, secs = run(3)
    c = oracle_summary(3)
    report(pytestconfig, 3, "pushout universality, |A|<=2, |B|,|C|<=4, |Q|<=5", ok, secs, 600, c)


def test_criterion_4_extender_soundness(pytestconfig):
    ok, secs = run(4)
    report(pytestconfig, 4, "one-point extenders sound (graphs, posets |B|<=4; 500 metric; ties)", ok, secs, 300)


def test_criterion_5_henson_counterexample(pytestconfig):
    ok, secs = run(5)
    report(pytestconfig, 5, "triangle-free graphs fail with the anticlique-to-clique bijection", ok, secs, 10)


def test_criterion_6_hom_homogeneity_witness(pytestconfig):
    ok, secs = run(6)
    report(pytestconfig, 6, "every hom S -> stage 0 with |S|<=3 extends over stage 2", ok, secs, 600)


def test_criterion_7_sierpinski_recovery(pytestconfig):
    ok, secs = run(7)
    report(pytestconfig, 7, "g3 g2^k g1 = f_k with trace length k+2 (graphs M=3, posets M=2)", ok, secs, 300)


def cli_artifacts(tmp):
    seed = tmp / "seed.json"
    seed.write_text(dumps(structure_to_json(K1)))
    out = []
    for i in range(2):
        chain, rep = tmp / f"chain{i}.json", tmp / f"sierp{i}.json"
        main(["build", "--class", "graph", "--seed", str(seed), "--depth", "2", "--compact", "--out", str(chain)])
        main(["sierpinski", "--class", "graph", "--seed", str(seed), "--seed-depth", "1", "--copies", "3",
              "--max-subset", "1", "--compact", "--report", str(rep)])
        out.append(chain.read_bytes() + rep.read_bytes())
    return out


def test_criterion_8_determinism(pytestconfig, tmp_path):
    missing = [n for n in range(1, 8) if n not in ARTIFACTS]
    for n in missing:
        run(n)
    first = dict(ARTIFACTS)
    t = time.perf_counter()
    differ = []
    for n in range(1, 8):
        _ok, artifact = PRODUCERS[n - 1]()
        if dumps(artifact).encode() != first[n]:
            differ.append(n)
    a, b = cli_artifacts(tmp_path)
    if a != b:
        differ.append("cli")
    secs = time.perf_counter() - t
    report(pytestconfig, 8, "rerunning criteria 1-7 gives byte-identical artifacts", not differ,
           secs, 1800, f"differing: {differ}" if differ else "")


def oracle_summary(n):
    art = json.loads(ARTIFACTS[n])
    return ", ".join(f"{k}: {v['amalgams']} amalgams / {v['pairs']} pairs" for k, v in art.items())


pytestmark = pytest.mark.acceptance
