"""Amalgamated free sums (pushouts) and coproducts of graphs and posets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from . import oracle
from .errors import InternalConsistencyError, PreconditionError, ResourceBoundError, UnsupportedClassError
from .structures import (
    EMBEDDING,
    GRAPH,
    POSET,
    Graph,
    Morphism,
    Poset,
    Structure,
    classify_morphism,
    morphism,
    require_valid,
    validate,
)


@dataclass(frozen=True)
class Amalgam:
    """``(A, B, C, f1, f2)`` with embeddings ``f1: A -> B`` and ``f2: A -> C``."""

    A: Structure
    B: Structure
    C: Structure
    f1: Mapping[str, str]
    f2: Mapping[str, str]

    def __post_init__(self):
        kinds = {self.A.kind, self.B.kind, self.C.kind}
        if len(kinds) != 1:
            raise PreconditionError(f"amalgam mixes classes {sorted(kinds)}")
        for name in "ABC":
            require_valid(getattr(self, name), name)
        object.__setattr__(self, "f1", morphism(self.f1, self.A, self.B, EMBEDDING).mapping)
        object.__setattr__(self, "f2", morphism(self.f2, self.A, self.C, EMBEDDING).mapping)

    @property
    def kind(self) -> str:
        return self.A.kind


@dataclass(frozen=True)
class PushoutResult:
    P: Structure
    i1: dict[str, str]
    i2: dict[str, str]
    amalgam: Amalgam | None = field(default=None, compare=False)


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def _carrier(am: Amalgam) -> tuple[list[str], dict[str, str], dict[str, str]]:
    """Names for ``B *_A C``: A's ids on the shared part, then B's, then C's, primed on clashes."""
    taken: set[str] = set()
    i1: dict[str, str] = {}
    i2: dict[str, str] = {}
    order: list[str] = []
    for a in am.A.elements:
        n = _fresh(a, taken)
        i1[am.f1[a]] = n
        i2[am.f2[a]] = n
        order.append(n)
    for b in am.B.elements:
        if b not in i1:
            i1[b] = _fresh(b, taken)
            order.append(i1[b])
    for c in am.C.elements:
        if c not in i2:
            i2[c] = _fresh(c, taken)
            order.append(i2[c])
    return order, i1, i2


def transitive_closure(elements: Sequence[str], pairs: Iterable[tuple[str, str]]) -> set[tuple[str, str]]:
    """Reflexive-transitive closure by a search from every element."""
    succ: dict[str, set[str]] = {e: set() for e in elements}
    for a, b in pairs:
        succ[a].add(b)
    out = set()
    for a in elements:
        seen = {a}
        stack = [a]
        while stack:
            x = stack.pop()
            for y in succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.update((a, b) for b in seen)
    return out


def _finish(am: Amalgam, P: Structure, i1, i2) -> PushoutResult:
    if not validate(P):
        raise InternalConsistencyError(f"free sum is not a valid {P.kind}: {validate(P).violations[0]}")
    for name, leg, src in (("i1", i1, am.B), ("i2", i2, am.C)):
        m = classify_morphism(leg, src, P)
        if not isinstance(m, Morphism) or not m.is_at_least(EMBEDDING):
            raise InternalConsistencyError(f"{name} is not an embedding")
    for a in am.A.elements:
        if i1[am.f1[a]] != i2[am.f2[a]]:
            raise InternalConsistencyError(f"diagram does not commute at {a!r}")
    if set(i1.values()) | set(i2.values()) != P.element_set:
        raise InternalConsistencyError("free sum not generated by the images of B and C")
    return PushoutResult(P, i1, i2, am)


def pushout_graph(am: Amalgam) -> PushoutResult:
    """Free sum of graphs: glue along A, edges are exactly the images of E(B) and E(C)."""
    if am.kind != GRAPH:
        raise PreconditionError("pushout_graph needs an amalgam of graphs")
    order, i1, i2 = _carrier(am)
    edges = {frozenset(i1[v] for v in e) for e in am.B.edges}
    edges |= {frozenset(i2[v] for v in e) for e in am.C.edges}
    return _finish(am, Graph(tuple(order), frozenset(edges)), i1, i2)


def pushout_poset(am: Amalgam) -> PushoutResult:
    """Free sum of posets: transitive closure of the union of the two image orders."""
    if am.kind != POSET:
        raise PreconditionError("pushout_poset needs an amalgam of posets")
    order, i1, i2 = _carrier(am)
    pairs = {(i1[a], i1[b]) for a, b in am.B.le} | {(i2[a], i2[b]) for a, b in am.C.le}
    le = transitive_closure(order, pairs)
    for a, b in le:
        if a != b and (b, a) in le:
            raise InternalConsistencyError(f"closure identifies {a!r} and {b!r}")
    return _finish(am, Poset(tuple(order), frozenset(le)), i1, i2)


def pushout(am: Amalgam) -> PushoutResult:
    if am.kind == GRAPH:
        return pushout_graph(am)
    if am.kind == POSET:
        return pushout_poset(am)
    raise UnsupportedClassError(f"no amalgamated free sums for {am.kind} structures")


# ---------------------------------------------------------------- coproducts


def coproduct(kind: str, parts: Sequence[Structure]) -> tuple[Structure, list[dict[str, str]]]:
    """Disjoint union with no cross relations; returns the injections too.

    Element ``e`` of part ``i`` becomes ``f"{e}#{i}"``.
    """
    if kind not in (GRAPH, POSET):
        raise UnsupportedClassError(f"no coproduct for {kind} structures")
    injections: list[dict[str, str]] = []
    els: list[str] = []
    rel: set = set()
    for i, s in enumerate(parts):
        if s.kind != kind:
            raise PreconditionError(f"part {i} is a {s.kind}, not a {kind}")
        inj = {e: f"{e}#{i}" for e in s.elements}
        injections.append(inj)
        els.extend(inj[e] for e in s.elements)
        if kind == GRAPH:
            rel |= {frozenset(inj[v] for v in e) for e in s.edges}
        else:
            rel |= {(inj[a], inj[b]) for a, b in s.le}
    out = Graph(tuple(els), frozenset(rel)) if kind == GRAPH else Poset(tuple(els), frozenset(rel))
    return out, injections


# ---------------------------------------------------------------- universal property


@dataclass
class UniversalReport:
    ok: bool
    structures_checked: int = 0
    pairs_checked: int = 0
    counterexample: dict | None = None


def _leg_profile(X: Structure, base_images: tuple[str, ...], Q: Structure) -> dict[tuple, list]:
    """Group Hom(X, Q) by the values on the base images.

    Returns ``sigma -> [count, masks]`` where ``masks[k]`` is the bitmask of
    values the k-th element of X takes over the group.
    """
    qi = Q.index
    out: dict[tuple, list] = {}
    for j in oracle.iter_homomorphisms(X, Q):
        sigma = tuple(qi[j[b]] for b in base_images)
        entry = out.get(sigma)
        if entry is None:
            entry = out[sigma] = [0, [0] * len(X)]
        entry[0] += 1
        masks = entry[1]
        for k, x in enumerate(X.elements):
            masks[k] |= 1 << qi[j[x]]
    return out


def _q_masks(Q: Structure) -> tuple[list[int], list[int]]:
    """``into[w]``: things related to w (``r(v, w)``); ``outof[w]``: things w relates to."""
    qi = Q.index
    into = [0] * len(Q)
    outof = [0] * len(Q)
    if isinstance(Q, Graph):
        for v, nb in Q.adjacency.items():
            for w in nb:
                into[qi[w]] |= 1 << qi[v]
        return into, into
    for a, b in Q.le:
        into[qi[b]] |= 1 << qi[a]
        outof[qi[a]] |= 1 << qi[b]
    return into, outof


def _cross_relations(P: Structure, i1, i2, am: Amalgam):
    """Relations of P between an element only in i1(B) and one only in i2(C).

    Relations inside i1(B) (or i2(C)) are the images of B's (C's) relations
    because the legs are embeddings, so any homomorphism j1 (j2) keeps them;
    only these cross relations can stop a glued map from being a homomorphism.
    """
    shared = {i1[am.f1[a]] for a in am.A.elements}
    b_of = {p: b for b, p in i1.items() if p not in shared}
    c_of = {p: c for c, p in i2.items() if p not in shared}
    bpos = am.B.index
    cpos = am.C.index
    out = []
    if isinstance(P, Graph):
        for e in P.edges:
            p, q = tuple(e)
            if p in c_of and q in b_of:
                p, q = q, p
            if p in b_of and q in c_of:
                out.append(("bc", bpos[b_of[p]], cpos[c_of[q]]))
    else:
        for p, q in P.le:
            if p in b_of and q in c_of:
                out.append(("bc", bpos[b_of[p]], cpos[c_of[q]]))
            elif p in c_of and q in b_of:
                out.append(("cb", cpos[c_of[p]], bpos[b_of[q]]))
    return out


def _naive_pairs(res: PushoutResult, am: Amalgam, Q: Structure, report: UniversalReport) -> bool:
    P, i1, i2 = res.P, res.i1, res.i2
    shared = [(am.f1[a], am.f2[a]) for a in am.A.elements]
    for j1 in oracle.iter_homomorphisms(am.B, Q):
        pinned = {c: j1[b] for b, c in shared}
        for j2 in oracle.iter_homomorphisms(am.C, Q, fixed=pinned):
            report.pairs_checked += 1
            forced = {p: j1[b] for b, p in i1.items()}
            forced.update({p: j2[c] for c, p in i2.items()})
            count = sum(1 for _ in oracle.iter_homomorphisms(P, Q, fixed=forced))
            if len(forced) != len(P) or count != 1:
                report.counterexample = {"Q": Q, "j1": j1, "j2": j2, "mediators": count}
                return False
    return True


def _find_bad_pair(am: Amalgam, res: PushoutResult, Q: Structure, sigma) -> dict:
    qi = Q.index
    for j1 in oracle.iter_homomorphisms(am.B, Q):
        if tuple(qi[j1[am.f1[a]]] for a in am.A.elements) != sigma:
            continue
        pinned = {am.f2[a]: j1[am.f1[a]] for a in am.A.elements}
        for j2 in oracle.iter_homomorphisms(am.C, Q, fixed=pinned):
            forced = {p: j1[b] for b, p in res.i1.items()}
            forced.update({p: j2[c] for c, p in res.i2.items()})
            count = sum(1 for _ in oracle.iter_homomorphisms(res.P, Q, fixed=forced))
            if count != 1:
                return {"Q": Q, "j1": j1, "j2": j2, "mediators": count}
    raise InternalConsistencyError("projection check failed but no bad pair found")


def check_pushout_universal(res: PushoutResult, am: Amalgam, size_bound: int, cap: int = 5,
                            naive: bool = False, cache: dict | None = None) -> UniversalReport:
    """Test the pushout property against every Q with at most ``size_bound`` elements.

    For every compatible pair ``j1: B -> Q``, ``j2: C -> Q`` there must be
    exactly one homomorphism ``h: P -> Q`` with ``h i1 = j1`` and
    ``h i2 = j2``.  Because P is covered by the two images, ``h`` is forced
    as a map, so uniqueness is the coverage check and existence is whether
    the forced map keeps P's relations.

    ``naive=True`` enumerates the pairs one by one and counts mediators with
    the homomorphism search.  The default groups the pairs by their common
    values ``sigma`` on A: a cross relation ``p ~ q`` holds under every pair
    of a group iff it holds for every combination of the values p takes over
    the group's j1 and q takes over its j2, which is a bitmask test.
    ``cache`` may be shared between calls to reuse leg profiles.
    """
    if size_bound > cap:
        raise ResourceBoundError(f"universal-property check capped at |Q| <= {cap}")
    P, i1, i2 = res.P, res.i1, res.i2
    report = UniversalReport(ok=True)
    if set(i1.values()) | set(i2.values()) != P.element_set:
        report.ok = False
        report.counterexample = {"uncovered": sorted(P.element_set - set(i1.values()) - set(i2.values()))}
        return report
    cache = {} if cache is None else cache
    cross = _cross_relations(P, i1, i2, am)
    b_base = tuple(am.f1[a] for a in am.A.elements)
    c_base = tuple(am.f2[a] for a in am.A.elements)
    for Q in oracle.enumerate_structures(am.kind, size_bound, include_empty=True, cap=cap):
        report.structures_checked += 1
        if naive:
            if not _naive_pairs(res, am, Q, report):
                report.ok = False
                return report
            continue
        key_b = (am.B, b_base, Q)
        key_c = (am.C, c_base, Q)
        if key_b not in cache:
            cache[key_b] = _leg_profile(am.B, b_base, Q)
        if key_c not in cache:
            cache[key_c] = _leg_profile(am.C, c_base, Q)
        prof_b, prof_c = cache[key_b], cache[key_c]
        into, outof = _q_masks(Q) if cross else ([], [])
        for sigma, (nb, masks_b) in prof_b.items():
            entry = prof_c.get(sigma)
            if entry is None:
                continue
            nc, masks_c = entry
            report.pairs_checked += nb * nc
            for direction, u, v in cross:
                if direction == "bc":
                    left, right = masks_b[u], masks_c[v]
                else:
                    left, right = masks_c[u], masks_b[v]
                need = -1
                for w in oracle._bits(right):
                    need &= into[w]
                if left & ~need:
                    report.ok = False
                    report.counterexample = _find_bad_pair(am, res, Q, sigma)
                    return report
    return report


# ---------------------------------------------------------------- amalgam enumeration


def _embedding_orbit_reps(A: Structure, X: Structure) -> list[dict[str, str]]:
    """Embeddings ``A -> X`` up to automorphisms of X (least code per orbit)."""
    auts = oracle.automorphisms(X)
    pos = X.index
    out = []
    for f in oracle.iter_homomorphisms(A, X, embedding=True):
        code = tuple(pos[f[a]] for a in A.elements)
        if all(tuple(pos[s[f[a]]] for a in A.elements) >= code for s in auts):
            out.append(f)
    return out


def iter_amalgams(kind: str, max_base: int, max_side: int) -> Iterator[Amalgam]:
    """All amalgams with ``|A| <= max_base`` and ``|B|, |C| <= max_side``.

    A, B and C range over isomorphism types; each leg ranges over embeddings
    up to automorphisms of its target.
    """
    sides = oracle.enumerate_structures(kind, max_side, include_empty=True)
    for A in oracle.enumerate_structures(kind, max_base, include_empty=True):
        legs = {}
        for X in sides:
            if len(X) >= len(A):
                legs[X] = _embedding_orbit_reps(A, X)
        for B, f1s in legs.items():
            for C, f2s in legs.items():
                for f1 in f1s:
                    for f2 in f2s:
                        yield Amalgam(A, B, C, f1, f2)
