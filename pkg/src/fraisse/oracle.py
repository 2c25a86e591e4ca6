"""Brute-force ground truth for small structures.

Homomorphism search is plain backtracking over element assignments.  For
graphs and posets the constraints are kept as integer bitmasks over the
codomain, which is fast enough for everything up to a few thousand
codomain elements.  Metric spaces use direct rational comparisons.

Canonical forms are lexicographically minimal encodings over *all*
permutations, so they are only offered for tiny structures.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterator, Mapping

from .errors import MalformedInputError, ResourceBoundError
from .structures import (
    GRAPH,
    METRIC,
    POSET,
    Graph,
    MetricSpace,
    Morphism,
    Poset,
    Structure,
    classify_morphism,
    relabel,
    reorder,
)

DEFAULT_HOM_CAP = 6
DEFAULT_ISO_CAP = 7
DEFAULT_ENUM_CAP = {GRAPH: 5, POSET: 5}


def _cap(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


# ---------------------------------------------------------------- encoding


class _Relational:
    """Bitmask view of a graph or poset: ``rel(i, j)`` for i != j."""

    __slots__ = ("s", "n", "elements", "index", "out", "inn")

    def __init__(self, s: Structure):
        self.s = s
        self.elements = s.elements
        self.index = s.index
        self.n = len(s)
        idx = self.index
        out = [0] * self.n
        inn = [0] * self.n
        if isinstance(s, Graph):
            for v, nb in s.adjacency.items():
                i = idx[v]
                for w in nb:
                    out[i] |= 1 << idx[w]
            inn = out
        else:
            # reflexive: an order-preserving map may identify comparable elements
            for a, b in s.le:
                out[idx[a]] |= 1 << idx[b]
                inn[idx[b]] |= 1 << idx[a]
        self.out = out
        self.inn = inn


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _search_order(d: _Relational, fixed: set[int]) -> list[int]:
    """Fixed elements first, then greedily the element most tied to those placed."""
    order = [i for i in range(d.n) if i in fixed]
    placed = 0
    for i in order:
        placed |= 1 << i
    rest = [i for i in range(d.n) if i not in fixed]
    while rest:
        best = max(rest, key=lambda i: (bin((d.out[i] | d.inn[i]) & placed).count("1"), -i))
        rest.remove(best)
        order.append(best)
        placed |= 1 << best
    return order


def _iter_relational(dom: Structure, cod: Structure, embedding: bool, injective: bool,
                     surjective: bool, fixed: Mapping[str, str] | None) -> Iterator[dict[str, str]]:
    d = _Relational(dom)
    c = _Relational(cod)
    injective = injective or embedding
    full = (1 << c.n) - 1
    fixed_idx = {}
    for k, v in (fixed or {}).items():
        if k not in dom or v not in cod:
            raise MalformedInputError(f"fixed assignment {k!r}->{v!r} outside the structures")
        fixed_idx[d.index[k]] = c.index[v]
    order = _search_order(d, set(fixed_idx))
    n = d.n
    if surjective and c.n > n:
        return
    assign = [-1] * n

    def candidates(pos: int) -> int:
        i = order[pos]
        cand = full
        for q in range(pos):
            j = order[q]
            t = assign[j]
            if d.out[i] >> j & 1:
                cand &= c.inn[t]
            elif embedding:
                cand &= ~c.inn[t]
            if d.inn[i] >> j & 1:
                cand &= c.out[t]
            elif embedding:
                cand &= ~c.out[t]
            if injective:
                cand &= ~(1 << t)
        return cand & full

    def rec(pos: int, used: int) -> Iterator[dict[str, str]]:
        if pos == n:
            if surjective and used != full:
                return
            yield {d.elements[i]: c.elements[assign[i]] for i in range(n)}
            return
        if surjective and bin(full & ~used).count("1") > n - pos:
            return
        i = order[pos]
        cand = candidates(pos)
        if i in fixed_idx:
            t = fixed_idx[i]
            cand &= 1 << t
        for t in _bits(cand):
            assign[i] = t
            yield from rec(pos + 1, used | (1 << t))
        assign[i] = -1

    yield from rec(0, 0)


def _iter_metric(dom: MetricSpace, cod: MetricSpace, embedding: bool, injective: bool,
                 surjective: bool, fixed: Mapping[str, str] | None) -> Iterator[dict[str, str]]:
    fixed = dict(fixed or {})
    order = [e for e in dom.elements if e in fixed] + [e for e in dom.elements if e not in fixed]
    injective = injective or embedding
    assign: dict[str, str] = {}

    def ok(x: str, t: str) -> bool:
        for y, u in assign.items():
            if injective and u == t:
                return False
            q = cod.d(t, u)
            p = dom.d(x, y)
            if q > p or (embedding and q != p):
                return False
        return True

    def rec(pos: int) -> Iterator[dict[str, str]]:
        if pos == len(order):
            if surjective and set(assign.values()) != cod.element_set:
                return
            yield {e: assign[e] for e in dom.elements}
            return
        x = order[pos]
        cands = [fixed[x]] if x in fixed else cod.elements
        for t in cands:
            if ok(x, t):
                assign[x] = t
                yield from rec(pos + 1)
                del assign[x]

    yield from rec(0)


def iter_homomorphisms(dom: Structure, cod: Structure, *, embedding: bool = False,
                       injective: bool = False, surjective: bool = False,
                       fixed: Mapping[str, str] | None = None) -> Iterator[dict[str, str]]:
    """Yield every homomorphism ``dom -> cod`` as a plain dict, uncapped.

    ``fixed`` pins some values in advance; ``embedding`` additionally
    requires the map to reflect the structure.
    """
    if dom.kind != cod.kind:
        raise MalformedInputError(f"cannot map a {dom.kind} into a {cod.kind}")
    if isinstance(dom, MetricSpace):
        return _iter_metric(dom, cod, embedding, injective, surjective, fixed)
    return _iter_relational(dom, cod, embedding, injective, surjective, fixed)


def all_homomorphisms(dom: Structure, cod: Structure, cap: int | None = None) -> list[Morphism]:
    cap = _cap("FRAISSE_HOM_CAP", DEFAULT_HOM_CAP) if cap is None else cap
    if len(dom) > cap:
        raise ResourceBoundError(f"domain has {len(dom)} elements, cap is {cap}")
    out = []
    for f in iter_homomorphisms(dom, cod):
        m = classify_morphism(f, dom, cod)
        assert isinstance(m, Morphism)
        out.append(m)
    return out


def brute_force_homomorphisms(dom: Structure, cod: Structure) -> list[dict[str, str]]:
    """All homomorphisms by trying every function: the check on the backtracker."""
    out = []
    for values in product(cod.elements, repeat=len(dom)):
        f = dict(zip(dom.elements, values))
        if isinstance(classify_morphism(f, dom, cod), Morphism):
            out.append(f)
    return out


def automorphisms(s: Structure) -> list[dict[str, str]]:
    return list(iter_homomorphisms(s, s, embedding=True))


# ---------------------------------------------------------------- isomorphism


def _invariant(s: Structure):
    if isinstance(s, Graph):
        return (GRAPH, len(s), len(s.edges), tuple(sorted(len(s.neighbors(v)) for v in s)))
    if isinstance(s, Poset):
        return (POSET, len(s), len(s.le),
                tuple(sorted((len(s.below(v)), len(s.above(v))) for v in s)))
    return (METRIC, len(s), tuple(sorted(s.dist.values())))


def are_isomorphic(s1: Structure, s2: Structure, cap: int | None = None) -> tuple[bool, dict[str, str] | None]:
    """Decide isomorphism; on success also return an isomorphism ``s1 -> s2``."""
    cap = _cap("FRAISSE_ISO_CAP", DEFAULT_ISO_CAP) if cap is None else cap
    if max(len(s1), len(s2)) > cap:
        raise ResourceBoundError(f"isomorphism test capped at {cap} elements")
    if s1.kind != s2.kind or _invariant(s1) != _invariant(s2):
        return False, None
    for f in iter_homomorphisms(s1, s2, embedding=True):
        return True, f
    return False, None


@dataclass(frozen=True)
class CanonicalForm:
    kind: str
    certificate: tuple
    relabeling: tuple[tuple[str, int], ...]

    def __eq__(self, other):
        if not isinstance(other, CanonicalForm):
            return NotImplemented
        return (self.kind, self.certificate) == (other.kind, other.certificate)

    def __lt__(self, other):
        return (len(self.relabeling), self.certificate) < (len(other.relabeling), other.certificate)

    def __hash__(self):
        return hash((self.kind, self.certificate))

    def positions(self) -> dict[str, int]:
        return dict(self.relabeling)


def _code(s: Structure, perm: tuple[str, ...]) -> tuple:
    if isinstance(s, Graph):
        return tuple(s.related(perm[i], perm[j]) for i, j in combinations(range(len(perm)), 2))
    if isinstance(s, Poset):
        n = len(perm)
        return tuple(s.leq(perm[i], perm[j]) for i in range(n) for j in range(n) if i != j)
    return tuple(s.d(perm[i], perm[j]) for i, j in combinations(range(len(perm)), 2))


def canonical_form(s: Structure, cap: int | None = None) -> CanonicalForm:
    """Lexicographically smallest encoding over all orderings of the elements."""
    cap = _cap("FRAISSE_ISO_CAP", DEFAULT_ISO_CAP) if cap is None else cap
    if len(s) > cap:
        raise ResourceBoundError(f"canonical form capped at {cap} elements")
    best = None
    best_perm: tuple[str, ...] = ()
    for perm in permutations(s.elements):
        code = _code(s, perm)
        if best is None or code < best:
            best, best_perm = code, perm
    return CanonicalForm(s.kind, (len(s),) + tuple(best or ()),
                         tuple((e, i) for i, e in enumerate(best_perm)))


def canonical_relabel(s: Structure) -> Structure:
    """An isomorphic copy on elements ``"0", "1", ...`` in canonical order."""
    cf = canonical_form(s)
    pos = cf.positions()
    names = {e: str(pos[e]) for e in s.elements}
    return reorder(relabel(s, names), sorted(names.values(), key=int))


# ---------------------------------------------------------------- enumeration


def _raw_extensions(s: Structure) -> Iterator[Structure]:
    """Every one-point extension of ``s`` by a new element ``str(len(s))``."""
    x = str(len(s))
    els = s.elements
    if isinstance(s, Graph):
        for r in range(len(els) + 1):
            for nb in combinations(els, r):
                yield Graph(els + (x,), s.edges | {frozenset((x, v)) for v in nb})
        return
    assert isinstance(s, Poset)
    for lower in _subsets(els):
        if any(not (s.below(a) <= lower) for a in lower):
            continue
        for upper in _subsets(els):
            if upper & lower or any(not (s.above(a) <= upper) for a in upper):
                continue
            if any(not s.lt(a, b) for a in lower for b in upper):
                continue
            le = set(s.le) | {(x, x)} | {(a, x) for a in lower} | {(x, b) for b in upper}
            yield Poset(els + (x,), frozenset(le))


def _subsets(els) -> Iterator[frozenset[str]]:
    for r in range(len(els) + 1):
        for c in combinations(els, r):
            yield frozenset(c)


@lru_cache(maxsize=None)
def _levels(kind: str, n: int) -> tuple[tuple[Structure, ...], ...]:
    if n == 0:
        return ((Graph(()) if kind == GRAPH else Poset(()),),)
    levels = _levels(kind, n - 1)
    seen: dict[CanonicalForm, Structure] = {}
    for s in levels[-1]:
        for t in _raw_extensions(s):
            cf = canonical_form(t)
            if cf not in seen:
                seen[cf] = canonical_relabel(t)
    return levels + (tuple(seen[k] for k in sorted(seen, key=lambda c: c.certificate)),)


def enumerate_structures(kind: str, n: int, include_empty: bool = False,
                         cap: int | None = None) -> list[Structure]:
    """One representative per isomorphism type with at most ``n`` elements.

    Types of size m are generated from those of size m - 1 (every finite
    graph or poset is a one-point extension of any of its induced
    substructures of one element less) and deduplicated by canonical form.
    Output is sorted by size, then certificate.
    """
    if kind not in DEFAULT_ENUM_CAP:
        raise MalformedInputError(f"no enumeration for class {kind!r}")
    if cap is None:
        cap = _cap("FRAISSE_ENUM_CAP", DEFAULT_ENUM_CAP[kind])
    if n > cap:
        raise ResourceBoundError(f"enumeration of {kind}s capped at {cap} elements")
    levels = _levels(kind, n)
    out = [s for level in levels for s in level]
    if not include_empty:
        out = [s for s in out if len(s)]
    return out


def count_by_size(structures) -> dict[int, int]:
    out: dict[int, int] = {}
    for s in structures:
        out[len(s)] = out.get(len(s), 0) + 1
    return out


def metric_from_rows(names, rows) -> MetricSpace:
    """Small helper for tests and demos: a metric space from a full matrix."""
    names = tuple(names)
    dist = {frozenset((names[i], names[j])): Fraction(rows[i][j])
            for i, j in combinations(range(len(names)), 2)}
    return MetricSpace(names, dist)
