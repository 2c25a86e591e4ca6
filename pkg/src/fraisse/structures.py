"""Finite relational structures and the maps between them.

Three classes are supported: simple graphs, posets and finite metric spaces
with rational distances.  Elements are plain strings; the tuple
``elements`` fixes an order that every algorithm in the package respects,
so all outputs are deterministic.

Structures are immutable.  Constructors only normalise their input; use
:func:`validate` to check the axioms of the class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Union

from .errors import MalformedInputError

GRAPH = "graph"
POSET = "poset"
METRIC = "metric"
KINDS = (GRAPH, POSET, METRIC)


def _elements(elements: Iterable[str]) -> tuple[str, ...]:
    els = tuple(elements)
    if len(set(els)) != len(els):
        raise MalformedInputError(f"duplicate elements in {els!r}")
    for e in els:
        if not isinstance(e, str):
            raise MalformedInputError(f"element ids must be strings, got {e!r}")
    return els


class _Base:
    kind: str
    elements: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.element_set

    @cached_property
    def element_set(self) -> frozenset[str]:
        return frozenset(self.elements)

    @cached_property
    def index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.elements)}


@dataclass(frozen=True, eq=False)
class Graph(_Base):
    elements: tuple[str, ...]
    edges: frozenset[frozenset[str]] = field(default_factory=frozenset)
    kind = GRAPH

    def __post_init__(self):
        object.__setattr__(self, "elements", _elements(self.elements))
        object.__setattr__(self, "edges", frozenset(frozenset(e) for e in self.edges))

    @classmethod
    def from_edges(cls, elements: Iterable[str], edges: Iterable[Iterable[str]]) -> "Graph":
        return cls(tuple(elements), frozenset(frozenset(e) for e in edges))

    @cached_property
    def adjacency(self) -> dict[str, frozenset[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.elements}
        for e in self.edges:
            if len(e) == 2:
                a, b = e
                if a in adj and b in adj:
                    adj[a].add(b)
                    adj[b].add(a)
        return {v: frozenset(s) for v, s in adj.items()}

    def neighbors(self, v: str) -> frozenset[str]:
        return self.adjacency[v]

    def related(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.edges

    def sorted_edges(self) -> list[tuple[str, str]]:
        idx = self.index
        out = []
        for e in self.edges:
            a, b = sorted(e, key=lambda v: idx.get(v, len(idx)))
            out.append((a, b))
        return sorted(out, key=lambda p: (idx.get(p[0], -1), idx.get(p[1], -1)))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.element_set == other.element_set and self.edges == other.edges

    def __hash__(self):
        return hash((GRAPH, self.element_set, self.edges))

    def __repr__(self):
        return f"Graph({list(self.elements)}, edges={self.sorted_edges()})"


@dataclass(frozen=True, eq=False)
class Poset(_Base):
    """A poset storing its full ``<=`` relation (reflexive pairs included)."""

    elements: tuple[str, ...]
    le: frozenset[tuple[str, str]] = field(default_factory=frozenset)
    kind = POSET

    def __post_init__(self):
        object.__setattr__(self, "elements", _elements(self.elements))
        object.__setattr__(self, "le", frozenset((a, b) for a, b in self.le))

    @classmethod
    def from_pairs(cls, elements: Iterable[str], pairs: Iterable[tuple[str, str]]) -> "Poset":
        """Build a poset from ``<=`` pairs, adding the reflexive ones."""
        els = tuple(elements)
        return cls(els, frozenset(pairs) | {(e, e) for e in els})

    @classmethod
    def chain(cls, names: Iterable[str]) -> "Poset":
        names = tuple(names)
        return cls.from_pairs(names, [(a, b) for i, a in enumerate(names) for b in names[i:]])

    @classmethod
    def antichain(cls, names: Iterable[str]) -> "Poset":
        return cls.from_pairs(names, [])

    @cached_property
    def _up(self) -> dict[str, frozenset[str]]:
        up: dict[str, set[str]] = {e: set() for e in self.elements}
        for a, b in self.le:
            if a != b and a in up:
                up[a].add(b)
        return {e: frozenset(s) for e, s in up.items()}

    @cached_property
    def _down(self) -> dict[str, frozenset[str]]:
        down: dict[str, set[str]] = {e: set() for e in self.elements}
        for a, b in self.le:
            if a != b and b in down:
                down[b].add(a)
        return {e: frozenset(s) for e, s in down.items()}

    def above(self, x: str) -> frozenset[str]:
        """Elements strictly above ``x``."""
        return self._up[x]

    def below(self, x: str) -> frozenset[str]:
        """Elements strictly below ``x``."""
        return self._down[x]

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.le

    related = leq

    def lt(self, a: str, b: str) -> bool:
        return a != b and (a, b) in self.le

    def strict_pairs(self) -> list[tuple[str, str]]:
        idx = self.index
        return sorted(((a, b) for a, b in self.le if a != b),
                      key=lambda p: (idx.get(p[0], -1), idx.get(p[1], -1)))

    def hasse(self) -> list[tuple[str, str]]:
        """Covering pairs ``a < b`` with nothing strictly between."""
        out = []
        for a, b in self.strict_pairs():
            if not (self.above(a) & self.below(b)):
                out.append((a, b))
        return out

    def __eq__(self, other):
        if not isinstance(other, Poset):
            return NotImplemented
        return self.element_set == other.element_set and self.le == other.le

    def __hash__(self):
        return hash((POSET, self.element_set, self.le))

    def __repr__(self):
        return f"Poset({list(self.elements)}, lt={self.strict_pairs()})"


def as_fraction(q) -> Fraction:
    if isinstance(q, float):
        raise MalformedInputError(f"floating point distance {q!r}; use exact rationals")
    try:
        return Fraction(q)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInputError(f"not a rational: {q!r}") from exc


@dataclass(frozen=True, eq=False)
class MetricSpace(_Base):
    """Finite metric space; ``dist`` maps unordered pairs to exact rationals."""

    elements: tuple[str, ...]
    dist: Mapping[frozenset[str], Fraction] = field(default_factory=dict)
    kind = METRIC

    def __post_init__(self):
        object.__setattr__(self, "elements", _elements(self.elements))
        dist = {}
        for pair, q in dict(self.dist).items():
            pair = frozenset(pair)
            dist[pair] = as_fraction(q)
        object.__setattr__(self, "dist", dist)

    @classmethod
    def from_pairs(cls, elements: Iterable[str], pairs: Mapping[tuple[str, str], object]) -> "MetricSpace":
        return cls(tuple(elements), {frozenset(k): v for k, v in pairs.items()})

    def d(self, x: str, y: str) -> Fraction:
        if x == y:
            return Fraction(0)
        try:
            return self.dist[frozenset((x, y))]
        except KeyError:
            raise MalformedInputError(f"no distance recorded for {x!r}, {y!r}") from None

    @cached_property
    def _key(self):
        return frozenset(self.dist.items())

    def __eq__(self, other):
        if not isinstance(other, MetricSpace):
            return NotImplemented
        return self.element_set == other.element_set and self._key == other._key

    def __hash__(self):
        return hash((METRIC, self.element_set, self._key))

    def __repr__(self):
        pairs = {f"{a}|{b}": str(self.d(a, b)) for a, b in combinations(self.elements, 2)
                 if frozenset((a, b)) in self.dist}
        return f"MetricSpace({list(self.elements)}, {pairs})"


Structure = Union[Graph, Poset, MetricSpace]


def empty_like(kind: str) -> Structure:
    return {GRAPH: Graph(()), POSET: Poset(()), METRIC: MetricSpace(())}[kind]


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}


def _validate_graph(g: Graph) -> list[Violation]:
    out = []
    for e in sorted(g.edges, key=lambda e: sorted(e)):
        members = sorted(e)
        if len(members) == 1:
            out.append(Violation("no-loops", (members[0], members[0])))
        elif len(members) != 2:
            out.append(Violation("edge-arity", tuple(members)))
        missing = [v for v in members if v not in g]
        if missing:
            out.append(Violation("edge-endpoints", tuple(members)))
    return out


def _validate_poset(p: Poset) -> list[Violation]:
    out = []
    els = p.elements
    for a, b in sorted(p.le):
        if a not in p or b not in p:
            out.append(Violation("relation-domain", (a, b)))
    for a in els:
        if (a, a) not in p.le:
            out.append(Violation("reflexivity", (a,)))
    for i, a in enumerate(els):
        for b in els[i + 1:]:
            if (a, b) in p.le and (b, a) in p.le:
                out.append(Violation("antisymmetry", (a, b)))
    for a in els:
        for b in els:
            if (a, b) not in p.le:
                continue
            for c in els:
                if (b, c) in p.le and (a, c) not in p.le:
                    out.append(Violation("transitivity", (a, b, c)))
    return out


def _validate_metric(m: MetricSpace) -> list[Violation]:
    out = []
    els = m.elements
    for pair in m.dist:
        if not pair <= m.element_set:
            out.append(Violation("distance-domain", tuple(sorted(pair))))
    complete = True
    for a, b in combinations(els, 2):
        q = m.dist.get(frozenset((a, b)))
        if q is None:
            out.append(Violation("missing-distance", (a, b)))
            complete = False
        elif q <= 0:
            out.append(Violation("positivity", (a, b)))
    for pair, q in m.dist.items():
        if len(pair) == 1:
            (a,) = pair
            if q != 0:
                out.append(Violation("zero-self-distance", (a,)))
    if not complete:
        return out
    for a, c in combinations(els, 2):
        for b in els:
            if b in (a, c):
                continue
            if m.d(a, c) > m.d(a, b) + m.d(b, c):
                out.append(Violation("triangle", (a, c, b)))
    return out


def validate(s: Structure) -> ValidationReport:
    """Check every axiom of the structure's class; violations are returned, not raised."""
    if isinstance(s, Graph):
        v = _validate_graph(s)
    elif isinstance(s, Poset):
        v = _validate_poset(s)
    elif isinstance(s, MetricSpace):
        v = _validate_metric(s)
    else:
        raise MalformedInputError(f"not a structure: {s!r}")
    return ValidationReport(tuple(v))


def require_valid(s: Structure, what: str = "structure") -> None:
    rep = validate(s)
    if not rep.ok:
        from .errors import PreconditionError
        raise PreconditionError(f"{what} is not a valid {s.kind}: {rep.violations[0]}")


# ---------------------------------------------------------------- substructures


def induced_substructure(s: Structure, subset: Iterable[str]) -> Structure:
    """Restrict ``s`` to ``subset``; element order follows ``s``."""
    sub = set(subset)
    unknown = sub - s.element_set
    if unknown:
        raise MalformedInputError(f"unknown elements {sorted(unknown)}")
    els = tuple(e for e in s.elements if e in sub)
    if isinstance(s, Graph):
        return Graph(els, frozenset(e for e in s.edges if e <= sub))
    if isinstance(s, Poset):
        return Poset(els, frozenset((a, b) for a, b in s.le if a in sub and b in sub))
    return MetricSpace(els, {p: q for p, q in s.dist.items() if p <= sub})


def relabel(s: Structure, names: Mapping[str, str]) -> Structure:
    """Rename elements through an injective ``names`` map (total on ``s``)."""
    if len(set(names[e] for e in s.elements)) != len(s):
        raise MalformedInputError("relabelling is not injective")
    els = tuple(names[e] for e in s.elements)
    if isinstance(s, Graph):
        return Graph(els, frozenset(frozenset(names[v] for v in e) for e in s.edges))
    if isinstance(s, Poset):
        return Poset(els, frozenset((names[a], names[b]) for a, b in s.le))
    return MetricSpace(els, {frozenset(names[v] for v in p): q for p, q in s.dist.items()})


def reorder(s: Structure, order) -> Structure:
    """The same structure with its elements listed in ``order``."""
    order = tuple(order)
    if set(order) != s.element_set or len(order) != len(s):
        raise MalformedInputError("reorder needs a permutation of the elements")
    if isinstance(s, Graph):
        return Graph(order, s.edges)
    if isinstance(s, Poset):
        return Poset(order, s.le)
    return MetricSpace(order, s.dist)


# ---------------------------------------------------------------- morphisms

HOMOMORPHISM = "homomorphism"
EMBEDDING = "embedding"
ISOMORPHISM = "isomorphism"
_STRENGTH = {HOMOMORPHISM: 0, EMBEDDING: 1, ISOMORPHISM: 2}


@dataclass(frozen=True, eq=False)
class Morphism:
    domain: Structure
    codomain: Structure
    mapping: Mapping[str, str]
    kind: str

    def __call__(self, x: str) -> str:
        return self.mapping[x]

    def is_at_least(self, kind: str) -> bool:
        return _STRENGTH[self.kind] >= _STRENGTH[kind]

    @property
    def image(self) -> frozenset[str]:
        return frozenset(self.mapping.values())

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self.domain == other.domain and self.codomain == other.codomain
                and dict(self.mapping) == dict(other.mapping))

    def __hash__(self):
        return hash(frozenset(self.mapping.items()))

    def __repr__(self):
        return f"Morphism({self.kind}, {dict(self.mapping)})"


@dataclass(frozen=True)
class Rejection:
    """A candidate map that is not a homomorphism; ``witness`` names the offending pair."""

    reason: str
    witness: tuple

    def __bool__(self) -> bool:
        return False


def _check_total(mapping: Mapping[str, str], dom: Structure, cod: Structure) -> None:
    keys = set(mapping)
    if keys != dom.element_set:
        missing = sorted(dom.element_set - keys)
        extra = sorted(keys - dom.element_set)
        raise MalformedInputError(f"map not total on domain (missing {missing}, extra {extra})")
    outside = sorted(v for v in mapping.values() if v not in cod)
    if outside:
        raise MalformedInputError(f"image outside codomain: {outside}")


def _hom_violation(mapping, dom: Structure, cod: Structure):
    f = mapping
    if isinstance(dom, Graph):
        for a, b in dom.sorted_edges():
            if not cod.related(f[a], f[b]):
                return ("edge not preserved", (a, b))
    elif isinstance(dom, Poset):
        for a, b in dom.strict_pairs():
            if not cod.leq(f[a], f[b]):
                return ("order not preserved", (a, b))
    else:
        for a, b in combinations(dom.elements, 2):
            if cod.d(f[a], f[b]) > dom.d(a, b):
                return ("distance expanded", (a, b))
    return None


def _reflects(mapping, dom: Structure, cod: Structure) -> bool:
    f = mapping
    if len(set(f.values())) != len(dom):
        return False
    if isinstance(dom, MetricSpace):
        return all(cod.d(f[a], f[b]) == dom.d(a, b) for a, b in combinations(dom.elements, 2))
    for a in dom.elements:
        for b in dom.elements:
            if a != b and cod.related(f[a], f[b]) and not dom.related(a, b):
                return False
    return True


def classify_morphism(mapping: Mapping[str, str], dom: Structure, cod: Structure) -> Morphism | Rejection:
    """Return the strongest kind the map has, or a :class:`Rejection` with a witness pair."""
    if dom.kind != cod.kind:
        raise MalformedInputError(f"cannot map a {dom.kind} into a {cod.kind}")
    mapping = dict(mapping)
    _check_total(mapping, dom, cod)
    bad = _hom_violation(mapping, dom, cod)
    if bad is not None:
        return Rejection(*bad)
    kind = HOMOMORPHISM
    if _reflects(mapping, dom, cod):
        kind = EMBEDDING
        if len(dom) == len(cod):
            kind = ISOMORPHISM
    return Morphism(dom, cod, mapping, kind)


def is_homomorphism(mapping, dom: Structure, cod: Structure) -> bool:
    return isinstance(classify_morphism(mapping, dom, cod), Morphism)


def morphism(mapping, dom: Structure, cod: Structure, at_least: str = HOMOMORPHISM) -> Morphism:
    """Like :func:`classify_morphism` but raise unless the map is at least ``at_least``."""
    from .errors import PreconditionError
    m = classify_morphism(mapping, dom, cod)
    if not isinstance(m, Morphism):
        raise PreconditionError(f"not a homomorphism: {m.reason} at {m.witness}")
    if not m.is_at_least(at_least):
        raise PreconditionError(f"map is a {m.kind}, expected {at_least}")
    return m


def identity(s: Structure) -> Morphism:
    return Morphism(s, s, {e: e for e in s.elements}, ISOMORPHISM)


def compose(g: Morphism, f: Morphism) -> Morphism | Rejection:
    """``g`` after ``f``, re-classified."""
    if f.codomain != g.domain:
        raise MalformedInputError("codomain of f is not the domain of g")
    return classify_morphism({x: g.mapping[y] for x, y in f.mapping.items()}, f.domain, g.codomain)


def corestrict(m: Morphism) -> Morphism:
    """Restrict the codomain to the image, making the map surjective."""
    image = induced_substructure(m.codomain, m.image)
    out = classify_morphism(m.mapping, m.domain, image)
    assert isinstance(out, Morphism)
    return out


def is_surjective(m: Morphism) -> bool:
    return m.image == m.codomain.element_set
