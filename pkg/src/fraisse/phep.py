"""One-point homomorphism extension for graphs, posets and rational metric spaces.

Given a surjective homomorphism ``phi: B -> B'`` and a one-point extension
``C = B + x``, each extender builds a structure ``C'`` containing ``B'``
together with a homomorphism ``phi': C -> C'`` that agrees with ``phi``
on B.  :func:`check_1phep_class` decides the property for a whole class
at bounded size by exhaustive search, independently of the extenders.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from . import oracle
from .errors import (
    InternalConsistencyError,
    MalformedInputError,
    PreconditionError,
    ResourceBoundError,
    UnsupportedClassError,
)
from .structures import (
    GRAPH,
    METRIC,
    POSET,
    Graph,
    MetricSpace,
    Morphism,
    Poset,
    Structure,
    as_fraction,
    classify_morphism,
    is_surjective,
    validate,
)

# ---------------------------------------------------------------- extensions


def fresh_name(name: str, taken) -> str:
    while name in taken:
        name += "'"
    return name


@dataclass(frozen=True, eq=False)
class OnePointExtension:
    """``C = base + new``, described by how ``new`` attaches to the base.

    ``attachment`` is the neighbour set for graphs, the pair ``(L, U)`` of
    elements strictly below and above ``new`` for posets, and the map
    ``b -> d(new, b)`` for metric spaces.
    """

    base: Structure
    new: str
    attachment: object

    def __post_init__(self):
        if self.new in self.base:
            raise MalformedInputError(f"new element {self.new!r} already in the base")

    @classmethod
    def graph(cls, base: Graph, neighbors: Iterable[str], new: str = "x") -> "OnePointExtension":
        return cls(base, new, frozenset(neighbors))

    @classmethod
    def poset(cls, base: Poset, lower: Iterable[str], upper: Iterable[str], new: str = "x") -> "OnePointExtension":
        return cls(base, new, (frozenset(lower), frozenset(upper)))

    @classmethod
    def metric(cls, base: MetricSpace, distances: Mapping[str, object], new: str = "y") -> "OnePointExtension":
        return cls(base, new, {b: as_fraction(q) for b, q in distances.items()})

    @classmethod
    def of(cls, C: Structure, new: str) -> "OnePointExtension":
        """Read off the extension that adds ``new`` to the rest of ``C``."""
        from .structures import induced_substructure
        base = induced_substructure(C, [e for e in C.elements if e != new])
        return cls(base, new, attachment_in(C, new, base.elements))

    @property
    def kind(self) -> str:
        return self.base.kind

    def key(self):
        """Hashable form of the attachment."""
        if self.kind == METRIC:
            return tuple(sorted(self.attachment.items()))
        return self.attachment

    def __eq__(self, other):
        if not isinstance(other, OnePointExtension):
            return NotImplemented
        return (self.base, self.new, self.key()) == (other.base, other.new, other.key())

    def __hash__(self):
        return hash((self.base, self.new, self.key()))

    def __repr__(self):
        return f"OnePointExtension({self.kind}, new={self.new!r}, attachment={_show(self.attachment)})"

    @cached_property
    def structure(self) -> Structure:
        b, x, att = self.base, self.new, self.attachment
        els = b.elements + (x,)
        if isinstance(b, Graph):
            return Graph(els, b.edges | {frozenset((x, v)) for v in att})
        if isinstance(b, Poset):
            lower, upper = att
            le = set(b.le) | {(x, x)} | {(a, x) for a in lower} | {(x, c) for c in upper}
            return Poset(els, frozenset(le))
        dist = dict(b.dist)
        dist.update({frozenset((x, v)): q for v, q in att.items()})
        return MetricSpace(els, dist)

    def problems(self) -> list[str]:
        """Reasons this is not a legal one-point extension (empty when it is)."""
        b, att = self.base, self.attachment
        out = []
        if isinstance(b, Graph):
            if not att <= b.element_set:
                out.append("neighbours outside the base")
        elif isinstance(b, Poset):
            lower, upper = att
            if not (lower | upper) <= b.element_set:
                return ["attachment outside the base"]
            if any(not b.below(a) <= lower for a in lower):
                out.append("lower set is not a down-set")
            if any(not b.above(a) <= upper for a in upper):
                out.append("upper set is not an up-set")
            if lower & upper:
                out.append("lower and upper sets meet")
            if any(not b.lt(a, c) for a in lower for c in upper):
                out.append("some lower element is not below some upper element")
        else:
            if set(att) != b.element_set:
                out.append("distance vector does not cover the base")
            elif any(q <= 0 for q in att.values()):
                out.append("new point at distance 0 from an existing point")
        if not out and not validate(self.structure):
            out.append(f"extension is not a valid {b.kind}: {validate(self.structure).violations[0]}")
        return out


def _show(att):
    if isinstance(att, frozenset):
        return sorted(att)
    if isinstance(att, tuple):
        return tuple(sorted(s) for s in att)
    return {k: str(v) for k, v in att.items()}


def attachment_in(s: Structure, x: str, base: Iterable[str]):
    """How ``x`` attaches to ``base`` inside ``s``."""
    base = [b for b in base if b != x]
    if isinstance(s, Graph):
        return frozenset(b for b in base if s.related(x, b))
    if isinstance(s, Poset):
        return (frozenset(b for b in base if s.lt(b, x)), frozenset(b for b in base if s.lt(x, b)))
    return {b: s.d(x, b) for b in base}


def raw_attachments(B: Structure) -> Iterator[object]:
    """Every legal attachment over B, in a fixed order (by size, then element order)."""
    els = B.elements
    if isinstance(B, Graph):
        for r in range(len(els) + 1):
            for nb in combinations(els, r):
                yield frozenset(nb)
        return
    if not isinstance(B, Poset):
        raise UnsupportedClassError("metric one-point extensions form an infinite family")
    downs = [s for s in _subsets(els) if all(B.below(a) <= s for a in s)]
    ups = [s for s in _subsets(els) if all(B.above(a) <= s for a in s)]
    pairs = []
    for lower in downs:
        for upper in ups:
            if lower & upper:
                continue
            if all(B.lt(a, c) for a in lower for c in upper):
                pairs.append((lower, upper))
    idx = B.index
    pairs.sort(key=lambda p: (len(p[0]) + len(p[1]), sorted(idx[a] for a in p[0]),
                              sorted(idx[a] for a in p[1])))
    yield from pairs


def _subsets(els) -> list[frozenset[str]]:
    return [frozenset(c) for r in range(len(els) + 1) for c in combinations(els, r)]


def _apply(sigma: Mapping[str, str], att):
    if isinstance(att, frozenset):
        return frozenset(sigma[a] for a in att)
    return tuple(frozenset(sigma[a] for a in s) for s in att)


def _att_code(att, idx):
    if isinstance(att, frozenset):
        return tuple(sorted(idx[a] for a in att))
    return tuple(tuple(sorted(idx[a] for a in s)) for s in att)


def enumerate_one_point_extensions(B: Structure, up_to_automorphism: bool = True,
                                   new: str | None = None) -> list[OnePointExtension]:
    """One-point extensions of B, one per orbit of attachments under Aut(B).

    With ``up_to_automorphism=False`` every attachment is returned: these
    are the extension types over B with B fixed pointwise.
    """
    if B.kind == METRIC:
        raise UnsupportedClassError("metric one-point extensions form an infinite family")
    new = fresh_name(new or "x", B.element_set)
    auts = oracle.automorphisms(B) if up_to_automorphism else []
    idx = B.index
    seen = set()
    out = []
    for att in raw_attachments(B):
        if auts:
            orbit_key = min(_att_code(_apply(s, att), idx) for s in auts)
            if orbit_key in seen:
                continue
            seen.add(orbit_key)
        out.append(OnePointExtension(B, new, att))
    return out


# ---------------------------------------------------------------- extenders


def _require_surjective_hom(phi: Morphism, ext: OnePointExtension) -> None:
    if phi.domain != ext.base:
        raise PreconditionError("homomorphism domain is not the base of the extension")
    if not isinstance(classify_morphism(phi.mapping, phi.domain, phi.codomain), Morphism):
        raise PreconditionError("phi is not a homomorphism")
    if not is_surjective(phi):
        raise PreconditionError("phi is not surjective; corestrict it to its image first")
    bad = ext.problems()
    if bad:
        raise PreconditionError(f"invalid one-point extension: {bad[0]}")


def _finish(phi: Morphism, ext: OnePointExtension, target: Structure, value: str) -> Morphism:
    mapping = dict(phi.mapping)
    mapping[ext.new] = value
    out = classify_morphism(mapping, ext.structure, target)
    if not isinstance(out, Morphism):
        raise InternalConsistencyError(f"extension is not a homomorphism: {out.reason} at {out.witness}")
    if not validate(target):
        raise InternalConsistencyError(f"target is not a valid {target.kind}")
    return out


def extend_one_point_graph(phi: Morphism, ext: OnePointExtension) -> tuple[Graph, Morphism]:
    """Adjoin ``x'`` to H, adjacent to ``v`` iff x is adjacent to some preimage of ``v``."""
    _require_surjective_hom(phi, ext)
    H = phi.codomain
    xp = fresh_name(ext.new, H.element_set)
    targets = {phi.mapping[u] for u in ext.attachment}
    Hp = Graph(H.elements + (xp,), H.edges | {frozenset((xp, v)) for v in targets})
    return Hp, _finish(phi, ext, Hp, xp)


def extend_one_point_poset(phi: Morphism, ext: OnePointExtension) -> tuple[Poset, Morphism]:
    """If phi(L) and phi(U) meet, send x to the meeting point; else insert a new y between them."""
    _require_surjective_hom(phi, ext)
    Bp = phi.codomain
    lower, upper = ext.attachment
    Lp = {phi.mapping[a] for a in lower}
    Up = {phi.mapping[a] for a in upper}
    meet = Lp & Up
    if len(meet) > 1:
        raise InternalConsistencyError(f"phi(L) and phi(U) share {len(meet)} elements")
    if meet:
        (xp,) = meet
        return Bp, _finish(phi, ext, Bp, xp)
    y = fresh_name(ext.new, Bp.element_set)
    down = set(Lp).union(*(Bp.below(a) for a in Lp)) if Lp else set()
    up = set(Up).union(*(Bp.above(a) for a in Up)) if Up else set()
    le = set(Bp.le) | {(y, y)} | {(a, y) for a in down} | {(y, c) for c in up}
    # closing is a no-op for a legal insertion; kept so the result is checked, not assumed
    from .amalgamation import transitive_closure
    els = Bp.elements + (y,)
    Cp = Poset(els, frozenset(transitive_closure(els, le)))
    return Cp, _finish(phi, ext, Cp, y)


@dataclass(frozen=True)
class MetricExtensionResult:
    deltas: tuple[Fraction, ...]
    order: tuple[str, ...]
    representatives: dict[str, str] = field(default_factory=dict)


def metric_deltas(to_y: Sequence[Fraction], image_dist: Callable[[int, int], Fraction]) -> list[Fraction]:
    """The recurrence on points already sorted by distance to y.

    ``delta_0 = d(y, x_0)`` and ``delta_i`` is the least of ``d(y, x_i)`` and
    ``d(y, x_k) + d(phi x_k, phi x_i)`` over ``k < i``.
    """
    out = []
    for i, q in enumerate(to_y):
        best = q
        for k in range(i):
            cand = to_y[k] + image_dist(k, i)
            if cand < best:
                best = cand
        out.append(best)
    return out


def metric_condition_failures(deltas, to_y, image_dist) -> list[tuple]:
    """Which of the three inequality families fail (empty when all hold)."""
    n = len(deltas)
    bad = []
    for i in range(n):
        if deltas[i] > to_y[i]:
            bad.append((3, i))
        for j in range(n):
            if i == j:
                continue
            if deltas[i] + deltas[j] < image_dist(i, j):
                bad.append((1, i, j))
            if deltas[i] + image_dist(i, j) < deltas[j]:
                bad.append((2, i, j))
    return bad


def extend_one_point_metric(phi: Morphism, ext: OnePointExtension,
                            order: Sequence[str] | None = None) -> tuple[MetricSpace, Morphism, MetricExtensionResult]:
    """Place ``y'`` over M' so that phi extended by ``y -> y'`` is non-expanding.

    Each fibre of phi is represented by its point nearest to y (ties broken
    by element id); the representatives are sorted by distance to y (ties by
    id, unless ``order`` is given) and fed to :func:`metric_deltas`.
    """
    M, Mp = phi.domain, phi.codomain
    if ext.kind != METRIC:
        raise PreconditionError("extend_one_point_metric needs a metric extension")
    if any(q == 0 for q in ext.attachment.values()):
        raise PreconditionError("new point coincides with an existing point")
    _require_surjective_hom(phi, ext)
    to_y = ext.attachment
    reps: dict[str, str] = {}
    for x in M.elements:
        z = phi.mapping[x]
        if z not in reps or (to_y[x], x) < (to_y[reps[z]], reps[z]):
            reps[z] = x
    if order is None:
        seq = sorted(reps.values(), key=lambda x: (to_y[x], x))
    else:
        seq = list(order)
        if sorted(seq) != sorted(reps.values()):
            raise PreconditionError("order must list the fibre representatives")
        if any(to_y[a] > to_y[b] for a, b in zip(seq, seq[1:])):
            raise PreconditionError("order must be non-decreasing in distance to y")
    ys = [to_y[x] for x in seq]
    images = [phi.mapping[x] for x in seq]

    def dist(i: int, j: int) -> Fraction:
        return Mp.d(images[i], images[j])

    deltas = metric_deltas(ys, dist)
    failures = metric_condition_failures(deltas, ys, dist)
    if failures:
        raise InternalConsistencyError(f"inequalities fail: {failures[:3]}")
    yp = fresh_name(ext.new, Mp.element_set)
    d = dict(Mp.dist)
    d.update({frozenset((yp, z)): q for z, q in zip(images, deltas)})
    M1p = MetricSpace(Mp.elements + (yp,), d)
    phip = _finish(phi, ext, M1p, yp)
    return M1p, phip, MetricExtensionResult(tuple(deltas), tuple(seq),
                                            {z: reps[z] for z in Mp.elements})


def extend_one_point(phi: Morphism, ext: OnePointExtension):
    """Dispatch on the class; returns ``(C', phi')``."""
    if ext.kind == GRAPH:
        return extend_one_point_graph(phi, ext)
    if ext.kind == POSET:
        return extend_one_point_poset(phi, ext)
    Cp, phip, _detail = extend_one_point_metric(phi, ext)
    return Cp, phip


# ---------------------------------------------------------------- classes


@dataclass(frozen=True)
class StructureClass:
    name: str
    kind: str
    contains: Callable[[Structure], bool] = field(compare=False)


def _has_clique(g: Graph, n: int, complement: bool = False) -> bool:
    for combo in combinations(g.elements, n):
        if all(g.related(a, b) != complement for a, b in combinations(combo, 2)):
            return True
    return False


def structure_class(name: str) -> StructureClass:
    """``graph``, ``poset``, ``triangle-free-graph``, ``K<n>-free-graph``, ``coK<n>-free-graph``."""
    if name == "graph":
        return StructureClass(name, GRAPH, lambda s: True)
    if name == "poset":
        return StructureClass(name, POSET, lambda s: True)
    if name == "triangle-free-graph":
        return StructureClass(name, GRAPH, lambda s: not _has_clique(s, 3))
    m = re.fullmatch(r"(co)?K(\d+)-free-graph", name)
    if m:
        n = int(m.group(2))
        if n < 2:
            raise MalformedInputError("K_n-free classes need n >= 2")
        co = bool(m.group(1))
        return StructureClass(name, GRAPH, lambda s: not _has_clique(s, n, complement=co))
    raise MalformedInputError(f"unknown structure class {name!r}")


@dataclass
class Counterexample:
    B: Structure
    B_prime: Structure
    phi: dict[str, str]
    ext: OnePointExtension


@dataclass
class PhepReport:
    cls: str
    max_size: int
    instances: int = 0
    counterexample: Counterexample | None = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def find_extension_target(cls: StructureClass, phi: Mapping[str, str], Bp: Structure,
                          ext: OnePointExtension) -> tuple[Structure, dict[str, str]] | None:
    """Search C' in the class (B' itself or a one-point extension of it) admitting phi'."""
    C = ext.structure
    for b in Bp.elements:
        cand = dict(phi)
        cand[ext.new] = b
        if isinstance(classify_morphism(cand, C, Bp), Morphism):
            return Bp, cand
    y = fresh_name("y", Bp.element_set)
    for att in raw_attachments(Bp):
        Cp = OnePointExtension(Bp, y, att).structure
        if not cls.contains(Cp):
            continue
        cand = dict(phi)
        cand[ext.new] = y
        if isinstance(classify_morphism(cand, C, Cp), Morphism):
            return Cp, cand
    return None


def check_1phep_class(cls: StructureClass | str, max_size: int, cap: int = 5) -> PhepReport:
    """Exhaustively look for a failure of the one-point extension property.

    Ranges over B in the class with ``|B| <= max_size``, B' in the class,
    surjective homomorphisms ``phi: B -> B'`` and one-point extensions C of B
    in the class (up to Aut(B)), in that order; the first instance with no
    admissible C' is returned.
    """
    if isinstance(cls, str):
        cls = structure_class(cls)
    if max_size > cap:
        raise ResourceBoundError(f"1PHEP check capped at size {cap}")
    report = PhepReport(cls.name, max_size)
    members = [s for s in oracle.enumerate_structures(cls.kind, max_size, include_empty=True, cap=cap)
               if cls.contains(s)]
    for B in members:
        exts = [e for e in enumerate_one_point_extensions(B) if cls.contains(e.structure)]
        for Bp in members:
            if len(Bp) > len(B) or (len(Bp) == 0) != (len(B) == 0):
                continue
            for phi in oracle.iter_homomorphisms(B, Bp, surjective=True):
                for ext in exts:
                    report.instances += 1
                    if find_extension_target(cls, phi, Bp, ext) is None:
                        report.counterexample = Counterexample(B, Bp, phi, ext)
                        return report
    return report
