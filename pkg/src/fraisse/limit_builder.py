"""Finite stages of the tower ``A = A(0) ⊆ A(1) ⊆ ...`` built by one-point free amalgamation.

Each star step amalgamates the current stage with a one-point extension
``C`` of a small induced substructure ``B`` over ``B``.  For graphs and
posets the free amalgam ``A *_B C`` of a one-point extension is again a
one-point extension of ``A``: the new element is related to ``A`` exactly
through its attachment (closed downwards and upwards for posets), so the
chain is stored as a single growing structure plus a ledger of steps.

Elements created by :meth:`StageChain.realize` after the tower is built
("on demand") stand in for elements of deeper, unbuilt stages.  Their names
are derived from what they realize, so the same request always yields the
same element regardless of the order in which requests arrive.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from . import oracle
from .errors import MalformedInputError, PreconditionError, ResourceBoundError, UnsupportedClassError
from .phep import OnePointExtension, raw_attachments
from .structures import (
    GRAPH,
    POSET,
    Graph,
    Morphism,
    Poset,
    Structure,
    classify_morphism,
    induced_substructure,
    require_valid,
)

DEFAULT_MAX_ELEMENTS = 200_000


def _env_cap() -> int:
    raw = os.environ.get("FRAISSE_MAX_ELEMENTS")
    if raw is None:
        return DEFAULT_MAX_ELEMENTS
    try:
        value = int(raw)
    except ValueError:
        raise MalformedInputError(f"FRAISSE_MAX_ELEMENTS must be an integer, got {raw!r}") from None
    if value <= 0:
        raise MalformedInputError("FRAISSE_MAX_ELEMENTS must be positive")
    return value


@dataclass(frozen=True)
class BuildBounds:
    max_star_iterations: int = 8
    max_substructure_size: int = 2
    max_stage_elements: int = field(default_factory=_env_cap)

    def __post_init__(self):
        for name in ("max_star_iterations", "max_substructure_size", "max_stage_elements"):
            if getattr(self, name) <= 0:
                raise MalformedInputError(f"{name} must be positive")


@dataclass(frozen=True)
class Step:
    """Provenance of one element: amalgamated over ``base`` with ``attachment``.

    For graphs the attachment is the neighbour set; for posets the pair
    ``(L, U)`` of base elements below and above the new element.
    """

    stage: int
    index: int
    element: str
    base: tuple[str, ...]
    attachment: object
    on_demand: bool = False


@dataclass
class Truncation:
    stage: int
    reason: str
    skipped: int


def _normalize(kind: str, att):
    if kind == GRAPH:
        return frozenset(att)
    lower, upper = att
    return (frozenset(lower), frozenset(upper))


class StageChain:
    """An append-only tower of graphs or posets with a ledger of amalgamation steps."""

    def __init__(self, seed: Structure, bounds: BuildBounds | None = None, compact: bool = False):
        if seed.kind not in (GRAPH, POSET):
            raise UnsupportedClassError(f"no free amalgamation tower for class {seed.kind!r}")
        if compact and seed.kind != GRAPH:
            raise UnsupportedClassError("compact mode exists for graphs only")
        require_valid(seed, "seed")
        self.kind = seed.kind
        self.seed = seed
        self.bounds = bounds or BuildBounds()
        self.compact = compact
        self.order: list[str] = list(seed.elements)
        self._pos = {e: i for i, e in enumerate(self.order)}
        self.stage_of: dict[str, int] = {e: 0 for e in seed.elements}
        self.steps: list[Step] = []
        self.step_of: dict[str, Step] = {}
        self.stage_lists: list[list[str]] = [list(seed.elements)]
        self.truncations: list[Truncation] = []
        self.on_demand: list[str] = []
        self._index: dict[tuple, list[str]] = {}
        self._demand_index: dict[tuple, str] = {}
        self._cache: dict = {}
        if self.kind == GRAPH:
            self._adj = {v: set(seed.neighbors(v)) for v in seed.elements}
        else:
            self._down = {e: set(seed.below(e)) for e in seed.elements}
            self._up = {e: set(seed.above(e)) for e in seed.elements}

    # -- queries

    @property
    def depth(self) -> int:
        return len(self.stage_lists) - 1

    def __len__(self) -> int:
        return len(self.order)

    def __contains__(self, e) -> bool:
        return e in self.stage_of

    def built_elements(self, n: int | None = None) -> list[str]:
        n = self.depth if n is None else n
        return [e for level in self.stage_lists[: n + 1] for e in level]

    def stage(self, n: int) -> Structure:
        """A(n): the built elements of stages 0..n, as an induced substructure."""
        if not 0 <= n <= self.depth:
            raise MalformedInputError(f"stage {n} not built (depth {self.depth})")
        key = ("stage", n)
        if key not in self._cache:
            self._cache[key] = self.induced(self.built_elements(n))
        return self._cache[key]

    def structure(self) -> Structure:
        """Everything built so far, on-demand elements included."""
        key = "all"
        if key not in self._cache:
            self._cache[key] = self.induced(self.order)
        return self._cache[key]

    def induced(self, els: Sequence[str]) -> Structure:
        keep = set(els)
        if self.kind == GRAPH:
            edges = {frozenset((a, b)) for a in els for b in self._adj[a] if b in keep}
            return Graph(tuple(els), frozenset(edges))
        le = {(a, a) for a in els} | {(a, b) for a in els for b in self._up[a] if b in keep}
        return Poset(tuple(els), frozenset(le))

    def related(self, a: str, b: str) -> bool:
        """Adjacency for graphs, comparability ``a < b`` or ``b < a`` for posets."""
        if self.kind == GRAPH:
            return b in self._adj[a]
        return b in self._up[a] or b in self._down[a]

    def lt(self, a: str, b: str) -> bool:
        return b in self._up[a]

    def type_over(self, z: str, base: Iterable[str]):
        """How ``z`` sits over ``base`` (same shape as a step attachment)."""
        base = [b for b in base if b != z]
        if self.kind == GRAPH:
            return frozenset(b for b in base if b in self._adj[z])
        return (frozenset(b for b in base if b in self._down[z]),
                frozenset(b for b in base if b in self._up[z]))

    def provenance(self, e: str) -> Step | None:
        if e not in self.stage_of:
            raise MalformedInputError(f"unknown element {e!r}")
        return self.step_of.get(e)

    def position(self, e: str) -> int:
        return self._pos[e]

    # -- growth

    def _append(self, name: str, stage: int, base: Sequence[str], att, on_demand: bool) -> str:
        if len(self.order) >= self.bounds.max_stage_elements:
            raise ResourceBoundError(f"element cap {self.bounds.max_stage_elements} reached")
        att = _normalize(self.kind, att)
        while name in self.stage_of:
            name += "'"
        step = Step(stage, len(self.steps), name, tuple(base), att, on_demand)
        self._cache.clear()
        self.steps.append(step)
        self.step_of[name] = step
        self.stage_of[name] = stage
        self._pos[name] = len(self.order)
        self.order.append(name)
        if self.kind == GRAPH:
            self._adj[name] = set(att)
            for v in att:
                self._adj[v].add(name)
        else:
            lower, upper = att
            down = set(lower).union(*(self._down[a] for a in lower))
            up = set(upper).union(*(self._up[a] for a in upper))
            self._down[name] = down
            self._up[name] = up
            for d in down:
                self._up[d].add(name)
            for u in up:
                self._down[u].add(name)
        if on_demand:
            self.on_demand.append(name)
        else:
            self.stage_lists[stage].append(name)
            for key in self._keys(step.base, att):
                self._index.setdefault(key, []).append(name)
        return name

    def _keys(self, base, att) -> list[tuple]:
        keys = [(frozenset(base), att)]
        support = att if self.kind == GRAPH else att[0] | att[1]
        if support != keys[0][0]:
            keys.append((support, att))
        return keys

    def _star_requests(self, n: int) -> Iterator[tuple[tuple[str, ...], object]]:
        """The (B, attachment) pairs of one star step over stage n, in ledger order."""
        k = self.bounds.max_substructure_size
        els = self.built_elements(n)
        pos = {e: i for i, e in enumerate(els)}
        A = self.stage(n)
        if self.compact:
            for r in range(min(k, len(els)) + 1):
                for S in combinations(els, r):
                    yield S, frozenset(S)
            return
        subsets = []
        for r in range(min(k, len(els)) + 1):
            for B in combinations(els, r):
                sub = induced_substructure(A, B)
                subsets.append(((r, oracle.canonical_form(sub).certificate, tuple(pos[b] for b in B)), B, sub))
        subsets.sort(key=lambda t: t[0])
        for _key, B, sub in subsets:
            exts = []
            for att in raw_attachments(sub):
                C = OnePointExtension(sub, "x", att).structure
                exts.append(((oracle.canonical_form(C).certificate, _code(att, pos)), att))
            exts.sort(key=lambda t: t[0])
            for _key2, att in exts:
                yield B, att

    def _star_name(self, stage: int, base: Sequence[str]) -> str:
        if self.compact:
            return ("u" if stage == 1 else f"u{stage}") + "{" + ",".join(base) + "}"
        return f"s{stage}_{len(self.stage_lists[stage])}"

    def build_star(self) -> list[Step]:
        """Add stage ``depth + 1``; returns its steps (possibly truncated)."""
        if self.on_demand:
            raise PreconditionError("cannot add built stages after on-demand elements exist")
        if self.depth >= self.bounds.max_star_iterations:
            raise ResourceBoundError(f"star iterations capped at {self.bounds.max_star_iterations}")
        n = self.depth
        self.stage_lists.append([])
        start = len(self.steps)
        requests = list(self._star_requests(n))
        for i, (B, att) in enumerate(requests):
            if len(self.order) >= self.bounds.max_stage_elements:
                self.truncations.append(Truncation(n + 1, "element cap reached", len(requests) - i))
                break
            self._append(self._star_name(n + 1, B), n + 1, B, att, on_demand=False)
        return self.steps[start:]

    def replay(self, name: str, stage: int, base: Sequence[str], att, on_demand: bool = False) -> str:
        """Re-apply a recorded step (used when loading a chain from JSON)."""
        for b in base:
            if b not in self.stage_of:
                raise MalformedInputError(f"step {name!r} refers to unknown element {b!r}")
        att = _normalize(self.kind, att)
        if name in base:
            raise MalformedInputError(f"step {name!r} lists itself in its base")
        problems = OnePointExtension(self.induced(list(base)), name, att).problems()
        if problems:
            raise MalformedInputError(f"step {name!r}: {problems[0]}")
        if not on_demand:
            if self.on_demand:
                raise MalformedInputError("built steps must precede on-demand steps")
            if stage == self.depth + 1:
                self.stage_lists.append([])
            elif stage != self.depth or stage == 0:
                raise MalformedInputError(f"step {name!r} is out of stage order")
        z = self._append(name, stage, base, att, on_demand)
        if z != name:
            raise MalformedInputError(f"duplicate element name {name!r}")
        if on_demand:
            self._demand_index[(frozenset(base), att)] = z
        return z

    # -- realization

    def realize(self, base: Sequence[str], att, allow_append: bool = True,
                prefer: str | None = None) -> str | None:
        """An element sitting over ``base`` exactly as ``att`` says.

        ``prefer`` is returned if it fits.  Otherwise looks through built
        stages (ledger index, then a scan in chain order), then through
        on-demand elements, and finally appends a new on-demand element if
        allowed.
        """
        base = tuple(base)
        for b in base:
            if b not in self.stage_of:
                raise MalformedInputError(f"unknown element {b!r}")
        att = _normalize(self.kind, att)
        bset = frozenset(base)
        if prefer is not None and prefer in self.stage_of and prefer not in bset \
                and self.type_over(prefer, base) == att:
            return prefer
        for key in self._keys(base, att):
            for z in self._index.get(key, ()):
                if z not in bset and self.type_over(z, base) == att:
                    return z
        for z in self.built_elements():
            if z not in bset and self.type_over(z, base) == att:
                return z
        key = (bset, att)
        if key in self._demand_index:
            return self._demand_index[key]
        if not allow_append:
            return None
        sub = self.induced(base)
        problems = OnePointExtension(sub, "x", att).problems()
        if problems:
            raise PreconditionError(f"not a one-point extension of the base: {problems[0]}")
        stage = 1 + max((self.stage_of[b] for b in base), default=0)
        z = self._append(_demand_name(stage, sorted(base), att), stage, base, att, on_demand=True)
        self._demand_index[key] = z
        return z


def _code(att, pos):
    if isinstance(att, frozenset):
        return (tuple(sorted(pos[a] for a in att)),)
    return tuple(tuple(sorted(pos[a] for a in s)) for s in att)


def _demand_name(stage: int, base: list[str], att) -> str:
    if isinstance(att, frozenset):
        text = repr((base, sorted(att)))
    else:
        text = repr((base, sorted(att[0]), sorted(att[1])))
    return f"d{stage}_{hashlib.sha1(text.encode()).hexdigest()[:10]}"


def build_star(A: Structure, bounds: BuildBounds | None = None, compact: bool = False) -> StageChain:
    """A chain holding ``A`` and one star step over it."""
    chain = StageChain(A, bounds, compact)
    chain.build_star()
    return chain


def build_tower(A: Structure, depth: int, bounds: BuildBounds | None = None,
                compact: bool = False) -> StageChain:
    """Iterate the star step ``depth`` times."""
    if depth < 0:
        raise MalformedInputError("depth must be non-negative")
    chain = StageChain(A, bounds, compact)
    for _ in range(depth):
        chain.build_star()
    return chain


def _check_base(chain: StageChain, base: Structure) -> None:
    for b in base.elements:
        if b not in chain:
            raise MalformedInputError(f"{b!r} is not an element of the chain")
    if base != induced_substructure(chain.structure(), base.elements):
        raise PreconditionError("base is not an induced substructure of the chain")


def realize_extension(chain: StageChain, ext: OnePointExtension, allow_append: bool = True) -> Morphism:
    """An embedding of ``ext.structure`` into the chain that fixes the base pointwise."""
    _check_base(chain, ext.base)
    problems = ext.problems()
    if problems:
        raise PreconditionError(f"invalid one-point extension: {problems[0]}")
    z = chain.realize(ext.base.elements, ext.attachment, allow_append=allow_append)
    if z is None:
        raise ResourceBoundError("extension not realized within the built stages")
    mapping = {b: b for b in ext.base.elements}
    mapping[ext.new] = z
    target = induced_substructure(chain.structure(), list(ext.base.elements) + [z])
    m = classify_morphism(mapping, ext.structure, target)
    if not (isinstance(m, Morphism) and m.is_at_least("embedding")):
        raise PreconditionError("realized element does not induce the requested extension")
    return m


_SEED = Step(0, -1, "", (), frozenset())


@dataclass
class AuditReport:
    k: int
    instances: int = 0
    failures: list[tuple[tuple[str, ...], object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def extension_property_audit(chain: StageChain, k: int, stage: int = 0) -> AuditReport:
    """Check that every one-point extension of every ``B ⊆ A(stage)``, ``|B| <= k``, is realized.

    Every attachment over every subset is tried (types over B with B fixed
    pointwise), and only built elements count: nothing is appended.
    """
    if k > chain.bounds.max_substructure_size:
        raise PreconditionError(f"chain built with subset bound {chain.bounds.max_substructure_size} < {k}")
    report = AuditReport(k)
    A = chain.stage(stage)
    for r in range(min(k, len(A)) + 1):
        for B in combinations(A.elements, r):
            sub = induced_substructure(A, B)
            for att in raw_attachments(sub):
                report.instances += 1
                z = chain.realize(B, att, allow_append=False)
                if z is None or chain.step_of.get(z, _SEED).on_demand:
                    report.failures.append((B, att))
    return report
