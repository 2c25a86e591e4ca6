"""Extending homomorphisms through a stage chain one element at a time.

Each step restricts the current map to a small base around the next
element ``x``, corestricts it to its image ``B'``, applies the one-point
extender to get an abstract target ``C'``, and realizes ``C'`` inside the
chain over ``B'``.  The base is the ledger base of ``x`` (which determines
how ``x`` relates to everything older than it) plus any already mapped
element created after ``x`` that is related to it.  If ``x`` itself fits
the target type it is chosen, so identities extend to identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import oracle
from .errors import FraisseError, InternalConsistencyError, MalformedInputError, PreconditionError
from .limit_builder import StageChain
from .phep import OnePointExtension, extend_one_point
from .structures import GRAPH, induced_substructure, morphism


class PartialHom:
    """A homomorphism from a finite set of chain elements into the chain.

    Values are write-once: :func:`extend_one_element` returns a new object
    and never alters an existing value.
    """

    def __init__(self, chain: StageChain, mapping: Mapping[str, str], _checked: bool = False):
        self.chain = chain
        self.mapping = dict(mapping)
        if not _checked:
            for a, b in self.mapping.items():
                if a not in chain or b not in chain:
                    raise MalformedInputError(f"{a!r} -> {b!r} mentions an element outside the chain")
            bad = violation(chain, self.mapping, self.mapping)
            if bad:
                raise PreconditionError(f"not a homomorphism: {bad}")

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self.mapping)

    def __call__(self, x: str) -> str:
        return self.mapping[x]

    def __repr__(self):
        return f"PartialHom({len(self.mapping)} elements)"


def violation(chain: StageChain, mapping: Mapping[str, str], check: Iterable[str]):
    """A related pair, with one end in ``check``, whose images break the relation."""
    dom = list(mapping)
    for x in check:
        fx = mapping[x]
        for d in dom:
            if d == x:
                continue
            fd = mapping[d]
            if chain.kind == GRAPH:
                if chain.related(x, d) and not chain.related(fx, fd):
                    return (x, d)
            else:
                if chain.lt(x, d) and fx != fd and not chain.lt(fx, fd):
                    return (x, d)
                if chain.lt(d, x) and fx != fd and not chain.lt(fd, fx):
                    return (d, x)
    return None


def extension_base(chain: StageChain, domain: Iterable[str], x: str) -> list[str]:
    """The mapped elements that ``x``'s image has to be chosen against."""
    dom = set(domain)
    step = chain.provenance(x)
    pos = chain.position(x)
    if step is not None and set(step.base) <= dom:
        base = list(step.base)
        extra = [d for d in dom if chain.position(d) > pos and chain.related(x, d)]
    else:
        base = [b for b in step.base if b in dom] if step is not None else []
        extra = [d for d in dom if chain.related(x, d)]
    seen = set(base)
    base += sorted((d for d in extra if d not in seen), key=chain.position)
    return base


def _extend(chain: StageChain, mapping: dict[str, str], x: str) -> str:
    base = extension_base(chain, mapping, x)
    B = chain.induced(base)
    image = sorted({mapping[b] for b in base}, key=chain.position)
    Bp = chain.induced(image)
    phi = morphism({b: mapping[b] for b in base}, B, Bp)
    ext = OnePointExtension(B, x, chain.type_over(x, base))
    Cp, phip = extend_one_point(phi, ext)
    xp = phip.mapping[x]
    if xp in Bp:
        value = xp
    else:
        value = chain.realize(image, OnePointExtension.of(Cp, xp).attachment, prefer=x)
    mapping[x] = value
    bad = violation(chain, mapping, [x])
    if bad:
        raise InternalConsistencyError(f"extension at {x!r} breaks the pair {bad}")
    return value


def extend_one_element(p: PartialHom, x: str) -> PartialHom:
    """Add ``x`` to the domain of ``p``."""
    if x in p.mapping:
        return p
    if x not in p.chain:
        raise MalformedInputError(f"{x!r} is not an element of the chain")
    mapping = dict(p.mapping)
    _extend(p.chain, mapping, x)
    return PartialHom(p.chain, mapping, _checked=True)


def extend_to_stage(p: PartialHom, m: int, order: Sequence[str] | None = None) -> PartialHom:
    """Extend ``p`` to all of stage ``m``, in ledger order unless ``order`` is given."""
    chain = p.chain
    targets = chain.built_elements(m)
    tset = set(targets)
    if not p.domain <= tset:
        raise PreconditionError(f"domain is not contained in stage {m}")
    if order is None:
        order = targets
    elif sorted(order) != sorted(targets):
        raise MalformedInputError("order must list the elements of the stage")
    mapping = dict(p.mapping)
    for x in order:
        if x not in mapping:
            _extend(chain, mapping, x)
    bad = violation(chain, mapping, mapping)
    if bad:
        raise InternalConsistencyError(f"extended map breaks the pair {bad}")
    return PartialHom(chain, mapping, _checked=True)


@dataclass
class WitnessReport:
    max_size: int
    stage: int
    instances: int = 0
    expected: int = 0
    failures: list[tuple[dict[str, str], str]] = field(default_factory=list)
    chain_growth: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures and self.instances == self.expected


def hom_homogeneity_witness(chain: StageChain, s: int) -> WitnessReport:
    """Extend every homomorphism ``S -> A(0)`` with ``|S| <= s`` to a total map on stage ``min(depth, 2)``.

    The number of maps tried is checked against a brute-force count over
    all functions ``S -> A(0)``.
    """
    if chain.depth < 2:
        raise PreconditionError("the witness needs a chain of depth at least 2")
    target = min(chain.depth, 2)
    report = WitnessReport(s, target)
    A0 = chain.stage(0)
    before = len(chain)
    for r in range(min(s, len(A0)) + 1):
        for S in combinations(A0.elements, r):
            sub = induced_substructure(A0, S)
            report.expected += len(oracle.brute_force_homomorphisms(sub, A0))
            for phi in oracle.iter_homomorphisms(sub, A0):
                report.instances += 1
                try:
                    extend_to_stage(PartialHom(chain, phi), target)
                except FraisseError as exc:
                    report.failures.append((phi, str(exc)))
    report.chain_growth = len(chain) - before
    return report
