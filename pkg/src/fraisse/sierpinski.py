"""Packing M maps into three generators: ``f_k = g3 g2^k g1``.

A truncation ``T`` of the chain is copied M times, disjointly and without
cross relations, into the chain.  ``g1`` sends ``T`` onto copy 0, ``g2``
shifts copy n onto copy n+1, and ``g3`` undoes the shift on copy k and
applies ``f_k``.  Off the copies each generator is extended lazily through
:mod:`fraisse.hom_extension`, so it is an endomorphism of the chain as far
as it is ever evaluated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import oracle
from .amalgamation import coproduct
from .errors import InternalConsistencyError, MalformedInputError, PreconditionError
from .hom_extension import _extend, violation
from .limit_builder import StageChain
from .structures import Morphism, Structure, classify_morphism


class LazyEndomorphism:
    """A chain endomorphism given by committed values, extended on demand.

    The domain is the chain as it stood at construction.  A value outside
    the committed part is computed by extending, in chain order, over every
    element up to it; values are memoized and never change.
    """

    def __init__(self, chain: StageChain, committed: Mapping[str, str], name: str = "g"):
        self.chain = chain
        self.name = name
        self.committed = dict(committed)
        self.domain = list(chain.order)
        self._where = {e: i for i, e in enumerate(self.domain)}
        for a, b in self.committed.items():
            if a not in self._where or b not in chain:
                raise MalformedInputError(f"{name}: {a!r} -> {b!r} outside the chain")
        bad = violation(chain, self.committed, self.committed)
        if bad:
            raise PreconditionError(f"{name}: committed part is not a homomorphism at {bad}")
        self._values = dict(self.committed)
        self._done = 0

    def __call__(self, v: str) -> str:
        if v in self._values:
            return self._values[v]
        if v not in self._where:
            raise MalformedInputError(f"{self.name}: {v!r} is outside the domain")
        stop = self._where[v]
        while self._done <= stop:
            x = self.domain[self._done]
            if x not in self._values:
                _extend(self.chain, self._values, x)
            self._done += 1
        return self._values[v]

    @property
    def memo(self) -> dict[str, str]:
        return {k: v for k, v in self._values.items() if k not in self.committed}


@dataclass
class CopySystem:
    chain: StageChain
    truncation: Structure
    seed_depth: int
    copies: list[list[str]]
    embeddings: list[dict[str, str]]

    @property
    def M(self) -> int:
        return len(self.copies)


def embed_coproduct(chain: StageChain, seed_depth: int, M: int) -> CopySystem:
    """Embed M disjoint, unrelated copies of stage ``seed_depth`` into the chain.

    Elements of the coproduct are placed one at a time; each is realized
    over the images placed so far with exactly the relations the
    coproduct prescribes.
    """
    if M < 1:
        raise MalformedInputError("need at least one copy")
    T = chain.stage(seed_depth)
    P, injections = coproduct(chain.kind, [T] * M)
    placed: dict[str, str] = {}
    for p in P.elements:
        base = list(placed)
        if chain.kind == "graph":
            att = frozenset(placed[b] for b in base if P.related(p, b))
        else:
            att = (frozenset(placed[b] for b in base if P.lt(b, p)),
                   frozenset(placed[b] for b in base if P.lt(p, b)))
        placed[p] = chain.realize([placed[b] for b in base], att)
    m = classify_morphism(placed, P, chain.induced(list(placed.values())))
    if not (isinstance(m, Morphism) and m.is_at_least("embedding")):
        raise InternalConsistencyError("coproduct did not embed")
    embeddings = [{t: placed[inj[t]] for t in T.elements} for inj in injections]
    return CopySystem(chain, T, seed_depth, [list(e.values()) for e in embeddings], embeddings)


@dataclass
class DistortionWitness:
    copies: CopySystem
    g1: LazyEndomorphism
    g2: LazyEndomorphism
    g3: LazyEndomorphism
    fs: list[dict[str, str]]
    shifts: list[dict[str, str]]
    t: list[dict[str, str]]
    psi: list[dict[str, str]]
    lengths: list[int] = field(default_factory=list)


def _inverse(m: Mapping[str, str]) -> dict[str, str]:
    return {v: k for k, v in m.items()}


def build_witness(cs: CopySystem, fs: Sequence[Mapping[str, str]]) -> DistortionWitness:
    """``g1 = ι0``, ``g2 ⊇ ι_{n+1} ι_n^-1`` for ``n < M-1``, ``g3 ⊇ f_k ι_k^-1``."""
    chain, T = cs.chain, cs.truncation
    if len(fs) != cs.M:
        raise PreconditionError(f"need {cs.M} maps, got {len(fs)}")
    fs = [dict(f) for f in fs]
    for k, f in enumerate(fs):
        if set(f) != set(T.elements):
            raise PreconditionError(f"f_{k} is not defined exactly on the truncation")
        if any(v not in chain for v in f.values()):
            raise PreconditionError(f"f_{k} leaves the chain")
        bad = violation(chain, f, f)
        if bad:
            raise PreconditionError(f"f_{k} is not a homomorphism at {bad}")
    iota = cs.embeddings
    shifts = [{iota[n][v]: iota[n + 1][v] for v in T.elements} for n in range(cs.M - 1)]
    psi = [{iota[k][v]: fs[k][v] for v in T.elements} for k in range(cs.M)]
    g1 = LazyEndomorphism(chain, iota[0], "g1")
    g2 = LazyEndomorphism(chain, {a: b for h in shifts for a, b in h.items()}, "g2")
    g3 = LazyEndomorphism(chain, {a: b for p in psi for a, b in p.items()}, "g3")
    t = [dict(iota[0])]
    for n in range(cs.M - 1):
        t.append({v: shifts[n][t[-1][v]] for v in T.elements})
    for n, h in enumerate(shifts):
        m = classify_morphism(h, chain.induced(cs.copies[n]), chain.induced(cs.copies[n + 1]))
        if not (isinstance(m, Morphism) and m.is_at_least("isomorphism")):
            raise InternalConsistencyError(f"shift {n} is not an isomorphism of copies")
    for k in range(cs.M):
        if t[k] != iota[k]:
            raise InternalConsistencyError(f"t_{k} differs from the copy embedding")
    return DistortionWitness(cs, g1, g2, g3, fs, shifts, t, psi)


@dataclass
class RecoveryReport:
    per_k: list[dict]
    max_stage: int
    chain_size: int

    @property
    def ok(self) -> bool:
        return all(r["recovered"] and r["length_ok"] for r in self.per_k)


def verify_recovery(w: DistortionWitness) -> RecoveryReport:
    """Evaluate ``g3 g2^k g1`` on every truncation element and compare with ``f_k``."""
    chain = w.copies.chain
    per_k = []
    deepest = 0
    w.lengths = []
    for k, f in enumerate(w.fs):
        recovered = True
        lengths = set()
        for v in w.copies.truncation.elements:
            trace = [("g1", w.g1(v))]
            for _ in range(k):
                trace.append(("g2", w.g2(trace[-1][1])))
            trace.append(("g3", w.g3(trace[-1][1])))
            lengths.add(len(trace))
            deepest = max(deepest, *(chain.stage_of[x] for _g, x in trace))
            if trace[-1][1] != f[v]:
                recovered = False
        (length,) = lengths
        w.lengths.append(length)
        per_k.append({"k": k, "recovered": recovered, "length": length, "length_ok": length == k + 2})
    return RecoveryReport(per_k, deepest, len(chain))


def sample_homomorphisms(T: Structure, target: Structure, M: int, seed: int = 0) -> list[dict[str, str]]:
    """M distinct homomorphisms ``T -> target``, drawn with a seeded generator."""
    homs = [m.mapping for m in oracle.all_homomorphisms(T, target)]
    if not homs:
        raise PreconditionError("no homomorphisms to sample from")
    rng = random.Random(seed)
    if len(homs) >= M:
        return [dict(h) for h in rng.sample(homs, M)]
    return [dict(rng.choice(homs)) for _ in range(M)]
