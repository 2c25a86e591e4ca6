"""JSON interchange and DOT export.

Rationals are written as ``"p/q"`` in lowest terms with ``q > 0``; metric
distances are keyed ``"x|y"``.  Lists keep element order, so writing the
same object twice gives the same bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .amalgamation import Amalgam
from .errors import MalformedInputError
from .limit_builder import BuildBounds, StageChain
from .phep import Counterexample, OnePointExtension
from .structures import GRAPH, METRIC, POSET, Graph, MetricSpace, Poset, Structure, require_valid


def rational_to_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(raw) -> Fraction:
    if isinstance(raw, bool) or isinstance(raw, float):
        raise MalformedInputError(f"distance {raw!r} must be an integer or a 'p/q' string")
    try:
        q = Fraction(raw)
    except (TypeError, ValueError, ZeroDivisionError):
        raise MalformedInputError(f"cannot read {raw!r} as a rational") from None
    return q


def _names(raw, what: str) -> list[str]:
    if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
        raise MalformedInputError(f"{what} must be a list of strings")
    if len(set(raw)) != len(raw):
        raise MalformedInputError(f"{what} has repeated names")
    return list(raw)


def _pairs(raw, what: str) -> list[tuple[str, str]]:
    if not isinstance(raw, list) or not all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p) for p in raw):
        raise MalformedInputError(f"{what} must be a list of [a, b] pairs")
    return [tuple(p) for p in raw]


# ---------------------------------------------------------------- structures


def structure_to_json(s: Structure) -> dict:
    if isinstance(s, Graph):
        return {"class": GRAPH, "vertices": list(s.elements), "edges": [list(e) for e in s.sorted_edges()]}
    if isinstance(s, Poset):
        idx = s.index
        pairs = sorted(s.strict_pairs(), key=lambda p: (idx[p[0]], idx[p[1]]))
        return {"class": POSET, "elements": list(s.elements), "le": [list(p) for p in pairs]}
    els = s.elements
    dist = {f"{a}|{b}": rational_to_str(s.d(a, b)) for i, a in enumerate(els) for b in els[i + 1:]}
    return {"class": METRIC, "points": list(els), "dist": dist}


def structure_from_json(obj: Any, validate: bool = True) -> Structure:
    if not isinstance(obj, dict) or "class" not in obj:
        raise MalformedInputError("structure JSON needs a 'class' field")
    kind = obj["class"]
    if kind == GRAPH:
        els = _names(obj.get("vertices", []), "vertices")
        edges = _pairs(obj.get("edges", []), "edges")
        for a, b in edges:
            if a not in els or b not in els:
                raise MalformedInputError(f"edge {a}-{b} leaves the vertex set")
        s = Graph(tuple(els), frozenset(frozenset(e) for e in edges))
        if any(a == b for a, b in edges):
            raise MalformedInputError("graphs have no loops")
    elif kind == POSET:
        els = _names(obj.get("elements", []), "elements")
        pairs = _pairs(obj.get("le", []), "le")
        for a, b in pairs:
            if a not in els or b not in els:
                raise MalformedInputError(f"pair ({a}, {b}) leaves the element set")
        s = Poset.from_pairs(els, pairs)
    elif kind == METRIC:
        els = _names(obj.get("points", []), "points")
        raw = obj.get("dist", {})
        if not isinstance(raw, dict):
            raise MalformedInputError("dist must be an object keyed 'x|y'")
        dist = {}
        for key, val in raw.items():
            parts = key.split("|")
            if len(parts) != 2 or parts[0] not in els or parts[1] not in els:
                raise MalformedInputError(f"bad distance key {key!r}")
            dist[frozenset(parts)] = parse_rational(val)
        s = MetricSpace(tuple(els), dist)
    else:
        raise MalformedInputError(f"unknown class {kind!r}")
    if validate:
        require_valid(s, "input structure")
    return s


def map_from_json(obj: Any, what: str = "map") -> dict[str, str]:
    m = obj.get("map") if isinstance(obj, dict) and "map" in obj else obj
    if not isinstance(m, dict) or not all(isinstance(k, str) and isinstance(v, str) for k, v in m.items()):
        raise MalformedInputError(f"{what} must be an object of string to string")
    return dict(m)


def amalgam_from_json(obj: Any) -> Amalgam:
    if not isinstance(obj, dict) or not {"A", "B", "C", "f1", "f2"} <= set(obj):
        raise MalformedInputError("amalgam JSON needs A, B, C, f1, f2")
    A, B, C = (structure_from_json(obj[k]) for k in "ABC")
    return Amalgam(A, B, C, map_from_json(obj["f1"], "f1"), map_from_json(obj["f2"], "f2"))


def amalgam_to_json(am: Amalgam) -> dict:
    return {"A": structure_to_json(am.A), "B": structure_to_json(am.B), "C": structure_to_json(am.C),
            "f1": dict(am.f1), "f2": dict(am.f2)}


# ---------------------------------------------------------------- attachments


def attachment_to_json(kind: str, att, order) -> Any:
    pos = {e: i for i, e in enumerate(order)}

    def srt(xs):
        return sorted(xs, key=lambda e: (pos.get(e, len(pos)), e))

    if kind == GRAPH:
        return {"neighbors": srt(att)}
    if kind == POSET:
        return {"lower": srt(att[0]), "upper": srt(att[1])}
    return {"dist": {b: rational_to_str(q) for b, q in sorted(att.items(), key=lambda kv: (pos.get(kv[0], 0), kv[0]))}}


def attachment_from_json(kind: str, obj: Any):
    if kind == GRAPH:
        raw = obj.get("neighbors") if isinstance(obj, dict) else obj
        return frozenset(_names(raw if raw is not None else [], "neighbors"))
    if kind == POSET:
        if not isinstance(obj, dict):
            raise MalformedInputError("poset attachment needs 'lower' and 'upper'")
        return (frozenset(_names(obj.get("lower", []), "lower")), frozenset(_names(obj.get("upper", []), "upper")))
    raw = obj.get("dist") if isinstance(obj, dict) else None
    if not isinstance(raw, dict):
        raise MalformedInputError("metric point needs a 'dist' object")
    return {str(b): parse_rational(q) for b, q in raw.items()}


def extension_to_json(ext: OnePointExtension) -> dict:
    return {"base": structure_to_json(ext.base), "new": ext.new,
            "attachment": attachment_to_json(ext.kind, ext.attachment, ext.base.elements)}


def counterexample_to_json(ce: Counterexample) -> dict:
    return {"B": structure_to_json(ce.B), "B_prime": structure_to_json(ce.B_prime),
            "phi": dict(ce.phi), "extension": extension_to_json(ce.ext)}


# ---------------------------------------------------------------- chains


def chain_to_json(chain: StageChain) -> dict:
    b = chain.bounds
    return {
        "class": chain.kind,
        "compact": chain.compact,
        "bounds": {"max_star_iterations": b.max_star_iterations,
                   "max_substructure_size": b.max_substructure_size,
                   "max_stage_elements": b.max_stage_elements},
        "seed": structure_to_json(chain.seed),
        "stages": [list(level) for level in chain.stage_lists],
        "on_demand": list(chain.on_demand),
        "ledger": [{"element": s.element, "stage": s.stage, "base": list(s.base),
                    "attachment": attachment_to_json(chain.kind, s.attachment, chain.order),
                    "on_demand": s.on_demand} for s in chain.steps],
        "truncations": [{"stage": t.stage, "reason": t.reason, "skipped": t.skipped} for t in chain.truncations],
    }


def chain_from_json(obj: Any) -> StageChain:
    if not isinstance(obj, dict) or "seed" not in obj or "ledger" not in obj:
        raise MalformedInputError("chain JSON needs 'seed' and 'ledger'")
    try:
        bounds = BuildBounds(**obj.get("bounds", {}))
    except TypeError as exc:
        raise MalformedInputError(f"bad bounds: {exc}") from None
    chain = StageChain(structure_from_json(obj["seed"]), bounds, bool(obj.get("compact", False)))
    for raw in obj["ledger"]:
        try:
            chain.replay(raw["element"], int(raw["stage"]), list(raw["base"]),
                         attachment_from_json(chain.kind, raw["attachment"]), bool(raw.get("on_demand", False)))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad ledger entry {raw!r}: {exc}") from None
    if [list(level) for level in chain.stage_lists] != obj.get("stages", chain.stage_lists):
        raise MalformedInputError("stage lists disagree with the ledger")
    from .limit_builder import Truncation
    chain.truncations = [Truncation(**t) for t in obj.get("truncations", [])]
    return chain


# ---------------------------------------------------------------- files and DOT


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path} is not valid JSON: {exc}") from None


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))


def _q(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(s: Structure, name: str = "G") -> str:
    """Graphs as undirected DOT; posets as their Hasse diagram, drawn upward."""
    if isinstance(s, Graph):
        lines = [f"graph {_q(name)} {{"]
        lines += [f"  {_q(v)};" for v in s.elements]
        lines += [f"  {_q(a)} -- {_q(b)};" for a, b in s.sorted_edges()]
    elif isinstance(s, Poset):
        lines = [f"digraph {_q(name)} {{", "  rankdir=BT;"]
        lines += [f"  {_q(v)};" for v in s.elements]
        lines += [f"  {_q(a)} -> {_q(b)};" for a, b in s.hasse()]
    else:
        raise MalformedInputError("DOT export covers graphs and posets")
    lines.append("}")
    return "\n".join(lines) + "\n"
