"""``fraisse`` command line.

Exit status: 0 success, 1 semantic failure or counterexample, 2 malformed
input, 3 resource bound hit.  Reports go to stdout as JSON; artifacts go to
the paths given with ``--out`` / ``--report``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import oracle
from .amalgamation import check_pushout_universal, coproduct, pushout
from .errors import FraisseError, MalformedInputError
from .hom_extension import PartialHom, extend_to_stage, hom_homogeneity_witness
from .limit_builder import BuildBounds, build_tower, extension_property_audit
from .phep import OnePointExtension, check_1phep_class, extend_one_point, extend_one_point_metric
from .serialize import (
    amalgam_from_json,
    attachment_from_json,
    attachment_to_json,
    chain_from_json,
    chain_to_json,
    counterexample_to_json,
    dumps,
    map_from_json,
    rational_to_str,
    read_json,
    structure_from_json,
    structure_to_json,
    to_dot,
    write_json,
)
from .sierpinski import build_witness, embed_coproduct, sample_homomorphisms, verify_recovery
from .structures import METRIC, corestrict, morphism


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _positive(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonneg(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


def _bounds(args) -> BuildBounds:
    kw = {"max_substructure_size": args.max_subset}
    if args.max_iterations is not None:
        kw["max_star_iterations"] = args.max_iterations
    if args.max_elements is not None:
        kw["max_stage_elements"] = args.max_elements
    return BuildBounds(**kw)


def _load_chain(path):
    return chain_from_json(read_json(path))


def _kind_check(s, kind: str, what: str):
    if s.kind != kind:
        raise MalformedInputError(f"{what} is a {s.kind}, expected {kind}")
    return s


# ---------------------------------------------------------------- commands


def cmd_build(args) -> int:
    seed = _kind_check(structure_from_json(read_json(args.seed)), args.cls, "seed")
    chain = build_tower(seed, args.depth, _bounds(args), compact=args.compact)
    write_json(args.out, chain_to_json(chain))
    if args.dot_dir:
        d = Path(args.dot_dir)
        d.mkdir(parents=True, exist_ok=True)
        for n in range(chain.depth + 1):
            (d / f"stage{n}.dot").write_text(to_dot(chain.stage(n), f"stage{n}"))
    _emit({"depth": chain.depth, "stage_sizes": [len(chain.stage(n)) for n in range(chain.depth + 1)],
           "truncated": bool(chain.truncations)})
    return 0


def cmd_audit(args) -> int:
    chain = _load_chain(args.chain)
    rep = extension_property_audit(chain, args.max_subset, stage=args.stage)
    _emit({"ok": rep.ok, "k": rep.k, "instances": rep.instances,
           "failures": [{"base": list(b), "attachment": attachment_to_json(chain.kind, a, chain.order)}
                        for b, a in rep.failures]})
    return 0 if rep.ok else 1


def cmd_realize(args) -> int:
    chain = _load_chain(args.chain)
    base = [b for b in args.base.split(",") if b] if args.base else []
    att = attachment_from_json(chain.kind, read_json(args.attach))
    z = chain.realize(base, att, allow_append=not args.no_append)
    if z is None:
        _emit({"realized": False})
        return 1
    step = chain.provenance(z)
    if args.out:
        write_json(args.out, chain_to_json(chain))
    _emit({"realized": True, "element": z, "stage": chain.stage_of[z],
           "on_demand": bool(step and step.on_demand)})
    return 0


def cmd_pushout(args) -> int:
    am = amalgam_from_json(read_json(args.amalgam))
    res = pushout(am)
    write_json(args.out, {"P": structure_to_json(res.P), "i1": res.i1, "i2": res.i2})
    report = {"size": len(res.P)}
    status = 0
    if args.check_universal is not None:
        u = check_pushout_universal(res, am, args.check_universal)
        report["universal"] = {"ok": u.ok, "structures_checked": u.structures_checked,
                               "pairs_checked": u.pairs_checked}
        if not u.ok:
            status = 1
            report["universal"]["counterexample"] = _counter_json(u.counterexample)
    _emit(report)
    return status


def _counter_json(ce):
    if ce is None:
        return None
    out = {}
    for k, v in ce.items():
        out[k] = structure_to_json(v) if hasattr(v, "kind") else v
    return out


def cmd_coproduct(args) -> int:
    parts = [_kind_check(structure_from_json(read_json(p)), args.cls, p) for p in args.parts]
    s, inj = coproduct(args.cls, parts)
    write_json(args.out, {"structure": structure_to_json(s), "injections": inj})
    _emit({"size": len(s), "parts": len(parts)})
    return 0


def cmd_check_1phep(args) -> int:
    rep = check_1phep_class(args.cls, args.max_size)
    out = {"class": rep.cls, "max_size": rep.max_size, "instances": rep.instances, "ok": rep.ok,
           "counterexample": counterexample_to_json(rep.counterexample) if rep.counterexample else None}
    if args.out:
        write_json(args.out, out)
    _emit(out)
    return 0 if rep.ok else 1


def cmd_extend_point(args) -> int:
    space = _kind_check(structure_from_json(read_json(args.space)), args.cls, "space")
    hom = read_json(args.hom)
    if not isinstance(hom, dict) or "codomain" not in hom:
        raise MalformedInputError("hom file needs 'codomain' and 'map'")
    cod = _kind_check(structure_from_json(hom["codomain"]), args.cls, "codomain")
    phi = corestrict(morphism(map_from_json(hom), space, cod))
    point = read_json(args.new_point)
    name = point.get("name", "y" if args.cls == METRIC else "x") if isinstance(point, dict) else "x"
    ext = OnePointExtension(space, name, attachment_from_json(args.cls, point))
    out = {}
    if args.cls == METRIC:
        target, phip, detail = extend_one_point_metric(phi, ext)
        out["deltas"] = [rational_to_str(q) for q in detail.deltas]
        out["order"] = list(detail.order)
        out["representatives"] = detail.representatives
    else:
        target, phip = extend_one_point(phi, ext)
    out = {"target": structure_to_json(target), "map": phip.mapping, **out}
    if args.out:
        write_json(args.out, out)
    _emit(out)
    return 0


def cmd_extend_hom(args) -> int:
    chain = _load_chain(args.chain)
    p = PartialHom(chain, map_from_json(read_json(args.hom)))
    total = extend_to_stage(p, args.to_stage)
    order = chain.built_elements(args.to_stage)
    write_json(args.out, {"map": {e: total.mapping[e] for e in order}, "stage": args.to_stage})
    if args.chain_out:
        write_json(args.chain_out, chain_to_json(chain))
    _emit({"stage": args.to_stage, "domain": len(order), "chain_size": len(chain)})
    return 0


def cmd_witness_homhom(args) -> int:
    chain = _load_chain(args.chain)
    rep = hom_homogeneity_witness(chain, args.max_size)
    _emit({"ok": rep.ok, "stage": rep.stage, "instances": rep.instances, "expected": rep.expected,
           "failures": [{"phi": phi, "error": err} for phi, err in rep.failures],
           "chain_growth": rep.chain_growth})
    return 0 if rep.ok else 1


def cmd_sierpinski(args) -> int:
    seed = _kind_check(structure_from_json(read_json(args.seed)), args.cls, "seed")
    depth = args.depth if args.depth is not None else args.seed_depth + 1
    if depth < args.seed_depth:
        raise MalformedInputError("--depth must be at least --seed-depth")
    chain = build_tower(seed, depth, _bounds(args), compact=args.compact)
    cs = embed_coproduct(chain, args.seed_depth, args.copies)
    if args.fs:
        raw = read_json(args.fs)
        raw = raw.get("fs") if isinstance(raw, dict) else raw
        if not isinstance(raw, list):
            raise MalformedInputError("fs file must hold a list of maps")
        fs = [map_from_json(f, f"f_{k}") for k, f in enumerate(raw)]
    else:
        fs = sample_homomorphisms(cs.truncation, chain.stage(chain.depth), args.copies, seed=args.sample_seed)
    w = build_witness(cs, fs)
    rep = verify_recovery(w)
    out = {"ok": rep.ok, "copies": cs.copies, "fs": w.fs, "per_k": rep.per_k,
           "max_stage": rep.max_stage, "chain_size": rep.chain_size}
    if args.report:
        write_json(args.report, out)
    _emit(out)
    return 0 if rep.ok else 1


def cmd_oracle_homs(args) -> int:
    dom = structure_from_json(read_json(args.dom))
    cod = structure_from_json(read_json(args.cod))
    homs = oracle.all_homomorphisms(dom, cod)
    _emit({"count": len(homs), "homomorphisms": [{"map": m.mapping, "kind": m.kind} for m in homs]})
    return 0


def cmd_oracle_iso(args) -> int:
    a = structure_from_json(read_json(args.a))
    b = structure_from_json(read_json(args.b))
    ok, witness = oracle.are_isomorphic(a, b)
    _emit({"isomorphic": ok, "witness": witness})
    return 0 if ok else 1


def cmd_oracle_enum(args) -> int:
    out = oracle.enumerate_structures(args.cls, args.n, include_empty=args.include_empty)
    _emit({"class": args.cls, "n": args.n, "counts": {str(k): v for k, v in oracle.count_by_size(out).items()},
           "structures": [structure_to_json(s) for s in out]})
    return 0


def cmd_dot(args) -> int:
    if args.chain:
        s = _load_chain(args.chain).stage(args.stage)
    elif args.structure:
        s = structure_from_json(read_json(args.structure))
    else:
        raise MalformedInputError("give --structure or --chain")
    text = to_dot(s)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- parser


def _add_bounds(p, default_k: int = 2):
    p.add_argument("--max-subset", type=_positive, default=default_k)
    p.add_argument("--max-iterations", type=_positive)
    p.add_argument("--max-elements", type=_positive)
    p.add_argument("--compact", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fraisse", description="Finite stages of Fraisse limits and homomorphism extension.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="build a tower of stages")
    p.add_argument("--class", dest="cls", choices=["graph", "poset"], required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--depth", type=_nonneg, required=True)
    _add_bounds(p)
    p.add_argument("--out", required=True)
    p.add_argument("--dot-dir")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("audit", help="check that stage 0's small extensions are realized")
    p.add_argument("--chain", required=True)
    p.add_argument("--max-subset", type=_nonneg, required=True)
    p.add_argument("--stage", type=_nonneg, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("realize", help="find or add an element over a base")
    p.add_argument("--chain", required=True)
    p.add_argument("--base", default="")
    p.add_argument("--attach", required=True)
    p.add_argument("--no-append", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("pushout", help="amalgamated free sum of an amalgam")
    p.add_argument("--amalgam", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--check-universal", type=_nonneg, metavar="N")
    p.set_defaults(func=cmd_pushout)

    p = sub.add_parser("coproduct", help="disjoint union of structures")
    p.add_argument("--class", dest="cls", choices=["graph", "poset", "metric"], required=True)
    p.add_argument("--parts", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_coproduct)

    p = sub.add_parser("check-1phep", help="bounded one-point extension check for a class")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--max-size", type=_nonneg, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check_1phep)

    p = sub.add_parser("extend-point", help="extend a surjective homomorphism over a new point")
    p.add_argument("--class", dest="cls", choices=["graph", "poset", "metric"], required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--hom", required=True)
    p.add_argument("--new-point", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extend_point)

    p = sub.add_parser("extend-hom", help="extend a partial homomorphism to a whole stage")
    p.add_argument("--chain", required=True)
    p.add_argument("--hom", required=True)
    p.add_argument("--to-stage", type=_nonneg, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--chain-out")
    p.set_defaults(func=cmd_extend_hom)

    p = sub.add_parser("witness-homhom", help="extend every small homomorphism into stage 0")
    p.add_argument("--chain", required=True)
    p.add_argument("--max-size", type=_nonneg, required=True)
    p.set_defaults(func=cmd_witness_homhom)

    p = sub.add_parser("sierpinski", help="three-generator recovery of M homomorphisms")
    p.add_argument("--class", dest="cls", choices=["graph", "poset"], required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--seed-depth", type=_nonneg, required=True)
    p.add_argument("--copies", type=_positive, required=True)
    p.add_argument("--depth", type=_nonneg)
    p.add_argument("--fs")
    p.add_argument("--sample-seed", type=int, default=0)
    _add_bounds(p)
    p.add_argument("--report")
    p.set_defaults(func=cmd_sierpinski)

    p = sub.add_parser("oracle", help="brute-force reference computations")
    osub = p.add_subparsers(dest="oracle_command", required=True, parser_class=_Parser)
    q = osub.add_parser("homs")
    q.add_argument("--dom", required=True)
    q.add_argument("--cod", required=True)
    q.set_defaults(func=cmd_oracle_homs)
    q = osub.add_parser("iso")
    q.add_argument("--a", required=True)
    q.add_argument("--b", required=True)
    q.set_defaults(func=cmd_oracle_iso)
    q = osub.add_parser("enum")
    q.add_argument("--class", dest="cls", choices=["graph", "poset"], required=True)
    q.add_argument("--n", type=_nonneg, required=True)
    q.add_argument("--include-empty", action="store_true")
    q.set_defaults(func=cmd_oracle_enum)

    p = sub.add_parser("dot", help="DOT export of a structure or a chain stage")
    p.add_argument("--structure")
    p.add_argument("--chain")
    p.add_argument("--stage", type=_nonneg, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FraisseError as exc:
        print(f"fraisse: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
