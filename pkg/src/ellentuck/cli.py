"""Command-line front end: ``ellentuck <command> ...``.

Exit codes: 0 success, 1 a negative answer (not a member, failed checks),
2 bad input.
"""
from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from . import embeddings
from .cache import NormCache
from .codec import (
    CodecError,
    approximation_to_json,
    certificate_from_json,
    certificate_to_json,
    dumps,
    functional_to_json,
    loads,
    params_to_json,
    parse_rational,
    parse_variant,
    rational_to_str,
    vector_from_json,
    vector_to_json,
    vertex_arg,
)
from .combinatorics import (
    DimensionError,
    iter_xmax,
    make_approximation,
    unrank_seq,
    unrank_vertex,
    xmax_contains,
    xmax_segment,
)
from .dual import ResourceError, dual_norm_level, functionals_json_order, generate_functionals
from .harness import SuiteConfig, growth_table, growth_text, run_suite
from .norm import certificate_violation, norm
from .space import Params

log = logging.getLogger("ellentuck")


class UsageError(Exception):
    pass


def _read_json(path: str):
    try:
        if path == "-":
            return loads(sys.stdin.read())
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _emit(args, payload: dict, text: str):
    print(dumps(payload) if args.json else text)


def _params(args, k: int) -> Params:
    if args.k is not None and args.k != k:
        raise DimensionError(f"--k {args.k} does not match the vector's dimension {k}")
    try:
        return Params(k, args.d, parse_rational(args.theta), parse_variant(args.variant))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _load_vector(path: str):
    return vector_from_json(_read_json(path))


# -- commands -------------------------------------------------------------------


def cmd_enum(args) -> int:
    k = args.k or 2
    rows = []
    for n in range(1, args.count + 1):
        item = unrank_vertex(n, k) if args.kind == "vertices" else unrank_seq(n, k)
        rows.append((n, item))
    _emit(args, {"k": k, "kind": args.kind, "items": [{"rank": n, "s": list(s)} for n, s in rows]},
          "\n".join(f"{n}\t{tuple(s)}" for n, s in rows))
    return 0


def cmd_norm(args) -> int:
    x = _load_vector(args.vector)
    params = _params(args, x.k)
    cache = NormCache(args.cache, seed=args.seed) if args.cache else None
    value, cert = cache.norm(x, params) if cache else norm(x, params)
    if cache:
        cache.save()
    if args.certificate:
        with open(args.certificate, "w", encoding="utf-8") as fh:
            fh.write(dumps(certificate_to_json(cert)) + "\n")
    _emit(args, {"params": params_to_json(params), "value": rational_to_str(value)}, str(value))
    return 0


def cmd_member(args) -> int:
    data = _read_json(args.set)
    if isinstance(data, dict):
        data = data.get("set")
    if not isinstance(data, list) or not data:
        raise UsageError("expected a non-empty list of vertices")
    verts = [vertex_arg(dumps(v)) for v in data]
    k = args.k or len(verts[0])
    if any(len(v) != k for v in verts):
        raise DimensionError(f"every vertex must have length {k}")
    approx = make_approximation(verts)
    if approx is None:
        _emit(args, {"member": False}, "not a member")
        return 1
    text = "\n".join(f"{s} -> {x}" for s, x in approx.witness)
    _emit(args, {"member": True, **approximation_to_json(approx)}, text)
    return 0


def cmd_xmax(args) -> int:
    v = vertex_arg(args.v)
    if args.contains:
        w = vertex_arg(args.contains)
        ok = xmax_contains(v, w)
        _emit(args, {"v": list(v), "w": list(w), "member": ok}, "yes" if ok else "no")
        return 0 if ok else 1
    if args.cutoff:
        approx = xmax_segment(v, vertex_arg(args.cutoff))
        _emit(args, approximation_to_json(approx), "\n".join(str(w) for w in approx.members))
        return 0
    it = iter_xmax(v)
    items = [next(it) for _ in range(args.count)]
    _emit(args, {"v": list(v), "items": [list(w) for w in items]},
          "\n".join(str(w) for w in items))
    return 0


def cmd_dual(args) -> int:
    x = _load_vector(args.vector)
    params = _params(args, x.k)
    box = args.box
    if args.list:
        fs = functionals_json_order(generate_functionals(params, args.depth, box or len(x) or 1))
        _emit(args, {"functionals": [functional_to_json(f) for f in fs]},
              "\n".join(f"{f.depth}\t{dumps(vector_to_json(f.vector))}" for f in fs))
        return 0
    value = dual_norm_level(x, params, args.depth, box)
    _emit(args, {"depth": args.depth, "value": rational_to_str(value)}, str(value))
    return 0


_MAPS = ("phi", "psi", "tr0", "collapse", "lift")


def cmd_embed(args) -> int:
    x = _load_vector(args.vector)
    if args.map == "phi":
        y = embeddings.phi_map(x)
    elif args.map == "psi":
        y = embeddings.psi_map(x)
    elif args.map == "tr0":
        y = embeddings.tr0_vector(x)
    else:
        if args.stem is None:
            raise UsageError(f"--stem is required for {args.map}")
        stem = vertex_arg(args.stem)
        if args.map == "collapse":
            y = embeddings.collapse_trace(x, stem)
        else:
            y = embeddings.lift_trace(x, stem, x.k + len(stem))
    payload = {"vector": vector_to_json(y)}
    text = dumps(vector_to_json(y))
    if args.check:
        before = norm(x, _params(args, x.k))[0]
        after = norm(y, _params(argparse.Namespace(**{**vars(args), "k": None}), y.k))[0]
        payload.update(before=rational_to_str(before), after=rational_to_str(after))
        text += f"\nnorm before {before}, after {after}"
    _emit(args, payload, text)
    return 0


def cmd_verify(args) -> int:
    if args.certificate:
        return _verify_certificate(args)
    data = _read_json(args.config) if args.config else {}
    if not isinstance(data, dict):
        raise UsageError("suite config must be a JSON object")
    if args.seed is not None and "seed" not in data:
        data["seed"] = args.seed
    if args.workers:
        data["workers"] = args.workers
    try:
        cfg = SuiteConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad suite config: {exc}") from exc
    report = run_suite(cfg)
    print(report.to_json() if args.json else report.to_text())
    if args.growth:
        print(growth_text(growth_table(Params(2, 3, Fraction(1, 2)), range(1, 9))))
    return 0 if report.ok else 1


def _verify_certificate(args) -> int:
    if not args.vector:
        raise UsageError("--vector is required with --certificate")
    x = _load_vector(args.vector)
    params = _params(args, x.k)
    cert = certificate_from_json(_read_json(args.certificate))
    problem = certificate_violation(x, params, cert)
    ok = problem is None
    _emit(args, {"valid": ok, "value": rational_to_str(cert.value), "problem": problem},
          f"valid, proves norm >= {cert.value}" if ok else f"invalid: {problem}")
    return 0 if ok else 1


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, help="dimension (defaults to the input's)")
    common.add_argument("--d", type=int, default=2, help="blocks per family (default 2)")
    common.add_argument("--theta", default="1/2", help="weight as a rational, e.g. 2/3")
    common.add_argument("--variant", default="tk", help="tk or ta")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--cache", help="persistent norm cache file")
    common.add_argument("--certificate", help="certificate file to write (norm) or check (verify)")

    parser = argparse.ArgumentParser(prog="ellentuck",
                                     description="Ellentuck-space combinatorics and exact norms")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enum", parents=[common], help="list vertices or sequences in order")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--kind", choices=("vertices", "seqs"), default="vertices")
    p.set_defaults(func=cmd_enum)

    p = sub.add_parser("norm", parents=[common], help="exact norm of a vector file")
    p.add_argument("vector", help="vector JSON file, or - for stdin")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("member", parents=[common], help="decide membership in AR^k")
    p.add_argument("set", help="JSON list of vertices, or - for stdin")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("xmax", parents=[common], help="the maximal tree through a vertex")
    p.add_argument("--v", required=True, help="vertex, e.g. 0,2,7")
    p.add_argument("--cutoff", help="print the segment up to this vertex")
    p.add_argument("--contains", help="test a single vertex")
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(func=cmd_xmax)

    p = sub.add_parser("dual", parents=[common], help="norm through norming functionals")
    p.add_argument("vector")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--box", type=int, help="use the first BOX vertices")
    p.add_argument("--list", action="store_true", help="print the functionals instead")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("embed", parents=[common], help="move a vector between dimensions")
    p.add_argument("vector")
    p.add_argument("--map", choices=_MAPS, default="phi")
    p.add_argument("--stem", help="stem for collapse/lift, e.g. 1 or 0,2")
    p.add_argument("--check", action="store_true", help="also print both norms")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("verify", parents=[common], help="run the inequality suite")
    p.add_argument("--config", help="suite config JSON")
    p.add_argument("--workers", type=int, default=0)
    p.add_argument("--growth", action="store_true", help="also print the growth table")
    p.add_argument("--vector", help="vector for --certificate checking")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CodecError, DimensionError, ResourceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
