"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error,
3 search horizon or size budget exhausted, 4 soundness failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from .certificates import (
    crosscheck,
    dumps,
    ex3_certificate,
    t1_certificate,
    t2i_certificate,
    t2ii_certificate,
    verify_document,
)
from .errors import BoxresError, CapabilityViolationError, HorizonError, SoundnessError
from .factorization import verify_witness
from .groups import Element, Group, parse_element, parse_group, subgroup_generated
from .oracle import DEFAULT_BOUND, enumerate_boxes, hajos_periodicity_scan, odd_torsion_obstruction, tile_integers
from .theorem1 import DEFAULT_MAX_ELEMENTS, run_theorem1
from .theorem2 import construct_t2i, construct_t2ii, example3_construct
from .topology import default_sequence, default_topology

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_HORIZON = 3
EXIT_SOUNDNESS = 4

DEFAULT_HORIZON = 100_000

log = logging.getLogger("boxres")


def split_elements(text: str) -> List[str]:
    """Split on commas or semicolons outside square brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch in ",;" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (p.strip() for p in parts) if p]


def parse_elements(group: Group, text: str) -> List[Element]:
    return [parse_element(group, t) for t in split_elements(text)]


def _emit(doc, out: Optional[str]) -> None:
    text = dumps(doc)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pretty(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


# ------------------------------------------------------------------ commands


def cmd_construct(args) -> int:
    group = parse_group(args.group)
    base = default_topology(group, args.topology)
    if args.kind == "t1":
        seq = default_sequence(group, args.seq, base)
        res = run_theorem1(seq, args.stages, args.horizon, args.max_elements)
        doc = t1_certificate(res, args.horizon, args.max_elements)
        summary = f"t1: {args.stages} stages, |B| = {len(res.B)}"
    elif args.kind == "t2i":
        F = parse_elements(group, args.factor)
        res = construct_t2i(group, F, args.steps, args.horizon)
        doc = t2i_certificate(res, base, args.horizon)
        summary = f"t2i: {args.steps} steps, |B| = {len(res.B)}"
    else:
        H = subgroup_generated(group, parse_elements(group, args.subgroup))
        if args.kind == "t2ii":
            res = construct_t2ii(base, H, args.steps, args.window, args.horizon)
            doc = t2ii_certificate(res, base, args.horizon)
            summary = f"t2ii: {args.steps} steps, |S| = {len(res.S)}, |R| = {len(res.R)}"
        else:
            res = example3_construct(base, H, args.steps, args.window, args.horizon)
            doc = ex3_certificate(res, base, args.horizon)
            summary = f"ex3: {args.steps} steps, |B| = {len(res.B)}"
    _emit(doc, args.out)
    log.info(summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.cert) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        print(f"error: {args.cert} is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = verify_document(doc, args.window, args.depth, args.require_density)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(report))
    else:
        _pretty(report)
    return EXIT_OK if report["verdict"] == "pass" else EXIT_CHECK_FAILED


def cmd_oracle(args) -> int:
    group = parse_group(args.group)
    witnesses = enumerate_boxes(group, args.index, args.bound)
    docs = [w.to_json() for w in witnesses]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(docs))
    else:
        _pretty({"group": group.descriptor, "index": args.index, "count": len(docs), "witnesses": docs})
    return EXIT_OK if all(verify_witness(w)["ok"] for w in witnesses) else EXIT_CHECK_FAILED


def cmd_tile(args) -> int:
    A = [int(t) for t in split_elements(args.set)]
    cert = tile_integers(A, args.max_period)
    if cert is None:
        _pretty({"A": sorted(set(A)), "tiles": False, "max_period": args.max_period})
        return EXIT_CHECK_FAILED
    _pretty(dict(cert.to_json(), tiles=True, verified=cert.verify()))
    return EXIT_OK


def cmd_check(args) -> int:
    report = odd_torsion_obstruction(parse_group(args.group), args.bound)
    _pretty(report.to_json())
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_crosscheck(args) -> int:
    report = crosscheck(args.bound)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(report))
    else:
        _pretty({k: report[k] for k in ("bound", "ok", "counterexamples")} | {"groups": len(report["groups"])})
    return EXIT_OK if report["ok"] else EXIT_CHECK_FAILED


def cmd_hajos(args) -> int:
    report = hajos_periodicity_scan(args.diameter, args.max_size)
    _pretty(report.to_json())
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boxres", description="Dense boxes in topological groups: constructions, certificates, oracles.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="run a construction and write its certificate")
    c.add_argument("kind", choices=["t1", "t2i", "t2ii", "ex3"])
    c.add_argument("--group", default=None)
    c.add_argument("--topology", default="default")
    c.add_argument("--seq", default=None, help="convergent sequence (t1)")
    c.add_argument("--stages", type=int, default=5, help="stages (t1)")
    c.add_argument("--factor", default="0,1", help="finite set F (t2i)")
    c.add_argument("--subgroup", default="e1", help="subgroup generators (t2ii, ex3)")
    c.add_argument("--steps", type=int, default=50, help="greedy steps (t2i, t2ii, ex3)")
    c.add_argument("--window", type=int, default=200)
    c.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    c.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS, help="size budget for t1 stages")
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="independently verify a certificate or factorization witness")
    v.add_argument("--cert", required=True)
    v.add_argument("--window", type=int, default=200)
    v.add_argument("--depth", type=int, default=5)
    v.add_argument("--require-density", action="store_true", help="count missing density cells as failures")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive oracles on finite groups")
    osub = o.add_subparsers(dest="oracle", required=True)
    ob = osub.add_parser("boxes", help="all boxes of a given index")
    ob.add_argument("--group", required=True)
    ob.add_argument("--index", type=int, required=True)
    ob.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    ob.add_argument("--out")
    ob.set_defaults(func=cmd_oracle)

    t = sub.add_parser("tile", help="least-period tiling of the integers by a finite set")
    t.add_argument("--set", required=True)
    t.add_argument("--max-period", type=int, default=4096)
    t.set_defaults(func=cmd_tile)

    k = sub.add_parser("check", help="structural checks")
    ksub = k.add_subparsers(dest="check", required=True)
    ko = ksub.add_parser("odd-torsion", help="no index-2 boxes in odd order")
    ko.add_argument("--group", required=True)
    ko.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    ko.set_defaults(func=cmd_check)

    x = sub.add_parser("crosscheck", help="oracle versus factorization module on all small groups")
    x.add_argument("--bound", type=int, default=12)
    x.add_argument("--out")
    x.set_defaults(func=cmd_crosscheck)

    h = sub.add_parser("hajos", help="periodicity scan of small integer tiles")
    h.add_argument("--diameter", type=int, default=12)
    h.add_argument("--max-size", type=int, default=4)
    h.set_defaults(func=cmd_hajos)
    return p


_DEFAULT_GROUPS = {"t1": "boolean", "t2i": "integers", "t2ii": "boolean", "ex3": "boolean"}
_DEFAULT_SEQ = {"boolean": "basis-vectors", "integers": "factorials"}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "construct":
            args.group = args.group or _DEFAULT_GROUPS[args.kind]
            if args.kind == "t1" and args.seq is None:
                args.seq = _DEFAULT_SEQ.get(parse_group(args.group).descriptor, "basis-vectors")
        return args.func(args)
    except HorizonError as exc:
        print(f"horizon: {exc}", file=sys.stderr)
        return EXIT_HORIZON
    except (SoundnessError, CapabilityViolationError) as exc:
        print(f"soundness: {exc}", file=sys.stderr)
        return EXIT_SOUNDNESS
    except (BoxresError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
