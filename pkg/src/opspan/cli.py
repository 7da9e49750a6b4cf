"""Command-line surface.

Reports are emitted on stdout as JSON (or an aligned table) with sorted keys
and canonical element naming, so identical inputs produce byte-identical
output; wall-clock timings only ever go to stderr, behind ``--timings``.
Exit codes: 0 for a pass, 1 for a failed check (the report carries the
witness), 2 for invalid input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import documents as docs
from .adjoint import (
    AdjointError,
    build_adjoint_corolla,
    coadjoint_build,
    config_type_check,
    config_type_wrt_check,
)
from .cospans import CospanError, compose_cospans, dualize
from .finset import FinSet, FinSetError
from .omega import MorphismError, decompose, validate_morphism
from .opcat import OpCatError, as_discrete_opcat, rectify_tree, validate_opcat
from .operads import OperadError, SetOperad, builtin_operad, eval_on_tree, validate_operad
from .trees import TreeError, canonicalize, enumerate_trees, parse_tree

USAGE_ERROR = 2
CHECK_FAILED = 1


class InputError(ValueError):
    pass


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()[:16]


def _read_source(arg: str) -> tuple[str, str]:
    """Inline expression or file path; returns (text, provenance)."""
    p = Path(arg)
    if p.exists() and p.is_file():
        return p.read_text(), f"file:{arg}"
    return arg, "inline"


def _load_operad(spec: str) -> tuple[SetOperad, str]:
    if ":" in spec:
        kind, _, bound = spec.partition(":")
        if kind in ("commutative", "associative"):
            try:
                n = int(bound)
            except ValueError as exc:
                raise InputError(f"bad arity bound in {spec!r}") from exc
            return builtin_operad(kind, n), spec
    p = Path(spec)
    if not p.exists():
        raise InputError(
            f"{spec!r} is neither builtin (commutative:N | associative:N) "
            f"nor a readable file")
    text = p.read_text()
    return docs.operad_from_doc(docs.load_json(text)), text


def _render_table(value, prefix: str = "") -> list[str]:
    lines = []
    if isinstance(value, dict):
        for k in sorted(value):
            sub = value[k]
            key = f"{prefix}{k}"
            if isinstance(sub, (dict, list)):
                lines.extend(_render_table(sub, key + "."))
            else:
                lines.append(f"{key} = {sub}")
    elif isinstance(value, list):
        for idx, sub in enumerate(value):
            key = f"{prefix}{idx}"
            if isinstance(sub, (dict, list)):
                lines.extend(_render_table(sub, key + "."))
            else:
                lines.append(f"{key} = {sub}")
    else:
        lines.append(f"{prefix.rstrip('.')} = {value}")
    return lines


def emit(report: dict, fmt: str) -> None:
    if fmt == "table":
        for line in _render_table(report):
            print(line)
    else:
        print(json.dumps(report, sort_keys=True, indent=2))


def report_skeleton(args: argparse.Namespace, **inputs: str) -> dict:
    return {
        "schema": docs.SCHEMA,
        "command": args.command_echo,
        "inputs_digest": _digest(*[f"{k}={v}" for k, v in sorted(inputs.items())]),
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_tree_canon(args) -> tuple[dict, int]:
    text, _ = _read_source(args.expr)
    t = parse_tree(text.strip())
    c = canonicalize(t)
    report = report_skeleton(args, expr=text)
    report["canonical"] = {
        "encoding": c.encoding,
        "leaf_count": c.leaf_count,
        "vertex_count": c.vertex_count,
    }
    return report, 0


def cmd_tree_enum(args) -> tuple[dict, int]:
    trees = enumerate_trees(args.max_vertices, args.max_leaves)
    report = report_skeleton(
        args, mv=str(args.max_vertices), ml=str(args.max_leaves))
    report["count"] = len(trees)
    report["trees"] = [t.text() for t in trees]
    return report, 0


def cmd_omega_check(args) -> tuple[dict, int]:
    text, _ = _read_source(args.file)
    m = docs.morphism_from_doc(docs.load_json(text))
    ok, why = validate_morphism(m)
    report = report_skeleton(args, doc=text)
    report["valid"] = ok
    report["reason"] = why
    return report, 0 if ok else CHECK_FAILED


def cmd_omega_decompose(args) -> tuple[dict, int]:
    text, _ = _read_source(args.file)
    m = docs.morphism_from_doc(docs.load_json(text))
    ok, why = validate_morphism(m)
    if not ok:
        raise InputError(f"morphism invalid: {why}")
    word = decompose(m, args.strategy)
    report = report_skeleton(args, doc=text, strategy=args.strategy)
    report["word"] = [
        {"kind": step.kind, "src": step.mor.src.text(), "dst": step.mor.dst.text()}
        for step in word
    ]
    report["length"] = len(word)
    return report, 0


def cmd_operad_validate(args) -> tuple[dict, int]:
    operad, raw = _load_operad(args.spec)
    verdict = validate_operad(operad)
    report = report_skeleton(args, spec=raw)
    report["operad"] = operad.name
    report["valid"] = verdict.ok
    if not verdict.ok:
        report["violated_law"] = verdict.law
        report["witness"] = verdict.witness
    return report, 0 if verdict.ok else CHECK_FAILED


def cmd_operad_eval(args) -> tuple[dict, int]:
    operad, raw = _load_operad(args.spec)
    t = parse_tree(args.tree)
    value = eval_on_tree(operad, t)
    report = report_skeleton(args, spec=raw, tree=args.tree)
    report["operad"] = operad.name
    report["tree"] = t.text()
    report["size"] = len(value)
    report["elements"] = list(value.elements)
    return report, 0


def cmd_opcat_validate(args) -> tuple[dict, int]:
    operad, raw = _load_operad(args.spec)
    cat = as_discrete_opcat(operad)
    verdict = validate_opcat(cat, check_triples=not args.no_triples)
    report = report_skeleton(args, spec=raw)
    report["opcat"] = cat.name
    report["valid"] = verdict.ok
    report["triples_checked"] = not args.no_triples
    if not verdict.ok:
        report["violated_law"] = verdict.law
        report["witness"] = verdict.witness
    return report, 0 if verdict.ok else CHECK_FAILED


def cmd_opcat_rectify(args) -> tuple[dict, int]:
    operad, raw = _load_operad(args.spec)
    cat = as_discrete_opcat(operad)
    t = parse_tree(args.tree)
    product = rectify_tree(cat, t)
    report = report_skeleton(args, spec=raw, tree=args.tree)
    report["tree"] = t.text()
    report["object_count"] = len(product.objects)
    report["vertex_arities"] = [t.arity(v) for v in t.vertices()]
    return report, 0


def cmd_cospan_compose(args) -> tuple[dict, int]:
    text, _ = _read_source(args.file)
    u, outer, inners = docs.composition_from_doc(docs.load_json(text))
    result = compose_cospans(u, outer, inners)
    report = report_skeleton(args, doc=text)
    report["result"] = docs.cospan_to_doc(result)
    return report, 0


def cmd_cospan_dualize(args) -> tuple[dict, int]:
    text, _ = _read_source(args.file)
    cos = docs.cospan_from_doc(docs.load_json(text))
    z = _parse_finset(args.z)
    span = dualize(z, cos)
    report = report_skeleton(args, doc=text, z=args.z)
    report["result"] = docs.span_to_doc(span)
    return report, 0


def _parse_finset(arg: str) -> FinSet:
    p = Path(arg)
    if p.exists() and p.is_file():
        doc = docs.load_json(p.read_text())
        return FinSet(doc["elements"])
    return FinSet(x for x in arg.split(",") if x)


def cmd_adrep_build(args) -> tuple[dict, int]:
    operad, raw = _load_operad(args.spec)
    report = report_skeleton(args, spec=raw, n=str(args.n))
    report["operad"] = operad.name
    report["n"] = args.n
    if args.wrt is not None:
        z = _parse_finset(args.wrt)
        span = coadjoint_build(operad, z, args.n)
        report["result"] = docs.span_to_doc(span)
    else:
        cos = build_adjoint_corolla(operad, args.n)
        report["result"] = docs.cospan_to_doc(cos)
    return report, 0


def cmd_adrep_config_check(args) -> tuple[dict, int]:
    operad, raw = _load_operad(args.spec)
    z = _parse_finset(args.wrt) if args.wrt is not None else None
    pairs = [
        (n, m)
        for n in range(2, args.max + 1)
        for m in range(2, args.max + 1)
        if n + m <= operad.n_max
    ]
    skipped_pairs = [
        [n, m]
        for n in range(2, args.max + 1)
        for m in range(2, args.max + 1)
        if n + m > operad.n_max
    ]

    def run(pair):
        n, m = pair
        if z is None:
            return config_type_check(operad, n, m)
        return config_type_wrt_check(operad, z, n, m)

    if args.parallel:
        with ThreadPoolExecutor() as pool:
            verdicts = list(pool.map(run, pairs))
    else:
        verdicts = [run(pair) for pair in pairs]
    ordered = sorted(zip(pairs, verdicts))

    report = report_skeleton(
        args, spec=raw, max=str(args.max),
        wrt="" if args.wrt is None else args.wrt)
    report["operad"] = operad.name
    report["mode"] = "plain" if z is None else "with_respect_to_carrier"
    if z is not None:
        report["carrier"] = list(z.elements)
    report["grid"] = [
        {
            "n": n,
            "m": m,
            "strict_pullback": v.strict_pullback,
            "pushout_legs_injective": v.pushout_legs_injective,
            **({"counterexample": v.counterexample}
               if v.counterexample else {}),
        }
        for (n, m), v in ordered
    ]
    report["skipped_beyond_arity_bound"] = skipped_pairs
    report["all_pass"] = all(v.strict_pullback for _, v in ordered)
    return report, 0 if report["all_pass"] else CHECK_FAILED


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opspan",
        description="Exact calculus for operads of cospans over rooted trees.")
    parser.add_argument("--format", choices=("json", "table"), default="json")
    parser.add_argument("--timings", action="store_true",
                        help="print elapsed time to stderr")
    sub = parser.add_subparsers(dest="topic")

    tree = sub.add_parser("tree").add_subparsers(dest="action")
    canon = tree.add_parser("canon")
    canon.add_argument("expr")
    canon.set_defaults(func=cmd_tree_canon)
    enum = tree.add_parser("enum")
    enum.add_argument("--max-vertices", type=int, required=True)
    enum.add_argument("--max-leaves", type=int, required=True)
    enum.set_defaults(func=cmd_tree_enum)

    omega = sub.add_parser("omega").add_subparsers(dest="action")
    check = omega.add_parser("check")
    check.add_argument("file")
    check.set_defaults(func=cmd_omega_check)
    dec = omega.add_parser("decompose")
    dec.add_argument("file")
    dec.add_argument("--strategy", choices=("lex", "revlex"), default="lex")
    dec.set_defaults(func=cmd_omega_decompose)

    operad = sub.add_parser("operad").add_subparsers(dest="action")
    oval = operad.add_parser("validate")
    oval.add_argument("spec")
    oval.set_defaults(func=cmd_operad_validate)
    oev = operad.add_parser("eval")
    oev.add_argument("spec")
    oev.add_argument("tree")
    oev.set_defaults(func=cmd_operad_eval)

    opcat = sub.add_parser("opcat").add_subparsers(dest="action")
    cval = opcat.add_parser("validate")
    cval.add_argument("spec")
    cval.add_argument("--no-triples", action="store_true")
    cval.set_defaults(func=cmd_opcat_validate)
    crect = opcat.add_parser("rectify")
    crect.add_argument("spec")
    crect.add_argument("tree")
    crect.set_defaults(func=cmd_opcat_rectify)

    cospan = sub.add_parser("cospan").add_subparsers(dest="action")
    ccomp = cospan.add_parser("compose")
    ccomp.add_argument("file")
    ccomp.set_defaults(func=cmd_cospan_compose)
    cdual = cospan.add_parser("dualize")
    cdual.add_argument("file")
    cdual.add_argument("--z", required=True)
    cdual.set_defaults(func=cmd_cospan_dualize)

    adrep = sub.add_parser("adrep").add_subparsers(dest="action")
    abuild = adrep.add_parser("build")
    abuild.add_argument("spec")
    abuild.add_argument("-n", type=int, required=True)
    abuild.add_argument("--wrt", default=None)
    abuild.set_defaults(func=cmd_adrep_build)
    acheck = adrep.add_parser("config-check")
    acheck.add_argument("spec")
    acheck.add_argument("--max", type=int, default=3)
    acheck.add_argument("--wrt", default=None)
    acheck.add_argument("--parallel", action="store_true")
    acheck.set_defaults(func=cmd_adrep_config_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    if not hasattr(args, "func"):
        parser.print_usage()
        return USAGE_ERROR
    args.command_echo = argv
    started = time.monotonic()
    try:
        report, code = args.func(args)
    except (TreeError, MorphismError, OperadError, OpCatError, CospanError,
            AdjointError, FinSetError, docs.DocumentError, InputError) as exc:
        emit({
            "schema": docs.SCHEMA,
            "command": argv,
            "error": str(exc),
        }, args.format)
        return USAGE_ERROR
    if args.timings:
        print(f"elapsed: {time.monotonic() - started:.3f}s", file=sys.stderr)
    emit(report, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
