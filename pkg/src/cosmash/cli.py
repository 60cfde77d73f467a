"""Command line front end.

Every subcommand prints one report, JSON by default or ``--format text``.
Exit status is 0 on success, 1 on a domain error (with a structured error
report) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .algebra import (
    Congruence,
    normal_closure,
    normal_subobjects,
    subobject_generate,
)
from .catalog import load_algebra, load_extension, load_square, resolve
from .commutators import CommutatorKind, commutator_report, sh_check
from .errors import CosmashError, UnknownEntry
from .structures import (
    beck_module_check,
    double_central_check,
    graph_from_precrossed,
    internal_category_check,
    xmod_check,
)

REPORT_VERSION = 1

KINDS = {
    "higgins": CommutatorKind.HIGGINS_BINARY,
    "huq": CommutatorKind.HUQ,
    "smith": CommutatorKind.SMITH,
    "smith-normalization": CommutatorKind.SMITH_NORMALIZATION,
    "ternary": CommutatorKind.TERNARY_OBSTRUCTION,
    "group-ternary": CommutatorKind.TERNARY_GROUP_EXACT,
    "associator": CommutatorKind.ASSOCIATOR,
    "lower-bound": CommutatorKind.TERNARY_LOWER_BOUND,
}
TERNARY_KINDS = {"group-ternary", "associator", "lower-bound"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def split_generators(text):
    """Split a comma list, ignoring commas inside parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or out:
        out.append(tail)
    return [s for s in out if s]


def _names(X, elements):
    return [X.names[e] for e in elements]


def _subobject_arg(X, text, label, inputs):
    """Generators -> normal subobject; the promotion is recorded in ``inputs``."""
    if text is None:
        raise UsageError(f"--{label.lower()} is required")
    if text.strip() == "all":
        gens = list(range(X.order))
    else:
        gens = []
        for g in split_generators(text):
            try:
                gens.append(X.index(g))
            except KeyError:
                raise UnknownEntry(f"algebra has no element named {g!r}") from None
    S = subobject_generate(X, gens)
    N = normal_closure(X, S.elements)
    inputs[label] = {
        "generators": _names(X, gens) if text.strip() != "all" else ["all"],
        "generated": S.names,
        "normal": N.names,
        "promoted": N != S,
    }
    return N


def _congruence_json(X, theta):
    return [_names(X, c) for c in theta.classes()]


def _load(ref):
    if ref == "-":
        return load_algebra("-")
    return resolve(ref)


def _algebra_input(ref, X):
    return {"ref": ref, "kind": X.kind.value, "order": X.order}


# --------------------------------------------------------------------------
# subcommands


def cmd_commutator(args):
    X = _load(args.algebra)
    inputs = {"algebra": _algebra_input(args.algebra, X)}
    K = _subobject_arg(X, args.k, "K", inputs)
    L = _subobject_arg(X, args.l, "L", inputs)
    M = None
    if args.kind in TERNARY_KINDS:
        M = _subobject_arg(X, args.m if args.m is not None else "all", "M", inputs)
    if args.kind == "lower-bound":
        inputs["depth"] = args.depth
    rep = commutator_report(KINDS[args.kind], X, K, L, M, depth=args.depth)
    return _commutator_json(X, rep, inputs)


def _commutator_json(X, rep, inputs):
    out = {"kind": rep.kind.value, "inputs": inputs, "exactness": rep.exactness.value}
    if isinstance(rep.result, Congruence):
        out["result"] = {"classes": _congruence_json(X, rep.result)}
        out["verdict"] = "commute" if rep.result.is_discrete else "do-not-commute"
        out["connector"] = rep.connector is not None
        out["witnesses"] = [
            {"element": X.names[w["element"]], "related_to": X.names[w["related_to"]]} for w in rep.witnesses
        ]
    else:
        out["result"] = {"elements": rep.result.names, "order": rep.result.order}
        out["verdict"] = "trivial" if rep.result.is_trivial else "nontrivial"
        wit = []
        for w in rep.witnesses:
            item = {"element": X.names[w["element"]]}
            if "term" in w:
                item["term"] = w["term"]
                item["assignment"] = _names(X, w["assignment"])
            if "associator" in w:
                item["associator"] = _names(X, w["associator"])
            wit.append(item)
        out["witnesses"] = wit
    return out


def cmd_smith(args):
    args.kind = "smith"
    return cmd_commutator(args)


def cmd_sh_check(args):
    X = _load(args.algebra)
    rep = sh_check(X, workers=args.workers)
    return {
        "inputs": {"algebra": _algebra_input(args.algebra, X)},
        "normal_subobjects": len(rep.normal_subobjects),
        "pairs_checked": rep.pairs_checked,
        "huq_commuting_pairs": rep.huq_pairs,
        "verdict": "SH holds" if rep.holds else "SH fails",
        "violations": [
            {
                "K": v.K.names,
                "L": v.L.names,
                "obstruction": v.obstruction.names,
                "witnesses": _names(X, v.witnesses),
            }
            for v in rep.violations
        ],
        "exactness": "Exact",
    }


def _extension_args(args):
    ext, bounds = load_extension(args.extension)
    name = getattr(args, "boundary", None) or "zero"
    if name not in bounds:
        raise UnknownEntry(f"extension has no boundary named {name!r}; known: {sorted(bounds)}")
    inputs = {
        "extension": args.extension,
        "boundary": name,
        "kind": ext.total.kind.value,
        "orders": {"total": ext.total.order, "base": ext.base.order, "kernel": ext.kernel_algebra.order},
    }
    return ext, bounds[name], inputs


def _plain(obj, X=None):
    """JSON-ready copy; integer lists become element names of ``X``."""
    if isinstance(obj, dict):
        return {k: _plain(v, X) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        if X is not None and all(isinstance(v, int) for v in obj):
            return _names(X, obj)
        return [_plain(v, X) for v in obj]
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str, bool)):
        return obj.value
    return obj


def cmd_xmod_check(args):
    ext, d, inputs = _extension_args(args)
    rep = xmod_check(ext, d)
    details = dict(rep.details)
    verdict = details.pop("verdict").value
    return {"inputs": inputs, "verdict": verdict, "details": _plain(details, ext.total)}


def cmd_cat_check(args):
    ext, d, inputs = _extension_args(args)
    rg = graph_from_precrossed(ext, d)
    rep = internal_category_check(rg)
    return {
        "inputs": inputs,
        "verdict": "internal category" if rep else "not an internal category",
        "details": _plain(rep.details, ext.total),
    }


def cmd_beck_check(args):
    ext, _, inputs = _extension_args(args)
    inputs.pop("boundary")
    rep = beck_module_check(ext)
    return {"inputs": inputs, "verdict": "module" if rep else "not a module", "details": _plain(rep.details)}


def cmd_dce_check(args):
    sq = load_square(args.square)
    rep = double_central_check(sq)
    X = sq.X
    details = {
        k: (_names(X, v) if isinstance(v, list) else v) for k, v in rep.details.items()
    }
    return {
        "inputs": {"square": args.square, "kind": X.kind.value, "order": X.order},
        "verdict": "central" if rep else "not central",
        "details": details,
    }


def cmd_info(args):
    X = _load(args.algebra)
    normals = normal_subobjects(X)
    return {
        "inputs": {"algebra": _algebra_input(args.algebra, X)},
        "elements": list(X.names),
        "associative": X.is_associative,
        "commutative": X.is_commutative,
        "normal_subobjects": [N.names for N in normals],
        "verdict": f"{X.kind.value} of order {X.order}",
    }


COMMANDS = {
    "commutator": cmd_commutator,
    "smith": cmd_smith,
    "sh-check": cmd_sh_check,
    "xmod-check": cmd_xmod_check,
    "cat-check": cmd_cat_check,
    "beck-check": cmd_beck_check,
    "dce-check": cmd_dce_check,
    "info": cmd_info,
}


def build_parser():
    p = _Parser(prog="cosmash", description="Commutator calculus on finite groups and loops.")
    p.add_argument("--version", action="version", version=f"cosmash {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=["json", "text"], default="json")
        sp.add_argument("--timing", action="store_true", help="include wall-clock time (makes output non-deterministic)")

    def algebra_flags(sp, subobjects=True):
        sp.add_argument("--algebra", required=True, help="catalog name, file path, or - for stdin")
        if subobjects:
            for flag in ("--k", "--l", "--m"):
                sp.add_argument(flag, help="comma-separated generator names, or 'all'")
            sp.add_argument("--depth", type=int, default=6)

    c = sub.add_parser("commutator", help="one commutator of generated normal subobjects")
    c.add_argument("--kind", choices=sorted(KINDS), default="higgins")
    algebra_flags(c)
    common(c)

    s = sub.add_parser("smith", help="Smith commutator of the denormalisations")
    algebra_flags(s)
    common(s)

    sh = sub.add_parser("sh-check", help="scan all normal pairs for Smith-is-Huq violations")
    algebra_flags(sh, subobjects=False)
    sh.add_argument("--workers", type=int, default=None)
    common(sh)

    for name in ("xmod-check", "cat-check", "beck-check"):
        e = sub.add_parser(name)
        e.add_argument("--extension", required=True, help="builtin extension name or JSON file")
        if name != "beck-check":
            e.add_argument("--boundary", default="zero")
        common(e)

    d = sub.add_parser("dce-check", help="double central extension check")
    d.add_argument("--square", required=True, help="builtin square name or JSON file")
    common(d)

    i = sub.add_parser("info")
    algebra_flags(i, subobjects=False)
    common(i)
    return p


def render_text(report):
    """Line-oriented rendering of a report; deterministic for a given report."""
    lines = []

    def emit(prefix, value):
        if isinstance(value, dict):
            if not value:
                lines.append(f"{prefix}: {{}}")
            for k, v in value.items():
                emit(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
            if not value:
                lines.append(f"{prefix}: []")
            for i, v in enumerate(value):
                emit(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix}: {json.dumps(value)}")

    emit("", report)
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None):
    """Run one command; returns the exit status."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    report = {"report_version": REPORT_VERSION, "command": args.command}
    start = time.perf_counter()
    try:
        report.update(COMMANDS[args.command](args))
        code = 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except CosmashError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 1
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 6)
    if args.format == "json":
        stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        stdout.write(render_text(report))
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
