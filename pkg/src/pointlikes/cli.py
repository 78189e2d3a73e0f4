"""Command-line front end.

Exit status: 0 when a verdict was computed, 1 when a self-check failed,
2 for bad input, 3 when a resource cap was hit.  A FILE argument of the form
``corpus:NAME`` reads a bundled example.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import corpus
from .errors import CapExceeded, InputError, PointlikeError, VerificationError
from .flow import DEFAULT_MAX_SIZE, DEFAULT_MAX_STATES, verify_all
from .groups import FiniteGroup, KernelFunctor, kernel_positions, read_words
from .languages import decide_separation, load_dfa, regex_to_dfa
from .saturation import DEFAULT_CAP, STRATEGIES, elements_of, pointlike_pairs, saturate
from .semigroup import FiniteSemigroup, green, load_semigroup, maximal_subgroup

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def parse_variety(text: str) -> KernelFunctor:
    """``trivial | all | ab | p:<p> | pi:<p,...> | nil | sol | verbal:<file>``."""
    head, _, arg = text.partition(":")
    simple = {"trivial": KernelFunctor.trivial, "all": KernelFunctor.all,
              "ab": KernelFunctor.abelian, "nil": KernelFunctor.nilpotent,
              "sol": KernelFunctor.solvable}
    if head in simple and not arg:
        return simple[head]()
    try:
        if head == "p" and arg:
            return KernelFunctor.pgroup(int(arg))
        if head == "pi" and arg:
            return KernelFunctor.pigroup(int(p) for p in arg.split(","))
    except ValueError as exc:
        raise InputError(f"bad variety {text!r}: {exc}") from None
    if head == "verbal" and arg:
        try:
            return KernelFunctor.verbal(read_words(arg))
        except OSError as exc:
            raise InputError(f"cannot read word file: {exc}") from None
    raise InputError(f"unknown variety {text!r}")


def _open_semigroup(name: str) -> FiniteSemigroup:
    try:
        if name.startswith("corpus:"):
            return corpus.semigroup(name[len("corpus:"):])
        return load_semigroup(name)
    except OSError as exc:
        raise InputError(str(exc)) from None


def _open_dfa(name: str):
    try:
        if name.startswith("corpus:"):
            return corpus.dfa(name[len("corpus:"):])
        return load_dfa(name)
    except OSError as exc:
        raise InputError(str(exc)) from None


def _sets(masks) -> list[list[int]]:
    return [list(elements_of(m)) for m in masks]


# subcommands ---------------------------------------------------------------

def cmd_green(args) -> tuple[dict, int]:
    s = _open_semigroup(args.file)
    gd = green(s)
    j_classes = []
    for j in gd.classes("J"):
        rows = sorted({gd.r_class[x] for x in j})
        cols = sorted({gd.l_class[x] for x in j})
        cells = [[sorted(x for x in j if gd.r_class[x] == r and gd.l_class[x] == c)
                  for c in cols] for r in rows]
        j_classes.append({"elements": list(j), "r_classes": len(rows), "l_classes": len(cols),
                          "h_size": len(cells[0][0]),
                          "regular": any(s.is_idempotent(x) for x in j),
                          "eggbox": cells})
    doc = {"size": s.size, "idempotents": list(s.idempotents),
           "L": [list(c) for c in gd.classes("L")], "R": [list(c) for c in gd.classes("R")],
           "H": [list(c) for c in gd.classes("H")], "J": j_classes}
    return doc, EXIT_OK


def _subgroup_witness(s: FiniteSemigroup, k: KernelFunctor) -> int | None:
    for e in s.idempotents:
        if len(kernel_positions(maximal_subgroup(s, e), k)) > 1:
            return e
    return None


def cmd_member(args) -> tuple[dict, int]:
    s = _open_semigroup(args.file)
    k = parse_variety(args.variety)
    c = saturate(s, k, cap=args.max_size)
    big = [m for m in c.maximal if m & (m - 1)]
    witness = _subgroup_witness(s, k)
    if (witness is None) == bool(big):
        raise VerificationError("saturation and subgroup test disagree on membership")
    doc = {"verdict": "MEMBER" if not big else "NOT_MEMBER", "variety": k.name,
           "nonsingleton_pointlikes": _sets(big), "witness_idempotent": witness}
    return doc, EXIT_OK


def cmd_kernel(args) -> tuple[dict, int]:
    s = _open_semigroup(args.file)
    k = parse_variety(args.variety)
    if not 0 <= args.idempotent < s.size:
        raise InputError(f"element {args.idempotent} out of range")
    g: FiniteGroup = maximal_subgroup(s, args.idempotent)
    ker = kernel_positions(g, k)
    doc = {"idempotent": args.idempotent, "variety": k.name,
           "group": sorted(g.labels), "kernel": sorted(g.labels[p] for p in ker),
           "quotient_order": g.order // len(ker)}
    return doc, EXIT_OK


def cmd_pointlikes(args) -> tuple[dict, int]:
    s = _open_semigroup(args.file)
    k = parse_variety(args.variety)
    c = saturate(s, k, args.strategy, cap=args.max_size)
    doc = c.to_json(include_trace=args.trace)
    if args.pairs:
        doc["pairs"] = [list(p) for p in pointlike_pairs(c)]
    return doc, EXIT_OK


def _language_sources(argv: Sequence[str], files: Sequence[str]) -> list[tuple[str, str]]:
    """DFA files and ``--regex`` values in command-line order."""
    out, pending = [], list(files)
    it = iter(argv)
    for tok in it:
        if tok == "--regex":
            out.append(("regex", next(it, "")))
        elif tok.startswith("--regex="):
            out.append(("regex", tok.split("=", 1)[1]))
        elif pending and tok == pending[0]:
            out.append(("file", pending.pop(0)))
    return out


def cmd_separate(args) -> tuple[dict, int]:
    sources = _language_sources(args.argv, args.dfa)
    if len(sources) != 2:
        raise InputError(f"separate needs exactly two languages, got {len(sources)}")
    k = parse_variety(args.variety)
    alphabet = list(args.alphabet) if args.alphabet else None
    dfas = []
    for kind, value in sources:
        if kind == "regex":
            if alphabet is None:
                raise InputError("--alphabet is required with --regex")
            dfas.append(regex_to_dfa(value, alphabet))
        else:
            dfas.append(_open_dfa(value))
    verdict = decide_separation(dfas[0], dfas[1], k, cap=args.max_size)
    return verdict.as_dict(), EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    s = _open_semigroup(args.file)
    k = parse_variety(args.variety)
    if s.size > args.max_size:
        raise CapExceeded(f"|T| = {s.size} exceeds the verifier cap {args.max_size}")
    c = saturate(s, k)
    report = verify_all(s, k, c, max_size=args.max_size, max_states=args.max_states)
    doc = report.as_dict()
    doc["maximal"] = _sets(c.maximal)
    return doc, EXIT_OK if report.passed else EXIT_VERIFY


# output ------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, list):
        if value and all(isinstance(v, list) and all(isinstance(x, int) for x in v)
                         for v in value):
            return " ".join("{" + ",".join(map(str, v)) + "}" for v in value)
        if all(isinstance(v, (int, str)) for v in value):
            return "[" + ", ".join(map(str, value)) + "]"
        return json.dumps(value, sort_keys=True)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    if value is None:
        return "-"
    return str(value)


def render_text(doc: dict) -> str:
    """Line-per-field rendering carrying the same data as the JSON form."""
    lines = []
    for key, value in doc.items():
        label = key.replace("_", " ")
        if key == "checks":
            lines.append(f"{label}:")
            for chk in value:
                mark = "PASS" if chk["passed"] else "FAIL"
                line = f"  {chk['check']:<12} {mark}  {chk['detail']}  ({chk['seconds']}s)"
                if chk.get("witness") is not None:
                    line += f"  witness={json.dumps(chk['witness'], sort_keys=True)}"
                lines.append(line)
        elif key == "J":
            lines.append(f"{label}:")
            for j in value:
                lines.append(f"  J-class {_fmt(j['elements'])}: {j['r_classes']} R x "
                             f"{j['l_classes']} L, |H| = {j['h_size']}, "
                             f"{'regular' if j['regular'] else 'null'}")
                for row in j["eggbox"]:
                    lines.append("    " + " | ".join(_fmt(cell) for cell in row))
        elif key == "trace":
            lines.append(f"{label}:")
            for t in value:
                lines.append(f"  round {t['round']} {t['rule']}: {_fmt(t['source'])} "
                             f"-> {_fmt([t['added']])}")
        else:
            lines.append(f"{label}: {_fmt(value)}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pointlikes",
                                description="Pointlike sets for group-variety-restricted semigroups.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, variety=True):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        if variety:
            sp.add_argument("--variety", required=True,
                            help="trivial|all|ab|p:<p>|pi:<p,...>|nil|sol|verbal:<file>")

    sp = sub.add_parser("green", help="Green's relations and egg-box layout")
    sp.add_argument("file")
    common(sp, variety=False)
    sp.set_defaults(func=cmd_green)

    sp = sub.add_parser("member", help="decide membership in H-bar")
    sp.add_argument("file")
    sp.add_argument("--max-size", type=int, default=DEFAULT_CAP)
    common(sp)
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("kernel", help="H-kernel of the maximal subgroup at an idempotent")
    sp.add_argument("file")
    sp.add_argument("--idempotent", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("pointlikes", help="maximal pointlike sets")
    sp.add_argument("file")
    sp.add_argument("--strategy", choices=STRATEGIES, default="kernel")
    sp.add_argument("--pairs", action="store_true")
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--max-size", type=int, default=DEFAULT_CAP)
    common(sp)
    sp.set_defaults(func=cmd_pointlikes)

    sp = sub.add_parser("separate", help="decide separability of two regular languages")
    sp.add_argument("dfa", nargs="*", help=".dfa files (JSON)")
    sp.add_argument("--regex", action="append", default=[])
    sp.add_argument("--alphabet", default=None, help="letters, e.g. 'ab'")
    sp.add_argument("--max-size", type=int, default=DEFAULT_CAP)
    common(sp)
    sp.set_defaults(func=cmd_separate)

    sp = sub.add_parser("verify", help="build and check the blowup automaton and flow")
    sp.add_argument("file")
    sp.add_argument("--max-size", type=int, default=DEFAULT_MAX_SIZE)
    sp.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args.argv = argv
    try:
        doc, status = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=err)
        return EXIT_CAP
    except PointlikeError as exc:
        print(f"verification failed: {exc}", file=err)
        return EXIT_VERIFY
    if args.format == "json":
        out.write(json.dumps(doc, sort_keys=False) + "\n")
    else:
        out.write(render_text(doc))
    return status


def main() -> None:
    sys.exit(run())
