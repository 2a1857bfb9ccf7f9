"""Command-line entry point: ``kgtab prove|eval|translate|solve|parse``.

Exit codes: 0 valid / satisfiable / ok, 1 invalid / unsatisfiable,
2 usage or input errors, 3 resource limits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import formula as F
from . import translate as T
from .constraints import (ConstraintSyntaxError, ResourceLimit, parse_constraints, solve,
                          translate_branch, var_name)
from .formula import FormulaSyntaxError, IllegalConnective, Logic
from .kripke import FModel, FormatError, UnknownWorld, eval_fmodel, eval_standard, fmt, load_model, save_model
from .tableau import SearchConfig, search

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3
ENV_MAX_BRANCHES = "KGTAB_MAX_BRANCHES"


class UsageError(Exception):
    pass


def _logic(text):
    try:
        return Logic.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _parse_formula(text, logic=None):
    f = F.parse(text)
    if logic is not None:
        F.check_language(f, logic)
    return f


def _emit(args, payload, text):
    print(json.dumps(payload, indent=2) if args.json else text)


# ---------------------------------------------------------------- prove

def prove_one(f, logic, max_branches, countermodel=None, trace=None):
    """Decide one formula; returns (status, payload dict)."""
    cfg = SearchConfig(max_branches=max_branches, keep_trace=trace is not None)
    start = time.perf_counter()
    try:
        results = search(f, logic, cfg)
    except ResourceLimit as e:
        return "LIMIT", {"status": "LIMIT", "reason": str(e),
                         "seconds": round(time.perf_counter() - start, 3)}
    elapsed = time.perf_counter() - start
    valid = all(r.closed for r in results)
    payload = {
        "status": "VALID" if valid else "INVALID",
        "seconds": round(elapsed, 3),
        "expansions": sum(r.expansions for r in results),
        "branches": sum(r.branches for r in results),
        "tableaux": [{"index": r.index, "closed": r.closed, "expansions": r.expansions,
                      "max_world_depth": r.max_depth} for r in results],
    }
    if trace is not None:
        rows = [{"tableau": r.index, "branch": bid, "rule": rule, "principal": p,
                 "children": [{"id": c, "open": alive} for c, alive in kids]}
                for r in results for bid, rule, p, kids in r.trace]
        Path(trace).write_text(json.dumps(rows, indent=1))
        payload["trace"] = str(trace)
    if not valid:
        rep = results[-1].report
        payload["achieved"] = {"pos": fmt(rep.achieved.pos), "negv": fmt(rep.achieved.negv)}
        payload["root"] = rep.root
        if countermodel is not None:
            Path(countermodel).write_bytes(save_model(
                rep.model, root=rep.root, query=F.to_text(f), logic=logic.value,
                achieved={"pos": fmt(rep.achieved.pos), "negv": fmt(rep.achieved.negv)}))
            payload["countermodel"] = str(countermodel)
    return payload["status"], payload


def _read_corpus(path):
    items = []
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        expected, sep, text = line.partition(":")
        if not sep or expected.strip() not in ("VALID", "INVALID"):
            raise UsageError(f"{path}:{n}: expected 'VALID: formula' or 'INVALID: formula'")
        items.append((expected.strip(), text.strip()))
    return items


def cmd_prove(args):
    if args.corpus:
        rows, mismatches, limits = [], 0, 0
        for expected, text in _read_corpus(args.corpus):
            status, payload = prove_one(_parse_formula(text, args.logic), args.logic,
                                        args.max_branches)
            ok = status == expected
            mismatches += status in ("VALID", "INVALID") and not ok
            limits += status == "LIMIT"
            rows.append({"formula": text, "expected": expected, **payload})
            if not args.json:
                print(f"{'ok ' if ok else 'BAD'} {status:7} {text}")
        if args.json:
            print(json.dumps(rows, indent=2))
        return EXIT_NO if mismatches else EXIT_LIMIT if limits else EXIT_OK
    if args.formula is None:
        raise UsageError("prove needs a formula or --corpus")
    f = _parse_formula(args.formula, args.logic)
    status, payload = prove_one(f, args.logic, args.max_branches,
                                countermodel=args.countermodel, trace=args.trace)
    lines = [status]
    if status == "INVALID":
        lines.append(f"countermodel at {payload['root']}: pos {payload['achieved']['pos']}, "
                     f"negv {payload['achieved']['negv']} -> {payload['countermodel']}")
    elif status == "LIMIT":
        lines.append(payload["reason"])
    if status != "LIMIT":
        lines.append(f"{payload['expansions']} expansions, {payload['seconds']} s")
    _emit(args, payload, "\n".join(lines))
    return {"VALID": EXIT_OK, "INVALID": EXIT_NO, "LIMIT": EXIT_LIMIT}[status]


# ---------------------------------------------------------------- eval

def cmd_eval(args):
    model = load_model(Path(args.model).read_bytes())
    if args.fmodel and not isinstance(model, FModel):
        raise UsageError("--fmodel needs a model file with T1/T2 sets")
    f = _parse_formula(args.formula, args.logic)
    worlds = model.worlds if args.all else [args.world or model.worlds[0]]
    evaluate = eval_fmodel if args.fmodel else eval_standard
    out = {}
    for w in worlds:
        v = evaluate(model, f, w, args.logic)
        out[w] = {"pos": fmt(v.pos), "negv": fmt(v.negv)}
    _emit(args, out, "\n".join(f"{w}: pos {v['pos']}, negv {v['negv']}" for w, v in out.items()))
    return EXIT_OK


# ---------------------------------------------------------------- translate

_DIRECTIONS = {
    "oplus": (Logic.KGBL, T.oplus),
    "ominus": (Logic.KGBL, T.ominus),
    "join": (Logic.KGINV2, T.join),
    "embed-bl": (Logic.KGINV2, T.embed_inv_to_bl),
    "embed-inv": (Logic.KGBL, T.embed_bl_to_inv),
}


def cmd_translate(args):
    source, fn = _DIRECTIONS[args.dir]
    f = _parse_formula(args.formula, source)
    out = F.to_text(fn(f))
    _emit(args, {"input": args.formula, "dir": args.dir, "output": out}, out)
    return EXIT_OK


# ---------------------------------------------------------------- solve

def cmd_solve(args):
    cs = parse_constraints(Path(args.constraints).read_text())
    system = translate_branch(cs)
    wit = solve(system)
    payload = {"status": "SAT" if wit else "UNSAT"}
    lines = [payload["status"]]
    if wit:
        payload["witness"] = {var_name(k): fmt(x) for k, x in wit.values.items()}
        lines += [f"  {k} = {x}" for k, x in payload["witness"].items()]
    if args.explain:
        payload["system"] = system.explain()
        lines += ["system:", system.explain()]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if wit else EXIT_NO


# ---------------------------------------------------------------- parse

def cmd_parse(args):
    f = _parse_formula(args.formula, args.logic)
    payload = {
        "formula": F.to_text(f),
        "size": F.size(f),
        "modal_depth": F.modal_depth(f),
        "props": sorted(F.props(f)),
        "core": F.to_text(F.desugar(f, args.logic)),
    }
    _emit(args, payload, "\n".join(f"{k}: {v}" for k, v in payload.items()))
    return EXIT_OK


# ---------------------------------------------------------------- main

def _default_branches():
    raw = os.environ.get(ENV_MAX_BRANCHES, "100000")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{ENV_MAX_BRANCHES}={raw!r} is not an integer") from None


def build_parser():
    p = argparse.ArgumentParser(prog="kgtab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, default_logic):
        sp.add_argument("--logic", type=_logic, default=Logic.parse(default_logic),
                        help="kginv, kginv2 or kgbl")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("prove", help="decide validity")
    sp.add_argument("formula", nargs="?")
    common(sp, "kginv")
    sp.add_argument("--max-branches", type=int, default=None,
                    help=f"rule-application budget (env {ENV_MAX_BRANCHES})")
    sp.add_argument("--trace", help="write the proof trace (JSON) here")
    sp.add_argument("--countermodel", default="countermodel.json",
                    help="where to write the countermodel on INVALID")
    sp.add_argument("--corpus", help="file of 'VALID: formula' / 'INVALID: formula' lines")
    sp.set_defaults(run=cmd_prove)

    sp = sub.add_parser("eval", help="evaluate on a model file")
    sp.add_argument("formula")
    common(sp, "kgbl")
    sp.add_argument("--model", required=True)
    sp.add_argument("--world")
    sp.add_argument("--all", action="store_true", help="every world")
    sp.add_argument("--fmodel", action="store_true", help="snap modal values into T sets")
    sp.set_defaults(run=cmd_eval)

    sp = sub.add_parser("translate", help="translate between languages")
    sp.add_argument("formula")
    sp.add_argument("--dir", required=True, choices=sorted(_DIRECTIONS))
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(run=cmd_translate)

    sp = sub.add_parser("solve", help="closure test for a constraint file")
    sp.add_argument("--constraints", required=True)
    sp.add_argument("--explain", action="store_true", help="dump the inequality system")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(run=cmd_solve)

    sp = sub.add_parser("parse", help="parse and normalise a formula")
    sp.add_argument("formula")
    common(sp, "kgbl")
    sp.set_defaults(run=cmd_parse)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        if getattr(args, "max_branches", 0) is None:
            args.max_branches = _default_branches()
        return args.run(args)
    except (FormulaSyntaxError, IllegalConnective, FormatError, ConstraintSyntaxError,
            UsageError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownWorld as e:
        print(f"error: unknown world {e.args[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimit as e:
        print(f"limit: {e}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
