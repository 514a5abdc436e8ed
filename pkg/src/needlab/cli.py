"""Command-line front end: ``needlab <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys

from .cbneed import eval_need
from .deep import run_deep
from .derivations import infer_principal, whnd_redexes_by_typing
from .harness import CorpusSpec, generate_corpus, run_equivalences
from .neededness import classify
from .reduction import FuelExhausted, run_strategy, trace_from_json, trace_to_json
from .residuals import residuals_step, residuals_trace
from .syntax import DELTA, I, K, OMEGA, ParseError, format_occ, parse, parse_occ, term_to_json
from .typesys import (
    RuleViolation, derivation_from_json, derivation_to_json, show_derivation, validate,
)

ZOO_MACROS = {"I": I, "K": K, "Omega": OMEGA, "Delta": DELTA}
DEFAULT_FUEL = 10_000


def _term(args, src):
    return parse(src, ZOO_MACROS if args.zoo else None)


def _occs(occs):
    return [format_occ(p) for p in occs]


def _emit(obj):
    print(json.dumps(obj, indent=2, ensure_ascii=False))


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_parse(args):
    t = _term(args, args.term)
    if args.json:
        _emit(term_to_json(t))
    else:
        print(t)
    return 0


def cmd_reduce(args):
    t = _term(args, args.term)
    res = run_strategy(t, args.strategy, args.fuel)
    status = "normalized" if res.normalized else "fuel"
    if args.trace == "json":
        _emit(trace_to_json(res.trace, status))
    else:
        print(t)
        for step in res.trace.steps:
            print(f"  ->[{format_occ(step.occurrence)}] {step.after}")
        print(status)
    return 0


def cmd_residuals(args):
    ps = [parse_occ(p) for p in args.of.split(",")]
    if args.trace:
        trace = trace_from_json(_load_json(args.trace))
        out = residuals_trace(ps, trace)
    else:
        if args.after is None or args.term is None:
            print("residuals: give --after R TERM or --trace FILE", file=sys.stderr)
            return 2
        t = _term(args, args.term)
        r = parse_occ(args.after)
        out = sorted({q for p in ps for q in residuals_step(t, p, r)})
    _emit(_occs(out))
    return 0


def cmd_needed(args):
    t = _term(args, args.term)
    r = parse_occ(args.occ)
    traces = {}
    cls = classify(t, r, args.fuel, traces)
    _emit({
        "occurrence": format_occ(r),
        **cls.flags(),
        "traces": {flag: {"status": "normalized" if res.normalized else "fuel",
                          "occurrences": _occs(res.trace.occurrences)}
                   for flag, res in traces.items()},
    })
    return 0


def cmd_typecheck(args):
    d = derivation_from_json(_load_json(args.file))
    try:
        validate(d)
    except RuleViolation as exc:
        print(f"invalid: {exc}")
        return 1
    print(f"ok: {d}  (size {d.size})")
    return 0


def cmd_infer(args):
    t = _term(args, args.term)
    d = infer_principal(t, args.fuel)
    if isinstance(d, FuelExhausted):
        print(f"fuel exhausted after {len(d.trace)} name steps; typability undetermined", file=sys.stderr)
        return 3
    if args.text:
        print(show_derivation(d))
    else:
        _emit(derivation_to_json(d))
    return 0


def cmd_toc(args):
    d = derivation_from_json(_load_json(args.file))
    try:
        validate(d)
    except RuleViolation as exc:
        print(f"invalid derivation: {exc}", file=sys.stderr)
        return 1
    _emit(_occs(sorted(d.toc)))
    return 0


def cmd_whnd_redexes(args):
    t = _term(args, args.term)
    out = whnd_redexes_by_typing(t, args.fuel)
    if isinstance(out, FuelExhausted):
        print("fuel exhausted; no weak-head normal form found", file=sys.stderr)
        return 3
    _emit(_occs(out))
    return 0


def cmd_cbneed(args):
    t = _term(args, args.term)
    res = eval_need(t, args.fuel)
    if args.json:
        _emit({
            "initial": term_to_json(t),
            "steps": [{"rule": s.rule, "occ": format_occ(s.occurrence), "after": term_to_json(s.after)}
                      for s in res.steps] if args.trace else [],
            "status": res.status,
            "result": term_to_json(res.term),
        })
        return 0
    if args.trace:
        print(t)
        for s in res.steps:
            print(f"  ->{s.rule:<3} {s.after}")
    print(f"{res.status} after {len(res.steps)} steps: {res.term}")
    return 0


def cmd_equiv_check(args):
    spec = CorpusSpec.from_json(_load_json(args.corpus)) if args.corpus else CorpusSpec()
    terms = generate_corpus(spec)
    report = run_equivalences(terms, args.fuel)
    report["corpus"] = vars(spec)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1, ensure_ascii=False)
    print(f"{report['terms']} terms, {report['mismatch_count']} with mismatches")
    for row in report["rows"]:
        if row["mismatches"]:
            print(f"  {row['term']}: {'; '.join(row['mismatches'])}")
    return 1 if report["mismatch_count"] else 0


def build_parser():
    p = argparse.ArgumentParser(prog="needlab", description="Needed reduction and intersection types laboratory.")
    p.add_argument("--zoo", action="store_true", help="expand I, K, Omega, Delta in terms")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="parse and print a term")
    s.add_argument("term")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("reduce", help="run a reduction strategy")
    s.add_argument("--strategy", choices=["name", "head", "leftmost"], default="name")
    s.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    s.add_argument("--trace", choices=["json", "text"], default="text")
    s.add_argument("term")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("residuals", help="residuals of occurrences after a step or a trace")
    s.add_argument("--of", required=True, help="comma-separated occurrences (e for the root)")
    s.add_argument("--after")
    s.add_argument("--trace", help="trace JSON file as produced by `reduce --trace json`")
    s.add_argument("term", nargs="?")
    s.set_defaults(func=cmd_residuals)

    s = sub.add_parser("needed", help="classify a redex")
    s.add_argument("--occ", required=True)
    s.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    s.add_argument("term")
    s.set_defaults(func=cmd_needed)

    s = sub.add_parser("typecheck", help="validate a derivation JSON file")
    s.add_argument("file")
    s.set_defaults(func=cmd_typecheck)

    s = sub.add_parser("infer", help="principal derivation as JSON")
    s.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    s.add_argument("--text", action="store_true", help="print the tree instead of JSON")
    s.add_argument("term")
    s.set_defaults(func=cmd_infer)

    s = sub.add_parser("toc", help="typed occurrences of a derivation JSON file")
    s.add_argument("file")
    s.set_defaults(func=cmd_toc)

    s = sub.add_parser("whnd-redexes", help="weak-head needed redexes via the principal typing")
    s.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    s.add_argument("term")
    s.set_defaults(func=cmd_whnd_redexes)

    s = sub.add_parser("cbneed", help="call-by-need evaluation")
    s.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    s.add_argument("--trace", action="store_true")
    s.add_argument("--json", action="store_true")
    s.add_argument("term")
    s.set_defaults(func=cmd_cbneed)

    s = sub.add_parser("equiv-check", help="four-way normalisation check on a corpus")
    s.add_argument("--corpus", help="CorpusSpec JSON (seed, max_size, count, closed_only, include_zoo)")
    s.add_argument("--fuel", type=int, default=2000)
    s.add_argument("--out")
    s.set_defaults(func=cmd_equiv_check)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run_deep(args.func, args)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
