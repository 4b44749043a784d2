"""The ``nabla`` command line.

Subcommands: ``check`` (exit 0 accepted, 1 rejected, 2 parse error),
``corpus`` (exit 0 iff every bundled expectation holds), ``translate``,
``taut``, ``eval`` and ``fuzz`` (exit 3 with a counterexample on a
falsified lemma).  ``NABLA_SEED`` overrides the default fuzz seed; an
explicit ``--seed`` wins over both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .derived import NotATautology, NotPropositional, expand
from .formulas import ParseError, format_formula, parse_h, parse_ltl
from .fuzz import LEMMAS, report_to_json, run_lemma
from .kernel import check, format_generic
from .scripts import ScriptError, parse_script, serialize
from .semantics import ModelFormatError, eval_h, eval_ltl, parse_model
from .translate import translate

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_PARSE = 2
EXIT_FALSIFIED = 3


def _default_seed() -> int:
    env = os.environ.get("NABLA_SEED")
    try:
        return int(env) if env else 0
    except ValueError:
        return 0


def cmd_check(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
        root = parse_script(text)
    except (OSError, ScriptError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    root = expand(root)
    if args.emit_primitive:
        print(serialize(root), end="")
        return EXIT_OK
    report = check(root)
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    elif report.accepted:
        opens = sorted(format_generic(a) for a in report.open_assumptions)
        status = "closed" if not opens else f"open assumptions: {'; '.join(opens)}"
        print(f"Accepted, {status}")
        print(f"conclusion: {format_generic(report.conclusion)}")
    else:
        print(f"Rejected at node {report.node_id}: {report.reason}")
        print(f"  {report.message}")
    return EXIT_OK if report.accepted else EXIT_REJECTED


def cmd_corpus(args) -> int:
    results = corpus_mod.run_corpus()
    ok = all(r.ok for r in results)
    if args.json:
        print(json.dumps({"ok": ok, "results": [r.to_dict() for r in results]}, sort_keys=True, indent=2))
    else:
        for r in results:
            mark = "ok  " if r.ok else "FAIL"
            print(f"{mark} [{r.kind}] {r.name}: {r.detail}")
        good = sum(1 for r in results if r.ok)
        print(f"{good}/{len(results)} expectations hold")
    return EXIT_OK if ok else EXIT_REJECTED


def cmd_translate(args) -> int:
    try:
        f = parse_ltl(args.formula)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    image = translate(f)
    if args.json:
        print(json.dumps({"source": format_formula(f), "image": format_formula(image)}, sort_keys=True))
    else:
        print(format_formula(image))
    return EXIT_OK


def cmd_taut(args) -> int:
    try:
        f = parse_ltl(args.formula)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    from .derived import derive_tautology

    try:
        d = derive_tautology(f, args.label)
    except (NotATautology, NotPropositional) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REJECTED
    report = check(d)
    assert report.accepted and not report.open_assumptions
    print(serialize(d), end="")
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        model = parse_model(Path(args.model).read_text(encoding="utf-8"))
    except (OSError, ModelFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.pos is not None:
            f = parse_ltl(args.formula)
            value = eval_ltl(model, args.pos, f)
        else:
            f = parse_h(args.formula)
            seq = tuple(int(x) for x in args.seq.split(","))
            value = eval_h(model, seq, f)
    except (ParseError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    if args.json:
        print(json.dumps({"formula": format_formula(f), "value": value}, sort_keys=True))
    else:
        print("true" if value else "false")
    return EXIT_OK


def cmd_fuzz(args) -> int:
    report = run_lemma(args.lemma, args.samples, args.seed, args.max_size, args.inject_bug)
    if args.json:
        print(report_to_json(report), end="")
    elif report.ok:
        print(f"{args.lemma}: {report.checked}/{report.samples} samples agree (seed {report.seed})")
    else:
        print(f"{args.lemma}: FALSIFIED after {report.checked} samples (seed {report.seed})")
        print(json.dumps(report.counterexample, sort_keys=True, indent=2))
    return EXIT_OK if report.ok else EXIT_FALSIFIED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nabla",
        description="Proof checker and lasso-model workbench for linear temporal logic with a history operator.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check a derivation script")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--emit-primitive", action="store_true", help="print the expanded primitive script and exit")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("corpus", help="check the bundled axiom corpus and mutation fixtures")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("translate", help="translate an until-language formula")
    p.add_argument("formula")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("taut", help="emit a checked proof of a propositional tautology")
    p.add_argument("formula")
    p.add_argument("--label", default="b")
    p.set_defaults(func=cmd_taut)

    p = sub.add_parser("eval", help="evaluate a formula on a lasso model")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pos", type=int, help="position for until-language evaluation")
    group.add_argument("--seq", help="comma-separated observation sequence for history-language evaluation")
    p.add_argument("formula")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fuzz", help="sample a semantic lemma on random models (falsifier, not a prover)")
    p.add_argument("--lemma", required=True, choices=LEMMAS)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--max-size", type=int, default=6)
    p.add_argument("--json", action="store_true")
    p.add_argument("--inject-bug", choices=["valuation-shift"], help="testing only: make one evaluation route wrong")
    p.set_defaults(func=cmd_fuzz)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
