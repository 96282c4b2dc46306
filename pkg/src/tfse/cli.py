"""Command-line front end.

Subcommands:

    compile GRAMMAR --mode M [--dump]         validate and compile
    query GRAMMAR QUERY --mode M [...]        solve and print answers
    check GRAMMAR [--wf] [--tc] [...]         grammar condition reports
    bench GRAMMAR QUERIES_FILE [...]          lazy vs non-lazy step table
    corpus                                    run the bundled expectation suite

Exit codes: 0 success; 1 a query found no answers with the search
exhausted, a corpus or check expectation failed; 2 usage, syntax, or
validation errors.  Output is plain text by default; set TFSE_COLOR=1 for
ANSI highlighting of summary lines.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .compiler import UnsatisfiableQuery, compile_grammar, dump
from .consistency import (
    INCONSISTENT,
    REPORT_HEADER,
    TcBounds,
    WELL_FORMED,
    check_type_consistency,
    check_well_formed,
)
from .desc import ParseError, parse_grammar
from .signature import SignatureError
from .solver import SolverLimits, render_answers, render_trace, solve
from .tfs import canonical_print

def _color_enabled() -> bool:
    return os.environ.get("TFSE_COLOR", "0") == "1"


def _highlight(text: str, good: bool) -> str:
    if not _color_enabled():
        return text
    code = "32" if good else "31"
    return f"\x1b[{code}m{text}\x1b[0m"


def _load_grammar(path: str):
    text = Path(path).read_text(encoding="utf-8")
    return parse_grammar(text)


def _cmd_compile(args) -> int:
    sig, theory = _load_grammar(args.grammar)
    grammar = compile_grammar(theory, sig, args.mode)
    for diag in grammar.diagnostics:
        print(f"warning: {diag}", file=sys.stderr)
    if args.dump:
        sys.stdout.write(dump(grammar))
    else:
        nclauses = sum(len(c) for c in grammar.clauses.values())
        print(
            f"compiled {len(grammar.order)} constrained types, "
            f"{nclauses} clauses, mode={grammar.mode}"
        )
    return 0


def _cmd_query(args) -> int:
    sig, theory = _load_grammar(args.grammar)
    grammar = compile_grammar(theory, sig, args.mode)
    limits = SolverLimits(
        max_steps=args.max_steps,
        max_answers=args.max_answers,
        max_depth=args.max_depth,
    )
    trace = None
    events = []
    if args.trace:
        trace = events.append
    try:
        outcome = solve(grammar, args.query, limits, trace=trace)
    except UnsatisfiableQuery as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.trace:
        sys.stdout.write(render_trace(events))
    text = render_answers(outcome)
    body, _, summary = text.rstrip("\n").rpartition("\n")
    if body:
        print(body)
    print(_highlight(summary, good=bool(outcome.answers)))
    if not outcome.answers and outcome.exhausted:
        return 1
    return 0


def _cmd_check(args) -> int:
    sig, theory = _load_grammar(args.grammar)
    do_wf = args.wf or not (args.wf or args.tc)
    do_tc = args.tc or not (args.wf or args.tc)
    wf = check_well_formed(theory, sig) if do_wf else {}
    tc = {}
    if do_tc:
        grammar = compile_grammar(theory, sig, "nonlazy")
        tc = check_type_consistency(
            grammar, TcBounds(max_depth=args.depth, max_steps=args.max_steps)
        )
        print(REPORT_HEADER)
    bad = False
    for t in sig.types:
        wf_status = wf[t].status if t in wf else "-"
        tc_status = tc[t].status if t in tc else "-"
        row = f"{t}\t{wf_status}\t{tc_status}"
        extra = ""
        if t in wf and wf[t].detail:
            extra = wf[t].detail
        elif t in tc and tc[t].via:
            extra = tc[t].via
        elif t in tc and tc[t].witness is not None and args.witness_dir:
            path = Path(args.witness_dir) / f"{t}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(canonical_print(tc[t].witness) + "\n", encoding="utf-8")
            extra = str(path)
        if extra:
            row = f"{row}\t{extra}"
        print(row)
        if wf_status == WELL_FORMED and tc_status == INCONSISTENT:
            bad = True
            print(f"VIOLATION\t{t}\twell-formed type checked inconsistent")
    return 1 if bad else 0


def _cmd_bench(args) -> int:
    sig, theory = _load_grammar(args.grammar)
    lazy = compile_grammar(theory, sig, "lazy")
    nonlazy = compile_grammar(theory, sig, "nonlazy")
    limits = SolverLimits(max_steps=args.max_steps, max_answers=args.max_answers)
    print("query\tlazy_steps\tnonlazy_steps\tratio")
    for raw in Path(args.queries).read_text(encoding="utf-8").splitlines():
        query = raw.strip()
        if not query or query.startswith("%"):
            continue
        lazy_out = solve(lazy, query, limits)
        nonlazy_out = solve(nonlazy, query, limits)
        if nonlazy_out.steps:
            ratio = f"{lazy_out.steps / nonlazy_out.steps:.3f}"
        else:
            ratio = "1.000"
        print(f"{query}\t{lazy_out.steps}\t{nonlazy_out.steps}\t{ratio}")
    return 0


def _cmd_corpus(args) -> int:
    ok = corpus_mod.run_corpus(out=sys.stdout)
    print(_highlight("corpus: all expectations met" if ok else "corpus: failures", ok))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfse",
        description="Typed-feature-structure constraint engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="validate and compile a grammar")
    p.add_argument("grammar")
    p.add_argument("--mode", choices=("lazy", "nonlazy"), default="lazy")
    p.add_argument("--dump", action="store_true", help="print marked clauses")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("query", help="solve a query")
    p.add_argument("grammar")
    p.add_argument("query")
    p.add_argument("--mode", choices=("lazy", "nonlazy"), default="lazy")
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("--max-answers", type=int, default=10)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("check", help="well-formedness and type consistency")
    p.add_argument("grammar")
    p.add_argument("--wf", action="store_true", help="well-formedness only")
    p.add_argument("--tc", action="store_true", help="type consistency only")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--max-steps", type=int, default=200_000)
    p.add_argument("--witness-dir", default=None)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("bench", help="compare step counts between modes")
    p.add_argument("grammar")
    p.add_argument("queries")
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--max-answers", type=int, default=10)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("corpus", help="run the bundled expectation suite")
    p.set_defaults(func=_cmd_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SignatureError) as exc:
        diags = getattr(exc, "diagnostics", [])
        for diag in diags:
            print(f"error: {diag}", file=sys.stderr)
        if not diags:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
