"""Bundled grammars with machine-checked expectations.

Each case directory holds a grammar, a queries file, and golden outputs:

    cases/<name>/grammar.tfsg
    cases/<name>/queries.txt            one query per line:
                                        NAME MODE MAXSTEPS MAXANSWERS EXPECT QUERY
    cases/<name>/expected/<NAME>.txt    exact answer-block golden
    cases/<name>/expected/<NAME>.trace.txt   trace prefix golden (optional)
    cases/<name>/expected/compile_<mode>.txt clause dump golden (optional)
    cases/<name>/expected/check.txt     condition-checker golden (optional;
                                        first line sets the bounds)
    cases/<name>/expected/unfold_<type>_<n>.txt  unfold golden (optional)

EXPECT is ANSWERS or LIMIT and must agree with the golden's summary line;
it exists so a stale golden cannot silently change what a case asserts.
"""

from __future__ import annotations

import difflib
import importlib.resources
from dataclasses import dataclass

from ..compiler import compile_grammar, dump
from ..consistency import TcBounds, implication_report, unfold_once
from ..desc import parse_grammar
from ..solver import SolverLimits, render_answers, render_trace, solve
from ..tfs import canonical_print


@dataclass(frozen=True)
class CheckResult:
    case: str
    name: str
    ok: bool
    detail: str = ""


def _cases_root():
    return importlib.resources.files(__name__) / "cases"


def case_names() -> list[str]:
    root = _cases_root()
    return sorted(entry.name for entry in root.iterdir() if entry.is_dir())


def case_dir(name: str):
    return _cases_root() / name


def _diff(expected: str, got: str) -> str:
    lines = difflib.unified_diff(
        expected.splitlines(keepends=True),
        got.splitlines(keepends=True),
        fromfile="expected",
        tofile="got",
    )
    return "".join(lines)


def _parse_queries(text: str):
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        name, mode, max_steps, max_answers, expect, query = line.split(maxsplit=5)
        yield name, mode, int(max_steps), int(max_answers), expect, query


def run_case(name: str) -> list[CheckResult]:
    base = case_dir(name)
    results: list[CheckResult] = []
    grammar_text = (base / "grammar.tfsg").read_text(encoding="utf-8")
    sig, theory = parse_grammar(grammar_text)
    grammars = {
        "lazy": compile_grammar(theory, sig, "lazy"),
        "nonlazy": compile_grammar(theory, sig, "nonlazy"),
    }
    expected_dir = base / "expected"
    have = {e.name for e in expected_dir.iterdir()} if expected_dir.is_dir() else set()

    for mode in ("lazy", "nonlazy"):
        fname = f"compile_{mode}.txt"
        if fname in have:
            golden = (expected_dir / fname).read_text(encoding="utf-8")
            got = dump(grammars[mode])
            ok = got == golden
            results.append(
                CheckResult(name, fname, ok, "" if ok else _diff(golden, got))
            )

    queries_file = base / "queries.txt"
    if queries_file.is_file():
        for qname, mode, max_steps, max_answers, expect, query in _parse_queries(
            queries_file.read_text(encoding="utf-8")
        ):
            events = []
            outcome = solve(
                grammars[mode],
                query,
                SolverLimits(max_steps=max_steps, max_answers=max_answers),
                trace=events.append,
            )
            kind = "LIMIT" if outcome.limit_hit else "ANSWERS"
            if kind != expect:
                results.append(
                    CheckResult(name, qname, False, f"expected {expect}, ran to {kind}")
                )
                continue
            got = render_answers(outcome)
            golden = (expected_dir / f"{qname}.txt").read_text(encoding="utf-8")
            ok = got == golden
            results.append(
                CheckResult(name, qname, ok, "" if ok else _diff(golden, got))
            )
            trace_name = f"{qname}.trace.txt"
            if trace_name in have:
                golden = (expected_dir / trace_name).read_text(encoding="utf-8")
                got = render_trace(events)[: len(golden)]
                ok = got == golden
                results.append(
                    CheckResult(name, trace_name, ok, "" if ok else _diff(golden, got))
                )

    if "check.txt" in have:
        golden = (expected_dir / "check.txt").read_text(encoding="utf-8")
        first, _, rest = golden.partition("\n")
        settings = dict(kv.split("=", 1) for kv in first.split() if "=" in kv)
        bounds = TcBounds(int(settings["depth"]), int(settings["steps"]))
        report = implication_report(theory, sig, bounds)
        got = report.render()
        ok = got == rest
        results.append(
            CheckResult(name, "check.txt", ok, "" if ok else _diff(rest, got))
        )

    for fname in sorted(have):
        if not fname.startswith("unfold_"):
            continue
        stem = fname[len("unfold_") : -len(".txt")]
        type_name, _, num = stem.rpartition("_")
        clause = grammars["nonlazy"].clauses[type_name][int(num) - 1]
        variants = unfold_once(clause.head, grammars["nonlazy"])
        got = "\n---\n".join(canonical_print(v) for v in variants or []) + "\n"
        golden = (expected_dir / fname).read_text(encoding="utf-8")
        ok = got == golden
        results.append(CheckResult(name, fname, ok, "" if ok else _diff(golden, got)))

    return results


def run_corpus(out=None) -> bool:
    """Run every bundled case; print one line per expectation (plus diffs
    for failures) to `out` and return overall success."""
    ok = True
    for case in case_names():
        for result in run_case(case):
            status = "PASS" if result.ok else "FAIL"
            if out is not None:
                out.write(f"{status}\t{result.case}/{result.name}\n")
                if not result.ok and result.detail:
                    out.write(result.detail)
                    if not result.detail.endswith("\n"):
                        out.write("\n")
            ok = ok and result.ok
    return ok
