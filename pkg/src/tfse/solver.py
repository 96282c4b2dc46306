"""Backtracking resolution over compiled clauses.

The machine keeps one working feature structure per query disjunct and a
goal agenda of node addresses.  Selection is depth-first and
left-to-right: resolving a goal unifies a fresh copy of a clause head at
the goal node and pushes the clause's own goals (translated into the
working graph) onto the front of the agenda.  Alternatives at a goal are
the grammar's dispatch plan for the node's current type — every clause of
every minimal compatible constrained type, in declaration order, then any
free branches.  Choice points record a trail mark and the remaining
agenda, so chronological backtracking restores the working structure
exactly.

A step is one clause-head unification attempt, successful or not; free
branches and trivially succeeding goals cost nothing.  That makes step
counts comparable between the lazy and non-lazy compilations of the same
grammar, which share this machine unchanged.  Trace events get their own
strictly increasing indices, independent of the step count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import tfs
from .compiler import (
    ClauseCall,
    CompiledGrammar,
    FreeNarrow,
    QueryPlan,
    compile_query,
)
from .desc import Description
from .tfs import (
    FeatureStructure,
    Node,
    Trail,
    UnificationFailure,
    deref,
    structure_depth,
)

APPLY = "APPLY"
CHOOSE = "CHOOSE"
UNIFY_OK = "UNIFY_OK"
FAIL = "FAIL"
BACKTRACK = "BACKTRACK"
ANSWER = "ANSWER"
LIMIT = "LIMIT"


@dataclass(frozen=True)
class SolverLimits:
    max_steps: int = 100_000
    max_answers: int = 10
    max_depth: int | None = None

    def __post_init__(self) -> None:
        if self.max_steps < 1 or self.max_answers < 1:
            raise ValueError("limits must be at least 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


@dataclass(frozen=True)
class TraceEvent:
    index: int
    kind: str
    path: str
    type: str
    disjunct: str

    def line(self) -> str:
        return f"{self.index}\t{self.kind}\t{self.path}\t{self.type}\t{self.disjunct}"


@dataclass(frozen=True)
class Answer:
    fs: FeatureStructure
    steps: int
    choices: tuple[tuple[str, str, int], ...]  # (path, target, alternative index)


@dataclass
class SolveOutcome:
    answers: list[Answer]
    exhausted: bool
    limit_hit: bool
    steps: int


_EXHAUSTED = object()
_LIMIT = object()


@dataclass
class _ChoicePoint:
    node: Node
    path: str
    alts: tuple
    idx: int
    rest: tuple | None  # cons list of remaining goals
    mark: int
    choices_len: int


class Session:
    """One resolution run.  Use :func:`solve` unless you need the knobs
    (depth limit, answer hook) the consistency checker relies on."""

    def __init__(
        self,
        grammar: CompiledGrammar,
        plans: list[QueryPlan],
        limits: SolverLimits,
        on_event=None,
        depth_limit: int | None = None,
        on_answer=None,
    ):
        self.grammar = grammar
        self.plans = plans
        self.limits = limits
        self.on_event = on_event
        self.depth_limit = depth_limit if depth_limit is not None else limits.max_depth
        self.on_answer = on_answer
        self.trail = Trail()
        self.steps = 0
        self.event_index = 0
        self.pruned = False
        self.answers: list[Answer] = []
        self._choices: list[tuple[str, str, int]] = []
        self._stopped = False

    # -- events -------------------------------------------------------------

    def _emit(self, kind: str, path: str, type_: str, disjunct: str) -> None:
        if self.on_event is not None:
            self.event_index += 1
            self.on_event(TraceEvent(self.event_index, kind, path, type_, disjunct))
        else:
            self.event_index += 1

    # -- main loop ----------------------------------------------------------

    def run(self) -> SolveOutcome:
        limit_hit = False
        stopped_early = False
        for plan in self.plans:
            status = self._run_one(plan)
            if status is _LIMIT:
                limit_hit = True
                break
            if status is not _EXHAUSTED:
                stopped_early = True
                break
        exhausted = not limit_hit and not stopped_early
        return SolveOutcome(self.answers, exhausted, limit_hit, self.steps)

    def _run_one(self, plan: QueryPlan):
        fs = plan.fs
        goals = None
        for node, path in zip(reversed(plan.goals), reversed(plan.goal_paths)):
            goals = ((node, path), goals)
        cps: list[_ChoicePoint] = []
        self._choices = []
        while True:
            if goals is None:
                self._emit(ANSWER, "-", "-", "-")
                self.answers.append(
                    Answer(fs.copy(), self.steps, tuple(self._choices))
                )
                if self.on_answer is not None and self.on_answer(self.answers[-1]):
                    self._stopped = True
                    return None
                if len(self.answers) >= self.limits.max_answers:
                    return None
                nxt = self._backtrack(fs, cps)
                if nxt is _EXHAUSTED:
                    return _EXHAUSTED
                if nxt is _LIMIT:
                    return _LIMIT
                goals = nxt
                continue
            (node, path), rest = goals
            node = deref(node)
            self._emit(APPLY, path, node.type, "-")
            alts = self.grammar.plan(node.type)
            if not alts:
                if not self.grammar.needs_proof(node.type):
                    goals = rest
                    continue
                # Compatible with a constrained type but nothing to try:
                # the constraint is unsatisfiable, so this branch dies.
                nxt = self._backtrack(fs, cps)
                if nxt is _EXHAUSTED:
                    return _EXHAUSTED
                if nxt is _LIMIT:
                    return _LIMIT
                goals = nxt
                continue
            cp = _ChoicePoint(
                node, path, alts, 0, rest, self.trail.mark(), len(self._choices)
            )
            cps.append(cp)
            nxt = self._try_alternatives(fs, cp)
            if nxt is _LIMIT:
                return _LIMIT
            if nxt is _EXHAUSTED:
                cps.pop()
                nxt = self._backtrack(fs, cps)
                if nxt is _EXHAUSTED:
                    return _EXHAUSTED
                if nxt is _LIMIT:
                    return _LIMIT
            goals = nxt

    def _backtrack(self, fs: FeatureStructure, cps: list[_ChoicePoint]):
        while cps:
            cp = cps[-1]
            self.trail.undo_to(cp.mark)
            del self._choices[cp.choices_len :]
            self._emit(BACKTRACK, cp.path, "-", "-")
            nxt = self._try_alternatives(fs, cp)
            if nxt is _LIMIT:
                return _LIMIT
            if nxt is _EXHAUSTED:
                cps.pop()
                continue
            return nxt
        return _EXHAUSTED

    def _try_alternatives(self, fs: FeatureStructure, cp: _ChoicePoint):
        total = len(cp.alts)
        while cp.idx < total:
            alt = cp.alts[cp.idx]
            label = f"{cp.idx + 1}/{total}"
            cp.idx += 1
            node = deref(cp.node)
            if isinstance(alt, ClauseCall):
                if self.steps >= self.limits.max_steps:
                    self._emit(LIMIT, cp.path, "-", "-")
                    return _LIMIT
                self.steps += 1
                self._emit(CHOOSE, cp.path, alt.ctype, label)
                head_copy, mapping = alt.clause.head.copy_with_map()
                ok = tfs.unify_nodes(fs, node, head_copy.root, self.trail)
                if ok is None:
                    self._emit(FAIL, cp.path, alt.ctype, label)
                    continue
                if self.depth_limit is not None and structure_depth(fs) > self.depth_limit:
                    self.pruned = True
                    self.trail.undo_to(cp.mark)
                    self._emit(FAIL, cp.path, alt.ctype, label)
                    continue
                self._emit(UNIFY_OK, cp.path, alt.ctype, label)
                self._choices.append((cp.path, alt.ctype, alt.disjunct))
                goals = cp.rest
                new = list(zip(alt.clause.goals, alt.clause.goal_paths))
                for proto, rel in reversed(new):
                    translated = mapping[id(deref(proto))]
                    abs_path = rel if cp.path == "." else f"{cp.path}:{rel}"
                    goals = ((translated, abs_path), goals)
                return goals
            else:  # FreeNarrow
                self._emit(CHOOSE, cp.path, alt.target, label)
                met = self.grammar.signature.glb(node.type, alt.target)
                if met is None:
                    self._emit(FAIL, cp.path, alt.target, label)
                    continue
                mark = self.trail.mark()
                if met != node.type:
                    self.trail.push_type(node, node.type)
                    node.type = met
                    try:
                        tfs._enforce([node], self.grammar.signature, self.trail)
                    except UnificationFailure:
                        self.trail.undo_to(mark)
                        self._emit(FAIL, cp.path, alt.target, label)
                        continue
                self._emit(UNIFY_OK, cp.path, alt.target, label)
                self._choices.append((cp.path, alt.target, -1))
                return cp.rest
        return _EXHAUSTED


def solve(
    grammar: CompiledGrammar,
    query: str | Description,
    limits: SolverLimits | None = None,
    trace=None,
) -> SolveOutcome:
    """Resolve a query against a compiled grammar.

    `trace`, when given, is called with each :class:`TraceEvent` as it
    happens.  Answers come back in discovery order; the outcome records
    whether the search space was exhausted or a limit cut it short.
    """
    limits = limits or SolverLimits()
    plans = compile_query(query, grammar)
    return Session(grammar, plans, limits, on_event=trace).run()


def dispatch(s: str, grammar: CompiledGrammar):
    """The call targets for a goal of type s: (constrained type, clauses)
    pairs in declaration order, then (narrow target, None) free branches."""
    out: list[tuple[str, tuple | None]] = []
    seen: list[str] = []
    for alt in grammar.plan(s):
        if isinstance(alt, ClauseCall):
            if alt.ctype not in seen:
                seen.append(alt.ctype)
                out.append((alt.ctype, grammar.clauses[alt.ctype]))
        else:
            out.append((alt.target, None))
    return out


@dataclass(frozen=True)
class CoverageReport:
    """For each answer on one side, the indices of answers on the other
    side that it subsumes."""

    a_to_b: tuple[tuple[int, ...], ...]
    b_to_a: tuple[tuple[int, ...], ...]

    @property
    def every_a_covers_some_b(self) -> bool:
        return all(self.a_to_b) if self.a_to_b else True

    @property
    def every_b_covered_by_some_a(self) -> bool:
        covered = {i for row in self.a_to_b for i in row}
        return covered >= set(range(len(self.b_to_a)))


def answers_up_to_subsumption(a: list[Answer], b: list[Answer]) -> CoverageReport:
    """Subsumption cross-table between two answer lists (a as the general
    side): used to compare lazy against non-lazy runs."""
    a_to_b = tuple(
        tuple(j for j, bi in enumerate(b) if tfs.subsumes_fs(ai.fs, bi.fs))
        for ai in a
    )
    b_to_a = tuple(
        tuple(i for i, ai in enumerate(a) if tfs.subsumes_fs(bi.fs, ai.fs))
        for bi in b
    )
    return CoverageReport(a_to_b, b_to_a)


# ---------------------------------------------------------------------------
# Output rendering (the formats golden tests pin down)


def render_answers(outcome: SolveOutcome) -> str:
    """Answer blocks in canonical form separated by ---, then a summary line."""
    parts: list[str] = []
    for ans in outcome.answers:
        parts.append(tfs.canonical_print(ans.fs))
        parts.append("---")
    status = "limit" if outcome.limit_hit else "exhausted"
    parts.append(
        f"answers={len(outcome.answers)}, steps={outcome.steps}, outcome={status}"
    )
    return "\n".join(parts) + "\n"


def render_trace(events: list[TraceEvent]) -> str:
    return "".join(e.line() + "\n" for e in events)
