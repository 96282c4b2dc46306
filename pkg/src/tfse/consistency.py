"""Grammar condition checkers: well-formedness and type consistency.

Two different guarantees make lazy evaluation trustworthy, and this module
implements a checker for each.

Well-formedness is syntactic and decidable: unfolding the constraint of
every eligible node of a clause head exactly once must add nothing that
the head plus the theory did not already entail.  "Entail" matters: a
recursive constraint unfolds into a syntactically bigger structure whose
extra material is just another instance of the same constraint, and that
counts as adding nothing.  Operationally, each unfold result must be
subsumed-into some one-step entailed closure of an original disjunct:
closures unfold only constraints whose antecedent type subsumes the node
(those hold of every object at that node), while the unfold itself also
branches over constrained types merely compatible with the node
(closed-world case splits).  Information introduced by a case split and
not recoverable by entailment is exactly what breaks well-formedness.

Type consistency is semantic and undecidable in general, so the checker
here is a bounded search for finite witnesses: a type is CONSISTENT when
some non-lazy derivation of the bare-type query yields an answer whose
nodes all narrow to species, INCONSISTENT only when the whole search
space closes without any bound being the cause, and UNKNOWN otherwise.
Inconsistency propagates through appropriateness: a type whose feature is
restricted to an inconsistent value type cannot have objects either.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import tfs
from .compiler import ClauseCall, CompiledGrammar, compile_grammar, compile_query
from .desc import Theory, TypeLit
from .signature import Signature
from .solver import Session, SolverLimits
from .tfs import FeatureStructure, Node, Trail, UnificationFailure, deref

WELL_FORMED = "WELL_FORMED"
NOT_WELL_FORMED = "NOT_WELL_FORMED"
CONSISTENT = "CONSISTENT"
INCONSISTENT = "INCONSISTENT"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class WfVerdict:
    status: str
    detail: str = ""


@dataclass(frozen=True)
class TcVerdict:
    status: str
    witness: FeatureStructure | None = None
    via: str = ""


@dataclass(frozen=True)
class TcBounds:
    max_depth: int = 6
    max_steps: int = 200_000


# ---------------------------------------------------------------------------
# Unfolding


def _unfold_variants(
    head: FeatureStructure,
    grammar: CompiledGrammar,
    entailed_only: bool,
) -> list[FeatureStructure] | None:
    """All ways of unifying one constraint application into every eligible
    non-root node of `head`, as fresh copies.

    With `entailed_only` the constraint of a type t is applied at a node
    only when t subsumes the node's type; otherwise every minimal
    compatible constrained type is a branch.  Returns None when some node
    has branches but all of them fail (the head is unsatisfiable under
    the theory)."""
    sig = grammar.signature
    work = head.copy()
    root = deref(work.root)

    candidates: list[tuple[Node, list[ClauseCall]]] = []
    seen: set[int] = set()

    def collect(n: Node) -> None:
        n = deref(n)
        if id(n) in seen:
            return
        seen.add(id(n))
        if n is not root:
            if entailed_only:
                above = [t for t in grammar.order if sig.subsumes(t, n.type)]
                if any(not grammar.clauses[t] for t in above):
                    candidates.append((n, []))  # a holding constraint with no disjuncts
                elif above:
                    candidates.append(
                        (
                            n,
                            [
                                ClauseCall(t, cl, i)
                                for t in above
                                for i, cl in enumerate(grammar.clauses[t])
                            ],
                        )
                    )
            else:
                if any(sig.glb(n.type, t) is not None for t in grammar.order):
                    alts = [
                        alt
                        for alt in grammar.plan(n.type)
                        if isinstance(alt, ClauseCall)
                    ]
                    candidates.append((n, alts))
        for feat in sorted(n.arcs):
            collect(n.arcs[feat])

    collect(root)

    results: list[FeatureStructure] = []
    trail = Trail()

    def rec(i: int) -> None:
        if i == len(candidates):
            results.append(work.copy())
            return
        node, alts = candidates[i]
        if not alts:
            return  # dead node: every branch of an empty constraint fails
        for alt in alts:
            mark = trail.mark()
            copy, _ = alt.clause.head.copy_with_map()
            ok = tfs.unify_nodes(work, deref(node), copy.root, trail)
            if ok is not None:
                rec(i + 1)
            trail.undo_to(mark)

    rec(0)
    if candidates and not results:
        return None
    return results


def unfold_once(
    head: FeatureStructure, grammar: CompiledGrammar
) -> list[FeatureStructure] | None:
    """Apply, to each non-root node compatible with a constrained type, one
    resolution step of that type's constraint; branch over the disjuncts.
    Returns the surviving variants in choice order, or None if every
    combination fails."""
    return _unfold_variants(head, grammar, entailed_only=False)


def _entailed_closures(
    head: FeatureStructure, grammar: CompiledGrammar
) -> list[FeatureStructure]:
    out = _unfold_variants(head, grammar, entailed_only=True)
    return out if out else []


def check_well_formed(theory: Theory, sig: Signature) -> dict[str, WfVerdict]:
    """Per constrained type: does one round of unfolding add information
    beyond what the theory already entails at each disjunct?"""
    grammar = compile_grammar(theory, sig, "nonlazy")
    verdicts: dict[str, WfVerdict] = {}
    for t in grammar.order:
        clauses = grammar.clauses[t]
        if not clauses:
            verdicts[t] = WfVerdict(
                NOT_WELL_FORMED, "constraint has no satisfiable disjunct"
            )
            continue
        closures: list[FeatureStructure] = []
        for cl in clauses:
            closures.extend(_entailed_closures(cl.head, grammar))
        verdict = WfVerdict(WELL_FORMED)
        for cl in clauses:
            unfolded = unfold_once(cl.head, grammar)
            if unfolded is None:
                verdict = WfVerdict(
                    NOT_WELL_FORMED, f"disjunct {cl.disjunct + 1} dies under unfolding"
                )
                break
            bad = next(
                (
                    r
                    for r in unfolded
                    if not any(tfs.subsumes_fs(r, c) for c in closures)
                ),
                None,
            )
            if bad is not None:
                verdict = WfVerdict(
                    NOT_WELL_FORMED,
                    f"unfolding disjunct {cl.disjunct + 1} adds information",
                )
                break
        verdicts[t] = verdict
    return verdicts


# ---------------------------------------------------------------------------
# Type consistency


def _narrow_to_species(fs: FeatureStructure, sig: Signature) -> FeatureStructure | None:
    """First species assignment of all nodes that stays well-typed, as a
    fresh copy; None if every assignment clashes."""
    work = fs.copy()
    trail = Trail()
    nodes = work.nodes()

    def rec(i: int) -> bool:
        if i == len(nodes):
            return True
        n = deref(nodes[i])
        if sig.is_species(n.type):
            return rec(i + 1)
        for sp in sig.species_below(n.type):
            mark = trail.mark()
            trail.push_type(n, n.type)
            n.type = sp
            try:
                tfs._enforce([n], sig, trail)
            except UnificationFailure:
                trail.undo_to(mark)
                continue
            if rec(i + 1):
                return True
            trail.undo_to(mark)
        return False

    if rec(0):
        return work.copy()
    return None


def _search_witness(
    t: str, grammar: CompiledGrammar, bounds: TcBounds
) -> TcVerdict:
    query = TypeLit(t)
    for depth in range(1, bounds.max_depth + 1):
        plans = compile_query(query, grammar)
        found: list[FeatureStructure] = []

        def accept(answer) -> bool:
            witness = _narrow_to_species(answer.fs, grammar.signature)
            if witness is not None:
                found.append(witness)
                return True
            return False

        session = Session(
            grammar,
            plans,
            SolverLimits(max_steps=bounds.max_steps, max_answers=1_000_000),
            depth_limit=depth,
            on_answer=accept,
        )
        outcome = session.run()
        if found:
            return TcVerdict(CONSISTENT, witness=found[0])
        if outcome.limit_hit:
            return TcVerdict(UNKNOWN, via=f"step budget {bounds.max_steps} exceeded")
        if outcome.exhausted and not session.pruned:
            return TcVerdict(INCONSISTENT)
    return TcVerdict(UNKNOWN, via=f"no witness within depth {bounds.max_depth}")


def check_type_consistency(
    grammar: CompiledGrammar, bounds: TcBounds | None = None
) -> dict[str, TcVerdict]:
    """Bounded witness search per type over a non-lazy grammar, then
    inconsistency propagation along appropriateness restrictions."""
    if grammar.mode != "nonlazy":
        raise ValueError("type consistency is checked against the non-lazy compilation")
    bounds = bounds or TcBounds()
    sig = grammar.signature
    verdicts = {t: _search_witness(t, grammar, bounds) for t in sig.types}

    changed = True
    while changed:
        changed = False
        for t in sig.types:
            if verdicts[t].status == INCONSISTENT:
                continue
            for feat, restr in sig.approp(t).items():
                if verdicts[restr].status == INCONSISTENT:
                    verdicts[t] = TcVerdict(
                        INCONSISTENT, via=f"appropriateness {feat}:{restr}"
                    )
                    changed = True
                    break
    return verdicts


@dataclass(frozen=True)
class ImplicationReport:
    header: str
    rows: tuple[tuple[str, str, str], ...]  # (type, wf status or -, tc status)
    violations: tuple[str, ...]  # WELL_FORMED yet INCONSISTENT: engine bug

    def render(self) -> str:
        lines = [self.header]
        for t, wf, tc in self.rows:
            lines.append(f"{t}\t{wf}\t{tc}")
        for v in self.violations:
            lines.append(f"VIOLATION\t{v}\twell-formed type checked inconsistent")
        return "\n".join(lines) + "\n"


REPORT_HEADER = (
    "% type consistency below is a bounded finite-witness approximation; "
    "UNKNOWN means the bounds cut the search off"
)


def implication_report(
    theory: Theory, sig: Signature, bounds: TcBounds | None = None
) -> ImplicationReport:
    """Tabulate both verdicts per type; a type both well-formed and
    inconsistent would contradict the implication between the conditions
    and is flagged as an engine bug."""
    wf = check_well_formed(theory, sig)
    grammar = compile_grammar(theory, sig, "nonlazy")
    tc = check_type_consistency(grammar, bounds)
    rows = []
    violations = []
    for t in sig.types:
        wf_status = wf[t].status if t in wf else "-"
        tc_status = tc[t].status
        rows.append((t, wf_status, tc_status))
        if wf_status == WELL_FORMED and tc_status == INCONSISTENT:
            violations.append(t)
    return ImplicationReport(REPORT_HEADER, tuple(rows), tuple(violations))
