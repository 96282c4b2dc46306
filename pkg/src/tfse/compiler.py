"""Compiling a theory into goal-marked clauses.

Each constrained type contributes one clause per disjunct of its
(inheritance-closed) constraint.  A clause is the disjunct's feature
structure together with an ordered set of goal nodes: the positions the
solver must re-check at run time.  Which nodes get marked is the whole
difference between the two modes:

  * non-lazy: every non-root node whose type has a defined meet with some
    constrained type is a goal;
  * lazy: additionally the node must carry at least one feature —
    featureless nodes are never marked, because on a type-consistent
    grammar an object of that bare type is known to exist.

Queries are compiled the same way except that their root participates in
marking too; clause heads embody their own constraint, so their roots are
exempt.

Dispatch plans are precomputed per type: the minimal constrained types a
goal of that type must branch over, followed by free branches that narrow
to the most general refinements compatible with no constrained type
(closed-world: species not below any constrained type need no proof).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import desc as desc_mod
from .desc import Conj, Constraint, Description, Theory, TypeLit, to_dnf
from .signature import Diagnostic, Signature
from .tfs import FeatureStructure, Node, deref, canonical_print

MODES = ("lazy", "nonlazy")


@dataclass(frozen=True)
class Clause:
    ctype: str
    disjunct: int  # position among the surviving disjuncts, 0-based
    head: FeatureStructure
    goals: tuple[Node, ...]
    goal_paths: tuple[str, ...]


@dataclass(frozen=True)
class ClauseCall:
    ctype: str
    clause: Clause
    disjunct: int


@dataclass(frozen=True)
class FreeNarrow:
    target: str


DispatchAlt = ClauseCall | FreeNarrow


class CompiledGrammar:
    """Immutable result of compilation; shareable between solver sessions."""

    def __init__(
        self,
        signature: Signature,
        mode: str,
        order: tuple[str, ...],
        clauses: dict[str, tuple[Clause, ...]],
        plans: dict[str, tuple[DispatchAlt, ...]],
        diagnostics: tuple[Diagnostic, ...],
    ):
        self.signature = signature
        self.mode = mode
        self.order = order
        self.clauses = clauses
        self._plans = plans
        self.diagnostics = diagnostics
        self._checked = frozenset(
            s
            for s in signature.types
            if any(signature.glb(s, t) is not None for t in order)
        )

    @property
    def constrained_types(self) -> tuple[str, ...]:
        return self.order

    def plan(self, type_name: str) -> tuple[DispatchAlt, ...]:
        return self._plans[type_name]

    def needs_proof(self, type_name: str) -> bool:
        """True iff the type meets some constrained type, so a goal on it
        must run its dispatch plan; an empty plan then means failure, not
        trivial success."""
        return type_name in self._checked


def inherit_constraints(theory: Theory, sig: Signature) -> Theory:
    """Conjoin each constrained type's body with the bodies of all its
    constrained proper supertypes (most specific first)."""
    index = {t: i for i, t in enumerate(theory.types)}
    out: list[Constraint] = []
    for c in theory.constraints:
        supers = [
            s
            for s in theory.types
            if s != c.type_name and sig.subsumes(s, c.type_name)
        ]
        if not supers:
            out.append(c)
            continue
        supers.sort(key=lambda s: (len(sig.descendants(s)), index[s]))
        parts: list[Description] = [c.body]
        for s in supers:
            parts.append(theory.get(s).body)
        out.append(Constraint(c.type_name, Conj(tuple(parts)), c.line))
    return Theory(tuple(out))


def mark_nodes(
    head: FeatureStructure,
    mode: str,
    sig: Signature,
    constrained: tuple[str, ...],
    include_root: bool = False,
) -> list[tuple[Node, str]]:
    """Goal positions of a clause head (or query), with their first-visit
    paths, in sorted-arc depth-first order."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")

    def compatible(n: Node) -> bool:
        return any(sig.glb(n.type, c) is not None for c in constrained)

    out: list[tuple[Node, str]] = []
    seen: set[int] = set()

    def walk(n: Node, path: str) -> None:
        n = deref(n)
        if id(n) in seen:
            return
        seen.add(id(n))
        eligible = include_root or path != "."
        if eligible and compatible(n) and (mode == "nonlazy" or n.arcs):
            out.append((n, path))
        for feat in sorted(n.arcs):
            sub = feat if path == "." else f"{path}:{feat}"
            walk(n.arcs[feat], sub)

    walk(head.root, ".")
    return out


def _dispatch_plan(
    s: str,
    sig: Signature,
    order: tuple[str, ...],
    clauses: dict[str, tuple[Clause, ...]],
) -> tuple[DispatchAlt, ...]:
    compat = [t for t in order if sig.glb(s, t) is not None]

    def carries_own_species(t: str) -> bool:
        # t earns a branch when some species under glb(s, t) is governed by
        # no constrained type strictly below t; branching only over minimal
        # compatible types would lose those species entirely.
        meet = sig.glb(s, t)
        for sp in sig.species_below(meet):
            if not any(
                t2 != t and sig.subsumes(t, t2) and sig.subsumes(t2, sp)
                for t2 in order
            ):
                return True
        return False

    alts: list[DispatchAlt] = []
    for t in compat:
        if not carries_own_species(t):
            continue
        for i, cl in enumerate(clauses[t]):
            alts.append(ClauseCall(t, cl, i))
    covered_species = set()
    for t in order:
        covered_species.update(sig.species_below(t))
    uncovered = [sp for sp in sig.species_below(s) if sp not in covered_species]
    if uncovered:
        free = [
            u
            for u in sig.types
            if sig.subsumes(s, u)
            and all(sig.glb(u, t) is None for t in order)
        ]
        maximal = [
            u
            for u in free
            if not any(u2 != u and sig.subsumes(u2, u) for u2 in free)
        ]
        for u in maximal:
            alts.append(FreeNarrow(u))
    return tuple(alts)


def compile_grammar(theory: Theory, sig: Signature, mode: str) -> CompiledGrammar:
    """Compile an inheritance-closed theory into clauses plus dispatch plans."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    closed = inherit_constraints(theory, sig)
    order = closed.types
    diags: list[Diagnostic] = []
    clauses: dict[str, tuple[Clause, ...]] = {}
    for c in closed.constraints:
        body = Conj((TypeLit(c.type_name), c.body))
        heads = to_dnf(body, sig)
        if not heads:
            diags.append(
                Diagnostic(
                    "unsatisfiable-constraint",
                    f"every disjunct of the constraint on {c.type_name} is inconsistent",
                    (c.type_name,),
                    c.line,
                )
            )
            clauses[c.type_name] = ()
            continue
        built: list[Clause] = []
        for i, head in enumerate(heads):
            marks = mark_nodes(head, mode, sig, order, include_root=False)
            built.append(
                Clause(
                    c.type_name,
                    i,
                    head,
                    tuple(n for n, _ in marks),
                    tuple(p for _, p in marks),
                )
            )
        clauses[c.type_name] = tuple(built)
    plans = {t: _dispatch_plan(t, sig, order, clauses) for t in sig.types}
    return CompiledGrammar(sig, mode, order, clauses, plans, tuple(diags))


@dataclass(frozen=True)
class QueryPlan:
    """One query disjunct ready to solve: a structure and its goal agenda."""

    fs: FeatureStructure
    goals: tuple[Node, ...]
    goal_paths: tuple[str, ...]


class UnsatisfiableQuery(Exception):
    pass


def compile_query(
    query: str | Description, grammar: CompiledGrammar
) -> list[QueryPlan]:
    """Expand a query to DNF and mark it under the grammar's mode; unlike
    clause heads, the query root is included in marking."""
    if isinstance(query, str):
        query = desc_mod.parse_query(query, grammar.signature)
    heads = to_dnf(query, grammar.signature)
    if not heads:
        raise UnsatisfiableQuery("query is unsatisfiable as a description")
    plans: list[QueryPlan] = []
    for head in heads:
        marks = mark_nodes(
            head, grammar.mode, grammar.signature, grammar.order, include_root=True
        )
        plans.append(
            QueryPlan(head, tuple(n for n, _ in marks), tuple(p for _, p in marks))
        )
    return plans


def dump(grammar: CompiledGrammar) -> str:
    """Canonical clause listing with a ``*`` after every marked node's type."""
    lines: list[str] = []
    for t in grammar.order:
        for i, cl in enumerate(grammar.clauses[t], start=1):
            marked = {id(deref(g)) for g in cl.goals}
            lines.append(f"{t}/{i}: {canonical_print(cl.head, marked)}")
    return "\n".join(lines) + "\n"
