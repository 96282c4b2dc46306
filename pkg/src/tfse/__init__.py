"""tfse: a typed-feature-structure constraint engine.

Grammars declare an order-sorted type hierarchy with appropriateness
conditions and attach constraints to types; queries are descriptions
resolved against the compiled constraints.  Compilation comes in two
modes that share one solver: the standard mode marks every goal position,
the lazy mode skips featureless nodes and in exchange requires the
grammar to be type consistent.  The `consistency` module checks that
requirement and the stronger syntactic well-formedness condition.
"""

from .signature import (
    Diagnostic,
    Signature,
    SignatureError,
    TypeDecl,
    UnknownFeatureError,
    UnknownTypeError,
    validate,
)
from .tfs import (
    FeatureStructure,
    Node,
    Trail,
    canonical_print,
    deref,
    iso,
    structure_depth,
    subsumes_at,
    subsumes_fs,
    typecheck_repair,
    unify,
    unify_nodes,
)
from .desc import ParseError, Theory, parse_grammar, parse_query, to_dnf
from .compiler import (
    Clause,
    CompiledGrammar,
    UnsatisfiableQuery,
    compile_grammar,
    compile_query,
    dump,
    inherit_constraints,
    mark_nodes,
)
from .solver import (
    Answer,
    SolveOutcome,
    SolverLimits,
    TraceEvent,
    answers_up_to_subsumption,
    dispatch,
    render_answers,
    render_trace,
    solve,
)
from .consistency import (
    ImplicationReport,
    TcBounds,
    TcVerdict,
    WfVerdict,
    check_type_consistency,
    check_well_formed,
    implication_report,
    unfold_once,
)

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "Clause",
    "CompiledGrammar",
    "Diagnostic",
    "FeatureStructure",
    "ImplicationReport",
    "Node",
    "ParseError",
    "Signature",
    "SignatureError",
    "SolveOutcome",
    "SolverLimits",
    "TcBounds",
    "TcVerdict",
    "Theory",
    "TraceEvent",
    "Trail",
    "TypeDecl",
    "UnknownFeatureError",
    "UnknownTypeError",
    "UnsatisfiableQuery",
    "WfVerdict",
    "answers_up_to_subsumption",
    "canonical_print",
    "check_type_consistency",
    "check_well_formed",
    "compile_grammar",
    "compile_query",
    "deref",
    "dispatch",
    "dump",
    "implication_report",
    "inherit_constraints",
    "iso",
    "mark_nodes",
    "parse_grammar",
    "parse_query",
    "render_answers",
    "render_trace",
    "solve",
    "structure_depth",
    "subsumes_at",
    "subsumes_fs",
    "to_dnf",
    "typecheck_repair",
    "unfold_once",
    "unify",
    "unify_nodes",
    "validate",
]
