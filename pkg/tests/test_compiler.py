import pytest

from tfse import (
    UnsatisfiableQuery,
    compile_grammar,
    compile_query,
    dump,
    inherit_constraints,
    mark_nodes,
    parse_grammar,
    to_dnf,
)
from tfse.compiler import ClauseCall, FreeNarrow
from tfse.desc import Conj, Feat, TypeLit


def clause(grammar, ctype, i):
    return grammar.clauses[ctype][i]


def test_adjective_inheritance_is_identity(adjective):
    sig, theory = adjective
    closed = inherit_constraints(theory, sig)
    assert closed.types == theory.types
    assert [c.body for c in closed.constraints] == [c.body for c in theory.constraints]


def test_inheritance_conjoins_supertype_bodies():
    text = """
    type t sub [s] feats [F: x, G: x].
    type x sub [y].

    t => F:x.
    s => G:x.
    """
    sig, theory = parse_grammar(text)
    closed = inherit_constraints(theory, sig)
    body = closed.get("s").body
    assert isinstance(body, Conj)
    assert body.parts[0] == theory.get("s").body
    assert body.parts[1] == theory.get("t").body
    # t itself has no constrained supertype and stays as written
    assert closed.get("t").body == theory.get("t").body


def test_unconstrained_types_stay_unconstrained(adjective):
    sig, theory = adjective
    grammar = compile_grammar(theory, sig, "lazy")
    assert "noun" not in grammar.clauses
    assert "sign" not in grammar.clauses


def test_marking_feminine_entry_lazy_vs_nonlazy(adjective):
    sig, theory = adjective
    lazy = compile_grammar(theory, sig, "lazy")
    nonlazy = compile_grammar(theory, sig, "nonlazy")
    # feminine adjective entry: bare adj head node
    assert clause(lazy, "word", 0).goals == ()
    assert clause(nonlazy, "word", 0).goal_paths == ("HEAD",)
    # masculine entry: the head carries DECL, so even lazy marks it
    assert clause(lazy, "word", 1).goal_paths == ("HEAD",)
    assert clause(nonlazy, "word", 1).goal_paths == ("HEAD",)
    # noun entries are never marked: noun meets no constrained type
    for i in (2, 3):
        assert clause(lazy, "word", i).goals == ()
        assert clause(nonlazy, "word", i).goals == ()


def test_marking_order_is_depth_first_sorted(adjective):
    sig, theory = adjective
    nonlazy = compile_grammar(theory, sig, "nonlazy")
    assert clause(nonlazy, "phrase", 0).goal_paths == (
        "ADTR",
        "ADTR:HEAD",
        "ADTR:HEAD:MOD",
        "ADTR:HEAD:MOD:HEAD",
    )
    assert clause(nonlazy, "adj", 0).goal_paths == ("MOD", "MOD:HEAD")


def test_lazy_goals_subset_of_nonlazy(adjective):
    sig, theory = adjective
    lazy = compile_grammar(theory, sig, "lazy")
    nonlazy = compile_grammar(theory, sig, "nonlazy")
    for t in nonlazy.order:
        for lc, nc in zip(lazy.clauses[t], nonlazy.clauses[t]):
            assert set(lc.goal_paths) <= set(nc.goal_paths)


def test_lazy_marks_only_nodes_with_features(adjective):
    sig, theory = adjective
    lazy = compile_grammar(theory, sig, "lazy")
    for t in lazy.order:
        for cl in lazy.clauses[t]:
            for node in cl.goals:
                assert node.arcs, "lazy mode marked a featureless node"


def test_compilation_is_deterministic(adjective):
    sig, theory = adjective
    a = dump(compile_grammar(theory, sig, "nonlazy"))
    b = dump(compile_grammar(theory, sig, "nonlazy"))
    assert a == b


def test_total_nonlazy_marks(adjective):
    sig, theory = adjective
    text = dump(compile_grammar(theory, sig, "nonlazy"))
    assert text.count("*") == 8
    lazy_text = dump(compile_grammar(theory, sig, "lazy"))
    assert lazy_text.count("*") == 6


def test_unsatisfiable_constraint_reported_not_fatal(inconsistent_case):
    sig, theory = inconsistent_case
    grammar = compile_grammar(theory, sig, "lazy")
    assert grammar.clauses["b"] == ()
    assert any(d.rule == "unsatisfiable-constraint" for d in grammar.diagnostics)


def test_dispatch_plans(adjective):
    sig, theory = adjective
    grammar = compile_grammar(theory, sig, "nonlazy")
    sign_plan = grammar.plan("sign")
    assert [a.ctype for a in sign_plan if isinstance(a, ClauseCall)] == [
        "word",
        "word",
        "word",
        "word",
        "phrase",
    ]
    assert not any(isinstance(a, FreeNarrow) for a in sign_plan)
    adj_plan = grammar.plan("adj")
    assert [a.ctype for a in adj_plan] == ["adj"]
    head_plan = grammar.plan("head")
    assert [a.ctype for a in head_plan if isinstance(a, ClauseCall)] == ["adj"]
    assert [a.target for a in head_plan if isinstance(a, FreeNarrow)] == ["noun"]
    noun_plan = grammar.plan("noun")
    assert noun_plan == (FreeNarrow("noun"),)
    assert grammar.plan("fem") == (FreeNarrow("fem"),)
    assert not grammar.needs_proof("fem")
    assert grammar.needs_proof("head") and grammar.needs_proof("top")


def test_query_root_marked_lazy_only_with_features(adjective_lazy):
    [bare] = compile_query("word", adjective_lazy)
    assert bare.goals == ()
    [specific] = compile_query("word, PHON:<kleine>", adjective_lazy)
    assert specific.goal_paths == (".",)


def test_query_root_marked_nonlazy(adjective_nonlazy):
    [bare] = compile_query("word", adjective_nonlazy)
    assert bare.goal_paths == (".",)


def test_query_marks_inner_nodes(adjective_lazy):
    [plan] = compile_query("word, HEAD:(DECL:weak)", adjective_lazy)
    assert plan.goal_paths == (".", "HEAD")


def test_unsatisfiable_query_raises(adjective_lazy):
    with pytest.raises(UnsatisfiableQuery):
        compile_query("word, HEAD:(adj, DECL:strong, DECL:weak)", adjective_lazy)


def test_query_disjuncts_in_source_order(adjective_lazy):
    plans = compile_query("word, GENDER:(fem ; masc)", adjective_lazy)
    genders = [p.fs.node_at("GENDER").type for p in plans]
    assert genders == ["fem", "masc"]


def test_mark_nodes_respects_reentrancy(adjective):
    sig, theory = adjective
    [fs] = to_dnf(
        Conj((TypeLit("adj"), Feat("DECL", TypeLit("decl")))), sig
    )
    marks = mark_nodes(fs, "nonlazy", sig, ("adj",), include_root=True)
    assert [p for _, p in marks] == ["."]
