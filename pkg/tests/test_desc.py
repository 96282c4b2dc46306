import random

import pytest

from tfse import ParseError, canonical_print, iso, parse_grammar, parse_query, to_dnf
from tfse.desc import Conj, Disj, Feat, ListLit, Tag, TypeLit

from oracles import random_fs, random_signature

SMALL = """
type a sub [b, c].
type b sub [] feats [F:a].

b => F:a.
"""


def test_parse_small_grammar():
    sig, theory = parse_grammar(SMALL)
    assert set(sig.types) == {"top", "a", "b", "c"}
    assert theory.types == ("b",)
    body = theory.get("b").body
    assert isinstance(body, Feat) and body.feature == "F"


def test_empty_file_is_an_error():
    with pytest.raises(Exception) as exc:
        parse_grammar("")
    assert any(d.rule == "empty-signature" for d in exc.value.diagnostics)


def test_adjective_grammar_parses(adjective):
    sig, theory = adjective
    assert theory.types == ("word", "phrase", "adj")
    assert sig.approp("word") == {"HEAD": "head", "GENDER": "gender", "PHON": "list"}


def test_syntax_error_carries_location():
    with pytest.raises(ParseError) as exc:
        parse_grammar("type a sub [b c].\nb => ,.")
    diag = exc.value.diagnostics[0]
    assert diag.rule == "syntax" and diag.line is not None


def test_unknown_vocabulary_rejected():
    sig, _ = parse_grammar(SMALL)
    with pytest.raises(ParseError) as exc:
        parse_query("b, G:a", sig)
    assert any(d.rule == "unknown-feature" for d in exc.value.diagnostics)
    with pytest.raises(ParseError) as exc:
        parse_query("ghost", sig)
    assert any(d.rule == "unknown-type" for d in exc.value.diagnostics)


def test_negation_rejected_pointedly():
    sig, _ = parse_grammar(SMALL)
    with pytest.raises(ParseError) as exc:
        parse_query("b, F:~a", sig)
    assert any(d.rule == "negation" for d in exc.value.diagnostics)
    assert "type hierarchy" in str(exc.value)


def test_duplicate_constraints_merge_in_order():
    text = SMALL + "\nb => F:b.\n"
    _, theory = parse_grammar(text)
    body = theory.get("b").body
    assert isinstance(body, Disj) and len(body.parts) == 2
    assert isinstance(body.parts[0], Feat)


def test_query_shapes(adjective):
    sig, _ = adjective
    q = parse_query("word", sig)
    assert q == TypeLit("word", 1, 1)
    q = parse_query("word, PHON:<kleine>", sig)
    assert isinstance(q, Conj)
    assert isinstance(q.parts[1].value, ListLit)
    q = parse_query("#1:adj, MOD:(HEAD:#1)", sig)
    assert isinstance(q.parts[0], Tag) and q.parts[0].name == "1"


def test_to_dnf_single_entry(adjective):
    sig, _ = adjective
    [fs] = to_dnf(parse_query("word, PHON:<kleine>, HEAD:adj, GENDER:fem", sig), sig)
    assert canonical_print(fs) == "word[GENDER fem, HEAD adj, PHON <kleine>]"


def test_to_dnf_drops_inconsistent_disjuncts():
    sig, _ = parse_grammar(SMALL)
    out = to_dnf(parse_query("a ; (b, c)", sig), sig)
    assert len(out) == 1 and canonical_print(out[0]) == "a"


def test_to_dnf_empty_when_unsatisfiable():
    sig, _ = parse_grammar(SMALL)
    assert to_dnf(parse_query("b, c", sig), sig) == []


def test_to_dnf_preserves_source_order(adjective):
    sig, _ = adjective
    out = to_dnf(parse_query("HEAD:(adj ; noun), GENDER:(fem ; masc)", sig), sig)
    prints = [canonical_print(fs) for fs in out]
    assert prints == [
        "sign[GENDER fem, HEAD adj]",
        "sign[GENDER masc, HEAD adj]",
        "sign[GENDER fem, HEAD noun]",
        "sign[GENDER masc, HEAD noun]",
    ]


def test_to_dnf_append_body_has_two_cases(append_case):
    sig, theory = append_case
    out = to_dnf(Conj((TypeLit("append"), theory.get("append").body)), sig)
    assert len(out) == 2
    assert "ARG1 <>" in canonical_print(out[0])
    assert "JUNK" in canonical_print(out[1])


def test_feature_path_shorthand(adjective):
    sig, _ = adjective
    [fs] = to_dnf(parse_query("adj, MOD:HEAD:DECL:strong", sig), sig)
    assert fs.node_at("MOD:HEAD:DECL").type == "strong"


def test_tag_reentrancy_builds_shared_node(adjective):
    sig, _ = adjective
    [fs] = to_dnf(parse_query("#1:adj, MOD:(HEAD:#1)", sig), sig)
    from tfse import deref

    assert deref(fs.node_at("MOD:HEAD")) is deref(fs.root)


def test_avm_form_equals_colon_form(adjective):
    sig, _ = adjective
    [a] = to_dnf(parse_query("word[GENDER fem, HEAD adj, PHON <kleine>]", sig), sig)
    [b] = to_dnf(parse_query("word, GENDER:fem, HEAD:adj, PHON:<kleine>", sig), sig)
    assert canonical_print(a) == canonical_print(b)


def test_print_parse_round_trip_on_corpus(adjective, append_case):
    for sig, theory in (adjective, append_case):
        for c in theory.constraints:
            for fs in to_dnf(Conj((TypeLit(c.type_name), c.body)), sig):
                text = canonical_print(fs)
                [back] = to_dnf(parse_query(text, sig), sig)
                assert iso(fs, back), text


def test_print_parse_round_trip_random():
    rng = random.Random(31337)
    for i in range(300):
        if i % 15 == 0:
            sig = random_signature(rng)
        fs = random_fs(sig, rng, max_nodes=7)
        text = canonical_print(fs)
        [back] = to_dnf(parse_query(text, sig), sig)
        assert iso(fs, back), text
