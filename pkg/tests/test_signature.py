import random

import pytest

from tfse import SignatureError, TypeDecl, UnknownTypeError, validate

from oracles import random_signature


def sig_of(*decls):
    return validate([TypeDecl(n, tuple(s), tuple(f)) for n, s, f in decls])


def rules_of(excinfo):
    return {d.rule for d in excinfo.value.diagnostics}


def test_minimal_hierarchy_and_undefined_glb():
    sig = sig_of(("a", ["b", "c"], []))
    assert sig.subsumes("a", "b") and sig.subsumes("a", "c")
    assert sig.glb("b", "c") is None
    assert sig.glb("a", "top") == "a"


def test_self_loop_is_a_cycle():
    with pytest.raises(SignatureError) as exc:
        sig_of(("t", ["t"], []))
    assert "cycle" in rules_of(exc)


def test_two_cycle_detected():
    with pytest.raises(SignatureError) as exc:
        sig_of(("u", ["v"], []), ("v", ["u"], []))
    assert "cycle" in rules_of(exc)


def test_non_unique_glb_rejected():
    # u and v share two incomparable maximal common subtypes x and y.
    with pytest.raises(SignatureError) as exc:
        sig_of(("u", ["x", "y"], []), ("v", ["x", "y"], []))
    assert "non-unique-glb" in rules_of(exc)


def test_diamond_with_meet_type_accepted():
    sig = sig_of(("u", ["m"], []), ("v", ["m"], []), ("m", ["x", "y"], []))
    assert sig.glb("u", "v") == "m"


def test_feature_introduction_must_be_unique():
    with pytest.raises(SignatureError) as exc:
        sig_of(("u", [], [("F", "top")]), ("v", [], [("F", "top")]))
    assert "feature-introduction" in rules_of(exc)


def test_feature_refinement_down_a_chain_is_fine():
    sig = sig_of(("u", ["v"], [("F", "a")]), ("v", [], [("F", "b")]), ("a", ["b"], []))
    assert sig.approp("u")["F"] == "a"
    assert sig.approp("v")["F"] == "b"
    assert sig.intro("F") == "u"


def test_incompatible_refinement_rejected():
    with pytest.raises(SignatureError) as exc:
        sig_of(
            ("u", ["v"], [("F", "a")]),
            ("v", [], [("F", "c")]),
            ("root", ["a", "c"], []),
        )
    assert "approp-monotonicity" in rules_of(exc)


def test_duplicate_declaration_rejected():
    with pytest.raises(SignatureError) as exc:
        sig_of(("u", [], []), ("u", [], []))
    assert "duplicate-declaration" in rules_of(exc)


def test_empty_signature_rejected():
    with pytest.raises(SignatureError) as exc:
        validate([])
    assert "empty-signature" in rules_of(exc)


def test_unknown_restriction_rejected():
    with pytest.raises(SignatureError) as exc:
        sig_of(("u", [], [("F", "ghost")]))
    assert "unknown-type" in rules_of(exc)


def test_unknown_type_queries_raise():
    sig = sig_of(("a", ["b"], []))
    with pytest.raises(UnknownTypeError):
        sig.subsumes("a", "ghost")
    with pytest.raises(UnknownTypeError):
        sig.glb("ghost", "a")
    with pytest.raises(UnknownTypeError):
        sig.approp("ghost")


def test_species_are_types_without_proper_subtypes():
    sig = sig_of(("a", ["b", "c"], []))
    assert set(sig.species) == {"b", "c"}
    assert not sig.is_species("a")
    assert sig.species_below("a") == ("b", "c")


def test_approp_of_top_is_empty():
    sig = sig_of(("a", [], [("F", "a")]))
    assert sig.approp("top") == {}


def test_subsumes_reflexive_antisymmetric():
    sig = sig_of(("a", ["b"], []))
    assert sig.subsumes("b", "b")
    assert sig.subsumes("a", "b")
    assert not sig.subsumes("b", "a")


def test_glb_laws_on_random_hierarchies():
    rng = random.Random(20240817)
    for _ in range(120):
        sig = random_signature(rng)
        types = sig.types
        for _ in range(40):
            s, t, u = (rng.choice(types) for _ in range(3))
            met = sig.glb(s, t)
            assert met == sig.glb(t, s)
            assert sig.glb(s, s) == s
            if met is not None:
                assert sig.subsumes(s, met) and sig.subsumes(t, met)
            # any common subtype witnesses a defined glb below it
            if sig.subsumes(s, u) and sig.subsumes(t, u):
                assert met is not None and sig.subsumes(met, u)
            # associativity where defined
            v = rng.choice(types)
            left = sig.glb(met, v) if met is not None else None
            mid = sig.glb(t, v)
            right = sig.glb(s, mid) if mid is not None else None
            if left is not None or right is not None:
                assert left == right


def test_approp_monotone_on_random_hierarchies():
    rng = random.Random(4711)
    for _ in range(80):
        sig = random_signature(rng)
        for s in sig.types:
            for t in sig.descendants(s):
                up = sig.approp(s)
                down = sig.approp(t)
                for feat, restr in up.items():
                    assert feat in down
                    assert sig.subsumes(restr, down[feat])
