import sys
from pathlib import Path

import pytest

from tfse import compile_grammar, parse_grammar
from tfse.corpus import case_dir

sys.path.insert(0, str(Path(__file__).parent))


def load_case(name: str):
    text = (case_dir(name) / "grammar.tfsg").read_text(encoding="utf-8")
    return parse_grammar(text)


@pytest.fixture(scope="session")
def adjective():
    return load_case("adjective")


@pytest.fixture(scope="session")
def adjective_lazy(adjective):
    sig, theory = adjective
    return compile_grammar(theory, sig, "lazy")


@pytest.fixture(scope="session")
def adjective_nonlazy(adjective):
    sig, theory = adjective
    return compile_grammar(theory, sig, "nonlazy")


@pytest.fixture(scope="session")
def append_case():
    return load_case("append")


@pytest.fixture(scope="session")
def inconsistent_case():
    return load_case("inconsistent")


@pytest.fixture(scope="session")
def non_fixpoint_case():
    return load_case("non_fixpoint")


@pytest.fixture(scope="session")
def fixpoint_variant_case():
    return load_case("fixpoint_variant")
