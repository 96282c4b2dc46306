import io

from tfse.corpus import case_names, run_case, run_corpus


def test_all_cases_present():
    assert case_names() == [
        "adjective",
        "append",
        "fixpoint_variant",
        "inconsistent",
        "non_fixpoint",
    ]


def test_every_expectation_passes():
    for case in case_names():
        for result in run_case(case):
            assert result.ok, f"{result.case}/{result.name}:\n{result.detail}"


def test_run_corpus_reports_per_expectation():
    buf = io.StringIO()
    assert run_corpus(out=buf) is True
    lines = buf.getvalue().splitlines()
    assert all(line.startswith("PASS\t") for line in lines)
    assert len(lines) >= 20
