"""End-to-end execution, coverage measurement, and isolation."""

from __future__ import annotations

import pytest

from formbench.dialects import emit_source
from formbench.harness import check_syntax
from formbench.scenario import reference_scenario
from formbench.scripts import MutationKind, RawScript, compile_scenario, mutate


def _compiled(doc, seed=7, required_only=False):
    scenario = reference_scenario(doc.spec, seed=seed,
                                  required_only=required_only)
    return compile_scenario(scenario, doc.spec)


def test_check_syntax_action_script(small_corpus):
    assert check_syntax(_compiled(small_corpus[0])).valid


def test_check_syntax_raw_python():
    good = RawScript(source="x = 1\n", dialect="selenium-py")
    bad = RawScript(source="def broken(:\n", dialect="selenium-py")
    assert check_syntax(good).valid
    report = check_syntax(bad)
    assert not report.valid
    assert report.diagnostics


def test_check_syntax_strips_fences():
    fenced = RawScript(source="```python\nx = 1\n```", dialect="selenium-py")
    assert check_syntax(fenced, strip_fences=True).valid
    assert not check_syntax(fenced, strip_fences=False).valid


def test_native_execution_succeeds_with_full_coverage(harness, small_corpus):
    for doc in small_corpus:
        served = harness.serve_form(doc)
        report = harness.execute(_compiled(doc), served)
        assert report.status == "success", report
        coverage = harness.collect_coverage(served)
        assert coverage.coverage == 1.0, coverage


def test_coverage_denominator_excludes_hidden_and_submit(harness, small_corpus):
    from formbench.forms import logical_fields
    doc = small_corpus[0]
    served = harness.serve_form(doc)
    coverage = harness.collect_coverage(served)
    expected = {lf.name for lf in logical_fields(doc.spec)}
    assert set(coverage.denominator_fields) == expected


def test_required_only_flag_narrows_denominator(harness, small_corpus):
    from formbench.forms import logical_fields
    doc = small_corpus[0]
    served = harness.serve_form(doc)
    narrow = harness.collect_coverage(served, required_only=True)
    expected = {lf.name for lf in logical_fields(doc.spec) if lf.required}
    assert set(narrow.denominator_fields) == expected


def test_unexecuted_form_has_zero_covered_text_fields(harness, small_corpus):
    doc = small_corpus[1]
    served = harness.serve_form(doc)
    coverage = harness.collect_coverage(served)
    assert coverage.coverage < 1.0


def test_wrapper_mutant_fails_with_automation_error(harness, wrapper_corpus):
    doc = wrapper_corpus[0]
    result = mutate(_compiled(doc), MutationKind("wrapper_misbind"), doc, seed=1)
    served = harness.serve_form(result.document)
    report = harness.execute(result.script, served)
    assert report.status == "automation_error"
    assert report.failed_action_index == result.altered_index


def test_hidden_decoy_mutant_fails(harness, small_corpus):
    doc = small_corpus[0]
    result = mutate(_compiled(doc), MutationKind("hidden_target"), doc, seed=2)
    served = harness.serve_form(result.document)
    report = harness.execute(result.script, served)
    assert report.status == "automation_error"
    assert report.error_class == "element not interactable"


def test_raw_webdriver_dialect_executes(harness, small_corpus):
    doc = small_corpus[0]
    raw = emit_source(_compiled(doc), "webdriver-py")
    served = harness.serve_form(doc)
    report = harness.execute(raw, served)
    assert report.status == "success", report
    coverage = harness.collect_coverage(served)
    assert coverage.coverage == 1.0


def test_raw_script_runner_error_reports_stderr(harness, small_corpus):
    doc = small_corpus[0]
    raw = RawScript(source="import sys\nsys.exit(3)\n", dialect="webdriver-py")
    served = harness.serve_form(doc)
    report = harness.execute(raw, served)
    assert report.status == "runner_error"


def test_selenium_dialect_has_no_runner(harness, small_corpus):
    from formbench.errors import InfrastructureError
    doc = small_corpus[0]
    raw = emit_source(_compiled(doc), "selenium-py")
    served = harness.serve_form(doc)
    with pytest.raises(InfrastructureError):
        harness.execute(raw, served)


def test_timeout_budget_is_enforced(harness, small_corpus):
    doc = small_corpus[0]
    raw = RawScript(source="import time\ntime.sleep(30)\n",
                    dialect="webdriver-py")
    served = harness.serve_form(doc)
    report = harness.execute(raw, served, budget_ms=500)
    assert report.status == "timeout"


def test_isolation_reports_independent_of_order(harness, pool):
    """Permutation test: per-form reports match across execution orders."""
    from formbench.forms import build_corpus
    docs = build_corpus(pool, 10, 4, 8, seed=33)

    def run(order):
        out = {}
        for i in order:
            doc = docs[i]
            served = harness.serve_form(doc)
            report = harness.execute(_compiled(doc, seed=i), served)
            coverage = harness.collect_coverage(served)
            out[i] = (report.status, coverage.to_dict())
        return out

    forward = run(list(range(10)))
    backward = run(list(reversed(range(10))))
    assert forward == backward
