"""Metric arithmetic, record invariants, and failure classification."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formbench.errors import FormbenchError
from formbench.harness import CoverageReport, ExecutionReport, SyntaxReport
from formbench.metrics import (ERROR_CATEGORIES, EvaluationRecord,
                               aggregate, classify_failure,
                               per_field_type_errors)


def _record(i, valid=True, executed=True, coverage=1.0,
            classification=None):
    denom = tuple("f%d" % j for j in range(10))
    covered = denom[:int(round(coverage * 10))]
    return EvaluationRecord(
        form_id="form-%04d" % i, script_id="s%d" % i,
        syntax=SyntaxReport(valid=valid),
        execution=ExecutionReport(
            "success" if executed else "automation_error",
            failed_action_index=None if executed else 0) if valid else None,
        coverage=CoverageReport(denominator_fields=denom,
                                covered_fields=covered) if valid else None,
        classification=classification,
    )


def test_aggregate_exact_hand_built_batch():
    records = []
    # 9 valid, 6 executed, per-record coverages summing to 5.4
    coverages = [1.0, 1.0, 1.0, 0.8, 0.8, 0.8, 0.0, 0.0, 0.0]
    for i, cov in enumerate(coverages):
        executed = i < 6
        records.append(_record(i, valid=True, executed=executed,
                               coverage=cov if executed else 0.0))
    records.append(EvaluationRecord(form_id="form-0009", script_id="s9",
                                    syntax=SyntaxReport(valid=False)))
    assert sum(r.coverage_value for r in records) == pytest.approx(5.4)
    summary = aggregate(records)
    assert summary.syntax_correctness_pct == 90.00
    assert summary.executability_pct == 60.00
    assert summary.input_coverage_pct == 54.00


def test_aggregate_coverage_over_executed_variant():
    records = [_record(0, coverage=1.0),
               _record(1, coverage=0.5),
               _record(2, executed=False, coverage=0.0)]
    assert aggregate(records).input_coverage_pct == 50.00
    assert aggregate(records,
                     coverage_over_executed=True).input_coverage_pct == 75.00


@given(st.permutations(list(range(10))))
@settings(max_examples=25, deadline=None)
def test_aggregate_is_permutation_invariant(perm):
    base = [_record(i, executed=(i % 2 == 0), coverage=(i % 3) / 2.0)
            for i in range(10)]
    shuffled = [base[i] for i in perm]
    assert aggregate(shuffled) == aggregate(base)


def test_aggregate_rejects_empty_batch():
    with pytest.raises(FormbenchError):
        aggregate([])


def test_record_invariant_no_execution_without_valid_syntax():
    with pytest.raises(FormbenchError):
        EvaluationRecord(form_id="f", script_id="s",
                         syntax=SyntaxReport(valid=False),
                         execution=ExecutionReport("success"))


def test_record_invariant_no_classification_on_clean_success():
    with pytest.raises(FormbenchError):
        _record(0, coverage=1.0, classification="other")
    with pytest.raises(FormbenchError):
        _record(0, executed=False, classification="not-a-category")


def test_record_dict_round_trip():
    record = _record(3, executed=False, coverage=0.4,
                     classification="locator_unresolved")
    assert EvaluationRecord.from_dict(record.to_dict()) == record


def test_error_categories_are_distinct():
    assert len(set(ERROR_CATEGORIES)) == len(ERROR_CATEGORIES)


# --- classification against live executions --------------------------------

def _classified(harness, result):
    from formbench.harness import check_syntax
    served = harness.serve_form(result.document)
    execution = harness.execute(result.script, served)
    coverage = harness.collect_coverage(served)
    record = EvaluationRecord(
        form_id=result.document.spec.form_id, script_id="mut",
        syntax=check_syntax(result.script),
        execution=execution, coverage=coverage,
        actions=getattr(result.script, "actions", ()))
    return classify_failure(record, result.document.spec,
                            harness.page_source(served))


@pytest.mark.parametrize("kind,expected", [
    ("wrapper_misbind", "wrapper_misbind"),
    ("hidden_target", "hidden_or_disabled"),
    ("disabled_target", "hidden_or_disabled"),
    ("context_leak", "context_leakage"),
])
def test_classification_matches_expected_category(harness, wrapper_corpus,
                                                  kind, expected):
    from formbench.scenario import reference_scenario
    from formbench.scripts import MutationKind, compile_scenario, mutate
    for doc in wrapper_corpus[:3]:
        scenario = reference_scenario(doc.spec, seed=5, required_only=False)
        script = compile_scenario(scenario, doc.spec)
        result = mutate(script, MutationKind(kind), doc, seed=4)
        assert result.expected_category == expected
        assert _classified(harness, result) == expected


def test_classification_unresolved_locator(harness, small_corpus):
    from formbench.scenario import Identifier, reference_scenario
    from formbench.scripts import compile_scenario
    from dataclasses import replace
    doc = small_corpus[0]
    script = compile_scenario(
        reference_scenario(doc.spec, seed=5, required_only=False), doc.spec)
    actions = list(script.actions)
    actions[0] = replace(actions[0],
                         locator=Identifier("css", "#does-not-exist"))
    broken = replace(script, actions=tuple(actions))
    result = type("R", (), {"document": doc, "script": broken})
    assert _classified(harness, result) == "locator_unresolved"


def test_per_field_type_errors_all_radio_misbound(small_corpus):
    # constructed batch: every radio group uncovered, everything else covered
    from formbench.forms import logical_fields
    records, specs = [], {}
    n_radio_forms = 0
    for doc in small_corpus:
        spec = doc.spec
        specs[spec.form_id] = spec
        lfs = logical_fields(spec)
        denom = tuple(lf.name for lf in lfs)
        covered = tuple(lf.name for lf in lfs if lf.kind != "radio")
        if len(covered) < len(denom):
            n_radio_forms += 1
        records.append(EvaluationRecord(
            form_id=spec.form_id, script_id="x",
            syntax=SyntaxReport(valid=True),
            execution=ExecutionReport("success"),
            coverage=CoverageReport(denominator_fields=denom,
                                    covered_fields=covered)))
    rates = per_field_type_errors(records, specs)
    if n_radio_forms:
        assert rates["radio"] == 100.0
    for kind, rate in rates.items():
        if kind != "radio":
            assert rate == 0.0
    assert all(rate >= 0 for rate in rates.values())
