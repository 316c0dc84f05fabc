"""Action scripts, dialect emission, and the mutation engine."""

from __future__ import annotations

import ast

import pytest

from formbench.dialects import emit_source, get_dialect, strip_code_fences
from formbench.errors import DialectError, MutationError
from formbench.scenario import reference_scenario
from formbench.scripts import (ActionScript, MutationKind, compile_scenario,
                               mutate)


def _compiled(doc, seed=7):
    scenario = reference_scenario(doc.spec, seed=seed, required_only=False)
    return compile_scenario(scenario, doc.spec)


def test_compile_produces_one_fill_per_field_plus_submit(small_corpus):
    doc = small_corpus[0]
    scenario = reference_scenario(doc.spec, seed=7, required_only=False)
    script = _compiled(doc)
    assert len(script.actions) == len(scenario.form_fields) + 1
    assert script.actions[-1].verb == "submit_form"
    assert script.target_form == doc.spec.form_id
    names = [a.field_name for a in script.fill_actions]
    assert names == [f.name for f in scenario.form_fields]


def test_action_script_round_trips_through_json(small_corpus):
    script = _compiled(small_corpus[1])
    assert ActionScript.from_json(script.to_json()) == script


def test_submit_must_be_last():
    from formbench.scripts import Action
    from formbench.scenario import Identifier
    submit = Action(locator=Identifier("css", "form"), verb="submit_form")
    fill = Action(locator=Identifier("name", "a"), verb="set_value", payload="x",
                  field_name="a")
    with pytest.raises(Exception):
        ActionScript(actions=(submit, fill), target_form="f")


@pytest.mark.parametrize("dialect", ["selenium-py", "webdriver-py"])
def test_emitted_source_is_valid_python(small_corpus, dialect):
    for doc in small_corpus:
        raw = emit_source(_compiled(doc), dialect)
        ast.parse(raw.source)
        assert raw.dialect == dialect


def test_unknown_dialect_is_rejected(small_corpus):
    with pytest.raises(DialectError):
        emit_source(_compiled(small_corpus[0]), "ruby")
    with pytest.raises(DialectError):
        get_dialect("ruby")


def test_strip_code_fences():
    fenced = "```python\nprint(1)\n```\n"
    assert strip_code_fences(fenced) == "print(1)"
    assert strip_code_fences("print(1)") == "print(1)"


def test_mutation_drop_fields_removes_exactly_k(small_corpus):
    doc = small_corpus[0]
    script = _compiled(doc)
    n_fills = len(script.fill_actions)
    result = mutate(script, MutationKind("drop_fields", k=2), doc, seed=1)
    assert len(result.script.fill_actions) == n_fills - 2
    assert result.script.actions[-1].verb == "submit_form"
    assert result.expected_category is None


def test_mutation_drop_fields_overshoot_raises(small_corpus):
    doc = small_corpus[0]
    script = _compiled(doc)
    with pytest.raises(MutationError):
        mutate(script, MutationKind("drop_fields",
                                    k=len(script.fill_actions) + 1),
               doc, seed=1)


def test_mutation_syntax_break_is_unparseable(small_corpus):
    doc = small_corpus[0]
    result = mutate(_compiled(doc), MutationKind("syntax_break"), doc, seed=1)
    with pytest.raises(SyntaxError):
        ast.parse(result.script.source)


def test_mutation_wrapper_requires_wrapper_style(small_corpus, wrapper_corpus):
    with pytest.raises(MutationError):
        mutate(_compiled(small_corpus[0]), MutationKind("wrapper_misbind"),
               small_corpus[0], seed=1)
    doc = wrapper_corpus[0]
    result = mutate(_compiled(doc), MutationKind("wrapper_misbind"), doc, seed=1)
    altered = result.script.actions[result.altered_index]
    assert altered.locator.strategy == "xpath"
    assert altered.locator.value.startswith("//div[@id='wrap-")
    assert result.expected_category == "wrapper_misbind"


def test_mutation_hidden_injects_decoy_page(small_corpus):
    doc = small_corpus[0]
    result = mutate(_compiled(doc), MutationKind("hidden_target"), doc, seed=1)
    assert result.document.text != doc.text
    assert "__decoy" in result.document.text
    assert result.expected_category == "hidden_or_disabled"


def test_mutation_context_leak_adds_out_of_form_control(small_corpus):
    doc = small_corpus[0]
    result = mutate(_compiled(doc), MutationKind("context_leak"), doc, seed=1)
    head, _, tail = result.document.text.partition("<main")
    altered = result.script.actions[result.altered_index]
    assert 'name="%s"' % altered.field_name in head
    assert result.expected_category == "context_leakage"


def test_mutation_is_seed_deterministic(small_corpus):
    doc = small_corpus[2]
    script = _compiled(doc)
    a = mutate(script, MutationKind("hidden_target"), doc, seed=5)
    b = mutate(script, MutationKind("hidden_target"), doc, seed=5)
    assert a == b


def test_unknown_mutation_kind_rejected():
    with pytest.raises(MutationError):
        MutationKind("explode")
