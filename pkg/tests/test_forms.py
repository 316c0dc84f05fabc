"""Form rendering, corpus determinism, persistence, and statistics."""

from __future__ import annotations

import pytest

from formbench.dom import recover_spec
from formbench.errors import RenderError
from formbench.forms import (WRAPPER_STYLE, build_corpus, corpus_digest,
                             corpus_stats, logical_fields, read_corpus,
                             render_form, write_corpus)


def _control_facts(spec):
    # label text is presentation, not ground truth; everything else must
    # survive the render/parse round trip
    return [(f.kind, f.name, f.id, f.required, f.constraint, f.options)
            for f in spec.fields]


def test_render_round_trip_recovers_ground_truth(small_corpus):
    for doc in small_corpus:
        recovered = recover_spec(doc.text)
        assert _control_facts(recovered) == _control_facts(doc.spec)
        assert recovered.form_id == doc.spec.form_id
        assert recovered.action == doc.spec.action
        assert recovered.submit_label == doc.spec.submit_label


def test_render_round_trip_survives_wrapper_style(wrapper_corpus):
    for doc in wrapper_corpus:
        assert _control_facts(recover_spec(doc.text)) == _control_facts(doc.spec)


def test_build_corpus_is_deterministic(pool):
    a = build_corpus(pool, 10, 4, 8, seed=42)
    b = build_corpus(pool, 10, 4, 8, seed=42)
    assert corpus_digest(a) == corpus_digest(b)
    assert [d.text for d in a] == [d.text for d in b]


def test_build_corpus_seed_changes_output(pool):
    a = build_corpus(pool, 10, 4, 8, seed=42)
    b = build_corpus(pool, 10, 4, 8, seed=43)
    assert corpus_digest(a) != corpus_digest(b)


def test_wrapper_style_adds_wrapper_divs(wrapper_corpus):
    doc = wrapper_corpus[0]
    assert doc.style_template_id == WRAPPER_STYLE
    fillables = [f for f in doc.spec.fields if f.kind != "hidden"]
    assert 'id="wrap-%s"' % fillables[0].name in doc.text


def test_every_form_has_one_form_element_and_submit(small_corpus):
    for doc in small_corpus:
        assert doc.text.count("<form") == 1
        assert 'id="%s-submit"' % doc.spec.form_id in doc.text
        assert 'action="/submit"' in doc.text


def test_select_renders_placeholder_option(pool):
    docs = build_corpus(pool, 40, 4, 10, seed=3)
    selects = [f for doc in docs for f in doc.spec.fields if f.kind == "select"]
    assert selects, "sample contains no select field; widen the seed"
    for doc in docs:
        for f in doc.spec.fields:
            if f.kind == "select":
                assert '<option value="">' in doc.text


def test_radio_groups_merge_into_one_logical_field(pool):
    docs = build_corpus(pool, 60, 4, 10, seed=5)
    seen_radio = False
    for doc in docs:
        lfs = logical_fields(doc.spec)
        names = [lf.name for lf in lfs]
        assert len(set(names)) == len(names)
        for lf in lfs:
            if lf.kind == "radio":
                seen_radio = True
                assert len(lf.options) >= 2
    assert seen_radio


def test_corpus_write_read_round_trip(small_corpus, tmp_path):
    write_corpus(small_corpus, tmp_path / "corpus", config={"seed": 11})
    loaded = read_corpus(tmp_path / "corpus")
    assert corpus_digest(loaded) == corpus_digest(small_corpus)
    assert [d.spec for d in loaded] == [d.spec for d in small_corpus]


def test_corpus_stats_distribution_sums_to_one(small_corpus):
    stats = corpus_stats(small_corpus)
    assert abs(sum(stats.field_type_distribution.values()) - 1.0) <= 1e-9
    assert stats.n_forms == len(small_corpus)
    assert sum(stats.fields_per_form.values()) == stats.n_forms


def test_corpus_stats_rejects_empty_input():
    with pytest.raises(RenderError):
        corpus_stats([])


def test_unknown_style_template_is_rejected(small_corpus):
    with pytest.raises(RenderError):
        render_form(small_corpus[0].spec, "no-such-style")
