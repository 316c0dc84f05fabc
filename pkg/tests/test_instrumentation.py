"""Recorder injection must never change evaluation outcomes."""

from __future__ import annotations

import pytest

from formbench.errors import InfrastructureError
from formbench.httpserve import RECORDER_NODE_ID, instrument_html
from formbench.scenario import reference_scenario
from formbench.scripts import MutationKind, compile_scenario, mutate


def _compiled(doc, seed=7):
    return compile_scenario(
        reference_scenario(doc.spec, seed=seed, required_only=False), doc.spec)


def test_uninstrumented_serving_is_byte_identical(harness, small_corpus):
    import urllib.request
    doc = small_corpus[0]
    served = harness.serve_form(doc, instrument=False)
    body = urllib.request.urlopen(served.url).read().decode("utf-8")
    assert body == doc.text


def test_instrumented_page_adds_only_a_script(small_corpus):
    doc = small_corpus[0]
    text = instrument_html(doc.text)
    assert text != doc.text
    stripped = text.replace(text[text.index("<script>"):
                                 text.index("</script>") + len("</script>\n")],
                            "")
    assert stripped == doc.text
    assert RECORDER_NODE_ID in text
    # no control markup altered
    for f in doc.spec.fields:
        assert ('name="%s"' % f.name) in text


def test_instrumentation_does_not_change_metrics(harness, small_corpus,
                                                 wrapper_corpus):
    fixtures = []
    for doc in small_corpus[:3]:
        fixtures.append((doc, _compiled(doc)))
    mut_doc = wrapper_corpus[0]
    mutant = mutate(_compiled(mut_doc), MutationKind("wrapper_misbind"),
                    mut_doc, seed=1)
    fixtures.append((mutant.document, mutant.script))

    for doc, script in fixtures:
        plain = harness.serve_form(doc, instrument=False)
        inst = harness.serve_form(doc, instrument=True)
        r_plain = harness.execute(script, plain)
        r_inst = harness.execute(script, inst)
        assert r_plain.status == r_inst.status
        assert r_plain.failed_action_index == r_inst.failed_action_index
        assert harness.collect_coverage(plain) == harness.collect_coverage(inst)


def test_read_event_log_contract(harness, small_corpus):
    doc = small_corpus[0]
    plain = harness.serve_form(doc, instrument=False)
    with pytest.raises(InfrastructureError):
        harness.read_event_log(plain)
    inst = harness.serve_form(doc, instrument=True)
    harness.execute(_compiled(doc), inst)
    # the embedded engine does not run page scripts, so the log is absent
    assert harness.read_event_log(inst) is None
