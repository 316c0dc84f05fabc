"""Evaluation driver: one record per (form, script) pair.

Glues the harness to the metrics engine: syntax gate, execution, coverage
collection (with partial credit on failure), and failure classification
against the final DOM snapshot. Batches parallelize across independent
browser sessions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .forms import HtmlDocument
from .harness import Harness, check_syntax
from .metrics import EvaluationRecord, classify_failure
from .scripts import ActionScript


@dataclass(frozen=True)
class EvaluateOptions:
    budget_ms: "int | None" = None
    required_only: bool = False
    instrument: bool = False
    classify: bool = True
    strip_fences: bool = True


def evaluate_one(harness: Harness, doc: HtmlDocument, script,
                 script_id: str,
                 options: EvaluateOptions = EvaluateOptions()) -> EvaluationRecord:
    syntax = check_syntax(script, strip_fences=options.strip_fences)
    actions = script.actions if isinstance(script, ActionScript) else ()
    if not syntax.valid:
        return EvaluationRecord(
            form_id=doc.spec.form_id, script_id=script_id,
            syntax=syntax, actions=actions)

    served = harness.serve_form(doc, instrument=options.instrument)
    execution = harness.execute(script, served, budget_ms=options.budget_ms)
    coverage = harness.collect_coverage(served,
                                        required_only=options.required_only)
    event_log = None
    if options.instrument:
        event_log = harness.read_event_log(served)

    classification = None
    if options.classify and (execution.status != "success"
                             or coverage.coverage < 1.0):
        snapshot = harness.page_source(served)
        probe = EvaluationRecord(
            form_id=doc.spec.form_id, script_id=script_id, syntax=syntax,
            execution=execution, coverage=coverage, actions=actions)
        classification = classify_failure(probe, doc.spec, snapshot)

    return EvaluationRecord(
        form_id=doc.spec.form_id, script_id=script_id, syntax=syntax,
        execution=execution, coverage=coverage,
        classification=classification, event_log=event_log, actions=actions)


def evaluate_batch(harness: Harness, pairs, options: EvaluateOptions =
                   EvaluateOptions(), parallel: int = 1) -> list:
    """``pairs`` is an iterable of (doc, script, script_id) triples."""
    pairs = list(pairs)
    if parallel <= 1:
        return [evaluate_one(harness, doc, script, sid, options)
                for doc, script, sid in pairs]
    with ThreadPoolExecutor(max_workers=parallel) as pool:
        futures = [pool.submit(evaluate_one, harness, doc, script, sid, options)
                   for doc, script, sid in pairs]
        return [f.result() for f in futures]
