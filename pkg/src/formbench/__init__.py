"""Benchmark generator and evaluation harness for form-interaction scripts.

Synthesizes HTML form corpora from a pooled field vocabulary, executes
automation scripts against them through the W3C WebDriver protocol,
scores syntax correctness, executability, and input coverage, classifies
failures, and runs the execution-filtered instruction-data pipeline.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import FormbenchError, InfrastructureError
from .fields import FieldPool, FieldSpec, load_pool, sample_fields
from .forms import (FormSpec, HtmlDocument, build_corpus, corpus_digest,
                    corpus_stats, read_corpus, render_form, write_corpus)
from .harness import CoverageReport, ExecutionReport, Harness, SyntaxReport
from .metrics import (ERROR_CATEGORIES, EvaluationRecord, MetricsSummary,
                      aggregate, classify_failure, per_field_type_errors)
from .pipeline import (HttpProvider, InstructionTriple, OracleStubProvider,
                       emit_dataset, filter_executable, run_generation)
from .runner import EvaluateOptions, evaluate_batch, evaluate_one
from .scenario import TestScenario, reference_scenario, validate_against_form
from .scripts import ActionScript, MutationKind, RawScript, compile_scenario, mutate

__all__ = [
    "ActionScript", "CoverageReport", "ERROR_CATEGORIES", "EvaluateOptions",
    "EvaluationRecord", "ExecutionReport", "FieldPool", "FieldSpec",
    "FormSpec", "FormbenchError", "Harness", "HtmlDocument", "HttpProvider",
    "InfrastructureError", "InstructionTriple", "MetricsSummary",
    "MutationKind", "OracleStubProvider", "RawScript", "SyntaxReport",
    "TestScenario", "aggregate", "build_corpus", "classify_failure",
    "compile_scenario", "corpus_digest", "corpus_stats", "emit_dataset",
    "evaluate_batch", "evaluate_one", "filter_executable", "load_pool",
    "mutate", "per_field_type_errors", "read_corpus", "reference_scenario",
    "render_form", "run_generation", "sample_fields", "validate_against_form",
    "write_corpus",
]
