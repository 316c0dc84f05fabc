"""Aggregate evaluation evidence into corpus metrics and failure classes.

Three corpus metrics: syntax correctness (share of syntactically valid
scripts), executability (share that ran to completion), and input
coverage (mean per-script coverage; scripts that never ran contribute
zero). Failures are classified into a single category each via ordered
locator re-resolution rules against the final DOM snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .dom import DomNode, parse_html
from .errors import FormbenchError
from .forms import FormSpec, logical_fields
from .harness import CoverageReport, ExecutionReport, SyntaxReport
from .scenario import dummy_problem
from .scripts import Action

ERROR_CATEGORIES = (
    "wrapper_misbind", "hidden_or_disabled", "wrong_group_member",
    "custom_vs_native_dropdown", "submit_misuse", "offscreen",
    "context_leakage", "locator_unresolved", "constraint_violation",
    "runner_failure", "timeout", "other",
)


@dataclass(frozen=True)
class EvaluationRecord:
    form_id: str
    script_id: str
    syntax: SyntaxReport
    execution: Optional[ExecutionReport] = None
    coverage: Optional[CoverageReport] = None
    classification: Optional[str] = None
    event_log: Optional[dict] = None
    actions: tuple[Action, ...] = ()  # enables locator re-resolution
    notes: str = ""

    def __post_init__(self):
        if self.execution is not None and not self.syntax.valid:
            raise FormbenchError(
                "invalid-syntax scripts must not carry an execution report")
        if self.classification is not None:
            ok = (self.execution is not None
                  and self.execution.status == "success"
                  and self.coverage is not None
                  and self.coverage.coverage >= 1.0)
            if ok:
                raise FormbenchError(
                    "classification requires a failure or incomplete coverage")
            if self.classification not in ERROR_CATEGORIES:
                raise FormbenchError(
                    "unknown error category %r" % self.classification)

    @property
    def executed_ok(self) -> bool:
        return self.execution is not None and self.execution.status == "success"

    @property
    def coverage_value(self) -> float:
        return self.coverage.coverage if self.coverage is not None else 0.0

    def to_dict(self) -> dict:
        return {
            "form_id": self.form_id,
            "script_id": self.script_id,
            "syntax": self.syntax.to_dict(),
            "execution": self.execution.to_dict() if self.execution else None,
            "coverage": self.coverage.to_dict() if self.coverage else None,
            "classification": self.classification,
            "event_log": self.event_log,
            "actions": [a.to_dict() for a in self.actions],
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvaluationRecord":
        execution = data.get("execution")
        coverage = data.get("coverage")
        return cls(
            form_id=data["form_id"],
            script_id=data["script_id"],
            syntax=SyntaxReport(
                valid=data["syntax"]["valid"],
                diagnostics=tuple(data["syntax"].get("diagnostics", ()))),
            execution=ExecutionReport(
                status=execution["status"],
                failed_action_index=execution.get("failed_action_index"),
                error_class=execution.get("error_class"),
                wall_time_ms=execution.get("wall_time_ms", 0),
            ) if execution else None,
            coverage=CoverageReport(
                denominator_fields=tuple(coverage["denominator_fields"]),
                covered_fields=tuple(coverage["covered_fields"]),
            ) if coverage else None,
            classification=data.get("classification"),
            event_log=data.get("event_log"),
            actions=tuple(Action.from_dict(a) for a in data.get("actions", ())),
            notes=data.get("notes", ""),
        )


@dataclass(frozen=True)
class MetricsSummary:
    syntax_correctness_pct: float
    executability_pct: float
    input_coverage_pct: float
    n_records: int

    def rendered(self) -> dict:
        return {
            "syntax_correctness_pct": "%.2f" % self.syntax_correctness_pct,
            "executability_pct": "%.2f" % self.executability_pct,
            "input_coverage_pct": "%.2f" % self.input_coverage_pct,
            "n_records": self.n_records,
        }

    def to_dict(self) -> dict:
        return {
            "syntax_correctness_pct": round(self.syntax_correctness_pct, 2),
            "executability_pct": round(self.executability_pct, 2),
            "input_coverage_pct": round(self.input_coverage_pct, 2),
            "n_records": self.n_records,
        }


def aggregate(records: list, coverage_over_executed: bool = False) -> MetricsSummary:
    """Corpus metrics over a batch of evaluation records.

    Invalid-syntax scripts count as executability failures and contribute
    zero coverage. ``coverage_over_executed`` averages coverage over
    successfully executed scripts only.
    """
    if not records:
        raise FormbenchError("cannot aggregate an empty record list")
    n = len(records)
    n_valid = sum(1 for r in records if r.syntax.valid)
    n_exec = sum(1 for r in records if r.executed_ok)
    if coverage_over_executed:
        executed = [r for r in records if r.executed_ok]
        mean_cov = (sum(r.coverage_value for r in executed) / len(executed)
                    if executed else 0.0)
    else:
        mean_cov = sum(r.coverage_value for r in records) / n
    return MetricsSummary(
        syntax_correctness_pct=round(100.0 * n_valid / n, 2),
        executability_pct=round(100.0 * n_exec / n, 2),
        input_coverage_pct=round(100.0 * mean_cov, 2),
        n_records=n,
    )


# --- failure classification ------------------------------------------------

def classify_failure(record: EvaluationRecord, spec: FormSpec,
                     dom_snapshot: "str | None") -> str:
    """Single deterministic category for a failing/incomplete record.

    Re-resolves the problem action's locator against the final DOM and
    applies the mis-binding rules in a fixed order.
    """
    if record.execution is not None:
        if record.execution.status == "timeout":
            return "timeout"
        if record.execution.status == "runner_error":
            return "runner_failure"
    action = _problem_action(record)
    if action is None or dom_snapshot is None:
        return "other"
    doc = parse_html(dom_snapshot)
    resolved = _resolve_locator(doc, action.locator)

    if resolved is None:
        return "locator_unresolved"
    if not resolved.is_control():
        if _near_control(resolved):
            return "wrapper_misbind"
        return "other"
    if not resolved.is_displayed() or not resolved.is_enabled():
        return "hidden_or_disabled"
    form = resolved.owning_form()
    if form is None or (form.get("id") or "") != spec.form_id:
        return "context_leakage"
    if (resolved.input_type in ("radio", "checkbox") and action.payload
            and action.payload not in ("true", "false")
            and resolved.get("value") != action.payload):
        return "wrong_group_member"
    if (action.verb == "click"
            and not _is_submit_control(resolved)
            and not any(a.verb == "submit_form" for a in record.actions)):
        return "submit_misuse"
    problem = _constraint_problem(resolved, spec, action)
    if problem:
        return "constraint_violation"
    return "other"


def _problem_action(record: EvaluationRecord) -> Optional[Action]:
    if not record.actions:
        return None
    if (record.execution is not None
            and record.execution.failed_action_index is not None):
        idx = record.execution.failed_action_index
        if 0 <= idx < len(record.actions):
            return record.actions[idx]
        return None
    if record.coverage is not None:
        uncovered = (set(record.coverage.denominator_fields)
                     - set(record.coverage.covered_fields))
        for action in record.actions:
            if action.field_name in uncovered:
                return action
    return None


def _resolve_locator(doc, locator) -> Optional[DomNode]:
    from .dom import SelectorError
    try:
        if locator.strategy == "id":
            return doc.by_id(locator.value)
        if locator.strategy == "name":
            nodes = doc.query_css('[name="%s"]' % locator.value)
        elif locator.strategy == "css":
            nodes = doc.query_css(locator.value)
        else:
            nodes = doc.query_xpath(locator.value)
    except SelectorError:
        return None
    return nodes[0] if nodes else None


def _near_control(node: DomNode) -> bool:
    if any(child.is_control() for child in node.iter()):
        return True
    if any(anc.is_control() for anc in node.ancestors()):
        return True
    if node.parent is not None:
        return any(sib.is_control() for sib in node.parent.children)
    return False


def _is_submit_control(node: DomNode) -> bool:
    if node.tag == "button":
        return (node.get("type") or "submit") == "submit"
    return node.tag == "input" and node.input_type == "submit"


def _constraint_problem(node: DomNode, spec: FormSpec, action: Action):
    if action.field_name is None:
        return None
    for lf in logical_fields(spec):
        if lf.name == action.field_name:
            value = node.value
            if not value:
                return None
            return dummy_problem(value, lf)
    return None


def per_field_type_errors(records: list, specs: "dict[str, FormSpec]") -> dict:
    """Per-kind error percentage over field instances of evaluated forms.

    A field instance is errored when its record leaves it uncovered (or
    never ran) or when it is the field implicated in a classified failure.
    Kinds with no instances are omitted rather than reported as zero.
    """
    totals: dict[str, int] = {}
    errors: dict[str, int] = {}
    for record in records:
        spec = specs.get(record.form_id)
        if spec is None:
            raise FormbenchError("no spec for form %r" % record.form_id)
        implicated = None
        if record.classification is not None:
            action = _problem_action(record)
            implicated = action.field_name if action else None
        covered = (set(record.coverage.covered_fields)
                   if record.coverage is not None else set())
        denominator = (set(record.coverage.denominator_fields)
                       if record.coverage is not None else None)
        for lf in logical_fields(spec):
            if denominator is not None and lf.name not in denominator:
                continue
            totals[lf.kind] = totals.get(lf.kind, 0) + 1
            errored = lf.name not in covered or lf.name == implicated
            if errored:
                errors[lf.kind] = errors.get(lf.kind, 0) + 1
    return {kind: round(100.0 * errors.get(kind, 0) / total, 2)
            for kind, total in sorted(totals.items())}
