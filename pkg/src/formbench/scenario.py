"""Structured JSON test scenarios and their ground-truth derivation.

A scenario lists, per targeted field: locator, dummy data, a natural
language instruction, and a sequential order. ``reference_scenario``
derives the canonical scenario for a known form spec; it always validates
cleanly against that form and is the oracle the harness scores itself
with. Serialization uses a fixed key order so identical scenarios produce
identical bytes.
"""

from __future__ import annotations

import datetime
import json
import re
from dataclasses import dataclass, field

try:
    from re import _parser as sre_parse  # Python >= 3.11
except ImportError:  # pragma: no cover
    import sre_parse

from .errors import ScenarioError
from .fields import FieldSpec
from .forms import (DEFAULT_STYLE, FormSpec, HtmlDocument, LogicalField,
                    logical_fields, render_control, render_form)
from .seeding import choose, derive_subseed, make_rng, rand_int

IDENTIFIER_STRATEGIES = ("id", "name", "css", "xpath")
SUBMISSION_TAG = "form.submit"
DATE_RE = re.compile(r"^\d{2}/\d{2}/\d{4}$")


@dataclass(frozen=True)
class Identifier:
    strategy: str
    value: str

    def to_dict(self) -> dict:
        return {"strategy": self.strategy, "value": self.value}


@dataclass(frozen=True)
class ScenarioField:
    name: str
    identifier: Identifier
    field_type: str
    required: bool
    html_snippet: str
    dummy_data: str
    instruction: str
    order: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "identifier": self.identifier.to_dict(),
            "field_type": self.field_type,
            "required": self.required,
            "html_snippet": self.html_snippet,
            "dummy_data": self.dummy_data,
            "instruction": self.instruction,
            "order": self.order,
        }


@dataclass(frozen=True)
class TestScenario:
    form_fields: tuple[ScenarioField, ...]
    expected_outcome: str
    submission: str = SUBMISSION_TAG

    def to_dict(self) -> dict:
        return {
            "form_fields": [f.to_dict() for f in self.form_fields],
            "expected_outcome": self.expected_outcome,
            "submission": self.submission,
        }


def serialize_scenario(scenario: TestScenario) -> str:
    return json.dumps(scenario.to_dict(), indent=2, ensure_ascii=False) + "\n"


def parse_scenario(text: str) -> TestScenario:
    """Parse and validate scenario JSON; errors report the offending path."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("malformed scenario JSON: %s" % exc) from exc
    return scenario_from_dict(data)


def scenario_from_dict(data: dict) -> TestScenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario root must be an object")
    raw_fields = data.get("form_fields")
    if not isinstance(raw_fields, list) or not raw_fields:
        raise ScenarioError("form_fields: must be a non-empty list")
    parsed = []
    for i, raw in enumerate(raw_fields):
        path = "form_fields[%d]" % i
        if not isinstance(raw, dict):
            raise ScenarioError("%s: must be an object" % path)
        ident = raw.get("identifier")
        if (not isinstance(ident, dict) or "strategy" not in ident
                or "value" not in ident):
            raise ScenarioError("%s.identifier: need strategy and value" % path)
        if ident["strategy"] not in IDENTIFIER_STRATEGIES:
            raise ScenarioError("%s.identifier.strategy: unknown strategy %r"
                                % (path, ident["strategy"]))
        for key in ("name", "field_type", "dummy_data", "instruction", "order"):
            if key not in raw:
                raise ScenarioError("%s.%s: missing" % (path, key))
        ftype = raw["field_type"]
        if ftype == "submit":
            raise ScenarioError(
                "%s: scenarios must not target the submit control" % path)
        if ftype == "date":
            _check_date(raw["dummy_data"], path)
        parsed.append(ScenarioField(
            name=str(raw["name"]),
            identifier=Identifier(ident["strategy"], str(ident["value"])),
            field_type=str(ftype),
            required=bool(raw.get("required", False)),
            html_snippet=str(raw.get("html_snippet", "")),
            dummy_data=str(raw["dummy_data"]),
            instruction=str(raw["instruction"]),
            order=int(raw["order"]),
        ))
    orders = [f.order for f in parsed]
    if sorted(orders) != list(range(1, len(parsed) + 1)):
        raise ScenarioError("form_fields: order values must be 1..n without gaps, "
                            "got %s" % orders)
    if data.get("submission", SUBMISSION_TAG) != SUBMISSION_TAG:
        raise ScenarioError("submission: must be %r" % SUBMISSION_TAG)
    return TestScenario(
        form_fields=tuple(sorted(parsed, key=lambda f: f.order)),
        expected_outcome=str(data.get("expected_outcome", "")),
    )


def _check_date(value, path: str) -> None:
    value = str(value)
    if not DATE_RE.match(value):
        raise ScenarioError("%s.dummy_data: date must use mm/dd/yyyy, got %r"
                            % (path, value))
    mm, dd, yyyy = value.split("/")
    try:
        datetime.date(int(yyyy), int(mm), int(dd))
    except ValueError as exc:
        raise ScenarioError("%s.dummy_data: %r is not a calendar date"
                            % (path, value)) from exc


# --- dummy data ------------------------------------------------------------

_TEXT_SAMPLES = ("Lorem ipsum", "Sample value", "Test entry", "Quick check",
                 "Spring field", "North office")
_TEXTAREA_SAMPLE = ("This is a sample message entered while testing the form. "
                    "It has no special meaning.")


def dummy_for_field(lf: LogicalField, rng) -> str:
    f = lf.primary
    constraint = f.constraint or {}
    if "pattern" in constraint:
        return sample_from_pattern(constraint["pattern"], rng)
    if lf.kind in ("select", "radio"):
        return choose(rng, [o.value for o in lf.options])
    if lf.kind == "checkbox":
        return "true"
    if lf.kind == "date":
        year = rand_int(rng, 1980, 2024)
        month = rand_int(rng, 1, 12)
        day = rand_int(rng, 1, 28)
        return "%02d/%02d/%04d" % (month, day, year)
    if lf.kind == "number":
        lo = constraint.get("min", 0)
        hi = constraint.get("max", lo + 84)
        return str(round((lo + hi) / 2))
    if lf.kind == "email":
        return "alex.morgan@example.com"
    if lf.kind == "password":
        return "S3cure!pass%02d" % rand_int(rng, 10, 99)
    if lf.kind == "tel":
        return "555-%04d" % rand_int(rng, 1000, 9999)
    if lf.kind == "textarea":
        text = _TEXTAREA_SAMPLE
    else:
        text = choose(rng, _TEXT_SAMPLES)
    maxlen = constraint.get("maxlength")
    if maxlen:
        text = text[:maxlen]
    return text


_PATTERN_BUDGET = 64


def sample_from_pattern(pattern: str, rng, budget: int = _PATTERN_BUDGET) -> str:
    """Deterministically build a string matching ``pattern``.

    Walks the compiled pattern tree, choosing bounded repetitions and
    branch alternatives with the supplied RNG. Raises ScenarioError when
    no match is found within the length budget.
    """
    try:
        tree = sre_parse.parse(pattern)
    except re.error as exc:
        raise ScenarioError("unparseable pattern %r: %s" % (pattern, exc)) from exc
    out = _emit_tokens(tree, rng, budget)
    if len(out) > budget or not re.fullmatch(pattern, out):
        raise ScenarioError(
            "could not satisfy pattern %r within %d chars" % (pattern, budget))
    return out


_PRINTABLE = ("abcdefghijklmnopqrstuvwxyz"
              "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 ._-@")


def _emit_tokens(tokens, rng, budget: int) -> str:
    parts = []
    for op, arg in tokens:
        opname = str(op)
        if opname == "LITERAL":
            parts.append(chr(arg))
        elif opname == "NOT_LITERAL":
            parts.append(next(c for c in _PRINTABLE if ord(c) != arg))
        elif opname == "ANY":
            parts.append("a")
        elif opname == "IN":
            parts.append(_emit_class(arg, rng))
        elif opname in ("MAX_REPEAT", "MIN_REPEAT"):
            lo, hi, sub = arg
            hi_cap = lo + 2 if hi is sre_parse.MAXREPEAT or hi > lo + 2 else hi
            n = rand_int(rng, lo, hi_cap) if hi_cap > lo else lo
            for _ in range(n):
                parts.append(_emit_tokens(sub, rng, budget))
        elif opname == "SUBPATTERN":
            parts.append(_emit_tokens(arg[3], rng, budget))
        elif opname == "BRANCH":
            parts.append(_emit_tokens(choose(rng, arg[1]), rng, budget))
        elif opname == "AT":
            continue
        elif opname == "CATEGORY":
            parts.append(_emit_category(arg))
        else:
            raise ScenarioError("unsupported pattern construct %s" % opname)
    return "".join(parts)


def _emit_class(items, rng) -> str:
    choices = []
    negated = False
    for op, arg in items:
        opname = str(op)
        if opname == "LITERAL":
            choices.append(chr(arg))
        elif opname == "RANGE":
            lo, hi = arg
            choices.extend(chr(c) for c in range(lo, min(hi, lo + 9) + 1))
        elif opname == "CATEGORY":
            choices.append(_emit_category(arg))
        elif opname == "NEGATE":
            negated = True
    if negated:
        banned = set(choices)
        return next(c for c in _PRINTABLE if c not in banned)
    if not choices:
        raise ScenarioError("empty character class in pattern")
    return choose(rng, choices)


def _emit_category(category) -> str:
    name = str(category)
    if "DIGIT" in name:
        return "7" if "NOT" not in name else "x"
    if "WORD" in name:
        return "w" if "NOT" not in name else "-"
    if "SPACE" in name:
        return " " if "NOT" not in name else "x"
    raise ScenarioError("unsupported pattern category %s" % name)


# --- reference scenario ----------------------------------------------------

_VERB_TEMPLATES = {
    "select": "Step %d: Select '%s' from the '%s' dropdown.",
    "radio": "Step %d: Choose the '%s' option for '%s'.",
    "checkbox": "Step %d: Check the '%s' checkbox.",
}


def reference_scenario(spec: FormSpec, seed: int,
                       required_only: bool = True) -> TestScenario:
    """Ground-truth scenario for a known form spec.

    Includes the required, non-submit, non-hidden fields in document order
    (all fillable fields with ``required_only=False``). Deterministic
    under the seed.
    """
    fields = logical_fields(spec)
    if required_only:
        fields = [f for f in fields if f.required]
        if not fields:
            raise ScenarioError(
                "form %s has no required fillable fields; "
                "use required_only=False to target all fields" % spec.form_id)
    if not fields:
        raise ScenarioError("form %s has no fillable fields" % spec.form_id)

    out = []
    for order, lf in enumerate(fields, start=1):
        rng = make_rng(derive_subseed(seed, order))
        dummy = dummy_for_field(lf, rng)
        out.append(ScenarioField(
            name=lf.name,
            identifier=identifier_for(lf),
            field_type=lf.kind,
            required=lf.required,
            html_snippet=snippet_for(lf),
            dummy_data=dummy,
            instruction=instruction_for(lf, order, dummy),
            order=order,
        ))
    return TestScenario(
        form_fields=tuple(out),
        expected_outcome="The form is submitted successfully with all "
                         "required fields filled.",
    )


def identifier_for(lf: LogicalField) -> Identifier:
    # radio groups are addressed by shared name; per-option ids are derived
    if lf.kind != "radio" and lf.primary.id:
        return Identifier("id", lf.primary.id)
    return Identifier("name", lf.name)


def snippet_for(lf: LogicalField) -> str:
    return "".join(render_control(m, lf.name) for m in lf.members)


def instruction_for(lf: LogicalField, order: int, dummy: str) -> str:
    label = lf.primary.label or lf.name.replace("_", " ")
    template = _VERB_TEMPLATES.get(lf.kind)
    if lf.kind == "checkbox":
        return template % (order, label)
    if template:
        return template % (order, dummy, label)
    return "Step %d: Enter '%s' into the '%s' field." % (order, dummy, label)


# --- validation against a form --------------------------------------------

@dataclass(frozen=True)
class Finding:
    kind: str      # unresolved-identifier | bad-dummy-data | missing-required | unknown-field
    field: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.findings


def validate_against_form(scenario: TestScenario, spec: FormSpec,
                          document: "HtmlDocument | None" = None,
                          required_only: bool = True) -> ValidationReport:
    """Report identifier resolution, dummy-data validity, and omissions."""
    from .dom import SelectorError, parse_html  # local import avoids a cycle

    doc = parse_html((document or render_form(spec, DEFAULT_STYLE)).text)
    by_name = {lf.name: lf for lf in logical_fields(spec)}
    findings: list[Finding] = []
    targeted: set[str] = set()

    for sf in scenario.form_fields:
        lf = by_name.get(sf.name)
        if lf is None:
            findings.append(Finding("unknown-field", sf.name,
                                    "no fillable field named %r" % sf.name))
        else:
            targeted.add(lf.name)
        resolved = _resolve(doc, sf.identifier)
        if not resolved:
            findings.append(Finding(
                "unresolved-identifier", sf.name,
                "%s=%r matches nothing in the rendered form"
                % (sf.identifier.strategy, sf.identifier.value)))
        if lf is not None:
            problem = dummy_problem(sf.dummy_data, lf)
            if problem:
                findings.append(Finding("bad-dummy-data", sf.name, problem))

    for lf in logical_fields(spec):
        if lf.required and lf.name not in targeted:
            findings.append(Finding(
                "missing-required", lf.name,
                "required field %r is not covered by the scenario" % lf.name))
        elif not required_only and lf.name not in targeted:
            findings.append(Finding(
                "missing-required", lf.name,
                "field %r is not covered by the scenario" % lf.name))
    return ValidationReport(findings=tuple(findings))


def _resolve(doc, identifier: Identifier):
    from .dom import SelectorError
    try:
        if identifier.strategy == "id":
            node = doc.by_id(identifier.value)
            return [node] if node is not None else []
        if identifier.strategy == "name":
            return doc.query_css('[name="%s"]' % identifier.value)
        if identifier.strategy == "css":
            return doc.query_css(identifier.value)
        return doc.query_xpath(identifier.value)
    except SelectorError:
        return []


def dummy_problem(dummy: str, lf: LogicalField) -> "str | None":
    """Constraint check shared with the coverage collector; None when fine."""
    constraint = lf.primary.constraint or {}
    if lf.kind in ("select", "radio"):
        values = [o.value for o in lf.options]
        if dummy not in values:
            return "value %r is not one of the options %s" % (dummy, values)
        return None
    if lf.kind == "checkbox":
        return None
    if not dummy:
        return "empty value"
    if lf.kind == "date":
        try:
            _check_date(dummy, lf.name)
        except ScenarioError as exc:
            return str(exc)
        return None
    if lf.kind == "number":
        try:
            value = float(dummy)
        except ValueError:
            return "value %r is not numeric" % dummy
        if "min" in constraint and value < constraint["min"]:
            return "value %s below min %s" % (dummy, constraint["min"])
        if "max" in constraint and value > constraint["max"]:
            return "value %s above max %s" % (dummy, constraint["max"])
        return None
    if "pattern" in constraint and not re.fullmatch(constraint["pattern"], dummy):
        return "value %r does not match pattern %r" % (dummy, constraint["pattern"])
    if "maxlength" in constraint and len(dummy) > constraint["maxlength"]:
        return "value %r exceeds maxlength %d" % (dummy, constraint["maxlength"])
    if lf.kind == "email" and ("@" not in dummy or "." not in dummy.split("@")[-1]):
        return "value %r is not a plausible email" % dummy
    return None
