"""Test scripts: structured action sequences, raw sources, and mutants.

The structured :class:`ActionScript` is natively executable over the wire
protocol with no external interpreter; :class:`RawScript` carries source
text in a configured dialect and is delegated to that dialect's runner.
``compile_scenario`` is the reference compiler from scenario to actions;
``mutate`` manufactures scripts (and page variants) exhibiting the known
mis-binding failure modes, labelled with their expected failure class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import MutationError, ScenarioError
from .fields import FieldSpec
from .forms import (WRAPPER_STYLE, FormSpec, HtmlDocument, LogicalField,
                    logical_fields)
from .scenario import Identifier, TestScenario, validate_against_form
from .seeding import choose, make_rng

VERBS = ("set_value", "select_option", "set_checked", "click", "submit_form")
PAYLOAD_REQUIRED = ("set_value", "select_option")


@dataclass(frozen=True)
class Action:
    locator: Identifier
    verb: str
    payload: Optional[str] = None
    field_name: Optional[str] = None  # spec field this action intends to fill

    def __post_init__(self):
        if self.verb not in VERBS:
            raise ScenarioError("unknown action verb %r" % (self.verb,))
        if self.verb in PAYLOAD_REQUIRED and self.payload is None:
            raise ScenarioError("%s requires a payload" % self.verb)
        if self.verb == "submit_form" and self.payload is not None:
            raise ScenarioError("submit_form takes no payload")

    def to_dict(self) -> dict:
        return {
            "locator": self.locator.to_dict(),
            "verb": self.verb,
            "payload": self.payload,
            "field_name": self.field_name,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "Action":
        loc = record["locator"]
        return cls(
            locator=Identifier(loc["strategy"], loc["value"]),
            verb=record["verb"],
            payload=record.get("payload"),
            field_name=record.get("field_name"),
        )


@dataclass(frozen=True)
class ActionScript:
    actions: tuple[Action, ...]
    target_form: str

    def __post_init__(self):
        submits = [i for i, a in enumerate(self.actions) if a.verb == "submit_form"]
        if len(submits) > 1:
            raise ScenarioError("at most one submit_form action allowed")
        if submits and submits[0] != len(self.actions) - 1:
            raise ScenarioError("submit_form must be the final action")

    @property
    def fill_actions(self) -> tuple[Action, ...]:
        return tuple(a for a in self.actions if a.verb != "submit_form")

    def to_json(self) -> str:
        return json.dumps({
            "target_form": self.target_form,
            "actions": [a.to_dict() for a in self.actions],
        }, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ActionScript":
        data = json.loads(text)
        return cls(
            actions=tuple(Action.from_dict(a) for a in data["actions"]),
            target_form=data["target_form"],
        )


@dataclass(frozen=True)
class RawScript:
    source: str
    dialect: str


TestScript = "ActionScript | RawScript"


def compile_scenario(scenario: TestScenario, spec: FormSpec,
                     document: "HtmlDocument | None" = None) -> ActionScript:
    """Reference compiler: one action per scenario field plus the submit.

    Rejects scenarios that do not validate cleanly against the form.
    """
    report = validate_against_form(scenario, spec, document)
    if not report.ok:
        raise ScenarioError(
            "scenario does not validate against %s: %s"
            % (spec.form_id, "; ".join(f.message for f in report.findings[:5])))
    actions = []
    for sf in scenario.form_fields:
        if sf.field_type == "select":
            verb = "select_option"
        elif sf.field_type in ("checkbox", "radio"):
            verb = "set_checked"
        else:
            verb = "set_value"
        actions.append(Action(locator=sf.identifier, verb=verb,
                              payload=sf.dummy_data, field_name=sf.name))
    actions.append(Action(
        locator=Identifier("css", "form#%s" % spec.form_id),
        verb="submit_form"))
    return ActionScript(actions=tuple(actions), target_form=spec.form_id)


# --- mutation engine -------------------------------------------------------

MUTATION_KINDS = (
    "wrapper_misbind", "hidden_target", "wrong_group_member", "context_leak",
    "drop_fields", "syntax_break", "disabled_target", "nonsubmit_click",
)


@dataclass(frozen=True)
class MutationKind:
    kind: str
    k: int = 1  # only meaningful for drop_fields

    def __post_init__(self):
        if self.kind not in MUTATION_KINDS:
            raise MutationError("unknown mutation kind %r" % (self.kind,))
        if self.kind == "drop_fields" and self.k < 1:
            raise MutationError("drop_fields requires k >= 1")


@dataclass(frozen=True)
class MutationResult:
    script: "ActionScript | RawScript"
    document: HtmlDocument            # page variant (may equal the input)
    altered_index: Optional[int]      # index into the original action list
    expected_category: Optional[str]  # ErrorCategory value, when failure expected
    notes: str = ""


def mutate(script: ActionScript, kind: MutationKind, document: HtmlDocument,
           seed: int, dialect: str = "selenium-py") -> MutationResult:
    """Apply one seeded mutation; inapplicable mutations raise MutationError."""
    rng = make_rng(seed)
    spec = document.spec
    handler = {
        "wrapper_misbind": _mut_wrapper,
        "hidden_target": _mut_hidden,
        "disabled_target": _mut_disabled,
        "wrong_group_member": _mut_wrong_member,
        "context_leak": _mut_context_leak,
        "drop_fields": _mut_drop_fields,
        "syntax_break": _mut_syntax_break,
        "nonsubmit_click": _mut_nonsubmit_click,
    }[kind.kind]
    return handler(script, kind, document, rng, dialect)


def _pick_action(script: ActionScript, rng, want=None) -> int:
    candidates = [i for i, a in enumerate(script.actions)
                  if a.verb != "submit_form" and (want is None or a.verb in want)]
    if not candidates:
        raise MutationError("script has no action this mutation applies to")
    return choose(rng, candidates)


def _replace_action(script: ActionScript, index: int, action: Action) -> ActionScript:
    actions = list(script.actions)
    actions[index] = action
    return ActionScript(actions=tuple(actions), target_form=script.target_form)


def _mut_wrapper(script, kind, document, rng, dialect):
    if document.style_template_id != WRAPPER_STYLE:
        raise MutationError(
            "wrapper_misbind needs the %r style template (document uses %r)"
            % (WRAPPER_STYLE, document.style_template_id))
    idx = _pick_action(script, rng)
    action = script.actions[idx]
    name = action.field_name or action.locator.value
    mutated = replace(action, locator=Identifier(
        "xpath", "//div[@id='wrap-%s']" % name))
    return MutationResult(
        script=_replace_action(script, idx, mutated),
        document=document, altered_index=idx,
        expected_category="wrapper_misbind",
        notes="locator rewritten to the styling wrapper around %r" % name)


def _inject_clone(document: HtmlDocument, field_name: str,
                  extra_attrs: str) -> HtmlDocument:
    """Insert a decoy input right after the form's opening tag."""
    marker = '<form id="%s"' % document.spec.form_id
    pos = document.text.index(marker)
    end = document.text.index(">", pos) + 1
    clone = '\n<input type="text" id="%s__decoy" name="%s"%s>' % (
        field_name, field_name, extra_attrs)
    text = document.text[:end] + clone + document.text[end:]
    return HtmlDocument(text=text, spec=document.spec,
                        style_template_id=document.style_template_id)


def _mut_hidden(script, kind, document, rng, dialect):
    idx = _pick_action(script, rng, want=("set_value",))
    action = script.actions[idx]
    name = action.field_name or action.locator.value
    variant = _inject_clone(document, name, ' style="display:none"')
    mutated = replace(action, locator=Identifier("css", "#%s__decoy" % name))
    return MutationResult(
        script=_replace_action(script, idx, mutated),
        document=variant, altered_index=idx,
        expected_category="hidden_or_disabled",
        notes="locator rewritten to an injected hidden clone of %r" % name)


def _mut_disabled(script, kind, document, rng, dialect):
    idx = _pick_action(script, rng, want=("set_value",))
    action = script.actions[idx]
    name = action.field_name or action.locator.value
    variant = _inject_clone(document, name, " disabled")
    mutated = replace(action, locator=Identifier("css", "#%s__decoy" % name))
    return MutationResult(
        script=_replace_action(script, idx, mutated),
        document=variant, altered_index=idx,
        expected_category="hidden_or_disabled",
        notes="locator rewritten to an injected disabled clone of %r" % name)


def _mut_wrong_member(script, kind, document, rng, dialect):
    spec = document.spec
    radios = {lf.name: lf for lf in logical_fields(spec) if lf.kind == "radio"}
    candidates = [i for i, a in enumerate(script.actions)
                  if a.verb == "set_checked" and a.field_name in radios
                  and len(radios[a.field_name].options) > 1]
    if not candidates:
        raise MutationError("no multi-option radio action to misbind")
    idx = choose(rng, candidates)
    action = script.actions[idx]
    lf = radios[action.field_name]
    wrong = next(o for o in lf.options if o.value != action.payload)
    member_css = ('input[name="%s"][value="%s"]' % (lf.name, wrong.value))
    mutated = Action(locator=Identifier("css", member_css), verb="click",
                     field_name=action.field_name)
    return MutationResult(
        script=_replace_action(script, idx, mutated),
        document=document, altered_index=idx,
        expected_category="wrong_group_member",
        notes="clicks group member %r instead of %r" % (wrong.value, action.payload))


def _mut_context_leak(script, kind, document, rng, dialect):
    idx = _pick_action(script, rng, want=("set_value",))
    action = script.actions[idx]
    name = action.field_name or action.locator.value
    # homonymous control in a header bar, before the form in document order
    marker = "<main"
    pos = document.text.index(marker)
    header = ('<header class="site-bar"><input type="text" name="%s" '
              'placeholder="Search"></header>\n' % name)
    text = document.text[:pos] + header + document.text[pos:]
    variant = HtmlDocument(text=text, spec=document.spec,
                           style_template_id=document.style_template_id)
    mutated = replace(action, locator=Identifier("name", name))
    return MutationResult(
        script=_replace_action(script, idx, mutated),
        document=variant, altered_index=idx,
        expected_category="context_leakage",
        notes="page variant gains an out-of-form control named %r" % name)


def _mut_drop_fields(script, kind, document, rng, dialect):
    fills = [i for i, a in enumerate(script.actions) if a.verb != "submit_form"]
    if kind.k > len(fills):
        raise MutationError(
            "cannot drop %d of %d fill actions" % (kind.k, len(fills)))
    dropped = set()
    remaining = list(fills)
    for _ in range(kind.k):
        pick = choose(rng, remaining)
        dropped.add(pick)
        remaining.remove(pick)
    actions = tuple(a for i, a in enumerate(script.actions) if i not in dropped)
    return MutationResult(
        script=ActionScript(actions=actions, target_form=script.target_form),
        document=document, altered_index=min(dropped),
        expected_category=None,
        notes="dropped %d fill action(s)" % kind.k)


def _mut_syntax_break(script, kind, document, rng, dialect):
    from .dialects import emit_source  # deferred: dialects imports this module
    raw = emit_source(script, dialect)
    broken = raw.source + "\ndef broken(:\n"
    return MutationResult(
        script=RawScript(source=broken, dialect=raw.dialect),
        document=document, altered_index=None,
        expected_category=None,
        notes="emitted source corrupted with a guaranteed parse error")


def _mut_nonsubmit_click(script, kind, document, rng, dialect):
    if not script.actions or script.actions[-1].verb != "submit_form":
        raise MutationError("script has no submit_form action to replace")
    first_fill = script.actions[0]
    actions = script.actions[:-1] + (Action(
        locator=first_fill.locator, verb="click",
        field_name=first_fill.field_name),)
    return MutationResult(
        script=ActionScript(actions=actions, target_form=script.target_form),
        document=document, altered_index=len(script.actions) - 1,
        expected_category="submit_misuse",
        notes="submit_form replaced by a click on a non-submit control")
