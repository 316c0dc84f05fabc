"""Execution harness: syntax checks, script execution, coverage collection.

The harness owns a form server and a WebDriver endpoint (the embedded
engine by default, any conformant remote via ``webdriver_url``). Native
:class:`ActionScript` execution drives the wire protocol action by
action with readiness polling; raw scripts are delegated to the dialect's
configured runner process. Coverage is collected by reading final control
states back through the wire protocol and checking them against the form
spec's constraints.
"""

from __future__ import annotations

import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .client import Session, WebDriverClient, WebDriverError
from .dialects import get_dialect, strip_code_fences
from .engine import EmbeddedEngine
from .errors import InfrastructureError
from .forms import FormSpec, HtmlDocument, LogicalField, logical_fields
from .httpserve import FormServer, ServedForm
from .scenario import dummy_problem
from .scripts import Action, ActionScript, RawScript

DEFAULT_BUDGET_MS = 30_000
READINESS_BUDGET_MS = 2_000


@dataclass(frozen=True)
class SyntaxReport:
    valid: bool
    diagnostics: tuple = ()

    def to_dict(self) -> dict:
        return {"valid": self.valid,
                "diagnostics": [dict(d) for d in self.diagnostics]}


@dataclass(frozen=True)
class ExecutionReport:
    status: str  # success | automation_error | runner_error | timeout
    failed_action_index: Optional[int] = None
    error_class: Optional[str] = None
    wall_time_ms: int = 0

    def to_dict(self) -> dict:
        return {"status": self.status,
                "failed_action_index": self.failed_action_index,
                "error_class": self.error_class,
                "wall_time_ms": self.wall_time_ms}


@dataclass(frozen=True)
class CoverageReport:
    denominator_fields: tuple
    covered_fields: tuple

    @property
    def coverage(self) -> float:
        if not self.denominator_fields:
            return 0.0
        return len(self.covered_fields) / len(self.denominator_fields)

    def to_dict(self) -> dict:
        return {"denominator_fields": list(self.denominator_fields),
                "covered_fields": list(self.covered_fields),
                "coverage": self.coverage}


def check_syntax(script, strip_fences: bool = True) -> SyntaxReport:
    """Syntax verdict: schema validity for action scripts, a parser run
    for raw sources. Checker absence is an infrastructure error, not an
    invalid verdict."""
    if isinstance(script, ActionScript):
        return SyntaxReport(valid=True)
    dialect = get_dialect(script.dialect)
    source = strip_code_fences(script.source) if strip_fences else script.source
    if dialect.checker == "python":
        try:
            compile(source, "<script>", "exec")
        except SyntaxError as exc:
            return SyntaxReport(valid=False, diagnostics=(
                {"line": exc.lineno or 0, "column": exc.offset or 0,
                 "message": exc.msg or "syntax error"},))
        return SyntaxReport(valid=True)
    if not dialect.checker_command:
        raise InfrastructureError(
            "dialect %r has no syntax checker configured" % script.dialect)
    with tempfile.TemporaryDirectory(prefix="formbench-chk-") as tmp:
        path = Path(tmp) / "script.txt"
        path.write_text(source, encoding="utf-8")
        command = [part.format(script_path=str(path), url="", timeout_ms="0")
                   for part in dialect.checker_command]
        try:
            proc = subprocess.run(command, capture_output=True, text=True,
                                  timeout=60)
        except FileNotFoundError as exc:
            raise InfrastructureError(
                "syntax checker %r not found" % command[0]) from exc
    if proc.returncode == 0:
        return SyntaxReport(valid=True)
    message = (proc.stderr or proc.stdout).strip()[:500] or "checker failed"
    return SyntaxReport(valid=False,
                        diagnostics=({"line": 0, "column": 0, "message": message},))


_STRATEGY_TO_WIRE = {"css": "css selector", "xpath": "xpath"}


def locator_to_wire(locator) -> tuple[str, str]:
    if locator.strategy == "id":
        return "css selector", "#%s" % _css_escape(locator.value)
    if locator.strategy == "name":
        return "css selector", '[name="%s"]' % locator.value
    return _STRATEGY_TO_WIRE[locator.strategy], locator.value


def _css_escape(value: str) -> str:
    import re
    return re.sub(r"([^\w-])", r"\\\1", value)


class Harness:
    """Form server + WebDriver endpoint bundle.

    With no ``webdriver_url`` an embedded engine is started and owned by
    this object. Use as a context manager.
    """

    def __init__(self, webdriver_url: "str | None" = None,
                 budget_ms: int = DEFAULT_BUDGET_MS,
                 readiness_ms: int = READINESS_BUDGET_MS):
        self.budget_ms = budget_ms
        self.readiness_ms = readiness_ms
        self._own_engine: "EmbeddedEngine | None" = None
        self._webdriver_url = webdriver_url
        self.server = FormServer()
        self.client: "WebDriverClient | None" = None

    def __enter__(self) -> "Harness":
        self.server.start()
        if self._webdriver_url is None:
            self._own_engine = EmbeddedEngine().start()
            self._webdriver_url = self._own_engine.endpoint
        self.client = WebDriverClient(self._webdriver_url)
        self.client.status()  # fail fast when the endpoint is unreachable
        return self

    def __exit__(self, *exc) -> None:
        self.server.stop()
        if self._own_engine is not None:
            self._own_engine.stop()
            self._own_engine = None

    @property
    def webdriver_url(self) -> str:
        if self._webdriver_url is None:
            raise InfrastructureError("harness not started")
        return self._webdriver_url

    def serve_form(self, doc: HtmlDocument, instrument: bool = False) -> ServedForm:
        return self.server.serve_form(doc, instrument=instrument)

    # -- execution -----------------------------------------------------------

    def execute(self, script, form: ServedForm,
                budget_ms: "int | None" = None) -> ExecutionReport:
        budget = self.budget_ms if budget_ms is None else budget_ms
        if budget <= 0:
            raise InfrastructureError("execution budget must be positive")
        if isinstance(script, ActionScript):
            return self._execute_native(script, form, budget)
        return self._execute_raw(script, form, budget)

    def _execute_native(self, script: ActionScript, form: ServedForm,
                        budget_ms: int) -> ExecutionReport:
        started = time.monotonic()
        deadline = started + budget_ms / 1000.0

        def elapsed_ms() -> int:
            return int((time.monotonic() - started) * 1000)

        session = self.client.new_session()
        try:
            session.navigate(form.url)
            for index, action in enumerate(script.actions):
                if time.monotonic() > deadline:
                    return ExecutionReport("timeout", failed_action_index=index,
                                           error_class="budget exhausted",
                                           wall_time_ms=elapsed_ms())
                try:
                    element = self._resolve_ready(session, action, deadline)
                    self._perform(session, action, element, form)
                except WebDriverError as exc:
                    return ExecutionReport(
                        "automation_error", failed_action_index=index,
                        error_class=exc.error, wall_time_ms=elapsed_ms())
            return ExecutionReport("success", wall_time_ms=elapsed_ms())
        finally:
            session.close()

    def _resolve_ready(self, session: Session, action: Action,
                       deadline: float) -> str:
        using, value = locator_to_wire(action.locator)
        poll_deadline = min(deadline,
                            time.monotonic() + self.readiness_ms / 1000.0)
        while True:
            try:
                return session.find(using, value)
            except WebDriverError as exc:
                if exc.error != "no such element" or time.monotonic() > poll_deadline:
                    raise
                time.sleep(0.02)

    def _perform(self, session: Session, action: Action, element: str,
                 form: ServedForm) -> None:
        verb = action.verb
        if verb == "set_value":
            session.clear(element)
            session.send_keys(element, action.payload)
        elif verb == "select_option":
            if session.tag_name(element) != "select":
                raise WebDriverError(
                    "element not interactable",
                    "select_option target is <%s>, not a select"
                    % session.tag_name(element))
            option = session.find_from(
                element, "css selector",
                'option[value="%s"]' % action.payload)
            session.click(option)
        elif verb == "set_checked":
            self._set_checked(session, action, element)
        elif verb == "click":
            session.click(element)
        elif verb == "submit_form":
            session.execute("arguments[0].submit();",
                            [session.element_ref(element)])

    def _set_checked(self, session: Session, action: Action, element: str) -> None:
        tag = session.tag_name(element)
        itype = (session.get_attribute(element, "type") or "").lower()
        if tag != "input" or itype not in ("checkbox", "radio"):
            raise WebDriverError(
                "element not interactable",
                "set_checked target is <%s type=%s>, not a checkable input"
                % (tag, itype or "?"))
        payload = action.payload
        if itype == "radio" and payload not in (None, "true", "false"):
            name = session.get_attribute(element, "name")
            member = session.find(
                "css selector",
                'input[name="%s"][value="%s"]' % (name, payload))
            session.click(member)
            return
        want = payload != "false"
        if bool(session.get_property(element, "checked")) != want:
            session.click(element)

    def _execute_raw(self, script: RawScript, form: ServedForm,
                     budget_ms: int) -> ExecutionReport:
        dialect = get_dialect(script.dialect)
        if not dialect.runner_command:
            raise InfrastructureError(
                "dialect %r has no runner configured" % script.dialect)
        started = time.monotonic()
        with tempfile.TemporaryDirectory(prefix="formbench-run-") as tmp:
            path = Path(tmp) / "script.py"
            path.write_text(strip_code_fences(script.source), encoding="utf-8")
            command = [part.format(script_path=str(path), url=form.url,
                                   timeout_ms=str(budget_ms))
                       for part in dialect.runner_command]
            env = {"WEBDRIVER_URL": self.webdriver_url, "FORM_URL": form.url,
                   "PATH": "/usr/bin:/bin:/usr/local/bin"}
            try:
                proc = subprocess.run(command, capture_output=True, text=True,
                                      timeout=budget_ms / 1000.0, env=env)
            except FileNotFoundError as exc:
                raise InfrastructureError(
                    "runner %r not found" % command[0]) from exc
            except subprocess.TimeoutExpired:
                return ExecutionReport(
                    "timeout", error_class="runner exceeded %d ms" % budget_ms,
                    wall_time_ms=int((time.monotonic() - started) * 1000))
        wall = int((time.monotonic() - started) * 1000)
        if proc.returncode == 0:
            return ExecutionReport("success", wall_time_ms=wall)
        detail = (proc.stderr or proc.stdout).strip().splitlines()
        return ExecutionReport(
            "runner_error",
            error_class=(detail[-1][:200] if detail else
                         "runner exited %d" % proc.returncode),
            wall_time_ms=wall)

    # -- coverage ------------------------------------------------------------

    def collect_coverage(self, form: ServedForm,
                         required_only: bool = False) -> CoverageReport:
        """Read final control states and grade them against the spec.

        The denominator is every non-hidden, non-submit field (radio
        groups count once); ``required_only`` restricts it to the
        prompt's required-field regime.
        """
        fields = logical_fields(form.spec)
        if required_only:
            fields = [lf for lf in fields if lf.required]
        session = self.client.new_session()
        try:
            session.navigate(form.url)
            form_el = session.find("css selector",
                                   "form#%s" % _css_escape(form.spec.form_id))
            covered = []
            for lf in fields:
                if self._field_covered(session, form_el, lf):
                    covered.append(lf.name)
        finally:
            session.close()
        return CoverageReport(
            denominator_fields=tuple(lf.name for lf in fields),
            covered_fields=tuple(covered))

    def _field_covered(self, session: Session, form_el: str,
                       lf: LogicalField) -> bool:
        try:
            members = session.find_all_from(
                form_el, "css selector", '[name="%s"]' % lf.name)
        except WebDriverError:
            return False
        if not members:
            return False
        if lf.kind == "radio":
            checked = [m for m in members
                       if bool(session.get_property(m, "checked"))]
            return len(checked) == 1
        element = members[0]
        if lf.kind == "checkbox":
            return bool(session.get_property(element, "checked"))
        value = session.get_property(element, "value") or ""
        if lf.kind == "select":
            return value != ""
        if not value:
            return False
        return dummy_problem(str(value), lf) is None

    def page_source(self, form: ServedForm) -> str:
        session = self.client.new_session()
        try:
            session.navigate(form.url)
            return session.source()
        finally:
            session.close()

    def read_event_log(self, form: ServedForm) -> "dict | None":
        """Fetch the recorder log when the page was instrumented and the
        remote end executes scripts; None when absent."""
        if not form.instrumented:
            raise InfrastructureError("form was served without instrumentation")
        session = self.client.new_session()
        try:
            session.navigate(form.url)
            try:
                node = session.find("css selector", "#__interaction_log__")
            except WebDriverError:
                return None
            import json
            raw = session.get_property(node, "textContent") or ""
            try:
                return json.loads(raw)
            except ValueError:
                return None
        finally:
            session.close()
