"""Script dialects: emitters, syntax checkers, and external runners.

Two dialects ship with the toolkit:

* ``selenium-py`` — Selenium-flavored Python, the dialect LLM-generated
  scripts arrive in. The syntax checker is Python's own parser; no runner
  is configured by default (point one at a real browser via config).
* ``webdriver-py`` — dependency-free Python that speaks the W3C wire
  protocol directly through :mod:`urllib`. Its runner works anywhere a
  Python interpreter and a WebDriver endpoint exist, so emitted scripts
  can be executed hermetically and compared against native execution.

Runner/checker command templates accept the placeholders ``{script_path}``,
``{url}`` and ``{timeout_ms}``; extra dialects or overrides load from a
JSON config file.
"""

from __future__ import annotations

import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import DialectError
from .scripts import Action, ActionScript, RawScript

_FENCE_RE = re.compile(r"^```[\w+-]*\s*\n(.*?)\n?```\s*$", re.DOTALL)


def strip_code_fences(text: str) -> str:
    """Remove one surrounding markdown code fence, if present."""
    m = _FENCE_RE.match(text.strip())
    return m.group(1) if m else text


@dataclass(frozen=True)
class Dialect:
    name: str
    checker: str = "python"            # "python" (built-in) or "external"
    checker_command: Optional[list] = None
    runner_command: Optional[list] = None  # None: dialect has no runner


_BUILTIN_DIALECTS = {
    "selenium-py": Dialect(name="selenium-py"),
    "webdriver-py": Dialect(
        name="webdriver-py",
        runner_command=[sys.executable, "{script_path}", "{url}", "{timeout_ms}"],
    ),
}

_registry: dict = dict(_BUILTIN_DIALECTS)


def get_dialect(name: str) -> Dialect:
    try:
        return _registry[name]
    except KeyError:
        raise DialectError("unknown dialect %r (known: %s)"
                           % (name, ", ".join(sorted(_registry)))) from None


def register_dialect(dialect: Dialect) -> None:
    _registry[dialect.name] = dialect


def load_dialect_config(path: "str | Path") -> None:
    """Merge dialect definitions from a JSON config file.

    Shape: {"dialects": {name: {"checker": ..., "checker_command": [...],
    "runner_command": [...]}}}
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    for name, entry in data.get("dialects", {}).items():
        base = _registry.get(name, Dialect(name=name))
        register_dialect(Dialect(
            name=name,
            checker=entry.get("checker", base.checker),
            checker_command=entry.get("checker_command", base.checker_command),
            runner_command=entry.get("runner_command", base.runner_command),
        ))


def reset_dialects() -> None:
    _registry.clear()
    _registry.update(_BUILTIN_DIALECTS)


# --- emitters --------------------------------------------------------------

def emit_source(script: ActionScript, dialect: str) -> RawScript:
    """Emit runnable source whose DOM effects equal native execution."""
    if dialect == "selenium-py":
        return RawScript(source=_emit_selenium(script), dialect=dialect)
    if dialect == "webdriver-py":
        return RawScript(source=_emit_webdriver_py(script), dialect=dialect)
    get_dialect(dialect)  # raise uniformly for unknown names
    raise DialectError("dialect %r has no emitter" % dialect)


_SELENIUM_BY = {"id": "By.ID", "name": "By.NAME",
                "css": "By.CSS_SELECTOR", "xpath": "By.XPATH"}


def _emit_selenium(script: ActionScript) -> str:
    lines = [
        "import sys",
        "",
        "from selenium import webdriver",
        "from selenium.webdriver.common.by import By",
        "from selenium.webdriver.support.ui import Select",
        "",
        "form_url = sys.argv[1]",
        "driver = webdriver.Remote(command_executor=sys.argv[2]) \\",
        "    if len(sys.argv) > 2 else webdriver.Chrome()",
        "driver.get(form_url)",
        "",
    ]
    for action in script.actions:
        by = _SELENIUM_BY[action.locator.strategy]
        loc = "%s, %r" % (by, action.locator.value)
        if action.verb == "set_value":
            lines.append("field = driver.find_element(%s)" % loc)
            lines.append("field.clear()")
            lines.append("field.send_keys(%r)" % action.payload)
        elif action.verb == "select_option":
            lines.append("Select(driver.find_element(%s)).select_by_value(%r)"
                         % (loc, action.payload))
        elif action.verb == "set_checked":
            if action.payload and action.payload not in ("true", "false"):
                lines.append(
                    "group = driver.find_element(%s)" % loc)
                lines.append(
                    "option = driver.find_element(By.CSS_SELECTOR, "
                    "'input[name=\"%s\"][value=\"%s\"]')"
                    % (action.field_name, action.payload))
                lines.append("option.click()")
            else:
                lines.append("box = driver.find_element(%s)" % loc)
                lines.append("if box.is_selected() != %r:" %
                             (action.payload != "false"))
                lines.append("    box.click()")
        elif action.verb == "click":
            lines.append("driver.find_element(%s).click()" % loc)
        elif action.verb == "submit_form":
            lines.append("form = driver.find_element(%s)" % loc)
            lines.append('driver.execute_script("arguments[0].submit();", form)')
        lines.append("")
    lines.append("driver.quit()")
    return "\n".join(lines) + "\n"


_WIRE_PRELUDE = '''\
"""Auto-generated form interaction script (W3C WebDriver over HTTP)."""

import json
import os
import sys
import urllib.request

FORM_URL = sys.argv[1] if len(sys.argv) > 1 else os.environ.get("FORM_URL", "")
ENDPOINT = os.environ.get("WEBDRIVER_URL", "http://127.0.0.1:4444").rstrip("/")
ELEMENT_KEY = "element-6066-11e4-a52e-4f735466cecf"


def wire(method, path, payload=None):
    data = None if payload is None else json.dumps(payload).encode()
    req = urllib.request.Request(ENDPOINT + path, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=30) as resp:
            return json.loads(resp.read().decode())["value"]
    except urllib.error.HTTPError as exc:
        body = json.loads(exc.read().decode())
        err = body.get("value", {})
        raise RuntimeError("%s: %s" % (err.get("error", "wire error"),
                                       err.get("message", ""))) from None


def find(session, using, value):
    res = wire("POST", "/session/%s/element" % session,
               {"using": using, "value": value})
    return res[ELEMENT_KEY]


def find_css(session, selector):
    return find(session, "css selector", selector)


session = wire("POST", "/session", {"capabilities": {}})["sessionId"]
ok = True
try:
    wire("POST", "/session/%s/url" % session, {"url": FORM_URL})
'''

_WIRE_EPILOGUE = '''\
except RuntimeError as exc:
    print("automation failure: %s" % exc, file=sys.stderr)
    ok = False
finally:
    wire("DELETE", "/session/%s" % session)
sys.exit(0 if ok else 1)
'''

_WIRE_USING = {"id": None, "name": None, "css": "css selector", "xpath": "xpath"}


def _wire_find(action: Action) -> str:
    strategy, value = action.locator.strategy, action.locator.value
    if strategy == "id":
        return 'find_css(session, %r)' % ("#" + _css_escape(value))
    if strategy == "name":
        return 'find_css(session, %r)' % ('[name="%s"]' % value)
    return 'find(session, %r, %r)' % (_WIRE_USING[strategy], value)


def _css_escape(value: str) -> str:
    return re.sub(r"([^\w-])", r"\\\1", value)


def _emit_webdriver_py(script: ActionScript) -> str:
    body = []
    for action in script.actions:
        el = _wire_find(action)
        if action.verb == "set_value":
            body.append("el = %s" % el)
            body.append('wire("POST", "/session/%s/element/%s/clear" '
                        "% (session, el), {})")
            body.append('wire("POST", "/session/%s/element/%s/value" '
                        "% (session, el), {\"text\": " + repr(action.payload) + "})")
        elif action.verb == "select_option":
            body.append("el = %s" % el)
            body.append('opt = wire("POST", "/session/%s/element/%s/element" '
                        "% (session, el), {\"using\": \"css selector\", "
                        "\"value\": 'option[value=\"" + action.payload + "\"]'})"
                        "[ELEMENT_KEY]")
            body.append('wire("POST", "/session/%s/element/%s/click" '
                        "% (session, opt), {})")
        elif action.verb == "set_checked":
            if action.payload and action.payload not in ("true", "false"):
                selector = 'input[name="%s"][value="%s"]' % (
                    action.field_name, action.payload)
                body.append("el = find_css(session, %r)" % selector)
                body.append('wire("POST", "/session/%s/element/%s/click" '
                            "% (session, el), {})")
            else:
                body.append("el = %s" % el)
                body.append('checked = wire("GET", "/session/%s/element/%s'
                            '/property/checked" % (session, el))')
                body.append("if bool(checked) != %r:" %
                            (action.payload != "false"))
                body.append('    wire("POST", "/session/%s/element/%s/click" '
                            "% (session, el), {})")
        elif action.verb == "click":
            body.append("el = %s" % el)
            body.append('wire("POST", "/session/%s/element/%s/click" '
                        "% (session, el), {})")
        elif action.verb == "submit_form":
            body.append("form = %s" % el)
            body.append('wire("POST", "/session/%s/execute/sync" % session,')
            body.append('     {"script": "arguments[0].submit();",')
            body.append('      "args": [{ELEMENT_KEY: form}]})')
        body.append("")
    indented = "\n".join(("    " + line if line else "") for line in body)
    return _WIRE_PRELUDE + indented + "\n" + _WIRE_EPILOGUE
