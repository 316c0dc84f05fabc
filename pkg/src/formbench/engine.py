"""Embedded headless page engine speaking W3C WebDriver over HTTP.

Implements the protocol subset the toolkit (and its emitted scripts)
exercises: session lifecycle, navigation, element finding by CSS/XPath,
send-keys/clear/click, property/attribute reads, page source, and a
recognized form-submission script for ``execute/sync``. Interactability
follows browser behavior: typing into a non-typable, hidden, or disabled
element raises ``element not interactable``; clicking a hidden element
does too.

Page state is keyed by URL and shared across sessions, so a script run by
an external process and a subsequent coverage read observe the same DOM.
Fresh serves always get fresh URLs, which preserves isolation between
executions. JavaScript is not executed; injected recorder scripts are
inert here (they are exercised against real browsers and in the frontend
test suite).

The engine only navigates to localhost URLs; there is no network egress.
"""

from __future__ import annotations

import json
import re
import threading
import urllib.error
import urllib.parse
import urllib.request
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .dom import DomDocument, DomNode, SelectorError, parse_html
from .errors import InfrastructureError

ELEMENT_KEY = "element-6066-11e4-a52e-4f735466cecf"
_LOCAL_HOSTS = {"127.0.0.1", "localhost", "::1"}


class WireError(Exception):
    def __init__(self, http_status: int, error: str, message: str):
        super().__init__(message)
        self.http_status = http_status
        self.error = error
        self.message = message


def _err(status, code, message):
    return WireError(status, code, message)


class _Page:
    def __init__(self, doc: DomDocument, url: str):
        self.doc = doc
        self.url = url
        self.last_submission: "tuple[int, str] | None" = None


class EngineState:
    def __init__(self):
        self.lock = threading.RLock()
        self.sessions: dict[str, "str | None"] = {}   # session id -> current page url
        self.pages: dict[str, _Page] = {}
        self.elements: dict[str, tuple[str, DomNode]] = {}  # el id -> (url, node)

    # -- helpers ------------------------------------------------------------

    def session_page(self, session_id: str) -> _Page:
        if session_id not in self.sessions:
            raise _err(404, "invalid session id", "no session %s" % session_id)
        url = self.sessions[session_id]
        if url is None:
            raise _err(400, "no such window", "session has not navigated yet")
        return self.pages[url]

    def register(self, url: str, node: DomNode) -> str:
        el_id = uuid.uuid4().hex
        self.elements[el_id] = (url, node)
        return el_id

    def node(self, session_id: str, el_id: str) -> DomNode:
        page = self.session_page(session_id)
        entry = self.elements.get(el_id)
        if entry is None or entry[0] != page.url:
            raise _err(404, "stale element reference",
                       "element %s is not attached to the current page" % el_id)
        return entry[1]


def _fetch_page(url: str) -> str:
    parsed = urllib.parse.urlsplit(url)
    if parsed.hostname not in _LOCAL_HOSTS:
        raise _err(500, "unknown error",
                   "embedded engine only navigates to localhost, got %r" % url)
    try:
        with urllib.request.urlopen(url, timeout=10) as resp:
            return resp.read().decode("utf-8")
    except (urllib.error.URLError, OSError) as exc:
        raise _err(500, "unknown error", "navigation to %s failed: %s" % (url, exc))


def _find_nodes(root: DomNode, using: str, value: str) -> list[DomNode]:
    try:
        if using == "css selector":
            from .dom import query_css
            return query_css(root, value)
        if using == "xpath":
            from .dom import query_xpath
            return query_xpath(root, value)
        if using == "tag name":
            return [n for n in root.iter() if n.tag == value.lower()]
    except SelectorError as exc:
        raise _err(400, "invalid selector", str(exc))
    raise _err(400, "invalid argument", "unsupported location strategy %r" % using)


def _select_value(select: DomNode) -> str:
    for opt in select.iter():
        if opt.tag == "option" and opt.selected:
            return opt.value if opt.get("value") is not None else opt.text().strip()
    return ""


def _require_interactable(node: DomNode, for_typing: bool) -> None:
    if not node.is_displayed():
        raise _err(400, "element not interactable",
                   "element <%s> is not displayed" % node.tag)
    if for_typing:
        if not node.is_typable():
            raise _err(400, "element not interactable",
                       "element <%s> does not accept keyboard input" % node.tag)
        if not node.is_enabled():
            raise _err(400, "element not interactable",
                       "element <%s> is disabled" % node.tag)


def _apply_click(state: EngineState, page: _Page, node: DomNode) -> None:
    if not node.is_displayed():
        raise _err(400, "element not interactable",
                   "element <%s> is not displayed" % node.tag)
    if not node.is_enabled():
        return  # browsers swallow clicks on disabled controls
    itype = node.input_type
    if node.tag == "input" and itype == "checkbox":
        node.checked = not node.checked
    elif node.tag == "input" and itype == "radio":
        form = node.owning_form()
        scope = form if form is not None else _page_root(node)
        name = node.get("name")
        for peer in scope.iter():
            if (peer.tag == "input" and peer.input_type == "radio"
                    and peer.get("name") == name):
                peer.checked = peer is node
    elif node.tag == "option":
        select = next((a for a in node.ancestors() if a.tag == "select"), None)
        if select is not None:
            for opt in select.iter():
                if opt.tag == "option":
                    opt.selected = opt is node
            select.value = _select_value(select)
    elif (node.tag == "button" and (node.get("type") or "submit") == "submit") or (
            node.tag == "input" and itype == "submit"):
        form = node.owning_form()
        if form is not None:
            _submit_form(page, form)
    # clicks on anything else are accepted and have no DOM effect


def _page_root(node: DomNode) -> DomNode:
    root = node
    while root.parent is not None:
        root = root.parent
    return root


def _submit_form(page: _Page, form: DomNode) -> None:
    data = []
    for node in form.iter():
        name = node.get("name")
        if not name:
            continue
        if node.tag == "input":
            itype = node.input_type
            if itype in ("checkbox", "radio"):
                if node.checked:
                    data.append((name, node.value or "on"))
            elif itype not in ("submit", "button"):
                data.append((name, node.value))
        elif node.tag == "textarea":
            data.append((name, node.value))
        elif node.tag == "select":
            data.append((name, _select_value(node)))
    action = form.get("action") or ""
    target = urllib.parse.urljoin(page.url, action)
    body = urllib.parse.urlencode(data).encode()
    try:
        req = urllib.request.Request(target, data=body, method="POST")
        with urllib.request.urlopen(req, timeout=10) as resp:
            page.last_submission = (resp.status, resp.read().decode("utf-8", "replace"))
    except (urllib.error.URLError, OSError) as exc:
        page.last_submission = (0, str(exc))


_ROUTES = []


def route(method: str, pattern: str):
    regex = re.compile("^" + pattern + "$")

    def wrap(fn):
        _ROUTES.append((method, regex, fn))
        return fn
    return wrap


@route("GET", r"/status")
def _status(state, m, body):
    return {"ready": True, "message": "formbench embedded engine"}


@route("POST", r"/session")
def _new_session(state, m, body):
    session_id = uuid.uuid4().hex
    state.sessions[session_id] = None
    return {"sessionId": session_id,
            "capabilities": {"browserName": "formbench-embedded",
                             "browserVersion": "0.1"}}


@route("DELETE", r"/session/(?P<sid>\w+)")
def _delete_session(state, m, body):
    state.sessions.pop(m["sid"], None)
    return None


@route("POST", r"/session/(?P<sid>\w+)/url")
def _navigate(state, m, body):
    if m["sid"] not in state.sessions:
        raise _err(404, "invalid session id", "no session %s" % m["sid"])
    url = body.get("url", "")
    if url not in state.pages:
        text = _fetch_page(url)
        state.pages[url] = _Page(parse_html(text), url)
    state.sessions[m["sid"]] = url
    return None


@route("GET", r"/session/(?P<sid>\w+)/url")
def _current_url(state, m, body):
    page = state.session_page(m["sid"])
    return page.url


@route("GET", r"/session/(?P<sid>\w+)/source")
def _source(state, m, body):
    return state.session_page(m["sid"]).doc.to_html()


def _do_find(state, m, body, scope: DomNode, page) -> list:
    using = body.get("using", "")
    value = body.get("value", "")
    return _find_nodes(scope, using, value)


@route("POST", r"/session/(?P<sid>\w+)/element")
def _find_element(state, m, body):
    page = state.session_page(m["sid"])
    nodes = _do_find(state, m, body, page.doc.root, page)
    if not nodes:
        raise _err(404, "no such element",
                   "no element matches %s=%r" % (body.get("using"), body.get("value")))
    return {ELEMENT_KEY: state.register(page.url, nodes[0])}


@route("POST", r"/session/(?P<sid>\w+)/elements")
def _find_elements(state, m, body):
    page = state.session_page(m["sid"])
    nodes = _do_find(state, m, body, page.doc.root, page)
    return [{ELEMENT_KEY: state.register(page.url, n)} for n in nodes]


@route("POST", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/element")
def _find_from(state, m, body):
    page = state.session_page(m["sid"])
    node = state.node(m["sid"], m["eid"])
    nodes = _do_find(state, m, body, node, page)
    nodes = [n for n in nodes if n is not node]
    if not nodes:
        raise _err(404, "no such element",
                   "no descendant matches %s=%r" % (body.get("using"),
                                                    body.get("value")))
    return {ELEMENT_KEY: state.register(page.url, nodes[0])}


@route("POST", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/elements")
def _find_all_from(state, m, body):
    page = state.session_page(m["sid"])
    node = state.node(m["sid"], m["eid"])
    nodes = [n for n in _do_find(state, m, body, node, page) if n is not node]
    return [{ELEMENT_KEY: state.register(page.url, n)} for n in nodes]


@route("POST", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/value")
def _send_keys(state, m, body):
    node = state.node(m["sid"], m["eid"])
    _require_interactable(node, for_typing=True)
    text = body.get("text", "")
    value = node.value + text
    maxlength = node.get("maxlength")
    if maxlength and maxlength.isdigit():
        value = value[:int(maxlength)]
    node.value = value
    return None


@route("POST", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/clear")
def _clear(state, m, body):
    node = state.node(m["sid"], m["eid"])
    _require_interactable(node, for_typing=True)
    node.value = ""
    return None


@route("POST", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/click")
def _click(state, m, body):
    page = state.session_page(m["sid"])
    node = state.node(m["sid"], m["eid"])
    _apply_click(state, page, node)
    return None


@route("GET", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/property/(?P<name>[\w-]+)")
def _property(state, m, body):
    node = state.node(m["sid"], m["eid"])
    name = m["name"]
    if name == "value":
        return _select_value(node) if node.tag == "select" else node.value
    if name == "checked":
        return node.checked
    if name == "selected":
        return node.selected
    if name == "selectedIndex" and node.tag == "select":
        options = [n for n in node.iter() if n.tag == "option"]
        return next((i for i, o in enumerate(options) if o.selected), -1)
    if name == "textContent":
        return node.text()
    if name == "tagName":
        return node.tag.upper()
    if name == "disabled":
        return not node.is_enabled()
    return node.get(name)


@route("GET", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/attribute/(?P<name>[\w-]+)")
def _attribute(state, m, body):
    node = state.node(m["sid"], m["eid"])
    return node.get(m["name"])


@route("GET", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/text")
def _text(state, m, body):
    return state.node(m["sid"], m["eid"]).text().strip()


@route("GET", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/name")
def _tag_name(state, m, body):
    return state.node(m["sid"], m["eid"]).tag


@route("GET", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/enabled")
def _enabled(state, m, body):
    return state.node(m["sid"], m["eid"]).is_enabled()


@route("GET", r"/session/(?P<sid>\w+)/element/(?P<eid>\w+)/displayed")
def _displayed(state, m, body):
    return state.node(m["sid"], m["eid"]).is_displayed()


@route("POST", r"/session/(?P<sid>\w+)/execute/sync")
def _execute(state, m, body):
    page = state.session_page(m["sid"])
    script = (body.get("script") or "").strip()
    args = body.get("args") or []
    if "submit()" in script:
        if not args or not isinstance(args[0], dict) or ELEMENT_KEY not in args[0]:
            raise _err(500, "javascript error",
                       "submit script expects an element argument")
        node = state.node(m["sid"], args[0][ELEMENT_KEY])
        form = node if node.tag == "form" else node.owning_form()
        if form is None:
            raise _err(500, "javascript error", "element has no owning form")
        _submit_form(page, form)
        return None
    if script == "return document.readyState":
        return "complete"
    raise _err(500, "javascript error",
               "embedded engine cannot evaluate arbitrary scripts: %r"
               % script[:80])


class _EngineHandler(BaseHTTPRequestHandler):
    server_version = "FormBenchEngine/0.1"

    def _dispatch(self, method):
        state: EngineState = self.server.state  # type: ignore[attr-defined]
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            body = json.loads(raw.decode()) if raw else {}
        except json.JSONDecodeError:
            body = {}
        path = urllib.parse.urlsplit(self.path).path.rstrip("/") or "/"
        for m_method, regex, fn in _ROUTES:
            if m_method != method:
                continue
            match = regex.match(path)
            if match:
                try:
                    with state.lock:
                        value = fn(state, match.groupdict(), body)
                    self._reply(200, {"value": value})
                except WireError as exc:
                    self._reply(exc.http_status, {"value": {
                        "error": exc.error, "message": exc.message,
                        "stacktrace": ""}})
                except Exception as exc:  # engine bug surfaced to the client
                    self._reply(500, {"value": {
                        "error": "unknown error", "message": repr(exc),
                        "stacktrace": ""}})
                return
        self._reply(404, {"value": {"error": "unknown command",
                                    "message": "%s %s" % (method, path),
                                    "stacktrace": ""}})

    def _reply(self, status, payload):
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def log_message(self, fmt, *args):
        pass


class EmbeddedEngine:
    """In-process WebDriver endpoint; start() returns the endpoint URL."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._host = host
        self._port = port
        self._httpd: "ThreadingHTTPServer | None" = None
        self._thread: "threading.Thread | None" = None

    def start(self) -> "EmbeddedEngine":
        self._httpd = ThreadingHTTPServer((self._host, self._port), _EngineHandler)
        self._httpd.state = EngineState()  # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None

    def __enter__(self) -> "EmbeddedEngine":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    @property
    def endpoint(self) -> str:
        if self._httpd is None:
            raise InfrastructureError("embedded engine is not running")
        host, port = self._httpd.server_address[:2]
        return "http://%s:%d" % (host, port)
