"""Embedded HTTP server that hosts generated forms plus the submit echo.

Each ``serve`` call yields a unique URL; the echo endpoint answers every
POST with status 200 and a fixed body so ``form.submit()`` succeeds
without leaving localhost.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources

from .errors import InfrastructureError
from .forms import FormSpec, HtmlDocument

ECHO_BODY = b"submission received\n"
RECORDER_NODE_ID = "__interaction_log__"


@dataclass(frozen=True)
class ServedForm:
    url: str
    spec: FormSpec
    instrumented: bool
    token: str


def _recorder_script() -> str:
    data = resources.files("formbench.assets").joinpath("recorder.js").read_text(
        encoding="utf-8")
    return data


def instrument_html(text: str) -> str:
    """Inject the interaction recorder just before </body>.

    No control attribute is touched; the recorder creates its own reserved
    log node at runtime.
    """
    script = "<script>\n%s\n</script>\n" % _recorder_script()
    idx = text.rfind("</body>")
    if idx < 0:
        return text + script
    return text[:idx] + script + text[idx:]


class _Handler(BaseHTTPRequestHandler):
    server_version = "FormBench/0.1"

    def do_GET(self):
        body = self.server.pages.get(self.path)  # type: ignore[attr-defined]
        if body is None:
            self.send_response(404)
            self.end_headers()
            self.wfile.write(b"not found\n")
            return
        self.send_response(200)
        self.send_header("Content-Type", "text/html; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        # every POST is the submit echo
        length = int(self.headers.get("Content-Length") or 0)
        if length:
            self.rfile.read(length)
        self.send_response(200)
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(ECHO_BODY)))
        self.end_headers()
        self.wfile.write(ECHO_BODY)

    def log_message(self, fmt, *args):  # quiet by default
        pass


class FormServer:
    """Thread-backed server; use as a context manager or start()/stop()."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._host = host
        self._port = port
        self._httpd: "ThreadingHTTPServer | None" = None
        self._thread: "threading.Thread | None" = None
        self._counter = itertools.count()

    def start(self) -> "FormServer":
        self._httpd = ThreadingHTTPServer((self._host, self._port), _Handler)
        self._httpd.pages = {}  # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None

    def __enter__(self) -> "FormServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    @property
    def base_url(self) -> str:
        if self._httpd is None:
            raise InfrastructureError("form server is not running")
        host, port = self._httpd.server_address[:2]
        return "http://%s:%d" % (host, port)

    def serve_form(self, doc: HtmlDocument, instrument: bool = False) -> ServedForm:
        """Host one document under a fresh unique URL."""
        if self._httpd is None:
            raise InfrastructureError("form server is not running")
        token = "%06d" % next(self._counter)
        text = instrument_html(doc.text) if instrument else doc.text
        path = "/forms/%s" % token
        self._httpd.pages[path] = text.encode("utf-8")  # type: ignore[attr-defined]
        return ServedForm(url=self.base_url + path, spec=doc.spec,
                          instrumented=instrument, token=token)
