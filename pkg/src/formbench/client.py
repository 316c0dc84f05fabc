"""Thin W3C WebDriver wire-protocol client.

Endpoint-agnostic: works against the embedded engine or any conformant
remote end (Chromedriver, Geckodriver, Selenium Grid). Protocol failures
raise :class:`WebDriverError` carrying the remote error code; transport
failures raise :class:`InfrastructureError`.
"""

from __future__ import annotations

from typing import Any, Optional

import requests

from .errors import FormbenchError, InfrastructureError

ELEMENT_KEY = "element-6066-11e4-a52e-4f735466cecf"


class WebDriverError(FormbenchError):
    def __init__(self, error: str, message: str):
        super().__init__("%s: %s" % (error, message))
        self.error = error
        self.message = message


class WebDriverClient:
    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._http = requests.Session()

    def _request(self, method: str, path: str, payload: "dict | None" = None) -> Any:
        url = self.endpoint + path
        try:
            resp = self._http.request(method, url, json=payload,
                                      timeout=self.timeout)
        except requests.RequestException as exc:
            raise InfrastructureError(
                "webdriver endpoint %s unreachable: %s" % (self.endpoint, exc)
            ) from exc
        try:
            body = resp.json()
        except ValueError as exc:
            raise InfrastructureError(
                "non-JSON response from %s: %r" % (url, resp.text[:200])) from exc
        value = body.get("value")
        if resp.status_code >= 400:
            if isinstance(value, dict) and "error" in value:
                raise WebDriverError(value["error"], value.get("message", ""))
            raise InfrastructureError("HTTP %d from %s" % (resp.status_code, url))
        return value

    # -- session ------------------------------------------------------------

    def status(self) -> dict:
        return self._request("GET", "/status")

    def new_session(self, capabilities: "dict | None" = None) -> "Session":
        value = self._request("POST", "/session",
                              {"capabilities": capabilities or {}})
        return Session(self, value["sessionId"], value.get("capabilities", {}))


class Session:
    def __init__(self, client: WebDriverClient, session_id: str,
                 capabilities: dict):
        self.client = client
        self.session_id = session_id
        self.capabilities = capabilities

    def _req(self, method: str, path: str, payload: "dict | None" = None) -> Any:
        return self.client._request(
            method, "/session/%s%s" % (self.session_id, path), payload)

    def close(self) -> None:
        try:
            self._req("DELETE", "")
        except (WebDriverError, InfrastructureError):
            pass

    def __enter__(self) -> "Session":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- navigation / page ---------------------------------------------------

    def navigate(self, url: str) -> None:
        self._req("POST", "/url", {"url": url})

    def source(self) -> str:
        return self._req("GET", "/source")

    # -- elements ------------------------------------------------------------

    def find(self, using: str, value: str) -> str:
        return self._req("POST", "/element",
                         {"using": using, "value": value})[ELEMENT_KEY]

    def find_all(self, using: str, value: str) -> list:
        found = self._req("POST", "/elements", {"using": using, "value": value})
        return [item[ELEMENT_KEY] for item in found]

    def find_from(self, element: str, using: str, value: str) -> str:
        return self._req("POST", "/element/%s/element" % element,
                         {"using": using, "value": value})[ELEMENT_KEY]

    def find_all_from(self, element: str, using: str, value: str) -> list:
        found = self._req("POST", "/element/%s/elements" % element,
                          {"using": using, "value": value})
        return [item[ELEMENT_KEY] for item in found]

    def send_keys(self, element: str, text: str) -> None:
        self._req("POST", "/element/%s/value" % element, {"text": text})

    def clear(self, element: str) -> None:
        self._req("POST", "/element/%s/clear" % element, {})

    def click(self, element: str) -> None:
        self._req("POST", "/element/%s/click" % element, {})

    def get_property(self, element: str, name: str) -> Any:
        return self._req("GET", "/element/%s/property/%s" % (element, name))

    def get_attribute(self, element: str, name: str) -> Optional[str]:
        return self._req("GET", "/element/%s/attribute/%s" % (element, name))

    def text(self, element: str) -> str:
        return self._req("GET", "/element/%s/text" % element)

    def tag_name(self, element: str) -> str:
        return self._req("GET", "/element/%s/name" % element)

    def execute(self, script: str, args: "list | None" = None) -> Any:
        return self._req("POST", "/execute/sync",
                         {"script": script, "args": args or []})

    def element_ref(self, element: str) -> dict:
        return {ELEMENT_KEY: element}
