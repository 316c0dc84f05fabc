"""Wire-protocol semantics of the embedded page engine."""

from __future__ import annotations

import json
import urllib.request

import pytest

from formbench.client import WebDriverError

PAGE = """
<!doctype html><html><head><title>t</title></head><body>
<form id="f" action="/submit" method="post">
  <label for="city">City</label>
  <input type="text" id="city" name="city" maxlength="6">
  <input type="checkbox" name="news" value="on">
  <label><input type="radio" name="plan" value="a"> A</label>
  <label><input type="radio" name="plan" value="b"> B</label>
  <select name="country"><option value="">--</option>
    <option value="us">US</option><option value="fr">FR</option></select>
  <input type="text" name="ghost" style="display:none">
  <input type="text" name="frozen" disabled>
  <button type="submit" id="f-submit">Go</button>
</form>
</body></html>
"""


@pytest.fixture()
def session(harness):
    from formbench.dom import recover_spec
    from formbench.forms import HtmlDocument
    doc = HtmlDocument(text=PAGE, spec=recover_spec(PAGE),
                       style_template_id="classic")
    served = harness.serve_form(doc)
    s = harness.client.new_session()
    s.navigate(served.url)
    yield s, served
    s.close()


def test_status_is_ready(harness):
    assert harness.client.status()["ready"] is True


def test_find_and_send_keys_with_maxlength(session):
    s, _ = session
    el = s.find("css selector", "#city")
    s.send_keys(el, "Minneapolis")
    assert s.get_property(el, "value") == "Minnea"  # maxlength=6
    s.clear(el)
    assert s.get_property(el, "value") == ""


def test_find_missing_element_raises_no_such_element(session):
    s, _ = session
    with pytest.raises(WebDriverError) as err:
        s.find("css selector", "#nope")
    assert err.value.error == "no such element"


def test_checkbox_and_radio_click_semantics(session):
    s, _ = session
    box = s.find("css selector", '[name="news"]')
    s.click(box)
    assert s.get_property(box, "checked") is True
    s.click(box)
    assert s.get_property(box, "checked") is False
    a = s.find("css selector", 'input[name="plan"][value="a"]')
    b = s.find("css selector", 'input[name="plan"][value="b"]')
    s.click(a)
    s.click(b)
    assert s.get_property(a, "checked") is False
    assert s.get_property(b, "checked") is True


def test_select_via_option_click(session):
    s, _ = session
    select = s.find("css selector", "select")
    option = s.find_from(select, "css selector", 'option[value="fr"]')
    s.click(option)
    assert s.get_property(select, "value") == "fr"


def test_hidden_input_is_not_interactable(session):
    s, _ = session
    ghost = s.find("css selector", '[name="ghost"]')
    with pytest.raises(WebDriverError) as err:
        s.send_keys(ghost, "boo")
    assert err.value.error == "element not interactable"


def test_disabled_input_rejects_keys(session):
    s, _ = session
    frozen = s.find("css selector", '[name="frozen"]')
    with pytest.raises(WebDriverError) as err:
        s.send_keys(frozen, "boo")
    assert err.value.error == "element not interactable"


def test_execute_submit_records_submission(session, harness):
    s, served = session
    form = s.find("css selector", "form#f")
    s.execute("arguments[0].submit();", [s.element_ref(form)])
    # state persists across sessions keyed by URL
    s2 = harness.client.new_session()
    try:
        s2.navigate(served.url)
        assert s2.execute("return document.readyState", []) == "complete"
    finally:
        s2.close()


def test_page_state_is_shared_across_sessions(session, harness):
    s, served = session
    el = s.find("css selector", "#city")
    s.send_keys(el, "Lyon")
    s2 = harness.client.new_session()
    try:
        s2.navigate(served.url)
        el2 = s2.find("css selector", "#city")
        assert s2.get_property(el2, "value") == "Lyon"
    finally:
        s2.close()


def test_two_serves_are_isolated(harness):
    from formbench.dom import recover_spec
    from formbench.forms import HtmlDocument
    doc = HtmlDocument(text=PAGE, spec=recover_spec(PAGE),
                       style_template_id="classic")
    a, b = harness.serve_form(doc), harness.serve_form(doc)
    assert a.url != b.url
    s = harness.client.new_session()
    try:
        s.navigate(a.url)
        s.send_keys(s.find("css selector", "#city"), "Oslo")
        s.navigate(b.url)
        assert s.get_property(s.find("css selector", "#city"), "value") == ""
    finally:
        s.close()


def test_navigation_outside_localhost_is_refused(harness):
    s = harness.client.new_session()
    try:
        with pytest.raises(WebDriverError):
            s.navigate("http://example.com/")
    finally:
        s.close()


def test_wire_error_shape(harness):
    url = harness.webdriver_url + "/session/bogus/url"
    req = urllib.request.Request(url, data=b'{"url": "http://x/"}',
                                 headers={"Content-Type": "application/json"})
    try:
        urllib.request.urlopen(req)
        raise AssertionError("expected an HTTP error")
    except urllib.error.HTTPError as exc:
        body = json.loads(exc.read())
        assert set(body["value"]) >= {"error", "message", "stacktrace"}
        assert body["value"]["error"] == "invalid session id"


def test_post_to_echo_endpoint_returns_200(harness, small_corpus):
    served = harness.serve_form(small_corpus[0])
    data = "city=x".encode()
    url = served.url.rsplit("/forms/", 1)[0] + "/submit"
    resp = urllib.request.urlopen(urllib.request.Request(url, data=data))
    assert resp.status == 200
    assert b"submission received" in resp.read()
