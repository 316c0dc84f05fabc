"""Document parsing, selector matching, and visibility semantics."""

from __future__ import annotations

import pytest

from formbench.dom import SelectorError, parse_html

SAMPLE = """
<!doctype html>
<html><head><title>t</title></head><body>
<main>
  <form id="f1" action="/submit" method="post">
    <div class="row" id="wrap-city">
      <label for="city">City</label>
      <input type="text" id="city" name="city" required>
    </div>
    <div class="row">
      <select name="country"><option value="">--</option>
        <option value="us">US</option><option value="fr">FR</option></select>
    </div>
    <input type="hidden" name="token">
    <input type="text" name="ghost" style="display:none">
    <div style="visibility:hidden"><input type="text" name="shade"></div>
    <input type="text" name="frozen" disabled>
    <button type="submit" id="f1-submit">Go</button>
  </form>
</main>
<input type="text" name="city">
</body></html>
"""


@pytest.fixture(scope="module")
def doc():
    return parse_html(SAMPLE)


def test_by_id(doc):
    node = doc.by_id("city")
    assert node is not None and node.tag == "input"
    assert doc.by_id("nope") is None


def test_css_tag_class_and_attr(doc):
    assert len(doc.query_css("div.row")) == 2
    assert doc.query_css('input[name="token"]')[0].get("type") == "hidden"
    assert [n.get("value") for n in doc.query_css("select > option")] == \
        ["", "us", "fr"]


def test_css_name_selector_matches_both_city_inputs(doc):
    nodes = doc.query_css('[name="city"]')
    assert len(nodes) == 2
    # document order: the in-form control comes first
    assert nodes[0].owning_form() is not None
    assert nodes[1].owning_form() is None


def test_css_descendant_and_comma(doc):
    assert len(doc.query_css("form input, form select")) == 6
    assert doc.query_css("#wrap-city input")[0].get("name") == "city"


def test_css_invalid_selector_raises(doc):
    with pytest.raises(SelectorError):
        doc.query_css("[unterminated")


def test_xpath_attr_predicate_and_index(doc):
    assert doc.query_xpath("//div[@id='wrap-city']")[0].get("class") == "row"
    opts = doc.query_xpath("//select/option")
    assert len(opts) == 3
    assert doc.query_xpath("//option[2]")[0].get("value") == "us"


def test_visibility_rules(doc):
    assert doc.by_id("city").is_displayed()
    assert not doc.query_css('[name="token"]')[0].is_displayed()
    assert not doc.query_css('[name="ghost"]')[0].is_displayed()
    # inherited from the ancestor's inline style
    assert not doc.query_css('[name="shade"]')[0].is_displayed()
    frozen = doc.query_css('[name="frozen"]')[0]
    assert frozen.is_displayed() and not frozen.is_enabled()


def test_is_control(doc):
    assert doc.by_id("city").is_control()
    assert not doc.by_id("wrap-city").is_control()
    assert doc.by_id("f1-submit").is_control()


def test_select_auto_selects_first_option(doc):
    select = doc.query_css("select")[0]
    first = doc.query_css("select > option")[0]
    assert first.selected
    assert select.children[0] is first


def test_void_elements_do_not_swallow_siblings(doc):
    form = doc.forms()[0]
    assert form.get("id") == "f1"
    inputs = [n for n in form.iter() if n.tag == "input"]
    assert len(inputs) == 5
