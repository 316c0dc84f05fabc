"""Minimal DOM: parse tree, locator resolution, interactability rules.

This backs the embedded page engine and the failure classifier. It
supports the locator vocabulary the toolkit generates and consumes:

* CSS subset: ``tag``, ``#id``, ``.class``, ``[attr]``, ``[attr=value]``
  (quoted or bare), compound selectors, descendant and ``>`` combinators,
  comma-separated groups.
* XPath subset: ``//step/step`` paths where a step is a tag name or ``*``
  with optional ``[@attr='value']`` and ``[n]`` predicates, plus ``//``
  between steps.

Visibility ignores the stylesheet cascade: a node is hidden only through
``type=hidden``, the ``hidden`` attribute, or inline ``display:none`` /
``visibility:hidden`` on itself or an ancestor. Style templates shipped
with the toolkit keep every non-hidden control visible, so this is exact
for generated corpora.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser
from typing import Iterator, Optional

from .errors import FormbenchError
from .fields import FieldSpec, Option
from .forms import FormSpec

VOID_TAGS = {"area", "base", "br", "col", "embed", "hr", "img", "input",
             "link", "meta", "param", "source", "track", "wbr"}
CONTROL_TAGS = {"input", "select", "textarea", "button"}
TEXT_INPUT_TYPES = {"text", "email", "password", "number", "tel", "date",
                    "search", "url", ""}


class SelectorError(FormbenchError):
    """Unparseable CSS selector or XPath expression."""


class DomNode:
    __slots__ = ("tag", "attrs", "children", "parent", "text_chunks",
                 "value", "checked", "selected")

    def __init__(self, tag: str, attrs: "dict[str, str]",
                 parent: "Optional[DomNode]" = None):
        self.tag = tag
        self.attrs = attrs
        self.children: list[DomNode] = []
        self.parent = parent
        self.text_chunks: list[tuple[int, str]] = []  # (child index, text)
        # live state, seeded from attributes like a browser would
        self.value: str = attrs.get("value", "")
        self.checked: bool = "checked" in attrs
        self.selected: bool = "selected" in attrs

    # -- tree access --------------------------------------------------------

    def iter(self) -> Iterator["DomNode"]:
        yield self
        for child in self.children:
            yield from child.iter()

    def ancestors(self) -> Iterator["DomNode"]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def get(self, attr: str) -> Optional[str]:
        return self.attrs.get(attr)

    @property
    def input_type(self) -> str:
        return (self.attrs.get("type") or "").lower()

    def text(self) -> str:
        parts = []
        merged = sorted(
            [(idx, 0, txt) for idx, txt in self.text_chunks]
            + [(i, 1, c) for i, c in enumerate(self.children)],
            key=lambda t: (t[0], t[1]))
        for _, kind, item in merged:
            parts.append(item if kind == 0 else item.text())
        return "".join(parts)

    # -- semantics ----------------------------------------------------------

    def is_control(self) -> bool:
        return self.tag in CONTROL_TAGS

    def inline_style(self) -> dict:
        style = self.attrs.get("style", "")
        out = {}
        for decl in style.split(";"):
            if ":" in decl:
                k, v = decl.split(":", 1)
                out[k.strip().lower()] = v.strip().lower()
        return out

    def is_displayed(self) -> bool:
        if self.tag == "input" and self.input_type == "hidden":
            return False
        for node in [self, *self.ancestors()]:
            if "hidden" in node.attrs:
                return False
            style = node.inline_style()
            if style.get("display") == "none" or style.get("visibility") == "hidden":
                return False
        return True

    def is_enabled(self) -> bool:
        if "disabled" in self.attrs:
            return False
        for anc in self.ancestors():
            if anc.tag == "fieldset" and "disabled" in anc.attrs:
                return False
        return True

    def owning_form(self) -> Optional["DomNode"]:
        for anc in self.ancestors():
            if anc.tag == "form":
                return anc
        return None

    def is_typable(self) -> bool:
        if self.tag == "textarea":
            return True
        return self.tag == "input" and self.input_type in TEXT_INPUT_TYPES

    # -- serialization ------------------------------------------------------

    def to_html(self) -> str:
        attrs = "".join(
            ' %s' % k if v == "" and k in ("required", "checked", "selected",
                                           "disabled", "hidden")
            else ' %s="%s"' % (k, _escape_attr(v))
            for k, v in self.attrs.items())
        open_tag = "<%s%s>" % (self.tag, attrs)
        if self.tag in VOID_TAGS:
            return open_tag
        inner = []
        merged = sorted(
            [(idx, 0, txt) for idx, txt in self.text_chunks]
            + [(i, 1, c) for i, c in enumerate(self.children)],
            key=lambda t: (t[0], t[1]))
        for _, kind, item in merged:
            inner.append(_escape_text(item) if kind == 0 else item.to_html())
        return "%s%s</%s>" % (open_tag, "".join(inner), self.tag)


def _escape_attr(value: str) -> str:
    return value.replace("&", "&amp;").replace('"', "&quot;").replace("<", "&lt;")


def _escape_text(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class DomDocument:
    def __init__(self, root: DomNode, raw_prefix: str = "<!doctype html>\n"):
        self.root = root
        self.raw_prefix = raw_prefix

    def iter(self) -> Iterator[DomNode]:
        return self.root.iter()

    def to_html(self) -> str:
        return self.raw_prefix + self.root.to_html() + "\n"

    def query_css(self, selector: str) -> list[DomNode]:
        return query_css(self.root, selector)

    def query_xpath(self, expr: str) -> list[DomNode]:
        return query_xpath(self.root, expr)

    def by_id(self, element_id: str) -> Optional[DomNode]:
        for node in self.iter():
            if node.get("id") == element_id:
                return node
        return None

    def forms(self) -> list[DomNode]:
        return [n for n in self.iter() if n.tag == "form"]


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root: Optional[DomNode] = None
        self.stack: list[DomNode] = []

    def handle_starttag(self, tag, attrs):
        tag = tag.lower()
        node = DomNode(tag, {k.lower(): (v if v is not None else "") for k, v in attrs},
                       parent=self.stack[-1] if self.stack else None)
        if self.stack:
            self.stack[-1].children.append(node)
        elif self.root is None:
            self.root = node
        if tag not in VOID_TAGS:
            self.stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)
        if tag.lower() not in VOID_TAGS:
            self.handle_endtag(tag)

    def handle_endtag(self, tag):
        tag = tag.lower()
        if tag in VOID_TAGS:
            return
        for i in range(len(self.stack) - 1, -1, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return

    def handle_data(self, data):
        if self.stack:
            node = self.stack[-1]
            node.text_chunks.append((len(node.children), data))


def parse_html(text: str) -> DomDocument:
    builder = _TreeBuilder()
    builder.feed(text)
    builder.close()
    if builder.root is None:
        raise FormbenchError("document has no element content")
    prefix = "<!doctype html>\n" if "<!doctype" in text[:200].lower() else ""
    doc = DomDocument(builder.root, raw_prefix=prefix)
    _init_select_state(doc)
    return doc


def _init_select_state(doc: DomDocument) -> None:
    # browsers auto-select the first option when none carries `selected`
    for node in doc.iter():
        if node.tag != "select":
            continue
        options = [n for n in node.iter() if n.tag == "option"]
        if options and not any(o.selected for o in options):
            options[0].selected = True
        node.value = next((o.value for o in options if o.selected), "")


# --- CSS selector subset ---------------------------------------------------

_CSS_TOKEN = re.compile(
    r"(?P<tag>[a-zA-Z][\w-]*|\*)"
    r"|(?P<id>#[\w-]+)"
    r"|(?P<cls>\.[\w-]+)"
    r"|(?P<attr>\[\s*[\w-]+\s*(?:[~^$*|]?=\s*(?:\"[^\"]*\"|'[^']*'|[^\]\s]+))?\s*\])"
)


def _parse_simple(selector: str):
    """One compound selector -> list of (check) predicates."""
    preds = []
    pos = 0
    while pos < len(selector):
        m = _CSS_TOKEN.match(selector, pos)
        if not m:
            raise SelectorError("cannot parse CSS selector %r at %r"
                                % (selector, selector[pos:]))
        pos = m.end()
        if m.group("tag"):
            tag = m.group("tag").lower()
            if tag != "*":
                preds.append(lambda n, t=tag: n.tag == t)
        elif m.group("id"):
            preds.append(lambda n, v=m.group("id")[1:]: n.get("id") == v)
        elif m.group("cls"):
            cls = m.group("cls")[1:]
            preds.append(lambda n, c=cls: c in (n.get("class") or "").split())
        else:
            body = m.group("attr").strip()[1:-1].strip()
            am = re.match(
                r"([\w-]+)\s*(?:([~^$*|]?=)\s*(\"[^\"]*\"|'[^']*'|[^\]\s]+))?$", body)
            if not am:
                raise SelectorError("bad attribute selector [%s]" % body)
            attr, op, raw = am.group(1).lower(), am.group(2), am.group(3)
            if op is None:
                preds.append(lambda n, a=attr: n.get(a) is not None)
            else:
                val = raw[1:-1] if raw[0] in "\"'" else raw
                if op == "=":
                    preds.append(lambda n, a=attr, v=val: n.get(a) == v)
                elif op == "^=":
                    preds.append(lambda n, a=attr, v=val:
                                 (n.get(a) or "").startswith(v))
                elif op == "$=":
                    preds.append(lambda n, a=attr, v=val:
                                 (n.get(a) or "").endswith(v))
                elif op == "*=":
                    preds.append(lambda n, a=attr, v=val: v in (n.get(a) or ""))
                elif op == "~=":
                    preds.append(lambda n, a=attr, v=val:
                                 v in (n.get(a) or "").split())
                else:
                    raise SelectorError("unsupported attribute operator %r" % op)
    if not preds:
        raise SelectorError("empty compound selector")
    return preds


def _split_compound(selector: str) -> list[tuple[str, str]]:
    """'form > input[name=a]' -> [('', 'form'), ('>', 'input[name=a]')]."""
    parts = []
    tokens = re.split(r"\s*(>)\s*|\s+", selector.strip())
    combinator = ""
    for tok in tokens:
        if tok is None or tok == "":
            continue
        if tok == ">":
            combinator = ">"
            continue
        parts.append((combinator, tok))
        combinator = ""
    if not parts:
        raise SelectorError("empty selector")
    return parts


def query_css(root: DomNode, selector: str) -> list[DomNode]:
    results: list[DomNode] = []
    seen: set[int] = set()
    for group in selector.split(","):
        group = group.strip()
        if not group:
            raise SelectorError("empty selector group in %r" % selector)
        chain = [(comb, _parse_simple(simple))
                 for comb, simple in _split_compound(group)]
        for node in root.iter():
            if _match_chain(node, chain):
                if id(node) not in seen:
                    seen.add(id(node))
                    results.append(node)
    return _document_order(root, results)


def _match_chain(node: DomNode, chain) -> bool:
    comb, preds = chain[-1]
    if not all(p(node) for p in preds):
        return False
    rest = chain[:-1]
    if not rest:
        return True
    if comb == ">":
        return node.parent is not None and _match_chain(node.parent, rest)
    return any(_match_chain(anc, rest) for anc in node.ancestors())


def _document_order(root: DomNode, nodes: list[DomNode]) -> list[DomNode]:
    order = {id(n): i for i, n in enumerate(root.iter())}
    return sorted(nodes, key=lambda n: order[id(n)])


# --- XPath subset ----------------------------------------------------------

_XPATH_STEP = re.compile(
    r"(?P<axis>//|/)(?P<name>[\w-]+|\*)(?P<preds>(?:\[[^\]]*\])*)")
_XPATH_PRED = re.compile(
    r"\[\s*(?:@(?P<attr>[\w-]+)\s*=\s*(?P<q>[\"'])(?P<val>.*?)(?P=q)"
    r"|(?P<index>\d+))\s*\]")


def query_xpath(root: DomNode, expr: str) -> list[DomNode]:
    expr = expr.strip()
    if expr.startswith("."):
        expr = expr[1:]
    if not expr.startswith("/"):
        raise SelectorError("only absolute //-style XPath is supported: %r" % expr)
    steps = []
    pos = 0
    while pos < len(expr):
        m = _XPATH_STEP.match(expr, pos)
        if not m:
            raise SelectorError("cannot parse XPath %r at %r" % (expr, expr[pos:]))
        pos = m.end()
        preds = []
        ppos = 0
        raw = m.group("preds")
        while ppos < len(raw):
            pm = _XPATH_PRED.match(raw, ppos)
            if not pm:
                raise SelectorError("unsupported XPath predicate in %r" % expr)
            ppos = pm.end()
            if pm.group("attr"):
                preds.append(("attr", pm.group("attr").lower(), pm.group("val")))
            else:
                preds.append(("index", int(pm.group("index")), None))
        steps.append((m.group("axis"), m.group("name").lower(), preds))

    current = [root]
    is_root_context = True
    for axis, name, preds in steps:
        candidates: list[DomNode] = []
        seen: set[int] = set()
        for ctx in current:
            if axis == "//":
                pool = list(ctx.iter())
                if is_root_context:
                    pass  # root itself is a candidate for //
                else:
                    pool = [n for n in pool if n is not ctx]
            else:
                pool = [ctx] if is_root_context and ctx.tag == name else ctx.children
            matched = [n for n in pool
                       if (name == "*" or n.tag == name)]
            matched = _apply_preds(matched)
            for idx, node in enumerate(matched, start=1):
                keep = True
                for kind, a, v in preds:
                    if kind == "attr" and node.get(a) != v:
                        keep = False
                        break
                    if kind == "index" and idx != a:
                        keep = False
                        break
                if keep and id(node) not in seen:
                    seen.add(id(node))
                    candidates.append(node)
        current = _document_order(root, candidates)
        is_root_context = False
    return current


def _apply_preds(nodes):
    return nodes


# --- ground-truth recovery (independent of the renderer) -------------------

def recover_spec(html_text: str) -> FormSpec:
    """Parse a rendered document back into its FormSpec.

    Used as the round-trip oracle and by the scenario stub provider. Merged
    radio groups come back as a single radio FieldSpec per group name.
    """
    doc = parse_html(html_text)
    forms = doc.forms()
    if len(forms) != 1:
        raise FormbenchError("expected exactly one form, found %d" % len(forms))
    form = forms[0]
    fields: list[FieldSpec] = []
    radio_seen: dict[str, int] = {}
    submit_label = "Submit"
    for node in form.iter():
        if node.tag == "input":
            itype = node.input_type or "text"
            name = node.get("name")
            if not name:
                continue
            if itype == "radio":
                opt = Option(node.get("value") or "", _radio_label(node))
                if name in radio_seen:
                    i = radio_seen[name]
                    prev = fields[i]
                    fields[i] = FieldSpec(
                        kind="radio", name=name, id=prev.id, label=prev.label,
                        required=prev.required or "required" in node.attrs,
                        options=prev.options + (opt,), group=name)
                else:
                    radio_seen[name] = len(fields)
                    fields.append(FieldSpec(
                        kind="radio", name=name, label=_group_label(node),
                        required="required" in node.attrs, options=(opt,),
                        group=name))
                continue
            if itype in ("submit",):
                continue
            kind = itype if itype in ("email", "password", "number", "tel",
                                      "date", "checkbox", "hidden") else "text"
            fields.append(FieldSpec(
                kind=kind, name=name, id=node.get("id"),
                label=None, placeholder=node.get("placeholder"),
                required="required" in node.attrs,
                constraint=_recover_constraint(node)))
        elif node.tag == "textarea":
            fields.append(FieldSpec(
                kind="textarea", name=node.get("name") or "",
                id=node.get("id"), placeholder=node.get("placeholder"),
                required="required" in node.attrs,
                constraint=_recover_constraint(node)))
        elif node.tag == "select":
            options = tuple(
                Option(o.get("value") or "", o.text().strip())
                for o in node.iter() if o.tag == "option" and (o.get("value") or ""))
            fields.append(FieldSpec(
                kind="select", name=node.get("name") or "", id=node.get("id"),
                required="required" in node.attrs, options=options))
        elif node.tag == "button" and (node.get("type") or "submit") == "submit":
            submit_label = node.text().strip() or submit_label
    return FormSpec(
        form_id=form.get("id") or "form",
        fields=tuple(fields),
        action=form.get("action") or "/submit",
        submit_label=submit_label,
    )


def _recover_constraint(node: DomNode) -> Optional[dict]:
    if node.get("pattern"):
        return {"pattern": node.get("pattern")}
    if node.get("min") is not None or node.get("max") is not None:
        out = {}
        for key in ("min", "max"):
            raw = node.get(key)
            if raw is not None:
                out[key] = float(raw) if "." in raw else int(raw)
        return out
    if node.get("maxlength"):
        return {"maxlength": int(node.get("maxlength"))}
    return None


def _radio_label(node: DomNode) -> str:
    if node.parent is not None and node.parent.tag == "label":
        return node.parent.text().strip()
    return node.get("value") or ""


def _group_label(node: DomNode) -> Optional[str]:
    for anc in node.ancestors():
        if anc.tag == "fieldset":
            for child in anc.children:
                if child.tag == "legend":
                    return child.text().strip()
    return None
