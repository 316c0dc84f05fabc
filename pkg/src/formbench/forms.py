"""Assemble sampled fields into styled HTML form documents.

Rendering is deterministic: identical (spec, style template) inputs yield
byte-identical HTML. Every document carries its machine-readable ground
truth (:class:`FormSpec`) alongside the text; corpora are written as a
directory of ``NNNN.html`` files plus a manifest.
"""

from __future__ import annotations

import hashlib
import html
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import RenderError
from .fields import FieldSpec, FieldPool, sample_fields
from .seeding import derive_subseed

ECHO_PATH = "/submit"
DEFAULT_STYLE = "classic"
WRAPPER_STYLE = "wrapper-heavy"

_BASE_CSS = """
body { font-family: "Helvetica Neue", Arial, sans-serif; background: #f4f6f8;
       margin: 0; padding: 2rem; color: #1f2933; }
main.page { max-width: 640px; margin: 0 auto; background: #fff;
            border-radius: 8px; padding: 2rem; box-shadow: 0 1px 4px rgba(0,0,0,.12); }
h1 { font-size: 1.4rem; margin-top: 0; }
form .row, form .field-wrap { margin-bottom: 1rem; }
label { display: block; font-weight: 600; margin-bottom: .25rem; }
input, select, textarea { width: 100%; box-sizing: border-box; padding: .5rem;
                          border: 1px solid #cbd2d9; border-radius: 4px; }
input[type=checkbox], input[type=radio] { width: auto; }
fieldset { border: 1px solid #cbd2d9; border-radius: 4px; }
fieldset label { font-weight: 400; display: inline-block; margin-right: 1rem; }
button[type=submit] { background: #2563eb; color: #fff; border: 0;
                      padding: .6rem 1.4rem; border-radius: 4px; cursor: pointer; }
"""

_WRAPPER_CSS = _BASE_CSS + """
.field-wrap { padding: .6rem; border: 1px dashed #e4e7eb; border-radius: 6px; }
"""

STYLE_TEMPLATES = {
    DEFAULT_STYLE: _BASE_CSS,
    WRAPPER_STYLE: _WRAPPER_CSS,
}

FILLABLE_EXCLUDED = ("hidden", "submit")


@dataclass(frozen=True)
class FormSpec:
    form_id: str
    fields: tuple[FieldSpec, ...]
    action: str = ECHO_PATH
    submit_label: str = "Submit"

    def to_dict(self) -> dict:
        return {
            "form_id": self.form_id,
            "fields": [f.to_dict() for f in self.fields],
            "action": self.action,
            "submit_label": self.submit_label,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "FormSpec":
        return cls(
            form_id=record["form_id"],
            fields=tuple(FieldSpec.from_dict(f) for f in record["fields"]),
            action=record.get("action", ECHO_PATH),
            submit_label=record.get("submit_label", "Submit"),
        )


@dataclass(frozen=True)
class LogicalField:
    """Coverage unit: radio specs sharing a group collapse into one."""

    name: str          # rendered control name
    kind: str
    required: bool
    members: tuple[FieldSpec, ...]

    @property
    def options(self):
        return tuple(o for m in self.members for o in m.options)

    @property
    def primary(self) -> FieldSpec:
        return self.members[0]


def logical_fields(spec: FormSpec, include_hidden: bool = False) -> list[LogicalField]:
    """Group-merged view of a form's fields, in document order."""
    out: list[LogicalField] = []
    radio_groups: dict[str, int] = {}
    for f in spec.fields:
        if f.kind == "submit":
            continue
        if f.kind == "hidden" and not include_hidden:
            continue
        if f.kind == "radio":
            key = f.group or f.name
            if key in radio_groups:
                idx = radio_groups[key]
                merged = out[idx]
                out[idx] = LogicalField(
                    name=merged.name, kind="radio",
                    required=merged.required or f.required,
                    members=merged.members + (f,))
                continue
            radio_groups[key] = len(out)
            out.append(LogicalField(name=f.name, kind="radio",
                                    required=f.required, members=(f,)))
        else:
            out.append(LogicalField(name=f.name, kind=f.kind,
                                    required=f.required, members=(f,)))
    return out


@dataclass(frozen=True)
class HtmlDocument:
    text: str
    spec: FormSpec
    style_template_id: str

    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()


def _esc(value: str) -> str:
    return html.escape(str(value), quote=True)


def _constraint_attrs(f: FieldSpec) -> str:
    if not f.constraint:
        return ""
    parts = []
    if "pattern" in f.constraint:
        parts.append('pattern="%s"' % _esc(f.constraint["pattern"]))
    if "min" in f.constraint and f.constraint["min"] is not None:
        parts.append('min="%s"' % _esc(f.constraint["min"]))
    if "max" in f.constraint and f.constraint["max"] is not None:
        parts.append('max="%s"' % _esc(f.constraint["max"]))
    if "maxlength" in f.constraint:
        parts.append('maxlength="%s"' % _esc(f.constraint["maxlength"]))
    return (" " + " ".join(parts)) if parts else ""


def render_control(f: FieldSpec, group_name: "str | None" = None) -> str:
    """Markup for one control (no wrapper, no label element).

    ``group_name`` overrides the name attribute for merged radio groups.
    """
    name = group_name or f.name
    id_attr = ' id="%s"' % _esc(f.id) if f.id else ""
    req = " required" if f.required else ""
    ph = ' placeholder="%s"' % _esc(f.placeholder) if f.placeholder else ""
    if f.kind == "textarea":
        return '<textarea name="%s"%s%s%s rows="4"%s></textarea>' % (
            _esc(name), id_attr, ph, req, _constraint_attrs(f))
    if f.kind == "select":
        opts = ['<option value="">-- Select --</option>']
        opts += ['<option value="%s">%s</option>' % (_esc(o.value), _esc(o.label))
                 for o in f.options]
        return '<select name="%s"%s%s>%s</select>' % (
            _esc(name), id_attr, req, "".join(opts))
    if f.kind == "radio":
        inputs = []
        for i, o in enumerate(f.options):
            oid = "%s-%s" % (f.id or name, i)
            inputs.append(
                '<label for="%s"><input type="radio" id="%s" name="%s" value="%s"%s> %s</label>'
                % (_esc(oid), _esc(oid), _esc(name), _esc(o.value),
                   req if i == 0 else "", _esc(o.label)))
        return "".join(inputs)
    if f.kind == "checkbox":
        return '<input type="checkbox" name="%s"%s value="on"%s>' % (
            _esc(name), id_attr, req)
    if f.kind == "hidden":
        return '<input type="hidden" name="%s"%s value="1">' % (_esc(name), id_attr)
    if f.kind == "submit":
        return '<button type="submit" name="%s"%s>%s</button>' % (
            _esc(name), id_attr, _esc(f.label or "Submit"))
    # text-like input kinds
    return '<input type="%s" name="%s"%s%s%s%s>' % (
        f.kind, _esc(name), id_attr, ph, req, _constraint_attrs(f))


def _label_markup(f: FieldSpec) -> str:
    text = _esc(f.label or f.name.replace("_", " ").title())
    if f.id:
        return '<label for="%s">%s</label>' % (_esc(f.id), text)
    return "<label>%s</label>" % text


def _field_block(f: FieldSpec, style: str, group_name: "str | None") -> str:
    control = render_control(f, group_name)
    if f.kind == "hidden":
        return control
    if f.kind == "radio":
        legend = _esc(f.label or f.name.replace("_", " ").title())
        inner = "<fieldset><legend>%s</legend>%s</fieldset>" % (legend, control)
    else:
        inner = _label_markup(f) + control
    if style == WRAPPER_STYLE:
        return '<div class="field-wrap" id="wrap-%s">%s</div>' % (_esc(f.name), inner)
    return '<div class="row">%s</div>' % inner


def render_form(spec: FormSpec, style_template_id: str = DEFAULT_STYLE) -> HtmlDocument:
    """Render a complete standalone HTML document for one form."""
    if style_template_id not in STYLE_TEMPLATES:
        raise RenderError("unknown style template %r" % (style_template_id,))
    if not spec.fields:
        raise RenderError("form %s has no fields" % spec.form_id)

    radio_names: dict[str, str] = {}
    blocks = []
    for f in spec.fields:
        group_name = None
        if f.kind == "radio":
            key = f.group or f.name
            group_name = radio_names.setdefault(key, f.name)
        blocks.append(_field_block(f, style_template_id, group_name))
    blocks.append(
        '<div class="actions"><button type="submit" id="%s-submit">%s</button></div>'
        % (_esc(spec.form_id), _esc(spec.submit_label)))

    text = (
        "<!doctype html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        "<title>%s</title>\n<style>%s</style>\n</head>\n<body>\n"
        '<main class="page">\n<h1>%s</h1>\n'
        '<form id="%s" action="%s" method="post">\n%s\n</form>\n'
        "</main>\n</body>\n</html>\n"
    ) % (
        _esc(spec.form_id), STYLE_TEMPLATES[style_template_id],
        _esc(spec.form_id.replace("-", " ").title()),
        _esc(spec.form_id), _esc(spec.action),
        "\n".join(blocks),
    )
    return HtmlDocument(text=text, spec=spec, style_template_id=style_template_id)


def assemble_spec(fields: list[FieldSpec], form_id: str) -> FormSpec:
    """Turn a raw sample into a renderable FormSpec.

    Sampled submit entries only contribute the button label; if no sampled
    field is required, the first fillable one is promoted so every form
    admits a required-only scenario.
    """
    submit_label = "Submit"
    kept = []
    for f in fields:
        if f.kind == "submit":
            if submit_label == "Submit" and f.label:
                submit_label = f.label
            continue
        kept.append(f)
    if not any(f.required for f in kept if f.kind not in FILLABLE_EXCLUDED):
        for i, f in enumerate(kept):
            if f.kind not in FILLABLE_EXCLUDED:
                kept[i] = replace(f, required=True)
                break
    if not kept:
        raise RenderError("sample for %s contained no renderable fields" % form_id)
    return FormSpec(form_id=form_id, fields=tuple(kept), submit_label=submit_label)


def build_corpus(pool: FieldPool, n_forms: int, count_min: int, count_max: int,
                 seed: int, style_template_id: str = DEFAULT_STYLE) -> list[HtmlDocument]:
    """Build ``n_forms`` documents; form i uses a sub-seed derived from (seed, i)."""
    if n_forms < 1:
        raise RenderError("n_forms must be >= 1")
    docs = []
    for i in range(n_forms):
        sub = derive_subseed(seed, i)
        sampled = sample_fields(pool, count_min, count_max, sub)
        spec = assemble_spec(sampled, "form-%04d" % i)
        docs.append(render_form(spec, style_template_id))
    return docs


# --- corpus statistics -----------------------------------------------------

CHAR_BUCKET_WIDTH = 1000


@dataclass(frozen=True)
class StatsReport:
    field_type_distribution: dict  # kind -> fraction
    fields_per_form: dict          # field count -> number of forms
    chars_per_form: dict           # bucket lower bound -> number of forms
    n_forms: int
    n_fields: int


def corpus_stats(corpus: list[HtmlDocument]) -> StatsReport:
    if not corpus:
        raise RenderError("cannot compute stats of an empty corpus")
    kind_counts: dict[str, int] = {}
    per_form: dict[int, int] = {}
    chars: dict[int, int] = {}
    total_fields = 0
    for doc in corpus:
        n = len(doc.spec.fields)
        per_form[n] = per_form.get(n, 0) + 1
        bucket = (len(doc.text) // CHAR_BUCKET_WIDTH) * CHAR_BUCKET_WIDTH
        chars[bucket] = chars.get(bucket, 0) + 1
        for f in doc.spec.fields:
            kind_counts[f.kind] = kind_counts.get(f.kind, 0) + 1
            total_fields += 1
    distribution = {k: v / total_fields for k, v in sorted(kind_counts.items())}
    return StatsReport(
        field_type_distribution=distribution,
        fields_per_form=dict(sorted(per_form.items())),
        chars_per_form=dict(sorted(chars.items())),
        n_forms=len(corpus),
        n_fields=total_fields,
    )


# --- corpus persistence ----------------------------------------------------

MANIFEST_NAME = "manifest.json"


def write_corpus(corpus: list[HtmlDocument], directory: "str | Path",
                 config: "dict | None" = None) -> Path:
    """Write NNNN.html files plus the manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, doc in enumerate(corpus):
        fname = "%04d.html" % i
        (directory / fname).write_text(doc.text, encoding="utf-8")
        entries.append({
            "file": fname,
            "style_template_id": doc.style_template_id,
            "sha256": doc.digest(),
            "spec": doc.spec.to_dict(),
        })
    manifest = {"config": config or {}, "forms": entries}
    path = directory / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n",
                    encoding="utf-8")
    return path


def read_corpus(directory: "str | Path") -> list[HtmlDocument]:
    directory = Path(directory)
    manifest = json.loads((directory / MANIFEST_NAME).read_text(encoding="utf-8"))
    docs = []
    for entry in manifest["forms"]:
        text = (directory / entry["file"]).read_text(encoding="utf-8")
        docs.append(HtmlDocument(
            text=text,
            spec=FormSpec.from_dict(entry["spec"]),
            style_template_id=entry["style_template_id"],
        ))
    return docs


def corpus_digest(corpus: list[HtmlDocument]) -> str:
    h = hashlib.sha256()
    for doc in corpus:
        h.update(doc.digest().encode())
        h.update(json.dumps(doc.spec.to_dict(), sort_keys=True).encode())
    return h.hexdigest()
