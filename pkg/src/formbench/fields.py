"""Form-field configurations: the pool they live in and seeded sampling.

A :class:`FieldSpec` describes one form control (kind, identifiers,
constraints). The pool is an ordered, deduplicated collection of specs;
forms are assembled from seeded samples of it. The shipped builtin pool
holds exactly 500 unique configurations with text-like kinds dominant.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

from .errors import PoolError, SamplingError
from .seeding import make_rng, rand_int, sample_indices

FIELD_KINDS = (
    "text", "email", "password", "number", "tel", "date",
    "textarea", "select", "checkbox", "radio", "hidden", "submit",
)
OPTION_KINDS = ("select", "radio")
TEXT_LIKE_KINDS = ("text", "email", "password", "number", "tel", "date", "textarea")

_ID_RE = re.compile(r"^\S+$")


@dataclass(frozen=True)
class Option:
    value: str
    label: str

    def to_dict(self) -> dict:
        return {"value": self.value, "label": self.label}


@dataclass(frozen=True)
class FieldSpec:
    """One form-field configuration; the unit of the field pool."""

    kind: str
    name: str
    id: Optional[str] = None
    label: Optional[str] = None
    placeholder: Optional[str] = None
    required: bool = False
    options: tuple[Option, ...] = ()
    constraint: Optional[dict] = None
    group: Optional[str] = None

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise PoolError("unknown field kind %r" % (self.kind,))
        if not self.name:
            raise PoolError("field name must be non-empty")
        if self.id is not None and not _ID_RE.match(self.id):
            raise PoolError("field id %r contains whitespace" % (self.id,))
        if self.kind in OPTION_KINDS:
            if not self.options:
                raise PoolError(
                    "%s field %r must declare options" % (self.kind, self.name))
        elif self.options:
            raise PoolError(
                "%s field %r must not declare options" % (self.kind, self.name))
        if self.kind == "submit" and (self.required or self.constraint):
            raise PoolError("submit field %r cannot be required/constrained" % (self.name,))
        if self.constraint is not None:
            _check_constraint(self.name, self.constraint)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "name": self.name,
            "id": self.id,
            "label": self.label,
            "placeholder": self.placeholder,
            "required": self.required,
            "options": [o.to_dict() for o in self.options],
            "constraint": self.constraint,
            "group": self.group,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "FieldSpec":
        if not isinstance(record, dict):
            raise PoolError("field record must be an object, got %r" % (record,))
        unknown = set(record) - {
            "kind", "name", "id", "label", "placeholder",
            "required", "options", "constraint", "group",
        }
        if unknown:
            raise PoolError("unknown field keys: %s" % ", ".join(sorted(unknown)))
        options = tuple(
            Option(str(o["value"]), str(o.get("label", o["value"])))
            for o in record.get("options") or ()
        )
        return cls(
            kind=record.get("kind", ""),
            name=record.get("name", ""),
            id=record.get("id"),
            label=record.get("label"),
            placeholder=record.get("placeholder"),
            required=bool(record.get("required", False)),
            options=options,
            constraint=record.get("constraint"),
            group=record.get("group"),
        )


def _check_constraint(name: str, constraint: dict) -> None:
    if not isinstance(constraint, dict) or not constraint:
        raise PoolError("constraint of %r must be a non-empty object" % (name,))
    keys = set(constraint)
    if keys == {"pattern"}:
        try:
            re.compile(constraint["pattern"])
        except re.error as exc:
            raise PoolError("bad pattern on %r: %s" % (name, exc)) from exc
    elif keys <= {"min", "max"} and keys:
        lo, hi = constraint.get("min"), constraint.get("max")
        if lo is not None and hi is not None and lo > hi:
            raise PoolError("constraint min > max on %r" % (name,))
    elif keys == {"maxlength"}:
        if not isinstance(constraint["maxlength"], int) or constraint["maxlength"] < 1:
            raise PoolError("maxlength on %r must be a positive integer" % (name,))
    else:
        raise PoolError("unrecognized constraint keys on %r: %s" % (name, sorted(keys)))


def canonical_key(spec: FieldSpec) -> str:
    """Deterministic serialization, invariant under attribute ordering.

    Equal keys identify semantically identical field configurations.
    """
    return json.dumps(spec.to_dict(), sort_keys=True, ensure_ascii=False,
                      separators=(",", ":"))


@dataclass(frozen=True)
class FieldPool:
    entries: tuple[FieldSpec, ...]
    provenance: str = "file"  # builtin | file | llm-generated

    def __len__(self) -> int:
        return len(self.entries)


def dedupe(specs: Iterable[FieldSpec]) -> tuple[FieldSpec, ...]:
    seen: set[str] = set()
    out = []
    for spec in specs:
        key = canonical_key(spec)
        if key not in seen:
            seen.add(key)
            out.append(spec)
    return tuple(out)


def load_pool(source: "str | Path") -> FieldPool:
    """Load a pool from a JSON file, or the builtin pool for ``"builtin"``.

    The result is deduplicated and validated; entry order is preserved
    from the source.
    """
    if source == "builtin":
        return builtin_pool()
    path = Path(source)
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise PoolError("cannot read pool %s: %s" % (path, exc)) from exc
    if not isinstance(records, list):
        raise PoolError("pool file must contain a list of field records")
    specs = []
    for pos, record in enumerate(records):
        try:
            specs.append(FieldSpec.from_dict(record))
        except PoolError as exc:
            raise PoolError("entry %d: %s" % (pos, exc)) from exc
    return FieldPool(entries=dedupe(specs), provenance="file")


def dump_pool(pool: FieldPool, path: "str | Path") -> None:
    records = [spec.to_dict() for spec in pool.entries]
    Path(path).write_text(
        json.dumps(records, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def sample_fields(pool: FieldPool, count_min: int, count_max: int,
                  seed: int) -> list[FieldSpec]:
    """Sample a without-replacement subset of the pool, deterministically.

    The sample size is drawn uniformly from [count_min, count_max]. Name
    collisions among sampled entries are resolved by deterministic
    ``_k`` suffixes (second occurrence of "email" becomes "email_2").
    """
    if count_min < 1 or count_min > count_max:
        raise SamplingError("invalid count range [%d, %d]" % (count_min, count_max))
    if len(pool) < count_max:
        raise SamplingError(
            "pool of %d entries cannot satisfy max sample %d" % (len(pool), count_max))
    rng = make_rng(seed)
    k = rand_int(rng, count_min, count_max)
    chosen = [pool.entries[i] for i in sample_indices(rng, len(pool), k)]
    return _uniquify_names(chosen)


def _uniquify_names(specs: list[FieldSpec]) -> list[FieldSpec]:
    counts: dict[str, int] = {}
    out = []
    for spec in specs:
        n = counts.get(spec.name, 0) + 1
        counts[spec.name] = n
        if n > 1:
            new_name = "%s_%d" % (spec.name, n)
            new_id = "%s_%d" % (spec.id, n) if spec.id else None
            spec = replace(spec, name=new_name, id=new_id)
        out.append(spec)
    return out


# --- builtin pool ----------------------------------------------------------

_TEXT_BASES = [
    ("first_name", "First name", "Jane"),
    ("last_name", "Last name", "Doe"),
    ("full_name", "Full name", "Jane Doe"),
    ("username", "Username", "jdoe42"),
    ("company", "Company", "Acme Corp"),
    ("job_title", "Job title", "Engineer"),
    ("address_line1", "Address line 1", "123 Main St"),
    ("address_line2", "Address line 2", "Apt 4B"),
    ("city", "City", "Springfield"),
    ("state", "State", "CA"),
    ("country", "Country", "United States"),
    ("nickname", "Nickname", "JD"),
    ("middle_name", "Middle name", ""),
    ("department", "Department", "Sales"),
    ("website", "Website", "https://example.com"),
    ("street", "Street", "Main St"),
    ("suburb", "Suburb", ""),
    ("district", "District", ""),
    ("employer", "Employer", ""),
    ("school", "School", "Springfield High"),
    ("degree", "Degree", "BSc"),
    ("major", "Major", "Physics"),
    ("referral", "How did you hear about us?", ""),
    ("subject", "Subject", "Question about billing"),
    ("order_ref", "Order reference", "ORD-123456"),
    ("coupon", "Coupon code", "SAVE10"),
    ("tax_id", "Tax ID", ""),
    ("license_plate", "License plate", ""),
    ("emergency_contact", "Emergency contact", ""),
    ("preferred_language", "Preferred language", "English"),
]

_SELECT_BASES = [
    ("title", "Title", ["mr", "ms", "dr", "prof"]),
    ("country_select", "Country", ["us", "jp", "de", "fr", "vn"]),
    ("timezone", "Time zone", ["utc", "est", "pst", "jst"]),
    ("plan", "Plan", ["free", "pro", "enterprise"]),
    ("payment_method", "Payment method", ["card", "paypal", "bank"]),
    ("shirt_size", "Shirt size", ["s", "m", "l", "xl"]),
    ("currency", "Currency", ["usd", "eur", "jpy"]),
    ("industry", "Industry", ["tech", "finance", "health", "retail"]),
    ("education", "Education level", ["highschool", "bachelor", "master", "phd"]),
    ("contact_time", "Best time to contact", ["morning", "afternoon", "evening"]),
    ("priority", "Priority", ["low", "medium", "high"]),
    ("source", "Referral source", ["search", "friend", "ad"]),
    ("room_type", "Room type", ["single", "double", "suite"]),
    ("frequency", "Frequency", ["daily", "weekly", "monthly"]),
    ("experience", "Years of experience", ["0-1", "2-5", "6-10", "10+"]),
]

_RADIO_BASES = [
    ("gender", "Gender", ["female", "male", "other"]),
    ("contact_pref", "Preferred contact method", ["email", "phone", "mail"]),
    ("newsletter_freq", "Newsletter frequency", ["weekly", "monthly"]),
    ("membership", "Membership type", ["basic", "premium"]),
    ("delivery", "Delivery option", ["standard", "express"]),
    ("color_choice", "Favorite color", ["red", "green", "blue"]),
    ("rating", "Satisfaction", ["1", "2", "3", "4", "5"]),
    ("attendance", "Will you attend?", ["yes", "no", "maybe"]),
    ("payment_cycle", "Billing cycle", ["monthly", "yearly"]),
    ("os_choice", "Operating system", ["windows", "macos", "linux"]),
]

_CHECKBOX_BASES = [
    ("terms", "I accept the terms and conditions"),
    ("newsletter", "Subscribe to newsletter"),
    ("remember_me", "Remember me"),
    ("privacy", "I have read the privacy policy"),
    ("promotions", "Send me promotional offers"),
    ("sms_updates", "Receive SMS updates"),
    ("gift_wrap", "Gift wrap this order"),
    ("save_card", "Save card for later"),
    ("marketing_optin", "Allow marketing contact"),
    ("two_factor", "Enable two-factor auth"),
    ("backup_codes", "Generate backup codes"),
    ("public_profile", "Make profile public"),
]

_NUMBER_BASES = [
    ("age", "Age", 18, 99),
    ("quantity", "Quantity", 1, 50),
    ("guests", "Number of guests", 1, 12),
    ("children", "Number of children", 0, 10),
    ("salary", "Expected salary", 20000, 200000),
    ("years_employed", "Years employed", 0, 45),
    ("rooms", "Rooms", 1, 8),
    ("seats", "Seats", 1, 6),
    ("weight_kg", "Weight (kg)", 1, 500),
    ("donation", "Donation amount", 5, 10000),
]

_DATE_BASES = [
    ("birth_date", "Date of birth"),
    ("start_date", "Start date"),
    ("end_date", "End date"),
    ("checkin", "Check-in date"),
    ("checkout", "Check-out date"),
    ("appointment", "Appointment date"),
    ("expiry_date", "Expiry date"),
    ("issue_date", "Issue date"),
    ("delivery_date", "Delivery date"),
    ("event_date", "Event date"),
]

_TEXTAREA_BASES = [
    ("message", "Message", "Type your message here"),
    ("comments", "Comments", "Any comments?"),
    ("bio", "Short bio", "Tell us about yourself"),
    ("feedback", "Feedback", ""),
    ("description", "Description", ""),
    ("notes", "Notes", ""),
    ("cover_letter", "Cover letter", ""),
    ("special_requests", "Special requests", ""),
    ("allergies", "Allergies", ""),
    ("question", "Your question", ""),
]

_EMAIL_BASES = [
    ("email", "Email address", "you@example.com"),
    ("work_email", "Work email", "name@company.com"),
    ("confirm_email", "Confirm email", ""),
    ("billing_email", "Billing email", ""),
    ("contact_email", "Contact email", ""),
]

_PASSWORD_BASES = [
    ("password", "Password", ""),
    ("confirm_password", "Confirm password", ""),
    ("current_password", "Current password", ""),
    ("new_password", "New password", ""),
    ("pin_code", "PIN code", ""),
]

_TEL_BASES = [
    ("phone", "Phone number", "555-0123"),
    ("mobile", "Mobile number", ""),
    ("work_phone", "Work phone", ""),
    ("fax", "Fax number", ""),
    ("emergency_phone", "Emergency phone", ""),
]

_HIDDEN_BASES = [
    "csrf_token", "form_version", "session_id", "campaign_id", "referrer_url",
    "utm_source", "locale", "ab_bucket", "client_ts", "page_id", "tenant", "nonce",
]

_SUBMIT_BASES = [
    ("submit", "Submit"),
    ("send", "Send"),
    ("register", "Register"),
    ("apply", "Apply"),
    ("book_now", "Book now"),
    ("save", "Save"),
]

_POOL_SIZE = 500


def _text_variants(name, label, placeholder):
    yield FieldSpec("text", name, id=name, label=label,
                    placeholder=placeholder or None, required=True)
    yield FieldSpec("text", name, id=name, label=label, required=False)
    yield FieldSpec("text", name, label=label, placeholder=placeholder or None,
                    required=False)
    yield FieldSpec("text", name, id="%s-input" % name, label=label, required=True,
                    constraint={"maxlength": 64})
    yield FieldSpec("text", name, label=label, required=True,
                    constraint={"maxlength": 32})


def builtin_pool() -> FieldPool:
    """The shipped pool: exactly 500 unique field configurations.

    Generated from fixed vocabulary tables, so the pool is identical on
    every platform without bundling a data file. Text-like kinds dominate,
    mirroring realistic form composition.
    """
    specs: list[FieldSpec] = []
    for name, label, ph in _TEXT_BASES:
        specs.extend(_text_variants(name, label, ph))
    for name, label, ph in _EMAIL_BASES:
        specs.append(FieldSpec("email", name, id=name, label=label,
                               placeholder=ph or None, required=True))
        specs.append(FieldSpec("email", name, label=label, required=False))
        specs.append(FieldSpec("email", name, id="%s-field" % name, label=label,
                               required=True,
                               constraint={"pattern": r"[^@\s]+@[^@\s]+\.[a-z]{2,}"}))
    for name, label, _ in _PASSWORD_BASES:
        specs.append(FieldSpec("password", name, id=name, label=label, required=True,
                               constraint={"maxlength": 128}))
        specs.append(FieldSpec("password", name, label=label, required=True))
        specs.append(FieldSpec("password", name, id=name, label=label, required=False))
    for name, label, lo, hi in _NUMBER_BASES:
        specs.append(FieldSpec("number", name, id=name, label=label, required=True,
                               constraint={"min": lo, "max": hi}))
        specs.append(FieldSpec("number", name, label=label, required=False,
                               constraint={"min": lo, "max": hi}))
        specs.append(FieldSpec("number", name, id=name, label=label, required=False))
    for name, label, _ in _TEL_BASES:
        specs.append(FieldSpec("tel", name, id=name, label=label, required=True,
                               constraint={"pattern": r"\d{3}-\d{4}"}))
        specs.append(FieldSpec("tel", name, label=label, required=False))
    for name, label in _DATE_BASES:
        specs.append(FieldSpec("date", name, id=name, label=label, required=True))
        specs.append(FieldSpec("date", name, label=label, required=False))
        specs.append(FieldSpec("date", name, id="%s-picker" % name, label=label,
                               required=False))
    for name, label, ph in _TEXTAREA_BASES:
        specs.append(FieldSpec("textarea", name, id=name, label=label,
                               placeholder=ph or None, required=True,
                               constraint={"maxlength": 500}))
        specs.append(FieldSpec("textarea", name, label=label, required=False))
        specs.append(FieldSpec("textarea", name, id=name, label=label, required=False))
    for name, label, values in _SELECT_BASES:
        options = tuple(Option(v, v.replace("-", " ").title()) for v in values)
        specs.append(FieldSpec("select", name, id=name, label=label, required=True,
                               options=options))
        specs.append(FieldSpec("select", name, label=label, required=False,
                               options=options))
        specs.append(FieldSpec("select", name, id="%s-select" % name, label=label,
                               required=False, options=options[:2] + options[2:][::-1]))
    for name, label, values in _RADIO_BASES:
        options = tuple(Option(v, v.title()) for v in values)
        specs.append(FieldSpec("radio", name, id=name, label=label, required=True,
                               options=options, group=name))
        specs.append(FieldSpec("radio", name, label=label, required=False,
                               options=options, group=name))
    for name, label in _CHECKBOX_BASES:
        specs.append(FieldSpec("checkbox", name, id=name, label=label, required=True))
        specs.append(FieldSpec("checkbox", name, label=label, required=False))
    for name in _HIDDEN_BASES:
        specs.append(FieldSpec("hidden", name, required=False))
    for name, label in _SUBMIT_BASES:
        specs.append(FieldSpec("submit", name, id=name, label=label))

    entries = dedupe(specs)
    # pad with numbered generic text fields so the pool is exactly 500
    serial = 1
    while len(entries) < _POOL_SIZE:
        extra = FieldSpec("text", "custom_field_%02d" % serial,
                          id="custom-field-%02d" % serial,
                          label="Custom field %d" % serial, required=(serial % 2 == 0))
        entries = dedupe(list(entries) + [extra])
        serial += 1
    if len(entries) > _POOL_SIZE:
        entries = entries[:_POOL_SIZE]
    return FieldPool(entries=entries, provenance="builtin")
