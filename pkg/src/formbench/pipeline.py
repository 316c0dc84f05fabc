"""Instruction-data pipeline: prompt, generate, execute, filter, emit.

A pluggable provider produces (scenario, code) pairs from rendered forms;
candidates whose code fails to execute against their own form are
discarded (or kept, with the outcome recorded, in no-filter mode). Kept
records become line-delimited instruction triples of HTML, scenario JSON,
and script source.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import requests

from .dialects import emit_source, strip_code_fences
from .dom import recover_spec
from .errors import FormbenchError, InfrastructureError
from .forms import HtmlDocument
from .harness import Harness
from .scenario import TestScenario, reference_scenario, scenario_from_dict
from .scripts import RawScript, compile_scenario
from .seeding import derive_subseed

DEFAULT_TEMPLATE_ID = "prompt_form_fill_v1"
HTML_PLACEHOLDER = "<<HTML>>"


def load_prompt_template(template_id: str = DEFAULT_TEMPLATE_ID) -> str:
    try:
        return resources.files("formbench.assets").joinpath(
            template_id + ".txt").read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FormbenchError("unknown prompt template %r" % template_id) from None


def build_prompt(html: str, template_id: str = DEFAULT_TEMPLATE_ID) -> str:
    return load_prompt_template(template_id).replace(HTML_PLACEHOLDER, html)


# --- providers -------------------------------------------------------------

class Provider:
    """Something that turns a prompt into raw model output text."""

    name = "provider"

    def generate(self, prompt: str, html: str) -> str:
        raise NotImplementedError


class OracleStubProvider(Provider):
    """Deterministic offline provider backed by the reference pipeline.

    Recovers the form spec from the HTML itself, derives the reference
    scenario, and emits source in the configured dialect. Useful for
    exercising the full pipeline without any model.
    """

    name = "stub-oracle"

    def __init__(self, dialect: str = "webdriver-py", seed: int = 0):
        self.dialect = dialect
        self.seed = seed

    def generate(self, prompt: str, html: str) -> str:
        spec = recover_spec(html)
        stable = int(hashlib.sha256(spec.form_id.encode()).hexdigest()[:8], 16)
        sub = derive_subseed(self.seed, stable)
        scenario = reference_scenario(spec, sub)
        script = compile_scenario(scenario, spec)
        code = emit_source(script, self.dialect)
        return json.dumps({"scenario": scenario.to_dict(),
                           "code": code.source})


class CannedProvider(Provider):
    """Replays a fixed list of responses; for tests and dry runs."""

    name = "stub-canned"

    def __init__(self, responses: list):
        self._responses = list(responses)
        self._i = 0

    def generate(self, prompt: str, html: str) -> str:
        if not self._responses:
            raise InfrastructureError("canned provider exhausted")
        out = self._responses[self._i % len(self._responses)]
        self._i += 1
        return out


class HttpProvider(Provider):
    """OpenAI-compatible chat-completions provider.

    Base URL and key come from LLM_API_BASE / LLM_API_KEY unless given
    explicitly. Transport errors retry with bounded exponential backoff.
    """

    name = "http"

    def __init__(self, base_url: str, api_key: str = "", model: str = "gpt-4o",
                 temperature: float = 0.2, max_output_tokens: int = 4096,
                 max_retries: int = 3):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.model = model
        self.temperature = temperature
        self.max_output_tokens = max_output_tokens
        self.max_retries = max_retries

    def generate(self, prompt: str, html: str) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
            "max_tokens": self.max_output_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = "Bearer %s" % self.api_key
        delay = 0.5
        last_exc = None
        for _ in range(self.max_retries):
            try:
                resp = requests.post(self.base_url + "/chat/completions",
                                     json=payload, headers=headers, timeout=120)
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, ValueError) as exc:
                last_exc = exc
                time.sleep(delay)
                delay *= 2
        raise InfrastructureError(
            "provider at %s failed after %d attempts: %s"
            % (self.base_url, self.max_retries, last_exc))


# --- generation ------------------------------------------------------------

@dataclass(frozen=True)
class GenerationOutcome:
    ok: bool
    scenario: Optional[TestScenario] = None
    code: Optional[RawScript] = None
    rejection: Optional[str] = None


def generate_pair(html: str, provider: Provider, dialect: str,
                  template_id: str = DEFAULT_TEMPLATE_ID) -> GenerationOutcome:
    """One provider call, parsed and schema-validated.

    Malformed output becomes a structured rejection, never an exception;
    transport failures (InfrastructureError) do propagate.
    """
    prompt = build_prompt(html, template_id)
    raw = provider.generate(prompt, html)
    text = strip_code_fences(raw)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        return GenerationOutcome(ok=False,
                                 rejection="output is not JSON: %s" % exc)
    if not isinstance(data, dict) or "scenario" not in data or "code" not in data:
        return GenerationOutcome(
            ok=False, rejection="output lacks scenario/code keys")
    try:
        scenario = scenario_from_dict(data["scenario"])
    except FormbenchError as exc:
        return GenerationOutcome(ok=False, rejection="bad scenario: %s" % exc)
    code = strip_code_fences(str(data["code"]))
    if not code.strip():
        return GenerationOutcome(ok=False, rejection="empty code")
    return GenerationOutcome(ok=True, scenario=scenario,
                             code=RawScript(source=code, dialect=dialect))


# --- filtering and emission ------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    doc: HtmlDocument
    scenario: TestScenario
    code: RawScript


@dataclass(frozen=True)
class InstructionTriple:
    html: str
    scenario: TestScenario
    code: RawScript
    executed_ok: bool
    provenance: dict

    def to_record(self) -> dict:
        return {
            "html": self.html,
            "scenario": self.scenario.to_dict(),
            "code": self.code.source,
            "metadata": {
                "dialect": self.code.dialect,
                "executed_ok": self.executed_ok,
                "provenance": self.provenance,
            },
        }


def run_generation(docs: list, provider: Provider, dialect: str,
                   template_id: str = DEFAULT_TEMPLATE_ID,
                   attempts: int = 1):
    """Generate candidates for each document; returns (candidates, rejections)."""
    candidates, rejections = [], []
    for doc in docs:
        outcome = None
        for _ in range(max(1, attempts)):
            outcome = generate_pair(doc.text, provider, dialect, template_id)
            if outcome.ok:
                break
        if outcome is not None and outcome.ok:
            candidates.append(Candidate(doc=doc, scenario=outcome.scenario,
                                        code=outcome.code))
        else:
            rejections.append({"form_id": doc.spec.form_id,
                               "reason": outcome.rejection if outcome else "n/a"})
    return candidates, rejections


def filter_executable(candidates: list, harness: Harness, provider_name: str,
                      template_id: str = DEFAULT_TEMPLATE_ID,
                      no_filter: bool = False,
                      budget_ms: "int | None" = None):
    """Execute each candidate on its own form and split kept/discarded.

    In filter mode only successfully executing candidates are kept. In
    no-filter mode all candidates are kept with executed_ok recorded
    truthfully. Infrastructure errors propagate and abort the batch.
    """
    kept, discarded = [], []
    stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    for cand in candidates:
        served = harness.serve_form(cand.doc)
        report = harness.execute(cand.code, served, budget_ms=budget_ms)
        ok = report.status == "success"
        triple = InstructionTriple(
            html=cand.doc.text, scenario=cand.scenario, code=cand.code,
            executed_ok=ok,
            provenance={"provider": provider_name, "template_id": template_id,
                        "timestamp": stamp})
        if ok or no_filter:
            kept.append(triple)
        if not ok:
            discarded.append({"form_id": cand.doc.spec.form_id,
                              "execution": report.to_dict()})
    return kept, discarded


def emit_dataset(triples: list, destination: "str | Path",
                 config: "dict | None" = None,
                 discarded: "list | None" = None) -> dict:
    """Write line-delimited triples plus a sidecar manifest.

    Re-emitting identical triples produces byte-identical files.
    """
    destination = Path(destination)
    destination.parent.mkdir(parents=True, exist_ok=True)
    with destination.open("w", encoding="utf-8") as fh:
        for triple in triples:
            fh.write(json.dumps(triple.to_record(), ensure_ascii=False,
                                sort_keys=True) + "\n")
    manifest = {
        "config": config or {},
        "n_kept": len(triples),
        "n_discarded": len(discarded or []),
        "discarded": discarded or [],
    }
    manifest_path = destination.with_suffix(destination.suffix + ".manifest.json")
    manifest_path.write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8")
    return manifest


def read_dataset(path: "str | Path") -> list:
    triples = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        meta = record.get("metadata", {})
        triples.append(InstructionTriple(
            html=record["html"],
            scenario=scenario_from_dict(record["scenario"]),
            code=RawScript(source=record["code"],
                           dialect=meta.get("dialect", "selenium-py")),
            executed_ok=bool(meta.get("executed_ok")),
            provenance=meta.get("provenance", {}),
        ))
    return triples
