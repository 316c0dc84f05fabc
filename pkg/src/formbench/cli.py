"""Command-line entry point.

Subcommands: gen-pool, gen-forms, gen-dataset, evaluate, analyze, serve.
Exit code 0 means the run completed (failing scripts are data, not
errors), 1 means a usage error, and 2 means an infrastructure error such
as an unreachable browser endpoint.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .dialects import get_dialect, load_dialect_config
from .errors import FormbenchError, InfrastructureError
from .fields import dump_pool, load_pool
from .forms import (DEFAULT_STYLE, STYLE_TEMPLATES, build_corpus,
                    corpus_digest, corpus_stats, read_corpus, write_corpus)
from .harness import Harness
from .metrics import EvaluationRecord, aggregate, per_field_type_errors
from .pipeline import (DEFAULT_TEMPLATE_ID, HttpProvider, OracleStubProvider,
                       emit_dataset, filter_executable, run_generation)
from .report import (render_stats, render_summary, render_taxonomy,
                     write_analysis_bundle)
from .runner import EvaluateOptions, evaluate_batch
from .scenario import reference_scenario
from .scripts import RawScript, compile_scenario
from .seeding import derive_subseed

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFRA = 2


@dataclass(frozen=True)
class RunConfig:
    """Flag snapshot embedded in every manifest and report."""

    command: str
    seed: int = 0
    count: int = 0
    fields_min: int = 0
    fields_max: int = 0
    style: str = DEFAULT_STYLE
    dialect: str = ""
    attempts: int = 1
    filter: bool = True
    required_only: bool = False
    timeout_ms: int = 30_000
    parallel: int = 1
    webdriver_url: str = ""
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract reserves 2 for
    # infrastructure errors, so remap usage failures to 1.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--fields-min", type=int, default=4)
    p.add_argument("--fields-max", type=int, default=10)
    p.add_argument("--style", choices=sorted(STYLE_TEMPLATES),
                   default=DEFAULT_STYLE)
    p.add_argument("--pool", default="builtin",
                   help="field pool: 'builtin' or a JSON file path")


def _add_harness_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--webdriver-url",
                   default=os.environ.get("WEBDRIVER_URL", ""),
                   help="W3C WebDriver endpoint; embedded engine when empty")
    p.add_argument("--timeout-ms", type=int, default=30_000)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--dialect-config", default="",
                   help="JSON file registering extra script dialects")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="formbench",
                     description="form benchmark generator and evaluator")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-pool", help="write the builtin field pool")
    p.add_argument("--out", required=True)

    p = sub.add_parser("gen-forms", help="synthesize a form corpus")
    _add_corpus_flags(p)
    p.add_argument("--out", required=True, help="corpus directory")

    p = sub.add_parser("gen-dataset",
                       help="generate, execution-filter, and emit triples")
    _add_corpus_flags(p)
    _add_harness_flags(p)
    p.add_argument("--dialect", default="webdriver-py")
    p.add_argument("--attempts", type=int, default=1)
    p.add_argument("--provider", choices=("stub", "http"), default="stub")
    p.add_argument("--model", default="gpt-4o")
    p.add_argument("--template-id", default=DEFAULT_TEMPLATE_ID)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--filter", dest="filter", action="store_true",
                       default=True)
    group.add_argument("--no-filter", dest="filter", action="store_false")
    p.add_argument("--out", required=True, help="dataset .jsonl path")

    p = sub.add_parser("evaluate", help="run scripts against a corpus")
    _add_harness_flags(p)
    p.add_argument("--corpus", required=True, help="corpus directory")
    p.add_argument("--scripts", default="",
                   help="directory of NNNN.<ext> script files")
    p.add_argument("--oracle", action="store_true",
                   help="evaluate reference scripts instead of --scripts")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for oracle scenario derivation")
    p.add_argument("--dialect", default="selenium-py")
    p.add_argument("--required-only", action="store_true")
    p.add_argument("--coverage-over-executed", action="store_true")
    p.add_argument("--report", choices=("json", "table"), default="table")
    p.add_argument("--out", default="", help="records .jsonl path")

    p = sub.add_parser("analyze",
                       help="taxonomy and per-field-type reports from records")
    p.add_argument("--records", required=True, help="records .jsonl path")
    p.add_argument("--corpus", required=True, help="corpus directory")
    p.add_argument("--coverage-over-executed", action="store_true")
    p.add_argument("--report", choices=("json", "table"), default="table")
    p.add_argument("--out-dir", default="",
                   help="write CSV and PNG artifacts here")

    p = sub.add_parser("serve", help="host a corpus for manual inspection")
    p.add_argument("--corpus", required=True, help="corpus directory")

    return parser


# --- subcommand bodies -----------------------------------------------------

def _cmd_gen_pool(args) -> int:
    pool = load_pool("builtin")
    dump_pool(pool, args.out)
    print("wrote %d field specs to %s" % (len(pool.entries), args.out))
    return EXIT_OK


def _make_corpus(args):
    pool = load_pool(args.pool)
    return build_corpus(pool, args.count, args.fields_min, args.fields_max,
                        seed=args.seed, style_template_id=args.style)


def _cmd_gen_forms(args) -> int:
    config = RunConfig(command="gen-forms", seed=args.seed, count=args.count,
                       fields_min=args.fields_min, fields_max=args.fields_max,
                       style=args.style)
    corpus = _make_corpus(args)
    write_corpus(corpus, args.out, config=config.to_dict())
    print("corpus digest %s" % corpus_digest(corpus))
    print("wrote %d forms to %s" % (len(corpus), args.out))
    return EXIT_OK


def _cmd_gen_dataset(args) -> int:
    config = RunConfig(command="gen-dataset", seed=args.seed, count=args.count,
                       fields_min=args.fields_min, fields_max=args.fields_max,
                       style=args.style, dialect=args.dialect,
                       attempts=args.attempts, filter=args.filter,
                       timeout_ms=args.timeout_ms, parallel=args.parallel,
                       webdriver_url=args.webdriver_url)
    if args.dialect_config:
        load_dialect_config(args.dialect_config)
    get_dialect(args.dialect)
    if args.provider == "http":
        base = os.environ.get("LLM_API_BASE", "")
        if not base:
            print("LLM_API_BASE is required for --provider http",
                  file=sys.stderr)
            return EXIT_USAGE
        provider = HttpProvider(base, os.environ.get("LLM_API_KEY", ""),
                                model=args.model)
    else:
        provider = OracleStubProvider(dialect=args.dialect, seed=args.seed)
    corpus = _make_corpus(args)
    candidates, rejections = run_generation(
        corpus, provider, args.dialect, template_id=args.template_id,
        attempts=args.attempts)
    with Harness(webdriver_url=args.webdriver_url or None,
                 budget_ms=args.timeout_ms) as harness:
        kept, discarded = filter_executable(
            candidates, harness, provider.name, template_id=args.template_id,
            no_filter=not args.filter, budget_ms=args.timeout_ms)
    manifest_config = dict(config.to_dict(), rejections=rejections)
    emit_dataset(kept, args.out, config=manifest_config, discarded=discarded)
    print("kept %d / %d candidates (%d rejected before execution)"
          % (len(kept), len(candidates), len(rejections)))
    return EXIT_OK


def _load_scripts(args, corpus) -> list:
    """(doc, script, script_id) pairs for the evaluate subcommand."""
    if args.oracle:
        pairs = []
        for i, doc in enumerate(corpus):
            scenario = reference_scenario(doc.spec, derive_subseed(args.seed, i),
                                          required_only=args.required_only)
            script = compile_scenario(scenario, doc.spec)
            pairs.append((doc, script, "oracle-%04d" % i))
        return pairs
    if not args.scripts:
        raise FormbenchError("either --scripts or --oracle is required")
    directory = Path(args.scripts)
    pairs = []
    for i, doc in enumerate(corpus):
        matches = sorted(directory.glob("%04d.*" % i))
        if not matches:
            raise FormbenchError("no script file for form %04d in %s"
                                 % (i, directory))
        source = matches[0].read_text(encoding="utf-8")
        pairs.append((doc, RawScript(source=source, dialect=args.dialect),
                      matches[0].name))
    return pairs


def _cmd_evaluate(args) -> int:
    if args.dialect_config:
        load_dialect_config(args.dialect_config)
    get_dialect(args.dialect)  # fail early on unknown dialects
    config = RunConfig(command="evaluate", seed=args.seed,
                       dialect=args.dialect, required_only=args.required_only,
                       timeout_ms=args.timeout_ms, parallel=args.parallel,
                       webdriver_url=args.webdriver_url)
    corpus = read_corpus(args.corpus)
    pairs = _load_scripts(args, corpus)
    options = EvaluateOptions(budget_ms=args.timeout_ms,
                              required_only=args.required_only)
    with Harness(webdriver_url=args.webdriver_url or None,
                 budget_ms=args.timeout_ms) as harness:
        records = evaluate_batch(harness, pairs, options,
                                 parallel=args.parallel)
    summary = aggregate(records,
                        coverage_over_executed=args.coverage_over_executed)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", encoding="utf-8") as fh:
            fh.write(json.dumps({"config": config.to_dict(),
                                 "summary": summary.to_dict()},
                                sort_keys=True) + "\n")
            for record in records:
                fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
    print(render_summary(summary, args.report))
    return EXIT_OK


def read_records_file(path: "str | Path"):
    """Returns (header dict or None, list of EvaluationRecords)."""
    header = None
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        data = json.loads(line)
        if "summary" in data and "form_id" not in data:
            header = data
            continue
        records.append(EvaluationRecord.from_dict(data))
    return header, records


def _cmd_analyze(args) -> int:
    _, records = read_records_file(args.records)
    if not records:
        print("no records found in %s" % args.records, file=sys.stderr)
        return EXIT_USAGE
    corpus = read_corpus(args.corpus)
    specs = {doc.spec.form_id: doc.spec for doc in corpus}
    summary = aggregate(records,
                        coverage_over_executed=args.coverage_over_executed)
    per_kind = per_field_type_errors(records, specs)
    stats = corpus_stats(corpus)
    if args.report == "json":
        print(json.dumps({
            "summary": summary.to_dict(),
            "taxonomy": json.loads(render_taxonomy(records, "json")),
            "per_field_type_errors": per_kind,
            "corpus_stats": json.loads(render_stats(stats, "json")),
        }, indent=2, sort_keys=True))
    else:
        print(render_summary(summary, "table"))
        print()
        print(render_taxonomy(records, "table"))
        print()
        print(render_stats(stats, "table"))
    if args.out_dir:
        artifacts = write_analysis_bundle(records, summary, per_kind, stats,
                                          args.out_dir)
        for name, path in sorted(artifacts.items()):
            print("wrote %s: %s" % (name, path))
    return EXIT_OK


def _cmd_serve(args) -> int:
    corpus = read_corpus(args.corpus)
    from .httpserve import FormServer
    server = FormServer()
    server.start()
    try:
        for doc in corpus:
            served = server.serve_form(doc)
            print(served.url)
        print("serving %d forms; Ctrl-C to stop" % len(corpus))
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        return EXIT_OK
    finally:
        server.stop()


_COMMANDS = {
    "gen-pool": _cmd_gen_pool,
    "gen-forms": _cmd_gen_forms,
    "gen-dataset": _cmd_gen_dataset,
    "evaluate": _cmd_evaluate,
    "analyze": _cmd_analyze,
    "serve": _cmd_serve,
}


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except InfrastructureError as exc:
        print("infrastructure error: %s" % exc, file=sys.stderr)
        return EXIT_INFRA
    except FormbenchError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return EXIT_INFRA


if __name__ == "__main__":
    raise SystemExit(main())
