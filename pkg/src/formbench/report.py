"""Rendering of metrics and corpus statistics: tables, JSON, CSV, figures.

Human output is an aligned plain-text table; machine output is JSON. The
analysis path additionally writes delimited CSV files and PNG figures
(corpus field-type distribution, size histograms, failure taxonomy, and
per-field-type error rates) next to them.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # headless only
import matplotlib.pyplot as plt

from .forms import StatsReport
from .metrics import ERROR_CATEGORIES, MetricsSummary


# --- textual output --------------------------------------------------------

def render_table(rows: "list[tuple[str, str]]", title: str = "") -> str:
    """Two-column aligned text table."""
    if not rows:
        return title
    width = max(len(k) for k, _ in rows)
    lines = []
    if title:
        lines.append(title)
        lines.append("-" * max(len(title), width + 2))
    for key, value in rows:
        lines.append("%-*s  %s" % (width, key, value))
    return "\n".join(lines)


def summary_rows(summary: MetricsSummary) -> "list[tuple[str, str]]":
    rendered = summary.rendered()
    return [
        ("scripts evaluated", str(summary.n_records)),
        ("syntax correctness (%)", rendered["syntax_correctness_pct"]),
        ("executability (%)", rendered["executability_pct"]),
        ("input coverage (%)", rendered["input_coverage_pct"]),
    ]


def render_summary(summary: MetricsSummary, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(summary.rendered(), indent=2, sort_keys=True)
    if fmt == "table":
        return render_table(summary_rows(summary), title="evaluation summary")
    raise ValueError("unknown report format %r" % fmt)


def taxonomy_counts(records: list) -> "dict[str, int]":
    counts = {cat: 0 for cat in ERROR_CATEGORIES}
    for record in records:
        if record.classification is not None:
            counts[record.classification] += 1
    return {cat: n for cat, n in counts.items() if n > 0}


def render_taxonomy(records: list, fmt: str = "table") -> str:
    counts = taxonomy_counts(records)
    if fmt == "json":
        return json.dumps(counts, indent=2, sort_keys=True)
    rows = [(cat, str(n)) for cat, n in sorted(
        counts.items(), key=lambda kv: (-kv[1], kv[0]))]
    return render_table(rows, title="failure taxonomy")


def render_stats(stats: StatsReport, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps({
            "n_forms": stats.n_forms,
            "n_fields": stats.n_fields,
            "field_type_distribution": {
                k: round(v, 6) for k, v in stats.field_type_distribution.items()},
            "fields_per_form": stats.fields_per_form,
            "chars_per_form": stats.chars_per_form,
        }, indent=2, sort_keys=True)
    rows = [("forms", str(stats.n_forms)), ("fields", str(stats.n_fields))]
    for kind, frac in stats.field_type_distribution.items():
        rows.append(("share of %s" % kind, "%.2f%%" % (100.0 * frac)))
    return render_table(rows, title="corpus statistics")


# --- delimited output ------------------------------------------------------

def write_records_csv(records: list, path: "str | Path") -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["form_id", "script_id", "syntax_valid", "status",
                         "coverage", "classification"])
        for r in records:
            writer.writerow([
                r.form_id, r.script_id, int(r.syntax.valid),
                r.execution.status if r.execution else "",
                "%.4f" % r.coverage_value,
                r.classification or "",
            ])
    return path


def write_summary_csv(summary: MetricsSummary, path: "str | Path") -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        for key, value in summary_rows(summary):
            writer.writerow([key, value])
    return path


def write_stats_csv(stats: StatsReport, path: "str | Path") -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["section", "key", "value"])
        writer.writerow(["totals", "n_forms", stats.n_forms])
        writer.writerow(["totals", "n_fields", stats.n_fields])
        for kind, frac in stats.field_type_distribution.items():
            writer.writerow(["field_type_distribution", kind, "%.6f" % frac])
        for count, n in stats.fields_per_form.items():
            writer.writerow(["fields_per_form", count, n])
        for bucket, n in stats.chars_per_form.items():
            writer.writerow(["chars_per_form", bucket, n])
    return path


# --- figures ---------------------------------------------------------------

def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_field_type_distribution(stats: StatsReport, path: "str | Path") -> Path:
    kinds = list(stats.field_type_distribution)
    shares = [100.0 * stats.field_type_distribution[k] for k in kinds]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(kinds, shares, color="#4878a8")
    ax.set_ylabel("share of fields (%)")
    ax.set_title("field type distribution")
    ax.tick_params(axis="x", rotation=45)
    return _save(fig, Path(path))


def plot_form_size_histograms(stats: StatsReport, path: "str | Path") -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    counts = sorted(stats.fields_per_form)
    ax1.bar(counts, [stats.fields_per_form[c] for c in counts], color="#4878a8")
    ax1.set_xlabel("fields per form")
    ax1.set_ylabel("forms")
    buckets = sorted(stats.chars_per_form)
    ax2.bar([str(b) for b in buckets],
            [stats.chars_per_form[b] for b in buckets], color="#a85448")
    ax2.set_xlabel("document size bucket (chars)")
    ax2.set_ylabel("forms")
    ax2.tick_params(axis="x", rotation=45)
    fig.suptitle("form size distributions")
    return _save(fig, Path(path))


def plot_taxonomy(records: list, path: "str | Path") -> Path:
    counts = taxonomy_counts(records)
    cats = sorted(counts, key=lambda c: (-counts[c], c))
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.barh(cats[::-1], [counts[c] for c in cats][::-1], color="#6a4878")
    ax.set_xlabel("failing scripts")
    ax.set_title("failure taxonomy")
    return _save(fig, Path(path))


def plot_field_type_errors(per_kind: "dict[str, float]",
                           path: "str | Path") -> Path:
    kinds = list(per_kind)
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(kinds, [per_kind[k] for k in kinds], color="#48a878")
    ax.set_ylabel("error rate over field instances (%)")
    ax.set_title("errors by field type")
    ax.tick_params(axis="x", rotation=45)
    return _save(fig, Path(path))


def write_analysis_bundle(records: list, summary: MetricsSummary,
                          per_kind: "dict[str, float]",
                          stats: "StatsReport | None",
                          out_dir: "str | Path") -> "dict[str, str]":
    """CSV plus PNG artifacts for one evaluation batch; returns paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = {
        "records_csv": str(write_records_csv(records, out_dir / "records.csv")),
        "summary_csv": str(write_summary_csv(summary, out_dir / "summary.csv")),
        "taxonomy_png": str(plot_taxonomy(records, out_dir / "taxonomy.png")),
        "field_type_errors_png": str(plot_field_type_errors(
            per_kind, out_dir / "field_type_errors.png")),
    }
    if stats is not None:
        artifacts["stats_csv"] = str(
            write_stats_csv(stats, out_dir / "corpus_stats.csv"))
        artifacts["field_type_distribution_png"] = str(
            plot_field_type_distribution(
                stats, out_dir / "field_type_distribution.png"))
        artifacts["form_sizes_png"] = str(
            plot_form_size_histograms(stats, out_dir / "form_sizes.png"))
    return artifacts
