"""CLI subcommands, flags, and exit-code contract."""

from __future__ import annotations

import json

import pytest

from formbench.cli import EXIT_INFRA, EXIT_OK, EXIT_USAGE, main


def test_unknown_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as err:
        main(["gen-forms", "--bogus"])
    assert err.value.code == EXIT_USAGE


def test_missing_subcommand_exits_1():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == EXIT_USAGE


def test_gen_pool(tmp_path, capsys):
    out = tmp_path / "pool.json"
    assert main(["gen-pool", "--out", str(out)]) == EXIT_OK
    assert len(json.loads(out.read_text())) == 500


def test_gen_forms_writes_corpus_and_manifest(tmp_path, capsys):
    out = tmp_path / "corpus"
    assert main(["gen-forms", "--seed", "42", "--count", "5",
                 "--out", str(out)]) == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["forms"]) == 5
    assert manifest["config"]["seed"] == 42
    assert manifest["config"]["command"] == "gen-forms"
    assert (out / "0000.html").exists()


def test_gen_forms_is_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        assert main(["gen-forms", "--seed", "42", "--count", "5",
                     "--out", str(tmp_path / name)]) == EXIT_OK
    out = capsys.readouterr().out
    digests = [l.split()[-1] for l in out.splitlines() if "digest" in l]
    assert len(digests) == 2 and digests[0] == digests[1]
    for i in range(5):
        fname = "%04d.html" % i
        assert (tmp_path / "a" / fname).read_bytes() == \
            (tmp_path / "b" / fname).read_bytes()


def test_evaluate_oracle_records_and_summary(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    main(["gen-forms", "--seed", "1", "--count", "4", "--out", str(corpus)])
    records = tmp_path / "records.jsonl"
    code = main(["evaluate", "--corpus", str(corpus), "--oracle",
                 "--report", "json", "--out", str(records)])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    summary = json.loads(out[out.index("{"):])
    assert summary["syntax_correctness_pct"] == "100.00"
    assert summary["executability_pct"] == "100.00"
    assert summary["input_coverage_pct"] == "100.00"
    lines = records.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["config"]["command"] == "evaluate"
    assert len(lines) == 5  # header + one record per form


def test_evaluate_requires_scripts_or_oracle(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    main(["gen-forms", "--seed", "1", "--count", "2", "--out", str(corpus)])
    assert main(["evaluate", "--corpus", str(corpus)]) == EXIT_USAGE


def test_evaluate_unreachable_endpoint_exits_2_without_report(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    main(["gen-forms", "--seed", "1", "--count", "2", "--out", str(corpus)])
    records = tmp_path / "records.jsonl"
    code = main(["evaluate", "--corpus", str(corpus), "--oracle",
                 "--webdriver-url", "http://127.0.0.1:1/",
                 "--out", str(records)])
    assert code == EXIT_INFRA
    assert not records.exists()


def test_failing_scripts_still_exit_0(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    main(["gen-forms", "--seed", "1", "--count", "2", "--out", str(corpus)])
    scripts = tmp_path / "scripts"
    scripts.mkdir()
    (scripts / "0000.py").write_text("def broken(:\n")
    (scripts / "0001.py").write_text("raise SystemExit(1)\n")
    code = main(["evaluate", "--corpus", str(corpus),
                 "--scripts", str(scripts), "--dialect", "webdriver-py",
                 "--report", "json"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    summary = json.loads(out[out.index("{"):])
    assert summary["syntax_correctness_pct"] == "50.00"
    assert summary["executability_pct"] == "0.00"


def test_gen_dataset_and_analyze(tmp_path, capsys):
    dataset = tmp_path / "ds" / "ds.jsonl"
    code = main(["gen-dataset", "--seed", "3", "--count", "3",
                 "--out", str(dataset)])
    assert code == EXIT_OK
    manifest = json.loads(
        (tmp_path / "ds" / "ds.jsonl.manifest.json").read_text())
    assert manifest["n_kept"] == 3
    assert manifest["config"]["command"] == "gen-dataset"

    corpus = tmp_path / "corpus"
    main(["gen-forms", "--seed", "3", "--count", "3", "--out", str(corpus)])
    records = tmp_path / "records.jsonl"
    main(["evaluate", "--corpus", str(corpus), "--oracle",
          "--out", str(records)])
    out_dir = tmp_path / "analysis"
    code = main(["analyze", "--records", str(records),
                 "--corpus", str(corpus), "--report", "json",
                 "--out-dir", str(out_dir)])
    assert code == EXIT_OK
    assert (out_dir / "records.csv").exists()
    assert (out_dir / "summary.csv").exists()
    assert (out_dir / "taxonomy.png").exists()
    assert (out_dir / "field_type_distribution.png").exists()
    out = capsys.readouterr().out
    payload = json.loads(out[out.index("{"):out.rindex("}") + 1])
    assert abs(sum(payload["corpus_stats"]
                   ["field_type_distribution"].values()) - 1.0) < 1e-5
