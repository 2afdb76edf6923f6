from __future__ import annotations

import csv
import json

import pytest
from click.testing import CliRunner

from nextmethod.cli import main
from nextmethod.synthetic import PlantSpec, generate


@pytest.fixture(scope="module")
def corpus_path(tmp_path_factory):
    corpus = generate(
        [
            PlantSpec(families=("menuCreate", "menuSelect"), count=8),
            PlantSpec(families=("prefsSave", "prefsLoad"), count=6),
            PlantSpec(families=("menuCreate", "menuSelect"), count=3, window="test"),
            PlantSpec(families=("menuCreate", "menuSelect"), count=2, window="validation"),
        ],
        seed=11,
    )
    path = tmp_path_factory.mktemp("corpus") / "corpus.jsonl"
    corpus.write(path)
    return path


@pytest.fixture()
def runner():
    return CliRunner()


def test_corpus_validate_ok(runner, corpus_path):
    result = runner.invoke(main, ["corpus", "validate", str(corpus_path)])
    assert result.exit_code == 0, result.output
    assert "0 problem line(s)" in result.output


def test_corpus_validate_flags_bad_lines(runner, tmp_path, corpus_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(corpus_path.read_text() + "{broken\n")
    result = runner.invoke(main, ["corpus", "validate", str(bad)])
    assert result.exit_code == 1
    assert "invalid JSON" in result.output


def test_mine_reports_counts(runner, corpus_path, tmp_path):
    out = tmp_path / "methods.jsonl"
    result = runner.invoke(main, ["mine", "--corpus", str(corpus_path), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "retained" in result.output
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert all(2 <= len(rec["methods"]) <= 10 for rec in lines)


def test_build_model_evaluate_roundtrip(runner, corpus_path, tmp_path):
    model_path = tmp_path / "m.json"
    tx_path = tmp_path / "tx.txt"
    result = runner.invoke(
        main,
        [
            "build-model", "--corpus", str(corpus_path), "--window", "train",
            "--lam", "0.9", "--sup", "0.05", "--con", "0.5", "--max-lhs", "3",
            "--dump-transactions", str(tx_path), "--out", str(model_path),
        ],
    )
    assert result.exit_code == 0, result.output
    assert model_path.exists()
    assert all("," in line for line in tx_path.read_text().splitlines())

    result = runner.invoke(
        main,
        ["evaluate", "--model", str(model_path), "--corpus", str(corpus_path),
         "--window", "test", "--json"],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["recall"] is not None and report["recall"] > 0
    assert report["precision"] == 1.0


def test_evaluate_with_min_lines(runner, corpus_path, tmp_path):
    model_path = tmp_path / "m.json"
    runner.invoke(
        main,
        ["build-model", "--corpus", str(corpus_path), "--window", "train",
         "--lam", "0.9", "--sup", "0.05", "--con", "0.5", "--max-lhs", "3",
         "--out", str(model_path)],
    )
    result = runner.invoke(
        main,
        ["evaluate", "--model", str(model_path), "--corpus", str(corpus_path),
         "--window", "test", "--min-lines", "4", "--json"],
    )
    assert result.exit_code == 0, result.output
    json.loads(result.output)


def test_tune_and_select_presets(runner, corpus_path, tmp_path):
    grid_path = tmp_path / "grid.toml"
    grid_path.write_text(
        "[grid]\ncon = [0.5, 0.8]\nsup = [0.05]\nlambda = [0.9]\nmax_lhs = [1, 2]\n"
    )
    results_path = tmp_path / "results.csv"
    result = runner.invoke(
        main,
        ["tune", "--corpus", str(corpus_path), "--grid", str(grid_path),
         "--out", str(results_path)],
    )
    assert result.exit_code == 0, result.output
    with open(results_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert {row["con"] for row in rows} == {"0.5", "0.8"}

    presets_path = tmp_path / "presets.json"
    result = runner.invoke(
        main,
        ["select-presets", "--results", str(results_path), "--out", str(presets_path)],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(presets_path.read_text())
    assert set(payload) == {"high", "medium", "low"}


def test_serve_rejects_malformed_presets(runner):
    result = runner.invoke(main, ["serve", "--presets", "only-one.model"])
    assert result.exit_code != 0
    assert "high,medium,low" in result.output


def test_serve_rejects_unknown_level(runner):
    result = runner.invoke(main, ["serve", "--presets", "turbo=x.model"])
    assert result.exit_code != 0
    assert "unknown sensitivity" in result.output
