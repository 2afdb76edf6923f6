"""Command-line entry points for the mining/recommendation pipeline."""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import evaluation
from .corpus import filter_commits, mine_commits, read_corpus
from .evaluation import (
    DEFAULT_GRID,
    EvalReport,
    SplitConfig,
    TuningConfig,
    TuningGrid,
    evaluate_commits,
    long_method_reanalysis,
    select_presets,
    time_split,
)
from .model import ModelError, build_model, load_model, save_model
from .rules import write_transaction_lines
from .service import SENSITIVITY_LEVELS, create_app, default_data_dir


@click.group()
def main() -> None:
    """Mine per-commit added methods, learn implementation patterns, recommend code."""


def _read_corpus_path(path: str, fail_on_diagnostics: bool = False):
    with open(path, "r", encoding="utf-8") as fh:
        commits, diagnostics = read_corpus(fh)
    for diag in diagnostics:
        click.echo(f"corpus: {diag}", err=True)
    if diagnostics and fail_on_diagnostics:
        raise click.ClickException(f"{len(diagnostics)} malformed corpus line(s)")
    return commits


def _parse_split(text: str) -> SplitConfig:
    try:
        parts = tuple(float(p) for p in text.split(","))
        return SplitConfig(ratios=parts)  # type: ignore[arg-type]
    except ValueError as exc:
        raise click.ClickException(f"bad --split {text!r}: {exc}") from exc


def _window_commits(commits, window: str, split: SplitConfig):
    if window == "all":
        return commits
    train, validation, test = time_split(commits, split)
    return {"train": train, "validation": validation, "test": test}[window]


@main.group()
def corpus() -> None:
    """Corpus-level utilities."""


@corpus.command("validate")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def corpus_validate(path: str) -> None:
    """Check that PATH is a well-formed JSONL corpus."""
    with open(path, "r", encoding="utf-8") as fh:
        commits, diagnostics = read_corpus(fh)
    for diag in diagnostics:
        click.echo(diag, err=True)
    click.echo(f"{len(commits)} commit(s) parsed, {len(diagnostics)} problem line(s)")
    if diagnostics:
        sys.exit(1)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write retained commits and their added methods as JSONL.")
def mine(corpus_path: str, out_path: str | None) -> None:
    """Extract added methods per commit and apply the 2..10 commit filter."""
    commits = _read_corpus_path(corpus_path)
    mined = mine_commits(commits)
    retained = filter_commits(mined)
    total_methods = sum(len(c.methods) for c in retained)
    click.echo(
        f"{len(commits)} commit(s) read, {len(retained)} retained "
        f"(2..10 added methods), {total_methods} method(s) mined"
    )
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            for c in retained:
                fh.write(
                    json.dumps(
                        {
                            "repo": c.repo_id,
                            "commit": c.commit_id,
                            "timestamp": c.timestamp,
                            "methods": [
                                {
                                    "id": m.method_id,
                                    "path": m.path,
                                    "signature": m.signature,
                                    "line_count": m.line_count,
                                }
                                for m in c.methods
                            ],
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        click.echo(f"wrote {out_path}")


@main.command("build-model")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--lam", required=True, type=float, help="Clustering edge threshold.")
@click.option("--sup", required=True, type=float, help="Minimum rule support fraction.")
@click.option("--con", required=True, type=float, help="Minimum rule confidence.")
@click.option("--max-lhs", required=True, type=int, help="Maximum rule LHS size.")
@click.option("--gamma", type=float, default=None,
              help="Live assignment threshold; defaults to --lam.")
@click.option("--window", type=click.Choice(["all", "train", "validation", "test"]),
              default="all", show_default=True)
@click.option("--split", default="0.8,0.1,0.1", show_default=True)
@click.option("--drop-singletons", is_flag=True, default=False)
@click.option("--dump-transactions", type=click.Path(), default=None,
              help="Also dump mined transactions, one C-id line each.")
@click.option("--out", "out_path", required=True, type=click.Path())
def build_model_cmd(
    corpus_path: str,
    lam: float,
    sup: float,
    con: float,
    max_lhs: int,
    gamma: float | None,
    window: str,
    split: str,
    drop_singletons: bool,
    dump_transactions: str | None,
    out_path: str,
) -> None:
    """Cluster mined methods, mine rules, and write a model artifact."""
    commits = _read_corpus_path(corpus_path)
    selected = _window_commits(commits, window, _parse_split(split))
    retained = filter_commits(mine_commits(selected))
    if not retained:
        raise click.ClickException("no commits survive the 2..10 added-method filter")
    model, transactions = build_model(
        retained, lam=lam, sup=sup, con=con, max_lhs=max_lhs, gamma=gamma,
        drop_singletons=drop_singletons,
    )
    save_model(model, out_path)
    click.echo(
        f"model: {len(model.clusters)} cluster(s), {len(model.rules)} rule(s), "
        f"{len(transactions)} transaction(s) -> {out_path}"
    )
    if dump_transactions:
        with open(dump_transactions, "w", encoding="utf-8") as fh:
            write_transaction_lines(transactions, fh)
        click.echo(f"wrote {dump_transactions}")


def _echo_report(report: EvalReport) -> None:
    for key, value in report.row().items():
        if isinstance(value, float):
            value = f"{value:.4f}"
        click.echo(f"{key}: {'undefined' if value is None else value}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--split", default="0.8,0.1,0.1", show_default=True)
@click.option("--window", type=click.Choice(["train", "validation", "test", "all"]),
              default="test", show_default=True)
@click.option("--min-lines", type=int, default=None,
              help="Re-score ignoring methods shorter than this many lines.")
@click.option("--json", "as_json", is_flag=True, default=False)
def evaluate(
    model_path: str,
    corpus_path: str,
    split: str,
    window: str,
    min_lines: int | None,
    as_json: bool,
) -> None:
    """Replay a corpus window against a model and report the metrics."""
    try:
        model = load_model(model_path)
    except ModelError as exc:
        raise click.ClickException(str(exc)) from exc
    commits = _read_corpus_path(corpus_path)
    selected = _window_commits(commits, window, _parse_split(split))
    retained = filter_commits(mine_commits(selected))
    outcomes, report = evaluate_commits(retained, model)
    if min_lines is not None:
        report = long_method_reanalysis(outcomes, min_lines=min_lines)
    if as_json:
        click.echo(json.dumps(report.row(), indent=1))
    else:
        _echo_report(report)


def _load_grid(path: str | None) -> TuningGrid:
    if path is None:
        return DEFAULT_GRID
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    grid = data.get("grid", data)
    try:
        return TuningGrid(
            con_values=tuple(float(v) for v in grid["con"]),
            sup_values=tuple(float(v) for v in grid["sup"]),
            lam_values=tuple(float(v) for v in grid["lambda"]),
            max_lhs_values=tuple(int(v) for v in grid["max_lhs"]),
        )
    except KeyError as exc:
        raise click.ClickException(f"grid file {path} missing key {exc}") from exc


@main.command("tune")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--grid", "grid_path", type=click.Path(exists=True), default=None,
              help="TOML file with con/sup/lambda/max_lhs arrays; defaults to the standard grid.")
@click.option("--split", default="0.8,0.1,0.1", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def tune_cmd(corpus_path: str, grid_path: str | None, split: str, out_path: str) -> None:
    """Sweep the parameter grid on train/validation and stream results to CSV."""
    grid = _load_grid(grid_path)
    commits = _read_corpus_path(corpus_path)
    train, validation, _test = time_split(commits, _parse_split(split))
    train_mined = filter_commits(mine_commits(train))
    validation_mined = filter_commits(mine_commits(validation))
    if not train_mined:
        raise click.ClickException("training window has no usable commits")
    rows = 0
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = None
        for config, report in evaluation.tune(grid, train_mined, validation_mined):
            record = {
                "con": config.con,
                "sup": config.sup,
                "lambda": config.lam,
                "max_lhs": config.max_lhs,
            }
            record.update(report.row())
            if writer is None:
                writer = csv.DictWriter(fh, fieldnames=list(record))
                writer.writeheader()
            writer.writerow(record)
            fh.flush()
            rows += 1
    click.echo(f"{rows} configuration(s) evaluated ({grid.size()} requested) -> {out_path}")


@main.command("select-presets")
@click.option("--results", "results_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None)
def select_presets_cmd(results_path: str, out_path: str | None) -> None:
    """Pick high/medium/low sensitivity configurations from tuning results."""
    results: list[tuple[TuningConfig, EvalReport]] = []
    with open(results_path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            results.append((_config_from_row(row), _report_from_row(row)))
    if not results:
        raise click.ClickException(f"{results_path} has no result rows")
    selections = select_presets(results)
    payload: dict[str, object] = {}
    for level, selection in selections.items():
        if selection.config is None:
            payload[level] = None
            click.echo(
                f"{level}: no configuration reaches precision >= {selection.floor:.2f}"
            )
            continue
        cfg = selection.config
        payload[level] = {
            "con": cfg.con,
            "sup": cfg.sup,
            "lambda": cfg.lam,
            "max_lhs": cfg.max_lhs,
            "precision": selection.report.precision if selection.report else None,
            "coverage_commits": selection.report.cov_commits if selection.report else None,
        }
        click.echo(
            f"{level}: con={cfg.con} sup={cfg.sup} lambda={cfg.lam} max_lhs={cfg.max_lhs}"
        )
    if out_path:
        Path(out_path).write_text(json.dumps(payload, indent=1), encoding="utf-8")
        click.echo(f"wrote {out_path}")


def _config_from_row(row: dict) -> TuningConfig:
    return TuningConfig(
        con=float(row["con"]),
        sup=float(row["sup"]),
        lam=float(row["lambda"]),
        max_lhs=int(row["max_lhs"]),
    )


def _opt_float(value: str | None) -> float | None:
    return None if value in (None, "", "undefined") else float(value)


def _opt_quartiles(value: str | None) -> tuple[int, int, int] | None:
    if value in (None, "", "undefined"):
        return None
    parts = tuple(int(v) for v in value.split(","))
    return parts  # type: ignore[return-value]


def _report_from_row(row: dict) -> EvalReport:
    return EvalReport(
        n_commits=int(row["#commits"]),
        n_added_methods=int(row["#added methods"]),
        n_commits_with_rec=int(row["#commits w. recomm."]),
        n_commits_with_correct=int(row["#commits w. corr. recomm."]),
        n_recommendations=int(row["#recommendations"]),
        n_correct=int(row["#corr. recomm."]),
        recall=_opt_float(row["recall"]),
        precision=_opt_float(row["precision"]),
        cov_commits=_opt_float(row["coverage_commits"]),
        cov_meth=_opt_float(row["coverage_meth"]),
        recom_mean=_opt_float(row["#recom(mean)"]),
        recom_median=_opt_float(row["#recom(median)"]),
        dist_quartiles=_opt_quartiles(row["distance_tokens(Q1,Q2,Q3)"]),
        dist_mean=_opt_float(row["distance_tokens(mean)"]),
        dist_pct_quartiles=_opt_quartiles(row["%distance_tokens(Q1,Q2,Q3)"]),
        dist_pct_mean=_opt_float(row["%distance_tokens(mean)"]),
    )


@main.command()
@click.option(
    "--presets",
    required=True,
    help="Three model paths, high,medium,low order, or level=path pairs.",
)
@click.option("--port", type=int, default=8425, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", type=click.Path(), default=None,
              help=f"Feedback journal directory; defaults to ${default_data_dir()}.")
def serve(presets: str, port: int, host: str, data_dir: str | None) -> None:
    """Serve recommendations over HTTP with one model per sensitivity level."""
    import uvicorn

    parts = [p.strip() for p in presets.split(",") if p.strip()]
    paths: dict[str, str] = {}
    if all("=" in p for p in parts):
        for p in parts:
            level, _, path = p.partition("=")
            paths[level] = path
    elif len(parts) == 3:
        paths = dict(zip(("high", "medium", "low"), parts))
    else:
        raise click.ClickException(
            "--presets needs high,medium,low paths in order or level=path pairs"
        )
    bad = set(paths) - set(SENSITIVITY_LEVELS)
    if bad:
        raise click.ClickException(f"unknown sensitivity level(s): {sorted(bad)}")
    models = {}
    for level, path in paths.items():
        try:
            models[level] = load_model(path)
        except ModelError as exc:
            raise click.ClickException(str(exc)) from exc
        click.echo(f"loaded {level}: {path}")
    app = create_app(models, data_dir=Path(data_dir) if data_dir else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
