"""Replay-based evaluation: time split, commit simulation, metrics, tuning.

The study design replays history: for each evaluated commit, pretend the
developer has written some of its added methods and check whether the
rules predict the remaining ones. Training data always predates the
evaluated block on the global time axis so no rule is learned from the
future.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence, TypeVar

from .clustering import cluster_methods
from .corpus import MethodRecord, MinedCommit, fingerprint_commits
from .model import CentroidSource, ModelArtifact, ModelConfig, build_model
from .recommender import assign_vector, resolve_rules
from .rules import build_transactions, mine_rules
from .similarity import method_vector, token_distance, tokenize

HasTimestamp = TypeVar("HasTimestamp")


@dataclass(frozen=True)
class SplitConfig:
    """Train/validation/test fractions of the global time interval."""

    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)

    def __post_init__(self) -> None:
        if len(self.ratios) != 3 or any(r < 0 for r in self.ratios):
            raise ValueError(f"ratios must be three non-negative fractions, got {self.ratios}")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError(f"ratios must sum to 1, got {self.ratios}")


def time_split(
    commits: Sequence[HasTimestamp], cfg: SplitConfig = SplitConfig()
) -> tuple[list[HasTimestamp], list[HasTimestamp], list[HasTimestamp]]:
    """Split on the global time axis, never per repository.

    A commit at time t goes to train iff t < start + train_ratio * span;
    boundary timestamps belong to the later block. A single-instant corpus
    is degenerate and lands entirely in train.
    """
    if not commits:
        raise ValueError("cannot split an empty corpus")
    times = [c.timestamp for c in commits]  # type: ignore[attr-defined]
    start, end = min(times), max(times)
    if start == end:
        return list(commits), [], []
    span = end - start
    train_end = start + cfg.ratios[0] * span
    validation_end = start + (cfg.ratios[0] + cfg.ratios[1]) * span
    train: list[HasTimestamp] = []
    validation: list[HasTimestamp] = []
    test: list[HasTimestamp] = []
    for commit in commits:
        t = commit.timestamp  # type: ignore[attr-defined]
        if t < train_end:
            train.append(commit)
        elif t < validation_end:
            validation.append(commit)
        else:
            test.append(commit)
    return train, validation, test


class MatchedMethod(NamedTuple):
    method_id: str
    cluster: int
    line_count: int


@dataclass(frozen=True)
class ReplayRecommendation:
    rhs_cluster: int
    confidence: float
    centroid_line_count: int
    correct: bool
    consumed_method_id: str | None
    dist_count: int | None
    dist_pct: int | None


@dataclass(frozen=True)
class CommitOutcome:
    """What replaying one commit against a model produced."""

    commit_id: str
    n_added: int
    added_line_counts: tuple[int, ...]
    matched: tuple[MatchedMethod, ...]
    recommendations: tuple[ReplayRecommendation, ...]

    @property
    def n_matched(self) -> int:
        return len(self.matched)

    @property
    def n_recommendations(self) -> int:
        return len(self.recommendations)

    @property
    def n_correct(self) -> int:
        return sum(1 for r in self.recommendations if r.correct)

    @property
    def covered_methods(self) -> int:
        return sum(1 for r in self.recommendations if r.consumed_method_id is not None)


def simulate_commit(
    commit: MinedCommit,
    model: ModelArtifact,
    gamma: float | None = None,
    assignments: Mapping[str, int | None] | None = None,
) -> CommitOutcome:
    """Replay one commit: match methods to clusters, fire rules, score them.

    Candidate left-hand sides are capped at one less than the number of
    matched methods (using everything would leave nothing to predict) and
    by the model's LHS ceiling. Live suppression stays off: a rule whose
    RHS is among the added methods is exactly what a correct prediction
    looks like here. A recommendation is correct when its RHS cluster is
    the assigned cluster of one of the added methods; each one consumes at
    most one method, greedily in confidence order.
    """
    matched: list[MatchedMethod] = []
    for method in commit.methods:
        if assignments is not None:
            cluster = assignments.get(method.method_id)
        else:
            cluster = assign_vector(method_vector(method.source_text), model, gamma)
        if cluster is not None:
            matched.append(MatchedMethod(method.method_id, cluster, method.line_count))

    matched_clusters = {m.cluster for m in matched}
    lhs_cap = min(len(matched) - 1, model.config.max_lhs)
    survivors = (
        resolve_rules(matched_clusters, model.rules, lhs_cap=lhs_cap, suppress_matched_rhs=False)
        if lhs_cap >= 1
        else []
    )

    by_id = {m.method_id: m for m in commit.methods}
    consumed: set[str] = set()
    recommendations: list[ReplayRecommendation] = []
    for rule in survivors:
        source = model.centroid_sources[rule.rhs]
        correct = any(m.cluster == rule.rhs for m in matched)
        consumed_id: str | None = None
        dist_count: int | None = None
        dist_pct: int | None = None
        if correct:
            for m in matched:
                if m.cluster == rule.rhs and m.method_id not in consumed:
                    consumed.add(m.method_id)
                    consumed_id = m.method_id
                    actual = tokenize(by_id[m.method_id].source_text)
                    recommended = tokenize(source.source_text)
                    dist_count, dist_pct = token_distance(actual, recommended)
                    break
        recommendations.append(
            ReplayRecommendation(
                rhs_cluster=rule.rhs,
                confidence=rule.confidence,
                centroid_line_count=source.line_count,
                correct=correct,
                consumed_method_id=consumed_id,
                dist_count=dist_count,
                dist_pct=dist_pct,
            )
        )
    return CommitOutcome(
        commit_id=commit.commit_id,
        n_added=len(commit.methods),
        added_line_counts=tuple(m.line_count for m in commit.methods),
        matched=tuple(matched),
        recommendations=tuple(recommendations),
    )


@dataclass(frozen=True)
class EvalReport:
    """Aggregate replay metrics. Undefined ratios are None, never zero."""

    n_commits: int
    n_added_methods: int
    n_commits_with_rec: int
    n_commits_with_correct: int
    n_recommendations: int
    n_correct: int
    recall: float | None
    precision: float | None
    cov_commits: float | None
    cov_meth: float | None
    recom_mean: float | None
    recom_median: float | None
    dist_quartiles: tuple[int, int, int] | None
    dist_mean: float | None
    dist_pct_quartiles: tuple[int, int, int] | None
    dist_pct_mean: float | None

    def row(self) -> dict:
        """Flat mapping whose keys mirror the report table row labels."""
        return {
            "#commits": self.n_commits,
            "#added methods": self.n_added_methods,
            "#commits w. recomm.": self.n_commits_with_rec,
            "#commits w. corr. recomm.": self.n_commits_with_correct,
            "#recommendations": self.n_recommendations,
            "#corr. recomm.": self.n_correct,
            "recall": self.recall,
            "precision": self.precision,
            "coverage_commits": self.cov_commits,
            "coverage_meth": self.cov_meth,
            "#recom(median)": self.recom_median,
            "#recom(mean)": self.recom_mean,
            "distance_tokens(Q1,Q2,Q3)": _format_quartiles(self.dist_quartiles),
            "distance_tokens(mean)": self.dist_mean,
            "%distance_tokens(Q1,Q2,Q3)": _format_quartiles(self.dist_pct_quartiles),
            "%distance_tokens(mean)": self.dist_pct_mean,
        }


def _format_quartiles(q: tuple[int, int, int] | None) -> str | None:
    return None if q is None else ",".join(str(v) for v in q)


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def _quartiles_lower(values: Sequence[int]) -> tuple[int, int, int] | None:
    """Q1, Q2, Q3 with lower interpolation on the sorted values."""
    if not values:
        return None
    ordered = sorted(values)
    n = len(ordered)
    return tuple(ordered[(n - 1) * k // 4] for k in (1, 2, 3))  # type: ignore[return-value]


def _median_lower(values: Sequence[int]) -> float | None:
    if not values:
        return None
    ordered = sorted(values)
    return float(ordered[(len(ordered) - 1) // 2])


def compute_metrics(
    outcomes: Sequence[CommitOutcome], total_added_methods: int | None = None
) -> EvalReport:
    """Aggregate per-commit outcomes into the report metrics.

    `outcomes` must cover every evaluated commit, including the ones that
    produced no recommendation; they carry the denominators.
    """
    if total_added_methods is None:
        total_added_methods = sum(o.n_added for o in outcomes)
    n_commits = len(outcomes)
    with_rec = [o for o in outcomes if o.n_recommendations > 0]
    with_correct = [o for o in outcomes if o.n_correct > 0]
    n_recs = sum(o.n_recommendations for o in outcomes)
    n_correct = sum(o.n_correct for o in outcomes)
    covered = sum(o.covered_methods for o in outcomes)

    rec_counts = [o.n_recommendations for o in with_rec]
    dist_counts = [
        r.dist_count for o in outcomes for r in o.recommendations if r.dist_count is not None
    ]
    dist_pcts = [
        r.dist_pct for o in outcomes for r in o.recommendations if r.dist_pct is not None
    ]
    return EvalReport(
        n_commits=n_commits,
        n_added_methods=total_added_methods,
        n_commits_with_rec=len(with_rec),
        n_commits_with_correct=len(with_correct),
        n_recommendations=n_recs,
        n_correct=n_correct,
        recall=_ratio(len(with_correct), n_commits),
        precision=_ratio(len(with_correct), len(with_rec)),
        cov_commits=_ratio(len(with_rec), n_commits),
        cov_meth=_ratio(covered, total_added_methods),
        recom_mean=sum(rec_counts) / len(rec_counts) if rec_counts else None,
        recom_median=_median_lower(rec_counts),
        dist_quartiles=_quartiles_lower(dist_counts),
        dist_mean=sum(dist_counts) / len(dist_counts) if dist_counts else None,
        dist_pct_quartiles=_quartiles_lower(dist_pcts),
        dist_pct_mean=sum(dist_pcts) / len(dist_pcts) if dist_pcts else None,
    )


def evaluate_commits(
    commits: Sequence[MinedCommit],
    model: ModelArtifact,
    gamma: float | None = None,
    assignments: Mapping[str, int | None] | None = None,
) -> tuple[list[CommitOutcome], EvalReport]:
    outcomes = [simulate_commit(c, model, gamma, assignments) for c in commits]
    return outcomes, compute_metrics(outcomes)


def long_method_reanalysis(
    outcomes: Sequence[CommitOutcome], min_lines: int = 4
) -> EvalReport:
    """Re-score ignoring short methods.

    Recommendations whose RHS centroid is under `min_lines` are discarded,
    and commits with no added method reaching `min_lines` leave the
    denominators entirely (no successful recommendation was ever possible
    there). Method coverage counts only qualifying methods.
    """
    kept_outcomes: list[CommitOutcome] = []
    total_long_methods = 0
    for outcome in outcomes:
        long_count = sum(1 for lc in outcome.added_line_counts if lc >= min_lines)
        if long_count == 0:
            continue
        total_long_methods += long_count
        retained = [
            r for r in outcome.recommendations if r.centroid_line_count >= min_lines
        ]
        consumed: set[str] = set()
        rescored: list[ReplayRecommendation] = []
        for r in retained:
            consumed_id: str | None = None
            if r.correct:
                for m in outcome.matched:
                    if (
                        m.cluster == r.rhs_cluster
                        and m.line_count >= min_lines
                        and m.method_id not in consumed
                    ):
                        consumed.add(m.method_id)
                        consumed_id = m.method_id
                        break
            rescored.append(
                ReplayRecommendation(
                    rhs_cluster=r.rhs_cluster,
                    confidence=r.confidence,
                    centroid_line_count=r.centroid_line_count,
                    correct=r.correct,
                    consumed_method_id=consumed_id,
                    dist_count=r.dist_count,
                    dist_pct=r.dist_pct,
                )
            )
        kept_outcomes.append(
            CommitOutcome(
                commit_id=outcome.commit_id,
                n_added=outcome.n_added,
                added_line_counts=outcome.added_line_counts,
                matched=outcome.matched,
                recommendations=tuple(rescored),
            )
        )
    return compute_metrics(kept_outcomes, total_added_methods=total_long_methods)


@dataclass(frozen=True)
class TuningConfig:
    con: float
    sup: float
    lam: float
    max_lhs: int

    def sort_key(self) -> tuple:
        return (self.con, self.sup, self.lam, self.max_lhs)


@dataclass(frozen=True)
class TuningGrid:
    con_values: tuple[float, ...]
    sup_values: tuple[float, ...]
    lam_values: tuple[float, ...]
    max_lhs_values: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (self.con_values and self.sup_values and self.lam_values and self.max_lhs_values):
            raise ValueError("tuning grid must have at least one value per parameter")

    def size(self) -> int:
        return (
            len(self.con_values)
            * len(self.sup_values)
            * len(self.lam_values)
            * len(self.max_lhs_values)
        )


DEFAULT_GRID = TuningGrid(
    con_values=(0.05, 0.20, 0.35, 0.50, 0.65, 0.80),
    sup_values=(8.00e-06, 4.80e-05, 8.80e-05, 1.28e-04, 1.68e-04),
    lam_values=(0.80, 0.85, 0.90, 0.95),
    max_lhs_values=(1, 2, 3, 4, 5, 6, 7, 8, 9),
)


def tune(
    grid: TuningGrid,
    train: Sequence[MinedCommit],
    validation: Sequence[MinedCommit],
    progress: Callable[[TuningConfig], None] | None = None,
) -> Iterator[tuple[TuningConfig, EvalReport]]:
    """Run the full cross product of the grid, streaming results.

    Clustering and validation-method assignment depend only on the edge
    threshold, so both are computed once per threshold value and shared by
    every (sup, con, max_lhs) cell. The assignment threshold always equals
    the clustering threshold, mirroring how the presets will be served.
    """
    train_methods: list[MethodRecord] = [m for c in train for m in c.methods]
    fingerprint = fingerprint_commits(train)

    for lam in grid.lam_values:
        clusters, _graph = cluster_methods(train_methods, lam)
        assignment = {mid: c.cluster_id for c in clusters for mid in c.members}
        transactions = build_transactions(train, assignment)
        by_id = {m.method_id: m for m in train_methods}
        centroid_sources = {
            c.cluster_id: CentroidSource(
                source_text=by_id[c.centroid].source_text,
                repo_id=by_id[c.centroid].repo_id,
                commit_id=by_id[c.centroid].commit_id,
                path=by_id[c.centroid].path,
                line_count=by_id[c.centroid].line_count,
            )
            for c in clusters
        }
        base_model = ModelArtifact(
            config=ModelConfig(
                lam=lam, gamma=lam, sup=1.0, con=1.0, max_lhs=1, corpus_fingerprint=fingerprint
            ),
            clusters=clusters,
            centroid_sources=centroid_sources,
            rules=[],
        )
        val_assignments: dict[str, int | None] = {
            m.method_id: assign_vector(method_vector(m.source_text), base_model, lam)
            for c in validation
            for m in c.methods
        }
        for sup in grid.sup_values:
            for con in grid.con_values:
                for max_lhs in grid.max_lhs_values:
                    config = TuningConfig(con=con, sup=sup, lam=lam, max_lhs=max_lhs)
                    if progress is not None:
                        progress(config)
                    rules = mine_rules(transactions, sup, con, max_lhs) if transactions else []
                    model = ModelArtifact(
                        config=ModelConfig(
                            lam=lam,
                            gamma=lam,
                            sup=sup,
                            con=con,
                            max_lhs=max_lhs,
                            corpus_fingerprint=fingerprint,
                        ),
                        clusters=clusters,
                        centroid_sources=centroid_sources,
                        rules=rules,
                    )
                    _outcomes, report = evaluate_commits(
                        validation, model, assignments=val_assignments
                    )
                    yield config, report


PRESET_FLOORS = {"high": 0.50, "medium": 0.60, "low": 0.70}


@dataclass(frozen=True)
class PresetSelection:
    level: str
    floor: float
    config: TuningConfig | None
    report: EvalReport | None

    @property
    def available(self) -> bool:
        return self.config is not None


def select_presets(
    results: Sequence[tuple[TuningConfig, EvalReport]],
    floors: Mapping[str, float] = PRESET_FLOORS,
) -> dict[str, PresetSelection]:
    """Pick one configuration per sensitivity level.

    For each precision floor, take the eligible configuration with the
    highest commit coverage; ties prefer higher precision, then the
    lexicographically smallest configuration. Levels nobody reaches are
    reported as absent rather than silently reusing another level.
    """
    if not results:
        raise ValueError("cannot select presets from empty tuning results")
    selections: dict[str, PresetSelection] = {}
    for level, floor in floors.items():
        eligible = [
            (config, report)
            for config, report in results
            if report.precision is not None and report.precision >= floor
        ]
        if not eligible:
            selections[level] = PresetSelection(level=level, floor=floor, config=None, report=None)
            continue
        config, report = min(
            eligible,
            key=lambda pair: (
                -(pair[1].cov_commits if pair[1].cov_commits is not None else -math.inf),
                -(pair[1].precision if pair[1].precision is not None else -math.inf),
                pair[0].sort_key(),
            ),
        )
        selections[level] = PresetSelection(level=level, floor=floor, config=config, report=report)
    return selections


def build_preset_models(
    train: Sequence[MinedCommit],
    selections: Mapping[str, PresetSelection],
) -> dict[str, ModelArtifact]:
    """Materialize one model per available preset from the training slice."""
    models: dict[str, ModelArtifact] = {}
    for level, selection in selections.items():
        if selection.config is None:
            continue
        cfg = selection.config
        model, _ = build_model(
            train, lam=cfg.lam, sup=cfg.sup, con=cfg.con, max_lhs=cfg.max_lhs
        )
        models[level] = model
    return models
