from __future__ import annotations

from dataclasses import dataclass

import pytest

from nextmethod.clustering import Cluster
from nextmethod.corpus import MethodRecord, MinedCommit
from nextmethod.evaluation import (
    CommitOutcome,
    MatchedMethod,
    ReplayRecommendation,
    SplitConfig,
    TuningConfig,
    TuningGrid,
    compute_metrics,
    evaluate_commits,
    long_method_reanalysis,
    select_presets,
    simulate_commit,
    time_split,
    tune,
)
from nextmethod.model import CentroidSource, ModelArtifact, ModelConfig
from nextmethod.recommender import resolve_rules
from nextmethod.rules import AssociationRule
from nextmethod.synthetic import FAMILY_TEMPLATES, family_variant


@dataclass(frozen=True)
class Stamp:
    timestamp: int
    name: str = ""


class TestTimeSplit:
    def test_uniform_timestamps_split_80_10_10(self):
        commits = [Stamp(t) for t in range(100)]
        train, validation, test = time_split(commits)
        assert [c.timestamp for c in train] == list(range(80))
        assert [c.timestamp for c in validation] == list(range(80, 90))
        assert [c.timestamp for c in test] == list(range(90, 100))

    def test_single_instant_corpus_degenerates_to_train(self):
        commits = [Stamp(42), Stamp(42)]
        train, validation, test = time_split(commits)
        assert len(train) == 2 and not validation and not test

    def test_empty_corpus_is_an_error(self):
        with pytest.raises(ValueError):
            time_split([])

    def test_early_repo_contributes_only_to_training(self):
        early = [Stamp(t, "early") for t in range(0, 30)]
        late = [Stamp(t, "late") for t in (0, 50, 100)]
        train, validation, test = time_split(early + late)
        assert all(c.name == "late" for c in validation + test)
        assert {c.name for c in train} >= {"early"}

    def test_boundary_belongs_to_later_block(self):
        commits = [Stamp(0), Stamp(80), Stamp(100)]
        train, validation, test = time_split(commits)
        assert [c.timestamp for c in train] == [0]
        assert [c.timestamp for c in validation] == [80]
        assert [c.timestamp for c in test] == [100]

    def test_blocks_are_temporally_ordered(self):
        import random

        rng = random.Random(4)
        commits = [Stamp(rng.randint(0, 10_000)) for _ in range(200)]
        train, validation, test = time_split(commits)
        if train and validation:
            assert max(c.timestamp for c in train) < min(c.timestamp for c in validation)
        if validation and test:
            assert max(c.timestamp for c in validation) < min(c.timestamp for c in test)

    def test_custom_ratios_validated(self):
        with pytest.raises(ValueError):
            SplitConfig(ratios=(0.5, 0.2, 0.2))


FAMILY_KEYS = sorted(FAMILY_TEMPLATES)  # stable order, mapped to cluster ids below


def replay_model(rules, max_lhs=3):
    """Model whose cluster k is the k-th method family, centroid = canonical text."""
    clusters = []
    sources = {}
    for cid, key in enumerate(FAMILY_KEYS, start=1):
        text = family_variant(key, 53)
        clusters.append(Cluster(cluster_id=cid, members=frozenset({f"m{cid}"}), centroid=f"m{cid}"))
        sources[cid] = CentroidSource(
            source_text=text, repo_id="org/app", commit_id="sha", path=f"{key}.java",
            line_count=text.count("\n") + 1,
        )
    return ModelArtifact(
        config=ModelConfig(lam=0.9, gamma=0.9, sup=0.01, con=0.1, max_lhs=max_lhs,
                           corpus_fingerprint="fixture"),
        clusters=clusters,
        centroid_sources=sources,
        rules=rules,
    )


def commit_of(commit_id, family_cluster_ids, salt=61):
    methods = tuple(
        MethodRecord(
            method_id=f"{commit_id}#{i}",
            repo_id="org/app",
            commit_id=commit_id,
            path="F.java",
            signature=f"planted{cid}()",
            source_text=family_variant(FAMILY_KEYS[cid - 1], salt),
            line_count=family_variant(FAMILY_KEYS[cid - 1], salt).count("\n") + 1,
        )
        for i, cid in enumerate(family_cluster_ids)
    )
    return MinedCommit(repo_id="org/app", commit_id=commit_id, timestamp=1, methods=methods)


def rule(lhs, rhs, confidence, support=0.1):
    return AssociationRule(lhs=frozenset(lhs), rhs=rhs, support=support, confidence=confidence)


@pytest.fixture(scope="module")
def three_commit_replay():
    model = replay_model([rule({1, 2}, 3, 0.8), rule({4, 5}, 6, 0.7)])
    commits = [
        commit_of("i", [1, 2, 3]),
        commit_of("j", [4, 5, 7]),
        commit_of("k", [7, 8]),
    ]
    outcomes = [simulate_commit(c, model) for c in commits]
    return model, commits, outcomes


class TestSimulateCommit:
    def test_commit_i_one_correct(self, three_commit_replay):
        _, _, outcomes = three_commit_replay
        outcome = outcomes[0]
        assert outcome.n_matched == 3
        assert outcome.n_recommendations == 1
        assert outcome.n_correct == 1
        assert outcome.covered_methods == 1
        assert outcome.recommendations[0].rhs_cluster == 3

    def test_commit_j_one_wrong(self, three_commit_replay):
        _, _, outcomes = three_commit_replay
        outcome = outcomes[1]
        assert outcome.n_recommendations == 1
        assert outcome.n_correct == 0
        assert outcome.recommendations[0].rhs_cluster == 6
        assert outcome.recommendations[0].consumed_method_id is None

    def test_commit_k_silent(self, three_commit_replay):
        _, _, outcomes = three_commit_replay
        assert outcomes[2].n_recommendations == 0

    def test_replay_is_deterministic(self, three_commit_replay):
        model, commits, outcomes = three_commit_replay
        again = [simulate_commit(c, model) for c in commits]
        assert again == outcomes

    def test_full_matched_set_never_used_as_lhs(self):
        # two matched methods: only single-item LHSs are candidates
        model = replay_model([rule({1, 2}, 3, 0.9)])
        outcome = simulate_commit(commit_of("c", [1, 2]), model)
        assert outcome.n_recommendations == 0

    def test_unmatched_methods_do_not_count(self):
        model = replay_model([rule({1}, 2, 0.9)])
        short = MethodRecord(
            method_id="c#x", repo_id="r", commit_id="c", path="F.java",
            signature="zzz()", source_text="void zzz() { qqq(); }", line_count=1,
        )
        commit = commit_of("c", [1, 2])
        commit = MinedCommit(
            repo_id="r", commit_id="c", timestamp=1, methods=commit.methods + (short,)
        )
        outcome = simulate_commit(commit, model)
        assert outcome.n_matched == 2
        assert outcome.n_added == 3

    def test_dist_tokens_against_consumed_method(self, three_commit_replay):
        _, _, outcomes = three_commit_replay
        rec = outcomes[0].recommendations[0]
        # variant salt differs from the canonical centroid by one literal token
        assert rec.dist_count >= 1
        assert rec.dist_pct >= 1

    def test_matches_live_resolution_when_suppression_off(self, three_commit_replay):
        model, commits, outcomes = three_commit_replay
        for commit, outcome in zip(commits, outcomes):
            matched = {m.cluster for m in outcome.matched}
            cap = min(outcome.n_matched - 1, model.config.max_lhs)
            expected = (
                resolve_rules(matched, model.rules, lhs_cap=cap, suppress_matched_rhs=False)
                if cap >= 1
                else []
            )
            assert [r.rhs for r in expected] == [r.rhs_cluster for r in outcome.recommendations]


class TestComputeMetrics:
    def test_worked_three_commit_metrics(self, three_commit_replay):
        _, _, outcomes = three_commit_replay
        report = compute_metrics(outcomes)
        assert report.recall == pytest.approx(1 / 3)
        assert report.precision == pytest.approx(1 / 2)
        assert report.cov_commits == pytest.approx(2 / 3)
        assert report.cov_meth == pytest.approx(1 / 8)
        assert report.n_commits == 3
        assert report.n_added_methods == 8
        assert report.n_recommendations == 2
        assert report.n_correct == 1

    def test_two_commit_example(self):
        hit = CommitOutcome(
            commit_id="a", n_added=2, added_line_counts=(5, 5),
            matched=(MatchedMethod("a#0", 1, 5), MatchedMethod("a#1", 2, 5)),
            recommendations=(
                ReplayRecommendation(2, 0.9, 5, True, "a#1", 0, 0),
            ),
        )
        silent = CommitOutcome(
            commit_id="b", n_added=2, added_line_counts=(5, 5),
            matched=(), recommendations=(),
        )
        report = compute_metrics([hit, silent])
        assert report.recall == pytest.approx(1 / 2)
        assert report.precision == pytest.approx(1.0)
        assert report.cov_commits == pytest.approx(1 / 2)

    def test_no_recommendations_precision_undefined(self):
        silent = CommitOutcome(
            commit_id="b", n_added=2, added_line_counts=(5, 5),
            matched=(), recommendations=(),
        )
        report = compute_metrics([silent])
        assert report.precision is None
        assert report.recall == 0.0
        assert report.dist_quartiles is None

    def test_recall_never_exceeds_commit_coverage(self, three_commit_replay):
        _, _, outcomes = three_commit_replay
        report = compute_metrics(outcomes)
        assert report.recall <= report.cov_commits

    def test_quartiles_lower_interpolation(self):
        outcomes = []
        for i, d in enumerate([0, 1, 2, 5, 9]):
            outcomes.append(
                CommitOutcome(
                    commit_id=f"c{i}", n_added=2, added_line_counts=(5, 5),
                    matched=(MatchedMethod(f"c{i}#0", 1, 5),),
                    recommendations=(
                        ReplayRecommendation(1, 0.9, 5, True, f"c{i}#0", d, d * 10),
                    ),
                )
            )
        report = compute_metrics(outcomes)
        assert report.dist_quartiles == (1, 2, 5)
        assert report.dist_pct_quartiles == (10, 20, 50)
        assert report.dist_mean == pytest.approx(3.4)
        assert report.recom_median == 1


def outcome_for_reanalysis(commit_id, line_counts, recs):
    matched = tuple(
        MatchedMethod(f"{commit_id}#{i}", cluster=i + 1, line_count=lc)
        for i, lc in enumerate(line_counts)
    )
    return CommitOutcome(
        commit_id=commit_id, n_added=len(line_counts), added_line_counts=tuple(line_counts),
        matched=matched, recommendations=tuple(recs),
    )


class TestLongMethodReanalysis:
    def test_worked_mixed_fixture(self):
        # A: only 2-line getters, excluded outright
        a = outcome_for_reanalysis(
            "a", (2, 2),
            [ReplayRecommendation(1, 0.9, 2, True, "a#0", 0, 0)],
        )
        # B: 3-line and 6-line methods; the sole recommendation targets the
        # 3-line cluster, so it is discarded and B has no correct rec left
        b = outcome_for_reanalysis(
            "b", (3, 6),
            [ReplayRecommendation(1, 0.8, 3, True, "b#0", 1, 33)],
        )
        # C: 10-line correct recommendation, retained
        c = outcome_for_reanalysis(
            "c", (10, 5),
            [ReplayRecommendation(1, 0.7, 10, True, "c#0", 2, 4)],
        )
        report = long_method_reanalysis([a, b, c], min_lines=4)
        assert report.n_commits == 2  # a excluded
        assert report.n_added_methods == 3  # 6, 10, 5
        assert report.n_commits_with_rec == 1
        assert report.n_commits_with_correct == 1
        assert report.n_recommendations == 1
        assert report.n_correct == 1
        assert report.recall == pytest.approx(1 / 2)
        assert report.precision == pytest.approx(1.0)
        assert report.cov_meth == pytest.approx(1 / 3)
        assert report.dist_quartiles == (2, 2, 2)

    def test_short_centroid_discarded_even_if_correct(self):
        o = outcome_for_reanalysis(
            "x", (4, 6),
            [ReplayRecommendation(1, 0.9, 2, True, "x#0", 0, 0)],
        )
        report = long_method_reanalysis([o], min_lines=4)
        assert report.n_commits == 1
        assert report.n_recommendations == 0

    def test_default_threshold_is_four_lines(self):
        o = outcome_for_reanalysis(
            "x", (4,),
            [ReplayRecommendation(1, 0.9, 4, True, "x#0", 0, 0)],
        )
        report = long_method_reanalysis([o])
        assert report.n_recommendations == 1


def preset_report(precision, cov, n=100):
    rec_commits = max(int(round(cov * n)), 1)
    cor = int(round(precision * rec_commits))
    return compute_metrics(
        [
            CommitOutcome(
                commit_id=f"c{i}", n_added=2, added_line_counts=(5, 5),
                matched=(MatchedMethod(f"c{i}#0", 1, 5),),
                recommendations=(
                    ReplayRecommendation(1, 0.9, 5, i < cor, f"c{i}#0" if i < cor else None,
                                         0 if i < cor else None, 0 if i < cor else None),
                ),
            )
            for i in range(rec_commits)
        ]
        + [
            CommitOutcome(commit_id=f"s{i}", n_added=2, added_line_counts=(5, 5),
                          matched=(), recommendations=())
            for i in range(n - rec_commits)
        ]
    )


def cfg(con, sup=1e-4, lam=0.9, max_lhs=3):
    return TuningConfig(con=con, sup=sup, lam=lam, max_lhs=max_lhs)


class TestSelectPresets:
    def test_three_tier_fixture(self):
        results = [
            (cfg(0.2), preset_report(0.55, 0.20)),
            (cfg(0.5), preset_report(0.65, 0.15)),
            (cfg(0.8), preset_report(0.75, 0.10)),
        ]
        picks = select_presets(results)
        assert picks["high"].config == cfg(0.2)
        assert picks["medium"].config == cfg(0.5)
        assert picks["low"].config == cfg(0.8)

    def test_all_below_floor_reported_absent(self):
        results = [(cfg(0.2), preset_report(0.3, 0.2))]
        picks = select_presets(results)
        assert all(not p.available for p in picks.values())

    def test_coverage_tie_prefers_higher_precision(self):
        results = [
            (cfg(0.2), preset_report(0.55, 0.20)),
            (cfg(0.5), preset_report(0.60, 0.20)),
        ]
        picks = select_presets(results)
        assert picks["high"].config == cfg(0.5)

    def test_full_tie_prefers_lexicographic_config(self):
        report = preset_report(0.55, 0.20)
        results = [(cfg(0.5), report), (cfg(0.2), report)]
        picks = select_presets(results)
        assert picks["high"].config == cfg(0.2)

    def test_empty_results_error(self):
        with pytest.raises(ValueError):
            select_presets([])


class TestTune:
    def test_small_grid_row_count_and_determinism(self):
        from nextmethod.corpus import filter_commits, mine_commits, parse_corpus
        from nextmethod.synthetic import PlantSpec, generate

        corpus = generate(
            [
                PlantSpec(families=("menuCreate", "menuSelect"), count=6),
                PlantSpec(families=("menuCreate", "menuSelect"), count=2, window="validation"),
            ],
            noise_train=3,
            noise_validation=1,
            seed=9,
        )
        commits = parse_corpus(corpus.jsonl().splitlines())
        train, validation, _ = time_split(commits)
        train_mined = filter_commits(mine_commits(train))
        val_mined = filter_commits(mine_commits(validation))
        grid = TuningGrid(
            con_values=(0.5, 0.8),
            sup_values=(0.05,),
            lam_values=(0.85, 0.9),
            max_lhs_values=(1, 2),
        )
        results = list(tune(grid, train_mined, val_mined))
        assert len(results) == grid.size() == 8
        assert len({config for config, _ in results}) == 8
        again = list(tune(grid, train_mined, val_mined))
        assert [(c, r) for c, r in again] == results
        # planted validation commits are recoverable at these settings
        by_config = dict(results)
        assert by_config[TuningConfig(con=0.5, sup=0.05, lam=0.9, max_lhs=2)].recall > 0
