from __future__ import annotations

import pytest

from nextmethod.corpus import filter_commits, mine_commits, parse_corpus, read_corpus
from nextmethod.evaluation import time_split
from nextmethod.similarity import method_vector, similarity
from nextmethod.synthetic import PlantSpec, family_variant, generate


@pytest.fixture(scope="module")
def corpus():
    return generate(
        [
            PlantSpec(families=("menuCreate", "menuSelect"), count=8),
            PlantSpec(families=("mapAttach", "mapReady"), count=6),
            PlantSpec(families=("menuCreate", "menuSelect"), count=3, window="test"),
        ],
        seed=5,
    )


def test_corpus_is_valid_jsonl(corpus):
    commits, diagnostics = read_corpus(corpus.jsonl().splitlines())
    assert diagnostics == []
    assert len(commits) == len(corpus.records)


def test_planted_commits_land_in_their_windows(corpus):
    commits = parse_corpus(corpus.jsonl().splitlines())
    train, validation, test = time_split(commits)
    train_ids = {c.commit_id for c in train}
    test_ids = {c.commit_id for c in test}
    assert set(corpus.planted_commits["train"]) <= train_ids
    assert set(corpus.planted_commits["test"]) <= test_ids


def test_variants_stay_within_family_threshold(corpus):
    a = method_vector(family_variant("menuCreate", 11))
    b = method_vector(family_variant("menuCreate", 88))
    assert similarity(a, b) > 0.95


def test_filtered_noise_commits_exercise_the_window(corpus):
    mined = mine_commits(parse_corpus(corpus.jsonl().splitlines()))
    sizes = {len(c.methods) for c in mined}
    assert 1 in sizes and 11 in sizes  # one-method and tangled noise present
    retained = filter_commits(mined)
    assert all(2 <= len(c.methods) <= 10 for c in retained)


def test_generation_is_deterministic():
    plants = [PlantSpec(families=("prefsSave", "prefsLoad"), count=4)]
    assert generate(plants, seed=13).jsonl() == generate(plants, seed=13).jsonl()


def test_margin_verification_rejects_bad_threshold():
    plants = [PlantSpec(families=("menuCreate", "menuSelect"), count=2)]
    with pytest.raises(ValueError):
        generate(plants, clustering_threshold=0.999)  # variants differ by one token
