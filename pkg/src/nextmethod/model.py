"""The frozen model artifact: clusters, centroid sources, rules, config.

A model is built offline from a mined corpus slice and loaded read-only by
the recommender, the evaluator and the HTTP service. Persistence is
versioned JSON; loading validates the schema and refuses dangling cluster
references outright, so a bad artifact fails at startup rather than at
recommendation time.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .clustering import Cluster, cluster_methods
from .corpus import MethodRecord, MinedCommit, fingerprint_commits
from .rules import AssociationRule, Transaction, build_transactions, mine_rules
from .similarity import TermVector, method_vector

FORMAT_NAME = "nextmethod-model"
FORMAT_VERSION = 1


class ModelError(Exception):
    """Artifact cannot be built or loaded."""


@dataclass(frozen=True)
class ModelConfig:
    lam: float  # edge threshold used for clustering
    gamma: float  # live assignment threshold; equals lam unless overridden
    sup: float
    con: float
    max_lhs: int
    corpus_fingerprint: str


@dataclass(frozen=True)
class CentroidSource:
    source_text: str
    repo_id: str
    commit_id: str
    path: str
    line_count: int


@dataclass
class ModelArtifact:
    config: ModelConfig
    clusters: list[Cluster]
    centroid_sources: dict[int, CentroidSource]
    rules: list[AssociationRule]
    _centroid_vectors: dict[int, TermVector] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        cluster_ids = {c.cluster_id for c in self.clusters}
        problems: list[str] = []
        if len(cluster_ids) != len(self.clusters):
            problems.append("duplicate cluster ids")
        for cid in cluster_ids:
            if cid not in self.centroid_sources:
                problems.append(f"cluster {cid} has no centroid source")
        for cid in self.centroid_sources:
            if cid not in cluster_ids:
                problems.append(f"centroid source for unknown cluster {cid}")
        for rule in self.rules:
            for item in rule.lhs | {rule.rhs}:
                if item not in cluster_ids:
                    problems.append(f"rule {rule.describe()} references unknown cluster {item}")
        if problems:
            raise ModelError("invalid model: " + "; ".join(problems))

    def centroid_vector(self, cluster_id: int) -> TermVector:
        vector = self._centroid_vectors.get(cluster_id)
        if vector is None:
            vector = method_vector(self.centroid_sources[cluster_id].source_text)
            self._centroid_vectors[cluster_id] = vector
        return vector

    def cluster_ids(self) -> list[int]:
        return sorted(c.cluster_id for c in self.clusters)

    def info(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "format_version": FORMAT_VERSION,
            "config": asdict(self.config),
            "clusters": len(self.clusters),
            "rules": len(self.rules),
        }


def build_model(
    commits: Sequence[MinedCommit],
    lam: float,
    sup: float,
    con: float,
    max_lhs: int,
    gamma: float | None = None,
    drop_singletons: bool = False,
) -> tuple[ModelArtifact, list[Transaction]]:
    """Cluster the commits' methods, mine rules, and freeze the artifact.

    Returns the transactions too so callers can dump them for differential
    testing. Commits should already be filtered to the 2..10 added-method
    window. A corpus yielding no multi-cluster file groups produces a model
    with zero rules rather than an error.
    """
    methods: list[MethodRecord] = [m for c in commits for m in c.methods]
    clusters, graph = cluster_methods(methods, lam, drop_singletons=drop_singletons)
    assignment = {mid: c.cluster_id for c in clusters for mid in c.members}
    transactions = build_transactions(commits, assignment)
    rules = mine_rules(transactions, sup, con, max_lhs) if transactions else []

    by_id = {m.method_id: m for m in methods}
    centroid_sources: dict[int, CentroidSource] = {}
    for cluster in clusters:
        record = by_id[cluster.centroid]
        centroid_sources[cluster.cluster_id] = CentroidSource(
            source_text=record.source_text,
            repo_id=record.repo_id,
            commit_id=record.commit_id,
            path=record.path,
            line_count=record.line_count,
        )
    config = ModelConfig(
        lam=lam,
        gamma=lam if gamma is None else gamma,
        sup=sup,
        con=con,
        max_lhs=max_lhs,
        corpus_fingerprint=fingerprint_commits(commits),
    )
    artifact = ModelArtifact(
        config=config,
        clusters=clusters,
        centroid_sources=centroid_sources,
        rules=rules,
    )
    return artifact, transactions


def save_model(model: ModelArtifact, path: str | Path) -> None:
    payload = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "config": {
            "lambda": model.config.lam,
            "gamma": model.config.gamma,
            "sup": model.config.sup,
            "con": model.config.con,
            "max_lhs": model.config.max_lhs,
            "corpus_fingerprint": model.config.corpus_fingerprint,
        },
        "clusters": [
            {
                "id": c.cluster_id,
                "members": sorted(c.members),
                "centroid": c.centroid,
            }
            for c in model.clusters
        ],
        "centroid_sources": [
            {
                "cluster": cid,
                "source": src.source_text,
                "repo": src.repo_id,
                "commit": src.commit_id,
                "path": src.path,
                "line_count": src.line_count,
            }
            for cid, src in sorted(model.centroid_sources.items())
        ],
        "rules": [
            {
                "lhs": sorted(r.lhs),
                "rhs": r.rhs,
                "support": r.support,
                "confidence": r.confidence,
            }
            for r in model.rules
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1), encoding="utf-8")


def load_model(path: str | Path) -> ModelArtifact:
    """Load and validate an artifact; any defect is fatal with a diagnostic."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(
            f"model file {path} is not valid JSON at character {exc.pos} "
            f"(line {exc.lineno}): {exc.msg}; file may be truncated"
        ) from exc
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_NAME:
        raise ModelError(f"model file {path} is not a {FORMAT_NAME} artifact")
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelError(
            f"model file {path} has format_version {version!r}, expected {FORMAT_VERSION}"
        )
    try:
        cfg = payload["config"]
        config = ModelConfig(
            lam=float(cfg["lambda"]),
            gamma=float(cfg["gamma"]),
            sup=float(cfg["sup"]),
            con=float(cfg["con"]),
            max_lhs=int(cfg["max_lhs"]),
            corpus_fingerprint=str(cfg["corpus_fingerprint"]),
        )
        clusters = [
            Cluster(
                cluster_id=int(c["id"]),
                members=frozenset(str(m) for m in c["members"]),
                centroid=str(c["centroid"]),
            )
            for c in payload["clusters"]
        ]
        centroid_sources = {
            int(s["cluster"]): CentroidSource(
                source_text=str(s["source"]),
                repo_id=str(s["repo"]),
                commit_id=str(s["commit"]),
                path=str(s["path"]),
                line_count=int(s["line_count"]),
            )
            for s in payload["centroid_sources"]
        }
        rules = [
            AssociationRule(
                lhs=frozenset(int(i) for i in r["lhs"]),
                rhs=int(r["rhs"]),
                support=float(r["support"]),
                confidence=float(r["confidence"]),
            )
            for r in payload["rules"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"model file {path} violates the schema: {exc!r}") from exc
    try:
        return ModelArtifact(
            config=config,
            clusters=clusters,
            centroid_sources=centroid_sources,
            rules=rules,
        )
    except ModelError as exc:
        raise ModelError(f"model file {path}: {exc}") from exc


def assignment_of(clusters: Iterable[Cluster]) -> dict[str, int]:
    return {mid: c.cluster_id for c in clusters for mid in c.members}
