"""Turn newly implemented methods into ranked next-method recommendations.

The live flow: assign each new method to the cluster of its most similar
centroid (strictly above the assignment threshold), treat the matched
cluster set as potential rule left-hand sides, and resolve the matching
rules down to at most one recommendation per RHS cluster. The replay
evaluator reuses the same matching and conflict resolution with live
suppression turned off, so the two paths cannot drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import AbstractSet, Iterable, Mapping, Sequence

from .corpus import MethodRecord
from .model import CentroidSource, ModelArtifact
from .rules import AssociationRule
from .similarity import TermVector, method_vector, similarity


@dataclass(frozen=True)
class Recommendation:
    rhs_cluster: int
    code: str
    lhs_signatures: tuple[str, ...]
    confidence: float
    rule: AssociationRule
    provenance: CentroidSource


def assign_vector(
    vector: TermVector, model: ModelArtifact, gamma: float | None = None
) -> int | None:
    """Cluster of the most similar centroid, iff similarity is strictly above gamma.

    A method exactly at the threshold is discarded; ties on the score go to
    the smallest cluster id. None is a normal no-match outcome.
    """
    if gamma is None:
        gamma = model.config.gamma
    best_score = 0.0
    best_cluster: int | None = None
    for cid in model.cluster_ids():
        score = similarity(vector, model.centroid_vector(cid))
        if score > best_score:
            best_score = score
            best_cluster = cid
    if best_cluster is not None and best_score > gamma:
        return best_cluster
    return None


def assign_cluster(
    method: MethodRecord | str, model: ModelArtifact, gamma: float | None = None
) -> int | None:
    source = method.source_text if isinstance(method, MethodRecord) else method
    return assign_vector(method_vector(source), model, gamma)


def candidate_lhs(matched: AbstractSet[int], cap: int) -> list[frozenset[int]]:
    """Every non-empty subset of the matched clusters up to `cap` items.

    Ordered by size then lexicographically; n matched clusters with a
    generous cap yield 2^n - 1 candidates.
    """
    if not matched:
        raise ValueError("matched cluster set is empty")
    ordered = sorted(matched)
    out: list[frozenset[int]] = []
    for size in range(1, min(cap, len(ordered)) + 1):
        for combo in combinations(ordered, size):
            out.append(frozenset(combo))
    return out


def _priority(rule: AssociationRule) -> tuple:
    return (-rule.confidence, -rule.support, tuple(sorted(rule.lhs)), rule.rhs)


def resolve_rules(
    matched: AbstractSet[int],
    rules: Iterable[AssociationRule],
    lhs_cap: int,
    suppress_matched_rhs: bool,
) -> list[AssociationRule]:
    """Match rules against the cluster set and resolve conflicts.

    1. A rule fires when its LHS is one of the candidate subsets (set
       equality; subset containment within the cap is the same thing).
    2. Live suppression drops rules whose RHS is already implemented.
    3. Rules sharing an RHS collapse to the highest-confidence one.
    4. Mutually exclusive pairs (each rule's RHS feeding the other's LHS,
       directly or through the matched set) keep the higher-confidence
       side; resolution is pairwise, not transitive.

    Ties break by higher support, then lexicographic LHS. The result is
    sorted by descending confidence.
    """
    fired = [
        r
        for r in rules
        if len(r.lhs) <= lhs_cap and r.lhs <= matched
    ]
    if suppress_matched_rhs:
        fired = [r for r in fired if r.rhs not in matched]

    best_per_rhs: dict[int, AssociationRule] = {}
    for rule in fired:
        current = best_per_rhs.get(rule.rhs)
        if current is None or _priority(rule) < _priority(current):
            best_per_rhs[rule.rhs] = rule

    survivors: list[AssociationRule] = []
    for rule in sorted(best_per_rhs.values(), key=_priority):
        if any(_mutually_exclusive(rule, kept, matched) for kept in survivors):
            continue
        survivors.append(rule)
    return survivors


def _mutually_exclusive(
    r1: AssociationRule, r2: AssociationRule, matched: AbstractSet[int]
) -> bool:
    if r1.rhs in r2.lhs and r2.rhs in (r1.lhs | matched):
        return True
    if r2.rhs in r1.lhs and r1.rhs in (r2.lhs | matched):
        return True
    return False


def recommend(
    matched: AbstractSet[int],
    model: ModelArtifact,
    signature_map: Mapping[int, Sequence[str]] | None = None,
) -> list[Recommendation]:
    """Ranked recommendations for a set of matched clusters.

    Pure function of its inputs against an immutable model; safe to call
    concurrently. `signature_map` names the input methods behind each
    matched cluster for display; without it, cluster labels stand in.
    """
    if not matched:
        return []
    survivors = resolve_rules(
        matched,
        model.rules,
        lhs_cap=model.config.max_lhs,
        suppress_matched_rhs=True,
    )
    out: list[Recommendation] = []
    for rule in survivors:
        source = model.centroid_sources[rule.rhs]
        signatures: list[str] = []
        for cid in sorted(rule.lhs):
            if signature_map and cid in signature_map:
                signatures.extend(signature_map[cid])
            else:
                signatures.append(f"C{cid}")
        out.append(
            Recommendation(
                rhs_cluster=rule.rhs,
                code=source.source_text,
                lhs_signatures=tuple(signatures),
                confidence=rule.confidence,
                rule=rule,
                provenance=source,
            )
        )
    return out


def provenance_comment(source: CentroidSource) -> str:
    """Comment line naming where a copied snippet came from."""
    return f"// Source: {source.repo_id} ({source.path} @ {source.commit_id})"
