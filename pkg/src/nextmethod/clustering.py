"""Similarity-graph clustering of mined methods.

Every mined method is a node; edges carry pairwise similarity and survive
only at or above the threshold. Connected components of the pruned graph
are the clusters, each represented by its highest-degree member (the
centroid), whose source text is what ultimately gets recommended.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import MethodRecord
from .similarity import TermVector, method_vector, similarity


@dataclass
class SimilarityGraph:
    """Undirected weighted graph over method ids. No self loops, one edge per pair."""

    threshold: float
    nodes: list[str] = field(default_factory=list)
    adjacency: dict[str, dict[str, float]] = field(default_factory=dict)

    def add_node(self, node: str) -> None:
        if node not in self.adjacency:
            self.nodes.append(node)
            self.adjacency[node] = {}

    def add_edge(self, u: str, v: str, weight: float) -> None:
        if u == v:
            raise ValueError("self loops are not allowed")
        self.add_node(u)
        self.add_node(v)
        self.adjacency[u][v] = weight
        self.adjacency[v][u] = weight

    def degree(self, node: str) -> int:
        return len(self.adjacency[node])

    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency.values()) // 2


@dataclass(frozen=True)
class Cluster:
    cluster_id: int
    members: frozenset[str]
    centroid: str


def build_graph(
    methods: Sequence[MethodRecord],
    threshold: float,
    vectors: dict[str, TermVector] | None = None,
) -> SimilarityGraph:
    """All-pairs similarity graph, pruned below `threshold` (>= keeps the edge).

    Pairs sharing no term have similarity 0 and are skipped via an inverted
    index, which is lossless for any positive threshold. Precomputed term
    vectors may be passed in to avoid re-tokenizing.
    """
    if vectors is None:
        vectors = {m.method_id: method_vector(m.source_text) for m in methods}
    graph = SimilarityGraph(threshold=threshold)
    ids = [m.method_id for m in methods]
    for method_id in ids:
        graph.add_node(method_id)

    index_of = {method_id: i for i, method_id in enumerate(ids)}
    if threshold > 0.0:
        candidate_pairs = _pairs_sharing_terms(ids, vectors)
    else:
        candidate_pairs = (
            (ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))
        )
    for u, v in candidate_pairs:
        score = similarity(vectors[u], vectors[v])
        if score >= threshold:
            if index_of[u] > index_of[v]:
                u, v = v, u
            graph.add_edge(u, v, score)
    return graph


def _pairs_sharing_terms(
    ids: list[str], vectors: dict[str, TermVector]
) -> Iterable[tuple[str, str]]:
    by_term: dict[str, list[int]] = defaultdict(list)
    for i, method_id in enumerate(ids):
        for term in vectors[method_id]:
            by_term[term].append(i)
    seen: set[tuple[int, int]] = set()
    for postings in by_term.values():
        for a in range(len(postings)):
            for b in range(a + 1, len(postings)):
                pair = (postings[a], postings[b])
                if pair not in seen:
                    seen.add(pair)
                    yield ids[pair[0]], ids[pair[1]]


def components(graph: SimilarityGraph) -> list[list[str]]:
    """Connected components as member lists; singletons retained.

    Deterministic: components ordered by their smallest member id, members
    sorted within each component.
    """
    visited: set[str] = set()
    result: list[list[str]] = []
    for start in graph.nodes:
        if start in visited:
            continue
        stack = [start]
        visited.add(start)
        members = []
        while stack:
            node = stack.pop()
            members.append(node)
            for neighbor in graph.adjacency[node]:
                if neighbor not in visited:
                    visited.add(neighbor)
                    stack.append(neighbor)
        members.sort()
        result.append(members)
    result.sort(key=lambda ms: ms[0])
    return result


def elect_centroid(members: Sequence[str], graph: SimilarityGraph) -> str:
    """Highest-degree member of the component; ties go to the smallest id.

    A component's induced subgraph is the component itself, so graph degree
    is the induced degree.
    """
    if not members:
        raise ValueError("cannot elect a centroid for an empty cluster")
    return min(members, key=lambda m: (-graph.degree(m), m))


def clusters_from_graph(graph: SimilarityGraph, drop_singletons: bool = False) -> list[Cluster]:
    """Number components densely (by smallest member id) and pick centroids.

    Singleton clusters are kept by default: they can never reach rule
    support floors, so they only cost memory, and dropping them would be a
    policy choice, not a correctness one.
    """
    clusters: list[Cluster] = []
    cluster_id = 0
    for members in components(graph):
        if drop_singletons and len(members) == 1:
            continue
        clusters.append(
            Cluster(
                cluster_id=cluster_id,
                members=frozenset(members),
                centroid=elect_centroid(members, graph),
            )
        )
        cluster_id += 1
    return clusters


def cluster_methods(
    methods: Sequence[MethodRecord],
    threshold: float,
    drop_singletons: bool = False,
) -> tuple[list[Cluster], SimilarityGraph]:
    graph = build_graph(methods, threshold)
    return clusters_from_graph(graph, drop_singletons=drop_singletons), graph
