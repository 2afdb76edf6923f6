"""Per-file transactions and association-rule mining.

Methods added by one commit in one file form a transaction over their
cluster ids; splitting by file keeps the learned rules cohesive (no rule
ever asks the developer to switch files). Rules have a single-item RHS:
"having implemented LHS, the next method is RHS".
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import IO, Iterable, Mapping, Sequence

from .corpus import MinedCommit


@dataclass(frozen=True)
class Transaction:
    items: frozenset[int]
    commit_id: str
    path: str


@dataclass(frozen=True)
class AssociationRule:
    lhs: frozenset[int]
    rhs: int
    support: float
    confidence: float

    def sort_key(self) -> tuple:
        return (-self.confidence, -self.support, tuple(sorted(self.lhs)), self.rhs)

    def describe(self) -> str:
        lhs = ",".join(f"C{i}" for i in sorted(self.lhs))
        return f"{{{lhs}}} => C{self.rhs} (sup={self.support:.6g}, con={self.confidence:.6g})"


def build_transactions(
    commits: Iterable[MinedCommit], assignment: Mapping[str, int]
) -> list[Transaction]:
    """One transaction per (commit, file) with at least two distinct clusters.

    Methods without a cluster assignment are skipped; duplicate clusters
    within a file collapse (items are a set), and groups that end up with a
    single distinct item cannot support a rule, so they are dropped.
    """
    transactions: list[Transaction] = []
    for commit in commits:
        per_file: dict[str, set[int]] = defaultdict(set)
        for method in commit.methods:
            cluster = assignment.get(method.method_id)
            if cluster is not None:
                per_file[method.path].add(cluster)
        for path in sorted(per_file):
            items = per_file[path]
            if len(items) >= 2:
                transactions.append(
                    Transaction(items=frozenset(items), commit_id=commit.commit_id, path=path)
                )
    return transactions


def min_itemset_count(sup: float, n: int) -> int:
    """Smallest absolute count whose support fraction reaches `sup`.

    Robust to float rounding in sup * n so boundary grids behave exactly.
    """
    k = max(int(math.floor(sup * n)) - 1, 0)
    while k / n < sup:
        k += 1
    return max(k, 1)


def mine_rules(
    transactions: Sequence[Transaction],
    sup: float,
    con: float,
    max_lhs: int,
) -> list[AssociationRule]:
    """Level-wise frequent-itemset mining with downward-closure pruning.

    Emits exactly the rules with a single RHS item, |lhs| <= max_lhs,
    support >= sup and confidence >= con, ordered by confidence desc,
    support desc, then lexicographic LHS for reproducible artifacts.
    """
    n = len(transactions)
    if n == 0:
        raise ValueError("cannot mine rules from an empty transaction list")
    if not 0.0 < sup <= 1.0:
        raise ValueError(f"sup must be in (0, 1], got {sup}")
    if not 0.0 < con <= 1.0:
        raise ValueError(f"con must be in (0, 1], got {con}")
    if max_lhs < 1:
        raise ValueError(f"max_lhs must be >= 1, got {max_lhs}")

    min_count = min_itemset_count(sup, n)
    max_itemset = max_lhs + 1

    counts: dict[frozenset[int], int] = {}
    single_counts: Counter[int] = Counter()
    for t in transactions:
        single_counts.update(t.items)
    frequent_items = {item for item, c in single_counts.items() if c >= min_count}
    for item in frequent_items:
        counts[frozenset((item,))] = single_counts[item]

    level: set[frozenset[int]] = {frozenset((item,)) for item in frequent_items}
    size = 1
    while level and size < max_itemset:
        size += 1
        candidates = _candidate_itemsets(level, size)
        if not candidates:
            break
        tallies: dict[frozenset[int], int] = {c: 0 for c in candidates}
        for t in transactions:
            usable = sorted(t.items & frequent_items)
            if len(usable) < size:
                continue
            for combo in combinations(usable, size):
                key = frozenset(combo)
                if key in tallies:
                    tallies[key] += 1
        level = set()
        for itemset, count in tallies.items():
            if count >= min_count:
                counts[itemset] = count
                level.add(itemset)

    rules: list[AssociationRule] = []
    for itemset, count in counts.items():
        if len(itemset) < 2:
            continue
        support = count / n
        for rhs in itemset:
            lhs = itemset - {rhs}
            confidence = count / counts[lhs]
            if confidence >= con:
                rules.append(
                    AssociationRule(lhs=lhs, rhs=rhs, support=support, confidence=confidence)
                )
    rules.sort(key=AssociationRule.sort_key)
    return rules


def _candidate_itemsets(level: set[frozenset[int]], size: int) -> set[frozenset[int]]:
    """Join (size-1)-itemsets sharing a prefix, then prune by subset frequency."""
    as_tuples = sorted(tuple(sorted(s)) for s in level)
    candidates: set[frozenset[int]] = set()
    for i in range(len(as_tuples)):
        for j in range(i + 1, len(as_tuples)):
            a, b = as_tuples[i], as_tuples[j]
            if a[: size - 2] != b[: size - 2]:
                break
            candidate = frozenset(a) | frozenset(b)
            if len(candidate) != size:
                continue
            if all(candidate - {item} in level for item in candidate):
                candidates.add(candidate)
    return candidates


def write_transaction_lines(transactions: Iterable[Transaction], out: IO[str]) -> int:
    """Debug dump, one `C12,C8,C71` line per transaction, items ascending.

    Lets the mined input be cross-checked against external rule miners.
    """
    written = 0
    for t in transactions:
        out.write(",".join(f"C{i}" for i in sorted(t.items)))
        out.write("\n")
        written += 1
    return written
