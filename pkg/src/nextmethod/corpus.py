"""Commit-history corpus ingestion and added-method extraction.

The corpus is JSONL, one object per commit:

    {"repo": ..., "commit": ..., "timestamp": ..., "files": [
        {"path": "a/B.java", "before": "...or null...", "after": "..."}]}

Commits arrive pre-flattened (one record per commit with before/after file
snapshots); branch topology is the corpus producer's job. Timestamps are
UTC seconds.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .javalex import CallableDecl, extract_callables

JAVA_EXTENSIONS = (".java",)

MIN_ADDED_METHODS = 2
MAX_ADDED_METHODS = 10


@dataclass(frozen=True)
class FileChange:
    """One file touched by a commit. before_source is None for a new file."""

    path: str
    before_source: str | None
    after_source: str


@dataclass(frozen=True)
class CommitRecord:
    repo_id: str
    commit_id: str
    timestamp: int
    files: tuple[FileChange, ...]


@dataclass(frozen=True)
class MethodRecord:
    """One callable declaration added by a commit."""

    method_id: str
    repo_id: str
    commit_id: str
    path: str
    signature: str
    source_text: str
    line_count: int


@dataclass(frozen=True)
class MinedCommit:
    """A commit together with the methods it added, grouped for downstream use."""

    repo_id: str
    commit_id: str
    timestamp: int
    methods: tuple[MethodRecord, ...]


class CorpusError(Exception):
    """Unrecoverable corpus problem (unreadable stream, empty input where forbidden)."""


def read_corpus(stream: IO[str] | Iterable[str]) -> tuple[list[CommitRecord], list[str]]:
    """Parse a JSONL corpus stream.

    Returns commits in ascending timestamp order plus diagnostics for every
    skipped line (with 1-based line numbers). Raises CorpusError if the
    stream itself cannot be read.
    """
    commits: list[CommitRecord] = []
    diagnostics: list[str] = []
    seen: set[tuple[str, str]] = set()
    try:
        lines: Iterator[str] = iter(stream)
        for lineno, raw in enumerate(lines, start=1):
            if not raw.strip():
                continue
            try:
                record = _parse_record(raw)
            except ValueError as exc:
                diagnostics.append(f"line {lineno}: {exc}")
                continue
            key = (record.repo_id, record.commit_id)
            if key in seen:
                diagnostics.append(
                    f"line {lineno}: duplicate commit {record.commit_id!r} in repo {record.repo_id!r}"
                )
                continue
            seen.add(key)
            commits.append(record)
    except (OSError, UnicodeDecodeError) as exc:
        raise CorpusError(f"corpus stream unreadable: {exc}") from exc
    commits.sort(key=lambda c: c.timestamp)
    return commits, diagnostics


def parse_corpus(stream: IO[str] | Iterable[str]) -> list[CommitRecord]:
    return read_corpus(stream)[0]


def _parse_record(raw: str) -> CommitRecord:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    for key in ("repo", "commit", "timestamp", "files"):
        if key not in obj:
            raise ValueError(f"missing field {key!r}")
    repo = obj["repo"]
    commit = obj["commit"]
    timestamp = obj["timestamp"]
    files = obj["files"]
    if not isinstance(repo, str) or not repo:
        raise ValueError("repo must be a non-empty string")
    if not isinstance(commit, str) or not commit:
        raise ValueError("commit must be a non-empty string")
    if isinstance(timestamp, bool) or not isinstance(timestamp, (int, float)) or timestamp <= 0:
        raise ValueError("timestamp must be a positive number of UTC seconds")
    if not isinstance(files, list):
        raise ValueError("files must be a list")
    changes: list[FileChange] = []
    for pos, entry in enumerate(files):
        if not isinstance(entry, dict):
            raise ValueError(f"files[{pos}] is not an object")
        path = entry.get("path")
        if not isinstance(path, str) or not path:
            raise ValueError(f"files[{pos}] missing path")
        if not path.endswith(JAVA_EXTENSIONS):
            continue  # non-Java entries are the producer's noise, not ours
        after = entry.get("after")
        if not isinstance(after, str):
            raise ValueError(f"files[{pos}] ({path}) missing after_source")
        before = entry.get("before")
        if before is not None and not isinstance(before, str):
            raise ValueError(f"files[{pos}] ({path}) before must be a string or null")
        changes.append(FileChange(path=path, before_source=before, after_source=after))
    return CommitRecord(
        repo_id=repo,
        commit_id=commit,
        timestamp=int(timestamp),
        files=tuple(changes),
    )


def added_callables(change: FileChange) -> list[CallableDecl]:
    """Callables in after_source whose signature is absent from before_source.

    Keyed by signature: a body change to an existing signature is a
    modification, not an addition. A new file contributes everything.
    """
    after = extract_callables(change.after_source)
    if change.before_source is None:
        return after
    before_sigs = {decl.signature for decl in extract_callables(change.before_source)}
    return [decl for decl in after if decl.signature not in before_sigs]


def added_methods(change: FileChange, repo_id: str = "", commit_id: str = "") -> list[MethodRecord]:
    records: list[MethodRecord] = []
    for k, decl in enumerate(added_callables(change)):
        records.append(
            MethodRecord(
                method_id=f"{repo_id}/{commit_id}/{change.path}#{k}",
                repo_id=repo_id,
                commit_id=commit_id,
                path=change.path,
                signature=decl.signature,
                source_text=decl.source_text,
                line_count=decl.line_count,
            )
        )
    return records


def mine_commit(commit: CommitRecord) -> MinedCommit:
    methods: list[MethodRecord] = []
    for change in commit.files:
        methods.extend(added_methods(change, commit.repo_id, commit.commit_id))
    return MinedCommit(
        repo_id=commit.repo_id,
        commit_id=commit.commit_id,
        timestamp=commit.timestamp,
        methods=tuple(methods),
    )


def mine_commits(commits: Iterable[CommitRecord]) -> list[MinedCommit]:
    return [mine_commit(c) for c in commits]


def filter_commits(commits: Iterable[MinedCommit]) -> list[MinedCommit]:
    """Keep commits adding 2 to 10 methods in total across all files.

    One-method commits cannot teach a pattern; >10 are likely tangled work.
    Idempotent and order-preserving.
    """
    return [c for c in commits if MIN_ADDED_METHODS <= len(c.methods) <= MAX_ADDED_METHODS]


def fingerprint_commits(commits: Iterable[MinedCommit]) -> str:
    """Stable hex digest identifying a corpus slice, for model provenance."""
    digest = hashlib.sha256()
    for line in sorted(f"{c.repo_id}\x00{c.commit_id}\x00{c.timestamp}" for c in commits):
        digest.update(line.encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()
