"""HTTP service: session-scoped recommendations over preset models.

One model per sensitivity level is loaded at startup and never mutated.
Clients send the full editor buffer; the server diffs it against what the
session has already seen, so the tolerant parser lives in exactly one
place. Feedback lands in an append-only journal and never touches rule
confidences.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .javalex import extract_callables
from .model import ModelArtifact
from .recommender import assign_vector, provenance_comment, recommend
from .similarity import method_vector

SENSITIVITY_LEVELS = ("low", "medium", "high")
VERDICTS = ("useful", "not-useful", "copied", "deleted")
DATA_DIR_ENV = "NEXTMETHOD_DATA_DIR"


@dataclass
class RecommendationRecord:
    level: str
    lhs: tuple[int, ...]
    rhs: int
    code: str
    comment: str


@dataclass
class Session:
    session_id: str
    sensitivity: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    # signature -> source text, in first-seen order; survives sensitivity switches
    seen: dict[str, str] = field(default_factory=dict)
    # per level: signature -> cluster (None caches a miss so we never re-assign)
    assigned: dict[str, dict[str, int | None]] = field(default_factory=dict)
    last_buffer_fingerprint: str = ""
    last_response: list[dict] | None = None
    known: dict[str, RecommendationRecord] = field(default_factory=dict)


class FeedbackJournal:
    """Durable JSONL append log; writes serialized through one lock."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, entry: dict) -> None:
        line = json.dumps(entry, sort_keys=True)
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())


class CreateSessionRequest(BaseModel):
    sensitivity: str = "medium"


class BufferRequest(BaseModel):
    text: str


class SensitivityRequest(BaseModel):
    level: str


class FeedbackRequest(BaseModel):
    recommendation_id: str
    verdict: str


def default_data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "nextmethod-data"))


def create_app(
    models: dict[str, ModelArtifact],
    data_dir: Path | None = None,
    default_sensitivity: str = "medium",
) -> FastAPI:
    """Build the service around pre-loaded, immutable preset models."""
    unknown = set(models) - set(SENSITIVITY_LEVELS)
    if unknown:
        raise ValueError(f"unknown sensitivity levels: {sorted(unknown)}")
    if default_sensitivity not in models:
        raise ValueError(f"no model loaded for default sensitivity {default_sensitivity!r}")

    journal = FeedbackJournal((data_dir or default_data_dir()) / "feedback.jsonl")
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()
    app = FastAPI(title="nextmethod", version="0.1.0")
    # the companion web editor runs on a different origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def get_session(session_id: str) -> Session:
        with sessions_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "presets": sorted(models)}

    @app.get("/model/info")
    def model_info() -> dict:
        return {
            "default_sensitivity": default_sensitivity,
            "presets": {level: model.info() for level, model in models.items()},
        }

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest) -> dict:
        if request.sensitivity not in models:
            raise HTTPException(
                status_code=400,
                detail=f"unknown sensitivity {request.sensitivity!r}; loaded: {sorted(models)}",
            )
        session = Session(session_id=uuid.uuid4().hex, sensitivity=request.sensitivity)
        with sessions_lock:
            sessions[session.session_id] = session
        return {"session_id": session.session_id, "sensitivity": session.sensitivity}

    @app.post("/sessions/{session_id}/buffer")
    def submit_buffer(session_id: str, request: BufferRequest) -> dict:
        session = get_session(session_id)
        with session.lock:
            fingerprint = hashlib.sha256(request.text.encode("utf-8")).hexdigest()
            if fingerprint == session.last_buffer_fingerprint and session.last_response is not None:
                return {"recommendations": session.last_response, "unchanged": True}

            for decl in extract_callables(request.text):
                if decl.signature not in session.seen:
                    session.seen[decl.signature] = decl.source_text

            model = models[session.sensitivity]
            payload = _recommendations_for(session, model)
            session.last_buffer_fingerprint = fingerprint
            session.last_response = payload
            return {"recommendations": payload, "unchanged": False}

    @app.post("/sessions/{session_id}/sensitivity")
    def set_sensitivity(session_id: str, request: SensitivityRequest) -> dict:
        if request.level not in models:
            raise HTTPException(
                status_code=400,
                detail=f"unknown sensitivity {request.level!r}; loaded: {sorted(models)}",
            )
        session = get_session(session_id)
        with session.lock:
            if session.sensitivity != request.level:
                session.sensitivity = request.level
                session.last_buffer_fingerprint = ""
                session.last_response = None
        return {"session_id": session_id, "sensitivity": request.level}

    @app.post("/sessions/{session_id}/feedback")
    def record_feedback(session_id: str, request: FeedbackRequest) -> dict:
        if request.verdict not in VERDICTS:
            raise HTTPException(
                status_code=400,
                detail=f"unknown verdict {request.verdict!r}; expected one of {VERDICTS}",
            )
        session = get_session(session_id)
        with session.lock:
            record = session.known.get(request.recommendation_id)
            if record is None:
                raise HTTPException(
                    status_code=404,
                    detail=f"recommendation {request.recommendation_id!r} unknown to this session",
                )
        journal.append(
            {
                "timestamp": time.time(),
                "session_id": session_id,
                "lhs": list(record.lhs),
                "rhs": record.rhs,
                "sensitivity": record.level,
                "verdict": request.verdict,
            }
        )
        response: dict = {"recorded": True, "verdict": request.verdict}
        if request.verdict == "copied":
            response["snippet"] = record.comment + "\n" + record.code
        return response

    def _recommendations_for(session: Session, model: ModelArtifact) -> list[dict]:
        level = session.sensitivity
        assigned = session.assigned.setdefault(level, {})
        for signature, source in session.seen.items():
            if signature not in assigned:
                assigned[signature] = assign_vector(method_vector(source), model)
        matched: dict[int, list[str]] = {}
        for signature, cluster in assigned.items():
            if cluster is not None:
                matched.setdefault(cluster, []).append(signature)
        if not matched:
            return []
        payload: list[dict] = []
        for rec in recommend(set(matched), model, signature_map=matched):
            rec_id = hashlib.sha1(
                f"{level}|{sorted(rec.rule.lhs)}|{rec.rhs_cluster}".encode("utf-8")
            ).hexdigest()[:16]
            comment = provenance_comment(rec.provenance)
            session.known[rec_id] = RecommendationRecord(
                level=level,
                lhs=tuple(sorted(rec.rule.lhs)),
                rhs=rec.rhs_cluster,
                code=rec.code,
                comment=comment,
            )
            payload.append(
                {
                    "recommendation_id": rec_id,
                    "rhs_cluster": rec.rhs_cluster,
                    "code": rec.code,
                    "lhs_signatures": list(rec.lhs_signatures),
                    "confidence": rec.confidence,
                    "support": rec.rule.support,
                    "provenance": {
                        "repo": rec.provenance.repo_id,
                        "commit": rec.provenance.commit_id,
                        "path": rec.provenance.path,
                        "comment": comment,
                    },
                }
            )
        return payload

    return app
