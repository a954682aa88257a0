"""HTTP face of the session protocol, one JSON endpoint per UI action.

Sessions live in an in-process registry; each holds its own lock so
concurrent requests against one session serialize while different sessions
proceed independently. The browser client is expected to be a thin shell:
parameters, timelines, scores and percentiles all come from here.
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .acquisition import AcquisitionConfig
from .session import ProtocolError, Session, SessionConfig, create_session
from .signal import NormalizedPoint, SignalParams, denormalize, render_pulse_train


class SessionRegistry:
    """Threadsafe id -> (session, lock) store."""

    def __init__(self):
        self._sessions: dict[str, tuple[Session, threading.Lock]] = {}
        self._guard = threading.Lock()

    def add(self, session: Session) -> None:
        with self._guard:
            if session.session_id in self._sessions:
                raise ProtocolError(f"session {session.session_id} already exists")
            self._sessions[session.session_id] = (session, threading.Lock())

    def get(self, session_id: str) -> tuple[Session, threading.Lock]:
        with self._guard:
            entry = self._sessions.get(session_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return entry


class CreateSessionBody(BaseModel):
    budget: int = 40
    seed: int | None = None
    duration_ms: float = 3000.0
    strategy: str = "info_gain"
    nominal_noise: float = 1.7
    candidate_count: int = 64
    quadrature_order: int = 32


class ComparisonResponseBody(BaseModel):
    choice: str = Field(pattern="^[AB]$")
    confidence: int = Field(ge=1, le=5)
    round: int | None = None
    fallback: bool = False  # set when the client played the preview, not hardware


class ValidationResponseBody(BaseModel):
    pair_tag: str
    chosen_side: str = Field(pattern="^[AB]$")
    fallback: bool = False


class ParamsBody(BaseModel):
    params: dict[str, float]


def _signal_payload(session: Session, point: NormalizedPoint) -> dict[str, Any]:
    params = denormalize(point)
    timeline = render_pulse_train(params, total_ms=session.config.duration_ms)
    return {"params": params.as_dict(), "timeline": timeline.to_json_dict()}


def _presented_pair(session: Session, point_a, point_b, swapped: bool) -> dict[str, Any]:
    first = _signal_payload(session, point_a)
    second = _signal_payload(session, point_b)
    return {"A": second if swapped else first, "B": first if swapped else second}


def create_app(registry: SessionRegistry | None = None) -> FastAPI:
    registry = registry if registry is not None else SessionRegistry()
    app = FastAPI(title="vibropref engine")
    app.state.registry = registry
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ProtocolError)
    async def _protocol_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.post("/sessions")
    def post_sessions(body: CreateSessionBody | None = None):
        body = body or CreateSessionBody()
        config = SessionConfig(
            budget=body.budget,
            seed=body.seed,
            duration_ms=body.duration_ms,
            acquisition=AcquisitionConfig(
                nominal_noise=body.nominal_noise,
                candidate_count=body.candidate_count,
                quadrature_order=body.quadrature_order,
                strategy=body.strategy,
            ),
        )
        session = create_session(config)
        registry.add(session)
        return {"session_id": session.session_id, "seed": session.seed, "budget": session.config.budget}

    @app.get("/sessions/{session_id}/query")
    def get_query(session_id: str):
        session, lock = registry.get(session_id)
        with lock:
            if session.phase != "learning" or session.pending is None:
                raise ProtocolError(f"no pending comparison; phase is {session.phase!r}")
            pending = session.pending
            return {
                "round": pending.round,
                "budget": session.config.budget,
                "pair": _presented_pair(
                    session, pending.pair.point_a, pending.pair.point_b, pending.swapped
                ),
            }

    @app.post("/sessions/{session_id}/response")
    def post_response(session_id: str, body: ComparisonResponseBody):
        session, lock = registry.get(session_id)
        with lock:
            if session.phase != "learning" or session.pending is None:
                raise ProtocolError(f"no pending comparison; phase is {session.phase!r}")
            swapped = session.pending.swapped
            answered = session.pending.round
            y = +1 if ((body.choice == "A") != swapped) else -1
            session.submit_response(y, body.confidence, round=body.round)
            if body.fallback:
                session.annotations.setdefault("fallback_rounds", []).append(answered)
            return {
                "round_completed": answered,
                "phase": session.phase,
                "next_round": session.pending.round if session.pending else None,
            }

    @app.get("/sessions/{session_id}/recommendation")
    def get_recommendation(session_id: str):
        session, lock = registry.get(session_id)
        with lock:
            if session.recommendation is None:
                raise ProtocolError("no recommendation yet; learning is still in progress")
            point = NormalizedPoint(tuple(session.recommendation["point"]))
            payload = _signal_payload(session, point)
            payload["posterior_mean"] = session.recommendation["posterior_mean"]
            payload["point"] = session.recommendation["point"]
            return payload

    @app.get("/sessions/{session_id}/validation")
    def get_validation(session_id: str):
        session, lock = registry.get(session_id)
        with lock:
            pair = session.next_validation_pair()  # raises ProtocolError off-phase
            vset = session.validation
            return {
                "index": len(session.validation_responses),
                "total": len(vset.pairs),
                "tag": pair.tag,
                "pair": _presented_pair(
                    session, vset.points[pair.idx_a], vset.points[pair.idx_b], pair.swapped
                ),
            }

    @app.post("/sessions/{session_id}/validation/response")
    def post_validation_response(session_id: str, body: ValidationResponseBody):
        session, lock = registry.get(session_id)
        with lock:
            session.submit_validation_response(body.pair_tag, body.chosen_side)
            answered = session.validation_responses[-1]
            return {
                "tag": answered["tag"],
                "matches_model": answered["matches_model"],
                "phase": session.phase,
                "remaining": len(session.validation.pairs) - len(session.validation_responses),
                "consistency_ok": session.consistency_ok,
            }

    @app.post("/sessions/{session_id}/favorites")
    def post_favorite(session_id: str, body: ParamsBody):
        session, lock = registry.get(session_id)
        with lock:
            session.record_favorite(SignalParams(**body.params))
            stored = session.favorites[-1]
            return {
                "count": len(session.favorites),
                "phase": session.phase,
                "posterior_percentile": stored["posterior_percentile"],
            }

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str):
        session, lock = registry.get(session_id)
        with lock:
            return session.to_json_dict()

    @app.post("/sessions/{session_id}/preview")
    def post_preview(session_id: str, body: ParamsBody):
        session, lock = registry.get(session_id)
        with lock:
            params = SignalParams(**body.params)
            timeline = render_pulse_train(params, total_ms=session.config.duration_ms)
            return {"params": params.as_dict(), "timeline": timeline.to_json_dict()}

    return app


app = create_app()
