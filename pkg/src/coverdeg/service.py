"""HTTP session API for rental harmony: create a session, poll the pending
price query, answer it, and fetch the division certificate.  Also serves the
static browser client when a bundle directory is present."""

from __future__ import annotations

import os
import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from pydantic import BaseModel

from .harmony import SessionStore, StaleAnswerError


class CreateSessionRequest(BaseModel):
    n: int
    room_names: Optional[list[str]] = None
    mode: str = "interactive"
    utilities: Optional[list[list[float]]] = None
    eps: float = 1e-4


class AnswerRequest(BaseModel):
    agent: int
    room: int | list[int]


def create_app(data_dir: Optional[str] = None,
               static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="rental harmony service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = SessionStore(data_dir)
    app.state.store = store
    # one writer per session; reads return plain snapshots
    locks: dict[str, threading.Lock] = {}

    def lock_for(sid: str) -> threading.Lock:
        return locks.setdefault(sid, threading.Lock())

    def session_or_404(sid: str):
        s = store.get(sid)
        if s is None:
            raise HTTPException(status_code=404, detail="no such session")
        return s

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        if req.n < 1 or req.n > 6:
            raise HTTPException(status_code=422, detail="n must be 1..6")
        try:
            s = store.create(req.n, req.room_names, req.mode,
                             req.utilities, req.eps)
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return {"id": s.id}

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return session_or_404(sid).to_json()

    @app.get("/sessions/{sid}/query")
    def get_query(sid: str):
        s = session_or_404(sid)
        if s.pending is None:
            return Response(status_code=204)
        return s.to_json()["pending_query"]

    @app.post("/sessions/{sid}/answer")
    def post_answer(sid: str, req: AnswerRequest):
        s = session_or_404(sid)
        with lock_for(sid):
            try:
                status = s.submit_answer(req.agent, req.room)
            except StaleAnswerError as e:
                raise HTTPException(status_code=409, detail=str(e))
            except ValueError as e:
                raise HTTPException(status_code=422, detail=str(e))
        return {"status": status, "state": s.state}

    @app.get("/sessions/{sid}/result")
    def get_result(sid: str):
        s = session_or_404(sid)
        if s.result is None:
            detail = s.error or "result pending"
            raise HTTPException(status_code=404, detail=detail)
        return s.result.to_json()

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")
    return app
