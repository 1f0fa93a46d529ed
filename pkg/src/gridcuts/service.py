"""HTTP API exposing analysis sessions to the operator UI.

A thin projection of the session module: every response field maps 1:1 to
session state and no analysis happens here.  Mutating calls return the new
event-log head so clients detect staleness; the client refetches after
mutations (polling, no push).
"""

from __future__ import annotations

import threading
import uuid
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .caseio import ParseError, loads_case
from .fixtures import FIXTURES, get_fixture
from .model import NetworkError, PowerNetwork
from .netflow import Infeasible
from .session import EventRecord, Session, SessionError, start

SCHEMA_VERSION = 1


class CreateSessionRequest(BaseModel):
    fixture: Optional[str] = None
    case_text: Optional[str] = None
    seed: Optional[int] = None


class OutageRequest(BaseModel):
    outage: str


class RemedialRequest(BaseModel):
    cut: list[str] = Field(min_length=1)
    reduce_by_mw: float


class _Held:
    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()


def _event_payload(rec: EventRecord) -> dict:
    return {
        "label": rec.label,
        "type": rec.type,
        "branch": rec.branch,
        "status": rec.status,
        "flow_mw": rec.flow_mw,
        "rerouted_mw": rec.rerouted_mw,
        "deficit_mw": rec.deficit_mw,
        "islanded_buses": rec.islanded_buses,
        "island_imbalance_mw": rec.island_imbalance_mw,
        "retested": rec.retested,
        "new_specials": rec.new_specials,
        "specials_after": rec.specials_after,
        "timings_s": {
            "ups": rec.ups_s,
            "sa": rec.sa_s,
            "ft": rec.ft_s,
            "total": rec.total_s,
        },
    }


def _state_payload(session: Session) -> dict:
    net = session.network
    branches = []
    for br in net.branches:
        removed = br.id in session.outaged or not br.in_service
        item = {
            "id": br.id,
            "from_bus": br.from_bus,
            "to_bus": br.to_bus,
            "rating_mw": br.rating_mw,
            "in_service": not removed,
            "flow_mw": None,
            "headroom_fw_mw": None,
            "headroom_rev_mw": None,
        }
        if not removed and not session.state.is_removed(br.id):
            item["flow_mw"] = session.state.flow_mw(br.id)
            item["headroom_fw_mw"] = session.state.c_fw_mw(br.id)
            item["headroom_rev_mw"] = session.state.c_rev_mw(br.id)
        branches.append(item)
    return {
        "schema_version": SCHEMA_VERSION,
        "name": net.name,
        "status": session.status,
        "seed": session.seed,
        "head": len(session.event_log),
        "buses": [
            {"id": b.id, "gen_mw": b.gen_mw, "load_mw": b.load_mw}
            for b in net.buses
        ],
        "branches": branches,
        "special_assets": [
            {
                "branch": b,
                "margin_mw": r.margin_mw,
                "kcrit": sorted(r.kcrit),
                "flow_mw": r.flow_mw,
                "reroute_capacity_mw": r.tc_mw,
            }
            for b, r in sorted(session.specials().items())
        ],
        "event_log": [_event_payload(rec) for rec in session.event_log],
    }


def create_app(preloaded: Optional[PowerNetwork] = None) -> FastAPI:
    app = FastAPI(title="gridcuts", version="1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, _Held] = {}
    app.state.sessions = sessions
    app.state.preloaded = preloaded

    def _get(sid: str) -> _Held:
        held = sessions.get(sid)
        if held is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        return held

    @app.get("/api/v1/fixtures")
    def list_fixtures() -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "fixtures": sorted(FIXTURES),
            "preloaded": preloaded.name if preloaded is not None else None,
        }

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(req: CreateSessionRequest) -> dict:
        if req.case_text is not None:
            try:
                network = loads_case(req.case_text, "<upload>")
            except (ParseError, NetworkError) as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        elif req.fixture is not None:
            try:
                network = get_fixture(req.fixture)
            except KeyError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
        elif app.state.preloaded is not None:
            network = app.state.preloaded
        else:
            raise HTTPException(
                status_code=422, detail="provide fixture or case_text"
            )
        try:
            session = start(network, req.seed)
        except (Infeasible, NetworkError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        sid = uuid.uuid4().hex
        sessions[sid] = _Held(session)
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": sid,
            "head": 0,
            "state": _state_payload(session),
        }

    @app.get("/api/v1/sessions/{sid}/state")
    def get_state(sid: str) -> dict:
        return _state_payload(_get(sid).session)

    def _session_error_code(msg: str) -> int:
        if "unknown branch" in msg or "not a live branch" in msg:
            return 404
        if (
            "status is" in msg
            or "nothing to undo" in msg
            or "already out of service" in msg
        ):
            return 409
        return 422

    def _mutate(sid: str, fn) -> dict:
        held = _get(sid)
        with held.lock:
            try:
                record = fn(held.session)
            except SessionError as exc:
                msg = str(exc)
                raise HTTPException(status_code=_session_error_code(msg), detail=msg)
            return {
                "schema_version": SCHEMA_VERSION,
                "head": len(held.session.event_log),
                "event": _event_payload(record) if record is not None else None,
                "state": _state_payload(held.session),
            }

    @app.post("/api/v1/sessions/{sid}/events")
    def post_event(sid: str, req: OutageRequest) -> dict:
        return _mutate(sid, lambda s: s.apply_event(req.outage))

    @app.post("/api/v1/sessions/{sid}/what-if")
    def post_what_if(sid: str, req: OutageRequest) -> dict:
        held = _get(sid)
        with held.lock:
            try:
                record = held.session.what_if(req.outage)
            except SessionError as exc:
                msg = str(exc)
                raise HTTPException(status_code=_session_error_code(msg), detail=msg)
        return {
            "schema_version": SCHEMA_VERSION,
            "head": len(held.session.event_log),
            "event": _event_payload(record),
        }

    @app.post("/api/v1/sessions/{sid}/remedial")
    def post_remedial(sid: str, req: RemedialRequest) -> dict:
        return _mutate(
            sid, lambda s: s.remedial_scale(set(req.cut), req.reduce_by_mw)
        )

    @app.post("/api/v1/sessions/{sid}/undo")
    def post_undo(sid: str) -> dict:
        def fn(s: Session):
            s.undo()
            return None

        return _mutate(sid, fn)

    return app
