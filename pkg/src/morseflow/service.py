"""Session-scoped HTTP/JSON facade over documents, moves, validation,
barcodes, simplification, history and field sampling.

Sessions hold a document plus caches for the barcode and synthesized field;
any mutation invalidates both. Mutations within a session are serialized by a
per-session lock; commands are rejected with 409 and a diagnostics payload
when a precondition fails, 404 for unknown ids, 422 for malformed bodies.
"""

from __future__ import annotations

import threading
import time
import uuid

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import fieldsynth, history, model, persistence, validator
from .errors import (
    MorseflowError,
    NotEligible,
    NothingToRedo,
    NothingToUndo,
    ParseError,
    SchemaVersionError,
    SeedOutsideDomain,
    UnknownId,
)

DEFAULT_SESSION_TTL = 3600.0

_REJECTED = (
    "SaddleFull", "KindMismatch", "AngleConflict", "WrongEdgeClass",
    "InvalidTarget", "InvalidSourceState", "ValueConflict", "ValueOrderViolation",
    "DuplicateValue", "DuplicateValues", "NotEligible", "NotAdjacent",
    "DegenerateCancellation", "BoundaryCancellation", "InvalidSkeleton",
    "NothingToUndo", "NothingToRedo", "InfeasibleInterval", "IndexOutOfRange",
    "SeedOutsideDomain", "NoNearbySeparatrix",
)


class Session:
    def __init__(self, document: history.Document):
        self.id = uuid.uuid4().hex
        self.document = document
        self.lock = threading.Lock()
        self.touched = time.monotonic()
        self._barcode = None
        self._fields: dict[tuple, fieldsynth.VectorFieldMesh] = {}

    def touch(self):
        self.touched = time.monotonic()

    def invalidate(self):
        self._barcode = None
        self._fields.clear()

    def barcode(self):
        if self._barcode is None:
            self._barcode = persistence.compute_barcode(self.document.skeleton)
        return self._barcode

    def field(self, params: fieldsynth.FieldParams):
        key = params.cache_key()
        if key not in self._fields:
            self._fields[key] = fieldsynth.synthesize(self.document.skeleton, params)
        return self._fields[key]


class SessionStore:
    def __init__(self, ttl: float = DEFAULT_SESSION_TTL):
        self.ttl = ttl
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()

    def create(self, document: history.Document) -> Session:
        s = Session(document)
        with self.lock:
            self._evict()
            self.sessions[s.id] = s
        return s

    def get(self, sid: str) -> Session:
        with self.lock:
            self._evict()
            s = self.sessions.get(sid)
        if s is None:
            raise HTTPException(404, detail={"code": "UnknownSession", "id": sid})
        s.touch()
        return s

    def _evict(self):
        now = time.monotonic()
        dead = [k for k, s in self.sessions.items() if now - s.touched > self.ttl]
        for k in dead:
            del self.sessions[k]


def _http_error(exc: MorseflowError) -> HTTPException:
    if isinstance(exc, UnknownId):
        return HTTPException(404, detail=exc.to_json())
    if isinstance(exc, (ParseError, SchemaVersionError)):
        return HTTPException(422, detail=exc.to_json())
    if exc.code in _REJECTED:
        return HTTPException(409, detail=exc.to_json())
    return HTTPException(400, detail=exc.to_json())


def _skeleton_payload(session: Session) -> dict:
    skel = session.document.skeleton
    report = validator.validate(skel)
    curves = {
        eid: skel.sample_separatrix(eid).tolist()
        for eid in sorted(skel.separatrices, key=model._id_key)
    }
    return {
        "document": skel.to_document(),
        "curves": curves,
        "validation": report.to_json(),
    }


def create_app(session_ttl: float = DEFAULT_SESSION_TTL) -> FastAPI:
    app = FastAPI(title="morseflow service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(session_ttl)
    app.state.store = store

    def mutate(sid: str, command: dict):
        session = store.get(sid)
        with session.lock:
            try:
                result = session.document.execute(command)
            except MorseflowError as exc:
                raise _http_error(exc) from exc
            session.invalidate()
            return session, result

    @app.post("/session")
    def create_session():
        doc = history.Document(model.new_default())
        s = store.create(doc)
        return {"session": s.id, **_skeleton_payload(s)}

    @app.get("/session/{sid}/skeleton")
    def get_skeleton(sid: str):
        return _skeleton_payload(store.get(sid))

    @app.get("/session/{sid}/validate")
    def get_validate(sid: str):
        s = store.get(sid)
        return validator.validate(s.document.skeleton).to_json()

    @app.post("/session/{sid}/move")
    def post_move(sid: str, body: dict = Body(...)):
        command = {"op": "move", **body}
        session, result = mutate(sid, command)
        return {"created": result.get("created"), **_skeleton_payload(session)}

    @app.post("/session/{sid}/connect")
    def post_connect(sid: str, body: dict = Body(...)):
        session, result = mutate(sid, {"op": "connect", **body})
        return {**result, **_skeleton_payload(session)}

    @app.post("/session/{sid}/disconnect")
    def post_disconnect(sid: str, body: dict = Body(...)):
        session, _ = mutate(sid, {"op": "disconnect", **body})
        return _skeleton_payload(session)

    @app.post("/session/{sid}/drag")
    def post_drag(sid: str, body: dict = Body(...)):
        session, _ = mutate(sid, {"op": "drag", **body})
        return _skeleton_payload(session)

    @app.post("/session/{sid}/control-point")
    def post_control_point(sid: str, body: dict = Body(...)):
        session, _ = mutate(sid, {"op": "control-point", **body})
        return _skeleton_payload(session)

    @app.post("/session/{sid}/value")
    def post_value(sid: str, body: dict = Body(...)):
        session, _ = mutate(sid, {"op": "set-value", **body})
        return _skeleton_payload(session)

    @app.get("/session/{sid}/barcode")
    def get_barcode(sid: str):
        s = store.get(sid)
        try:
            return s.barcode().to_json()
        except MorseflowError as exc:
            raise _http_error(exc) from exc

    @app.get("/session/{sid}/simplify/candidates")
    def get_candidates(sid: str):
        s = store.get(sid)
        try:
            pairs = persistence.eligible_pairs(s.document.skeleton, s.barcode())
        except MorseflowError as exc:
            raise _http_error(exc) from exc
        return {"pairs": [{"extremum": a, "saddle": b} for a, b in pairs]}

    @app.post("/session/{sid}/simplify")
    def post_simplify(sid: str, body: dict = Body(...)):
        session, result = mutate(sid, {"op": "simplify", **body})
        return {**result, **_skeleton_payload(session)}

    @app.post("/session/{sid}/undo")
    def post_undo(sid: str, body: dict = Body(default={})):
        s = store.get(sid)
        with s.lock:
            try:
                s.document.undo(int(body.get("n", 1)))
            except MorseflowError as exc:
                raise _http_error(exc) from exc
            s.invalidate()
        return _skeleton_payload(s)

    @app.post("/session/{sid}/redo")
    def post_redo(sid: str, body: dict = Body(default={})):
        s = store.get(sid)
        with s.lock:
            try:
                s.document.redo(int(body.get("n", 1)))
            except MorseflowError as exc:
                raise _http_error(exc) from exc
            s.invalidate()
        return _skeleton_payload(s)

    @app.get("/session/{sid}/history")
    def get_history(sid: str):
        s = store.get(sid)
        return {
            "entries": [e.to_json() for e in s.document.stack.entries],
            "cursor": s.document.stack.cursor,
        }

    @app.get("/session/{sid}/field")
    def get_field(sid: str, resolution: int = 128, d: float = 8.0, k: float = 1.0,
                  truncationRadius: float = 0.6, blendRadius: float = 0.08,
                  smoothingIterations: int = 3):
        s = store.get(sid)
        params = fieldsynth.FieldParams(
            d=d, k=k, truncation_radius=truncationRadius, blend_radius=blendRadius,
            smoothing_iterations=smoothingIterations, mesh_resolution=resolution,
        )
        try:
            with s.lock:
                mesh = s.field(params)
        except MorseflowError as exc:
            raise _http_error(exc) from exc
        return mesh.to_json()

    @app.get("/session/{sid}/streamlines")
    def get_streamlines(sid: str, seeds: str, direction: str = "forward",
                        resolution: int = 64, stepSize: float = 0.01,
                        maxSteps: int = 4000):
        s = store.get(sid)
        params = fieldsynth.FieldParams(mesh_resolution=resolution)
        try:
            with s.lock:
                mesh = s.field(params)
            lines = []
            for chunk in seeds.split(";"):
                x, y = (float(v) for v in chunk.split(","))
                line = fieldsynth.trace_streamline(mesh, (x, y), direction,
                                                   stepSize, maxSteps)
                lines.append(np.asarray(line).tolist())
        except MorseflowError as exc:
            raise _http_error(exc) from exc
        except ValueError as exc:
            raise HTTPException(422, detail={"code": "ParseError", "message": str(exc)})
        return {"polylines": lines}

    @app.get("/session/{sid}/export")
    def get_export(sid: str, includeHistory: bool = False):
        s = store.get(sid)
        data = history.save(s.document, include_history=includeHistory)
        return Response(content=data, media_type="application/json")

    @app.post("/session/{sid}/import")
    async def post_import(sid: str, request: Request):
        s = store.get(sid)
        raw = await request.body()
        try:
            doc = history.load(raw)
        except MorseflowError as exc:
            raise _http_error(exc) from exc
        with s.lock:
            s.document = doc
            s.invalidate()
        return _skeleton_payload(s)

    return app


app = create_app()
