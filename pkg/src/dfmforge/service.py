"""HTTP service exposing the core library to scripts and the companion UI.

Every endpoint is a thin adapter over the library: the response body is
exactly what the corresponding library call returns, serialized with the
same tag names as the YAML dialect. Schemata live in an in-memory store
keyed by id with optimistic per-id versioning: mutating requests carry
the version they were based on and stale versions are rejected with 409.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .codec import CodecError, from_dict, parse_yaml, serialize_yaml, to_dict
from .diffeval import diff_one
from .llm.client import ChatClient, ClientConfig, ClientError, HttpChatClient
from .llm.extract import ExtractionFailure
from .llm.prompts import build_bundle
from .llm.session import ChatSession, RefinementStep, iterate_fix, run_step
from .model import DfmSchema, validate
from .refine import ApplyError, RefinementOp, apply_ops


@dataclass
class Entry:
    schema: DfmSchema
    version: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)
    session: Optional[ChatSession] = None
    pending: Optional[DfmSchema] = None


class SchemaStore:
    def __init__(self) -> None:
        self._entries: dict[str, Entry] = {}
        self._lock = threading.Lock()

    def create(self, schema: DfmSchema) -> str:
        sid = uuid.uuid4().hex[:12]
        with self._lock:
            self._entries[sid] = Entry(schema)
        return sid

    def get(self, sid: str) -> Entry:
        with self._lock:
            entry = self._entries.get(sid)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown schema id {sid!r}")
        return entry


def _schema_payload(sid: str, entry: Entry) -> dict:
    return {
        "id": sid,
        "version": entry.version,
        "schema": to_dict(entry.schema),
        "yaml": serialize_yaml(entry.schema),
        "validation": validate(entry.schema).to_dict(),
    }


def _check_version(entry: Entry, version) -> None:
    if version != entry.version:
        raise HTTPException(
            status_code=409,
            detail=f"stale version {version}, current is {entry.version}",
        )


def create_app(
    llm_client: Optional[ChatClient] = None,
    client_config: Optional[ClientConfig] = None,
    bundle_mode: str = "improved",
    static_dir: Optional[str] = None,
    cors_origins: tuple[str, ...] = ("*",),
) -> FastAPI:
    app = FastAPI(title="dfmforge")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SchemaStore()
    app.state.store = store
    client = llm_client or HttpChatClient()
    config = client_config or ClientConfig()

    def parse_body_schema(body: dict) -> DfmSchema:
        try:
            if "yaml" in body:
                return parse_yaml(body["yaml"])
            if "schema" in body:
                return from_dict(body["schema"])
        except CodecError as exc:
            raise HTTPException(status_code=400, detail=f"{exc.code}: {exc}") from exc
        raise HTTPException(status_code=400, detail="body needs a 'yaml' or 'schema' field")

    @app.post("/api/schema")
    async def upload(request: Request) -> dict:
        body = await request.json()
        schema = parse_body_schema(body)
        sid = store.create(schema)
        return _schema_payload(sid, store.get(sid))

    @app.get("/api/schema/{sid}")
    def fetch(sid: str) -> dict:
        return _schema_payload(sid, store.get(sid))

    @app.post("/api/schema/{sid}/ops")
    async def apply(sid: str, request: Request) -> dict:
        body = await request.json()
        entry = store.get(sid)
        try:
            ops = [RefinementOp.from_dict(op) for op in body.get("ops", [])]
        except (KeyError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"bad op: {exc}") from exc
        with entry.lock:
            _check_version(entry, body.get("version"))
            try:
                schema, _log = apply_ops(entry.schema, ops)
            except ApplyError as exc:
                raise HTTPException(
                    status_code=400,
                    detail={"step": exc.step, "code": exc.cause.code, "error": str(exc.cause)},
                ) from exc
            entry.schema = schema
            entry.version += 1
            entry.pending = None
        return _schema_payload(sid, entry)

    def _session(entry: Entry) -> ChatSession:
        if entry.session is None:
            entry.session = ChatSession(
                bundle=build_bundle(bundle_mode), client=client, config=config
            )
        return entry.session

    def _llm_exchange(entry: Entry, send) -> dict:
        session = _session(entry)
        try:
            schema = send(session)
        except ExtractionFailure as exc:
            entry.pending = None
            return {
                "extraction_ok": False,
                "response_text": exc.raw_text,
                "schema": None,
            }
        except ClientError as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from exc
        entry.pending = schema
        return {
            "extraction_ok": True,
            "response_text": session.turns[-1].response_text,
            "schema": to_dict(schema),
            "yaml": serialize_yaml(schema),
            "validation": validate(schema).to_dict(),
        }

    @app.post("/api/schema/{sid}/llm/step")
    async def llm_step(sid: str, request: Request) -> dict:
        body = await request.json()
        entry = store.get(sid)
        try:
            step = RefinementStep(body.get("step"))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"unknown step {body.get('step')!r}") from exc
        with entry.lock:
            _check_version(entry, body.get("version"))
            return _llm_exchange(
                entry,
                lambda session: run_step(session, step, entry.schema, body.get("statement")),
            )

    @app.post("/api/schema/{sid}/llm/fix")
    async def llm_fix(sid: str, request: Request) -> dict:
        body = await request.json()
        entry = store.get(sid)
        fix_text = body.get("fix_text")
        if not fix_text:
            raise HTTPException(status_code=400, detail="body needs a 'fix_text' field")
        with entry.lock:
            _check_version(entry, body.get("version"))
            if entry.session is None or not entry.session.turns:
                raise HTTPException(status_code=400, detail="no prior llm step to fix")
            return _llm_exchange(entry, lambda session: iterate_fix(session, fix_text))

    @app.post("/api/schema/{sid}/llm/accept")
    async def llm_accept(sid: str, request: Request) -> dict:
        body = await request.json()
        entry = store.get(sid)
        with entry.lock:
            _check_version(entry, body.get("version"))
            if entry.pending is None:
                raise HTTPException(status_code=400, detail="no pending llm schema to accept")
            entry.schema = entry.pending
            entry.pending = None
            entry.version += 1
        return _schema_payload(sid, entry)

    @app.get("/api/diff")
    def diff_endpoint(c: str, t: str) -> dict:
        cand = store.get(c).schema
        truth = store.get(t).schema
        return {"report": diff_one(cand, truth).to_dict()}

    @app.get("/api/session/{sid}/transcript")
    def transcript(sid: str) -> dict:
        entry = store.get(sid)
        records = entry.session.transcript_records() if entry.session else []
        return {"records": records}

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
