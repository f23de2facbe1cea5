"""HTTP API of the collection server.

POST /register   survey + meta -> participant id, study group, query terms
POST /submit     Submission -> acknowledgment (idempotent by submission_id)
GET  /config?v=N latest rule set + templates, or 304 when not newer
GET  /export     semicolon-delimited corpus stream (admin-authenticated)
GET  /health     liveness + store counts
"""

from __future__ import annotations

import secrets
import threading
from datetime import datetime
from typing import Any, Optional

from fastapi import FastAPI, Header, Query, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from ..extraction import ExtractionRuleSet, default_rules
from ..model import ClientKind, Submission, validate_survey
from ..model.survey import SurveyValidationError
from ..queries import compose_query_set, default_templates
from .store import Store, StudyMismatch, UnknownParticipant


class RegisterRequest(BaseModel):
    survey: dict[str, Any]
    consent: bool = False
    client_kind: ClientKind = ClientKind.DONOR
    plugin_version: str = "0.0.0"
    ui_language: str = "en"


class RegisterResponse(BaseModel):
    participant_id: str
    study_id: int
    terms: tuple[str, ...]


class SubmitResponse(BaseModel):
    status: str
    duplicate: bool
    stored_snapshots: int


class ConfigResponse(BaseModel):
    version: int
    ruleset: ExtractionRuleSet
    templates: tuple[str, ...]


class ServerConfigState:
    """Mutable holder for the currently distributed crawl configuration."""

    def __init__(
        self,
        ruleset: Optional[ExtractionRuleSet] = None,
        templates: Optional[tuple[str, ...]] = None,
    ):
        self._lock = threading.Lock()
        self._ruleset = ruleset or default_rules()
        self._templates = templates or tuple(
            t.pattern for t in default_templates().templates
        )

    def current(self) -> tuple[ExtractionRuleSet, tuple[str, ...]]:
        with self._lock:
            return self._ruleset, self._templates

    def publish(
        self,
        ruleset: ExtractionRuleSet,
        templates: Optional[tuple[str, ...]] = None,
    ) -> None:
        with self._lock:
            if ruleset.version <= self._ruleset.version:
                raise ValueError("published rule set version must increase")
            self._ruleset = ruleset
            if templates is not None:
                self._templates = templates


def create_app(
    store: Store,
    config_state: Optional[ServerConfigState] = None,
    admin_token: Optional[str] = None,
) -> FastAPI:
    config_state = config_state or ServerConfigState()
    admin_token = admin_token or secrets.token_urlsafe(16)

    app = FastAPI(title="collection server")
    app.state.store = store
    app.state.config_state = config_state
    app.state.admin_token = admin_token

    def error(status: int, code: str, **extra) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": code, **extra})

    @app.post("/register", response_model=RegisterResponse)
    def register(body: RegisterRequest):
        if not body.consent:
            return error(403, "consent_missing")
        try:
            survey = validate_survey(body.survey)
        except SurveyValidationError as exc:
            return error(
                422,
                "validation_failed",
                fields=[e.model_dump() for e in exc.errors],
            )
        record = store.register_participant(
            survey,
            client_kind=body.client_kind,
            plugin_version=body.plugin_version,
            ui_language=body.ui_language,
            consent=body.consent,
        )
        condition = store.groups.condition_for(record.study_id)
        terms = compose_query_set(condition, study_id=record.study_id).terms
        return RegisterResponse(
            participant_id=record.participant_id,
            study_id=record.study_id,
            terms=terms,
        )

    @app.post("/submit", response_model=SubmitResponse)
    def submit(submission: Submission):
        try:
            ack = store.ingest_submission(submission)
        except UnknownParticipant:
            return error(404, "unknown_participant")
        except StudyMismatch as exc:
            return error(409, "study_mismatch", detail=str(exc))
        return SubmitResponse(**ack)

    @app.get("/config")
    def config(v: int = Query(0, ge=0)):
        ruleset, templates = config_state.current()
        if ruleset.version <= v:
            return Response(status_code=304)
        return ConfigResponse(
            version=ruleset.version, ruleset=ruleset, templates=templates
        )

    @app.get("/export")
    def export(
        date_from: Optional[datetime] = Query(None, alias="from"),
        date_to: Optional[datetime] = Query(None, alias="to"),
        groups: Optional[str] = Query(None),
        authorization: Optional[str] = Header(None),
    ):
        if authorization != f"Bearer {admin_token}":
            return error(401, "unauthorized")
        study_ids = (
            [int(g) for g in groups.split(",") if g.strip()] if groups else None
        )
        from .export import export_corpus_text

        text = export_corpus_text(
            store.iter_entries(date_from=date_from, date_to=date_to, study_ids=study_ids)
        )
        return PlainTextResponse(text, media_type="text/csv; charset=utf-8")

    @app.get("/health")
    def health():
        return {"status": "ok", **store.counts()}

    return app
