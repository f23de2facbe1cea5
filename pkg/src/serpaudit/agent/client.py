"""Thin HTTP client for the collection server's API."""

from __future__ import annotations

from typing import Any, Mapping

import httpx
from pydantic import BaseModel, ConfigDict

from ..extraction import ExtractionRuleSet
from ..model import ClientKind, Submission


class RegistrationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    participant_id: str
    study_id: int
    terms: tuple[str, ...]


class ConfigUpdate(BaseModel):
    model_config = ConfigDict(frozen=True)

    ruleset: ExtractionRuleSet
    templates: tuple[str, ...] = ()

    @property
    def version(self) -> int:
        return self.ruleset.version


class ServerError(RuntimeError):
    def __init__(self, status_code: int, detail: Any):
        super().__init__(f"server returned {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


class ServerClient:
    """Wraps an httpx client; tests inject an in-process ASGI transport."""

    def __init__(self, server_url: str, http: httpx.Client | None = None):
        self.server_url = server_url.rstrip("/")
        self._http = http or httpx.Client(base_url=self.server_url, timeout=30.0)

    def close(self) -> None:
        self._http.close()

    def register(
        self,
        survey: Mapping[str, Any],
        consent: bool,
        client_kind: ClientKind,
        plugin_version: str,
        ui_language: str,
    ) -> RegistrationResult:
        resp = self._http.post(
            "/register",
            json={
                "survey": dict(survey),
                "consent": consent,
                "client_kind": client_kind.value,
                "plugin_version": plugin_version,
                "ui_language": ui_language,
            },
        )
        if resp.status_code != 200:
            raise ServerError(resp.status_code, resp.json())
        return RegistrationResult(**resp.json())

    def submit(self, submission: Submission) -> bool:
        resp = self._http.post(
            "/submit",
            content=submission.model_dump_json(),
            headers={"content-type": "application/json"},
        )
        if resp.status_code != 200:
            raise ServerError(resp.status_code, resp.text)
        return resp.json().get("status") == "ok"

    def fetch_config(self, current_version: int) -> ConfigUpdate | None:
        resp = self._http.get("/config", params={"v": current_version})
        if resp.status_code == 304:
            return None
        if resp.status_code != 200:
            raise ServerError(resp.status_code, resp.text)
        return ConfigUpdate(**resp.json())

    def health(self) -> dict:
        resp = self._http.get("/health")
        resp.raise_for_status()
        return resp.json()
