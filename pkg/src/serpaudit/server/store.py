"""Embedded transactional persistence for the collection server (sqlite).

Registration runs assignment and the participant insert in one immediate
transaction, so control-bucket occupancy stays exact under concurrency.
Ingestion is append-only with a uniqueness constraint on submission_id.
"""

from __future__ import annotations

import sqlite3
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional

from pydantic import TypeAdapter

from ..model import (
    AdRecord,
    ClientKind,
    OrganicResult,
    ParticipantRecord,
    Submission,
    SurveyResponse,
    TopStory,
    new_opaque_id,
    utc_now,
)
from .export import CorpusEntry
from .groups import GroupTable

_ADS = TypeAdapter(tuple[AdRecord, ...])
_RESULTS = TypeAdapter(tuple[OrganicResult, ...])
_STORIES = TypeAdapter(tuple[TopStory, ...])

_SCHEMA = """
CREATE TABLE IF NOT EXISTS participants (
    participant_id TEXT PRIMARY KEY,
    study_id INTEGER NOT NULL,
    survey_json TEXT NOT NULL,
    registered_at TEXT NOT NULL,
    client_kind TEXT NOT NULL,
    plugin_version TEXT NOT NULL,
    ui_language TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS submissions (
    submission_id TEXT PRIMARY KEY,
    participant_id TEXT NOT NULL REFERENCES participants(participant_id),
    study_id INTEGER NOT NULL,
    plugin_version TEXT NOT NULL,
    sent_at TEXT NOT NULL,
    tz_offset_minutes INTEGER NOT NULL,
    ui_language TEXT NOT NULL,
    order_seed INTEGER,
    received_at TEXT NOT NULL,
    seq INTEGER
);
CREATE TABLE IF NOT EXISTS snapshots (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    submission_id TEXT NOT NULL REFERENCES submissions(submission_id),
    idx INTEGER NOT NULL,
    query TEXT NOT NULL,
    tld TEXT NOT NULL,
    fetched_at TEXT NOT NULL,
    blocked INTEGER NOT NULL,
    ads_json TEXT NOT NULL,
    results_json TEXT NOT NULL,
    stories_json TEXT NOT NULL,
    raw_page TEXT,
    error TEXT
);
CREATE TABLE IF NOT EXISTS control_occupancy (
    study_id INTEGER PRIMARY KEY,
    occupancy INTEGER NOT NULL DEFAULT 0,
    capacity INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_snapshots_submission ON snapshots(submission_id);
CREATE INDEX IF NOT EXISTS idx_submissions_sent ON submissions(sent_at);
"""


class UnknownParticipant(LookupError):
    pass


class StudyMismatch(ValueError):
    pass


class ConsentMissing(PermissionError):
    pass


class Store:
    def __init__(self, path: str | Path, groups: GroupTable | None = None):
        self.path = str(path)
        self.groups = groups or GroupTable()
        with self._connect() as conn:
            conn.executescript(_SCHEMA)
            for group in self.groups.groups:
                if group.capacity is not None:
                    conn.execute(
                        "INSERT OR IGNORE INTO control_occupancy(study_id, occupancy, capacity) VALUES (?, 0, ?)",
                        (group.study_id, group.capacity),
                    )

    @contextmanager
    def _connect(self) -> Iterator[sqlite3.Connection]:
        conn = sqlite3.connect(self.path, timeout=60.0)
        try:
            conn.execute("PRAGMA journal_mode=WAL")
            conn.execute("PRAGMA busy_timeout=60000")
            conn.execute("PRAGMA foreign_keys=ON")
            with conn:  # commits on success, rolls back on exception
                yield conn
        finally:
            conn.close()

    # -- registration ------------------------------------------------------

    def register_participant(
        self,
        survey: SurveyResponse,
        client_kind: ClientKind,
        plugin_version: str,
        ui_language: str,
        consent: bool,
        now: Optional[datetime] = None,
    ) -> ParticipantRecord:
        if not consent:
            raise ConsentMissing("consent is required before registration")
        now = now or utc_now()
        with self._connect() as conn:
            conn.execute("BEGIN IMMEDIATE")
            state = _SqliteAssignmentState(conn)
            study_id = self.groups.assign(survey, state)
            record = ParticipantRecord(
                participant_id=new_opaque_id(),
                study_id=study_id,
                survey=survey,
                registered_at=now,
                client_kind=client_kind,
                plugin_version=plugin_version,
                ui_language=ui_language,
            )
            conn.execute(
                "INSERT INTO participants VALUES (?, ?, ?, ?, ?, ?, ?)",
                (
                    record.participant_id,
                    record.study_id,
                    survey.model_dump_json(),
                    record.registered_at.isoformat(),
                    record.client_kind.value,
                    record.plugin_version,
                    record.ui_language,
                ),
            )
        return record

    def get_participant(self, participant_id: str) -> Optional[ParticipantRecord]:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT participant_id, study_id, survey_json, registered_at,"
                " client_kind, plugin_version, ui_language"
                " FROM participants WHERE participant_id = ?",
                (participant_id,),
            ).fetchone()
        if row is None:
            return None
        return ParticipantRecord(
            participant_id=row[0],
            study_id=row[1],
            survey=SurveyResponse.model_validate_json(row[2]),
            registered_at=datetime.fromisoformat(row[3]),
            client_kind=ClientKind(row[4]),
            plugin_version=row[5],
            ui_language=row[6],
        )

    def control_occupancy(self, study_id: int) -> int:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT occupancy FROM control_occupancy WHERE study_id = ?",
                (study_id,),
            ).fetchone()
        return row[0] if row else 0

    def count_in_group(self, study_id: int) -> int:
        with self._connect() as conn:
            (n,) = conn.execute(
                "SELECT COUNT(*) FROM participants WHERE study_id = ?", (study_id,)
            ).fetchone()
        return n

    # -- ingestion ---------------------------------------------------------

    def ingest_submission(self, submission: Submission) -> dict:
        """Append-only, idempotent ingest. Returns the acknowledgment payload."""
        participant = self.get_participant(submission.participant_id)
        if participant is None:
            raise UnknownParticipant(submission.participant_id)
        if participant.study_id != submission.study_id:
            raise StudyMismatch(
                f"submission study {submission.study_id} != registered {participant.study_id}"
            )
        with self._connect() as conn:
            conn.execute("BEGIN IMMEDIATE")
            cursor = conn.execute(
                "INSERT OR IGNORE INTO submissions"
                " (submission_id, participant_id, study_id, plugin_version, sent_at,"
                "  tz_offset_minutes, ui_language, order_seed, received_at, seq)"
                " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?,"
                "         (SELECT COALESCE(MAX(seq), 0) + 1 FROM submissions))",
                (
                    submission.submission_id,
                    submission.participant_id,
                    submission.study_id,
                    submission.plugin_version,
                    submission.sent_at.isoformat(),
                    submission.tz_offset_minutes,
                    submission.ui_language,
                    submission.order_seed,
                    utc_now().isoformat(),
                ),
            )
            if cursor.rowcount == 0:
                return {"status": "ok", "duplicate": True, "stored_snapshots": 0}
            for idx, snap in enumerate(submission.snapshots):
                conn.execute(
                    "INSERT INTO snapshots"
                    " (submission_id, idx, query, tld, fetched_at, blocked,"
                    "  ads_json, results_json, stories_json, raw_page, error)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        submission.submission_id,
                        idx,
                        snap.query,
                        snap.tld,
                        snap.fetched_at.isoformat(),
                        int(snap.blocked),
                        _ADS.dump_json(snap.ads).decode(),
                        _RESULTS.dump_json(snap.results).decode(),
                        _STORIES.dump_json(snap.top_stories).decode(),
                        snap.raw_page,
                        snap.error,
                    ),
                )
        return {
            "status": "ok",
            "duplicate": False,
            "stored_snapshots": len(submission.snapshots),
        }

    # -- queries -----------------------------------------------------------

    def counts(self) -> dict:
        with self._connect() as conn:
            (participants,) = conn.execute("SELECT COUNT(*) FROM participants").fetchone()
            (submissions,) = conn.execute("SELECT COUNT(*) FROM submissions").fetchone()
            (snapshots,) = conn.execute("SELECT COUNT(*) FROM snapshots").fetchone()
        return {
            "participants": participants,
            "submissions": submissions,
            "snapshots": snapshots,
        }

    def iter_entries(
        self,
        date_from: Optional[datetime] = None,
        date_to: Optional[datetime] = None,
        study_ids: Optional[list[int]] = None,
    ) -> Iterator[CorpusEntry]:
        """Snapshot rows joined to their submission and participant, in
        deterministic ingest order."""
        query = (
            "SELECT sub.submission_id, sub.participant_id, sub.study_id,"
            " p.client_kind, sub.plugin_version, sub.sent_at, sub.tz_offset_minutes,"
            " sub.ui_language, s.query, s.tld, s.fetched_at, s.blocked,"
            " s.ads_json, s.results_json, s.stories_json, s.error"
            " FROM snapshots s"
            " JOIN submissions sub ON sub.submission_id = s.submission_id"
            " JOIN participants p ON p.participant_id = sub.participant_id"
        )
        clauses, params = [], []
        if date_from is not None:
            clauses.append("sub.sent_at >= ?")
            params.append(date_from.isoformat())
        if date_to is not None:
            clauses.append("sub.sent_at <= ?")
            params.append(date_to.isoformat())
        if study_ids:
            clauses.append(
                f"sub.study_id IN ({','.join('?' * len(study_ids))})"
            )
            params.extend(study_ids)
        if clauses:
            query += " WHERE " + " AND ".join(clauses)
        query += " ORDER BY sub.seq, s.idx"
        with self._connect() as conn:
            for row in conn.execute(query, params):
                yield CorpusEntry(
                    submission_id=row[0],
                    participant_id=row[1],
                    study_id=row[2],
                    client_kind=ClientKind(row[3]),
                    plugin_version=row[4],
                    sent_at=datetime.fromisoformat(row[5]),
                    tz_offset_minutes=row[6],
                    ui_language=row[7],
                    query=row[8],
                    tld=row[9],
                    fetched_at=datetime.fromisoformat(row[10]),
                    blocked=bool(row[11]),
                    ads=_ADS.validate_json(row[12]),
                    results=_RESULTS.validate_json(row[13]),
                    top_stories=_STORIES.validate_json(row[14]),
                    error=row[15],
                )


class _SqliteAssignmentState:
    """Occupancy test-and-increment inside the caller's open transaction."""

    def __init__(self, conn: sqlite3.Connection):
        self._conn = conn

    def try_increment(self, study_id: int, capacity: int) -> bool:
        cursor = self._conn.execute(
            "UPDATE control_occupancy SET occupancy = occupancy + 1"
            " WHERE study_id = ? AND occupancy < capacity",
            (study_id,),
        )
        return cursor.rowcount == 1
