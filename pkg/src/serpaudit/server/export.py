"""Corpus export/import: semicolon-delimited text with embedded JSON columns.

Fields containing the delimiter, quotes, or newlines are wrapped in double
quotes with embedded quotes doubled; nested structures (ads, results, top
stories) are serialized as JSON and survive round trips byte-exact.
export -> import -> export is a fixed point.
"""

from __future__ import annotations

import csv
import io
from datetime import datetime
from typing import Iterable, Optional, TextIO

from pydantic import BaseModel, ConfigDict, TypeAdapter

from ..model import AdRecord, ClientKind, OrganicResult, TopStory

DELIMITER = ";"

_ADS = TypeAdapter(tuple[AdRecord, ...])
_RESULTS = TypeAdapter(tuple[OrganicResult, ...])
_STORIES = TypeAdapter(tuple[TopStory, ...])

COLUMNS = (
    "submission_id",
    "participant_id",
    "study_id",
    "client_kind",
    "plugin_version",
    "sent_at",
    "tz_offset_minutes",
    "ui_language",
    "query",
    "tld",
    "fetched_at",
    "blocked",
    "ads",
    "results",
    "top_stories",
    "error",
)


class CorpusEntry(BaseModel):
    """One exported snapshot row joined to its submission and participant.

    The raw page is deliberately not part of the export; it stays in the
    store for re-analysis.
    """

    model_config = ConfigDict(frozen=True)

    submission_id: str
    participant_id: str
    study_id: int
    client_kind: ClientKind
    plugin_version: str
    sent_at: datetime
    tz_offset_minutes: int
    ui_language: str
    query: str
    tld: str
    fetched_at: datetime
    blocked: bool
    ads: tuple[AdRecord, ...] = ()
    results: tuple[OrganicResult, ...] = ()
    top_stories: tuple[TopStory, ...] = ()
    error: Optional[str] = None


def _row_of(entry: CorpusEntry) -> list[str]:
    return [
        entry.submission_id,
        entry.participant_id,
        str(entry.study_id),
        entry.client_kind.value,
        entry.plugin_version,
        entry.sent_at.isoformat(),
        str(entry.tz_offset_minutes),
        entry.ui_language,
        entry.query,
        entry.tld,
        entry.fetched_at.isoformat(),
        "true" if entry.blocked else "false",
        _ADS.dump_json(entry.ads).decode(),
        _RESULTS.dump_json(entry.results).decode(),
        _STORIES.dump_json(entry.top_stories).decode(),
        entry.error if entry.error is not None else "",
    ]


def _entry_of(row: list[str]) -> CorpusEntry:
    values = dict(zip(COLUMNS, row))
    return CorpusEntry(
        submission_id=values["submission_id"],
        participant_id=values["participant_id"],
        study_id=int(values["study_id"]),
        client_kind=ClientKind(values["client_kind"]),
        plugin_version=values["plugin_version"],
        sent_at=datetime.fromisoformat(values["sent_at"]),
        tz_offset_minutes=int(values["tz_offset_minutes"]),
        ui_language=values["ui_language"],
        query=values["query"],
        tld=values["tld"],
        fetched_at=datetime.fromisoformat(values["fetched_at"]),
        blocked=values["blocked"] == "true",
        ads=_ADS.validate_json(values["ads"]),
        results=_RESULTS.validate_json(values["results"]),
        top_stories=_STORIES.validate_json(values["top_stories"]),
        error=values["error"] or None,
    )


def export_corpus(entries: Iterable[CorpusEntry], stream: TextIO) -> int:
    """Write the header plus one row per entry; returns the row count."""
    writer = csv.writer(
        stream, delimiter=DELIMITER, quotechar='"', doublequote=True,
        quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n",
    )
    writer.writerow(COLUMNS)
    n = 0
    for entry in entries:
        writer.writerow(_row_of(entry))
        n += 1
    return n


def export_corpus_text(entries: Iterable[CorpusEntry]) -> str:
    buffer = io.StringIO(newline="")
    export_corpus(entries, buffer)
    return buffer.getvalue()


def import_corpus(stream: TextIO | str) -> list[CorpusEntry]:
    """Parse an exported corpus. File streams should be opened with
    ``newline=""`` so quoted newlines pass through untranslated."""
    if isinstance(stream, str):
        stream = io.StringIO(stream, newline="")
    reader = csv.reader(stream, delimiter=DELIMITER, quotechar='"', doublequote=True)
    header = next(reader, None)
    if header is None:
        return []
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected export header: {header!r}")
    return [_entry_of(row) for row in reader if row]
