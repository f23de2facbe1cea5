"""Headless probe client: crawl cycles, packaging, buffering, config updates."""

from __future__ import annotations

import random
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Optional
from urllib.parse import parse_qs, urlsplit
from zoneinfo import ZoneInfo

import httpx
from pydantic import BaseModel, ConfigDict

from .. import __version__
from ..clock import Clock
from ..extraction import ExtractionRuleSet, RuleSetMismatch, default_rules, extract_snapshot
from ..model import (
    ClientKind,
    Condition,
    Region,
    SerpSnapshot,
    Submission,
    new_opaque_id,
)
from ..queries import QuerySet, build_search_url, randomize_order
from .client import ConfigUpdate, RegistrationResult, ServerClient
from .queue import SubmissionQueue
from .schedule import fire_instant_utc, next_fire_time

Fetcher = Callable[[str], str]


class FetchError(RuntimeError):
    pass


class PreconditionViolation(RuntimeError):
    pass


class EmptySnapshots(ValueError):
    pass


class TargetMode(str, Enum):
    MOCK = "mock"
    LIVE = "live"


class AgentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    server_url: str = ""
    participant_id: Optional[str] = None
    study_id: Optional[int] = None
    region: Region = Region.UNITED_STATES
    terms: Optional[QuerySet] = None
    ruleset: ExtractionRuleSet = None  # type: ignore[assignment]
    templates: tuple[str, ...] = ()
    retention: bool = False
    target_mode: TargetMode = TargetMode.MOCK
    mock_url: Optional[str] = None
    mock_signals: frozenset[Condition] = frozenset()
    tz_offset_minutes: int = 0
    tz_name: Optional[str] = None
    ui_language: str = "en"
    plugin_version: str = __version__
    client_kind: ClientKind = ClientKind.BASELINE
    startup_delay_s: float = 30.0
    min_query_delay_s: float = 2.0
    max_query_delay_s: float = 5.0
    # Shifts every scheduled fire, so fleets do not probe in lockstep.
    stagger_offset_s: float = 0.0

    def __init__(self, **data):
        if data.get("ruleset") is None:
            data["ruleset"] = default_rules()
        super().__init__(**data)

    @property
    def rules_version(self) -> int:
        return self.ruleset.version

    @property
    def registered(self) -> bool:
        return self.participant_id is not None and self.terms is not None


def apply_config_update(current: AgentConfig, offered: ConfigUpdate) -> AgentConfig:
    """Adopt a remotely offered rule set iff it is strictly newer."""
    if offered.version > current.rules_version:
        update: dict = {"ruleset": offered.ruleset}
        if offered.templates:
            update["templates"] = offered.templates
        return current.model_copy(update=update)
    return current


def package_submission(
    snapshots: list[SerpSnapshot] | tuple[SerpSnapshot, ...],
    config: AgentConfig,
    now_utc: datetime,
    tz_offset_minutes: int,
    order_seed: Optional[int] = None,
) -> Submission:
    if not snapshots:
        raise EmptySnapshots("a submission needs at least one snapshot")
    if config.participant_id is None or config.study_id is None:
        raise PreconditionViolation("agent is not registered")
    return Submission(
        submission_id=new_opaque_id(),
        participant_id=config.participant_id,
        study_id=config.study_id,
        plugin_version=config.plugin_version,
        sent_at=now_utc,
        tz_offset_minutes=tz_offset_minutes,
        ui_language=config.ui_language,
        snapshots=tuple(snapshots),
        order_seed=order_seed,
    )


def run_cycle(
    config: AgentConfig,
    clock: Clock,
    fetcher: Fetcher,
    order_seed: Optional[int] = None,
) -> Submission:
    """One crawl cycle: every term once, sequentially, in a fresh random order.

    Fetch failures degrade to annotated empty snapshots; the cycle continues.
    """
    if not config.registered:
        raise PreconditionViolation("agent must register before crawling")
    assert config.terms is not None
    if not config.terms.terms:
        raise PreconditionViolation("empty term list")
    seed = order_seed if order_seed is not None else secrets.randbits(63)
    order = randomize_order(config.terms, seed)
    delay_rng = random.Random(seed ^ 0x5EED)
    tld = config.region.tld

    snapshots: list[SerpSnapshot] = []
    last_ts: Optional[datetime] = None
    for term in order:
        url = build_search_url(tld, term)
        ts = clock.now_utc()
        if last_ts is not None and ts <= last_ts:
            ts = last_ts + timedelta(microseconds=1)
        last_ts = ts
        try:
            page = fetcher(url)
        except FetchError as exc:
            snapshots.append(
                SerpSnapshot(
                    query=term, tld=tld, fetched_at=ts, error=f"fetch-failed: {exc}"
                )
            )
        else:
            try:
                snap = extract_snapshot(
                    page, config.ruleset, term, tld, ts, retain_raw=config.retention
                )
            except RuleSetMismatch as exc:
                snap = exc.snapshot.model_copy(update={"error": "ruleset-mismatch"})
            snapshots.append(snap)
        clock.sleep(delay_rng.uniform(config.min_query_delay_s, config.max_query_delay_s))

    offset = _tz_offset_minutes(config, clock.now_utc())
    return package_submission(snapshots, config, clock.now_utc(), offset, order_seed=seed)


def _tz_offset_minutes(config: AgentConfig, now_utc: datetime) -> int:
    if config.tz_name:
        local = now_utc.astimezone(ZoneInfo(config.tz_name))
        return int(local.utcoffset().total_seconds() // 60)
    return config.tz_offset_minutes


def _next_fire_utc(config: AgentConfig, now_utc: datetime) -> datetime:
    stagger = timedelta(seconds=config.stagger_offset_s)
    if config.tz_name:
        return fire_instant_utc(now_utc - stagger, ZoneInfo(config.tz_name)) + stagger
    offset = timedelta(minutes=config.tz_offset_minutes)
    local_naive = (now_utc - stagger + offset).replace(tzinfo=None)
    target = next_fire_time(local_naive)
    return target.replace(tzinfo=timezone.utc) - offset + stagger


@dataclass
class RunStats:
    startup_cycles: int = 0
    scheduled_cycles: int = 0
    delivered: int = 0
    cycle_errors: int = 0
    submissions: list[str] = field(default_factory=list)


class MockServiceFetcher:
    """Maps search URLs onto an in-process mock engine instance."""

    def __init__(self, service, signals: frozenset[Condition] = frozenset()):
        self.service = service
        self.signals = signals

    def __call__(self, url: str) -> str:
        term = _term_from_url(url)
        return self.service.serve(term, self.signals).page


class HttpFetcher:
    """Fetches pages over HTTP; in mock mode the URL is rewritten onto the
    mock engine's /search endpoint."""

    def __init__(
        self,
        mock_url: Optional[str] = None,
        signals: frozenset[Condition] = frozenset(),
        http: Optional[httpx.Client] = None,
    ):
        self.mock_url = mock_url.rstrip("/") if mock_url else None
        self.signals = signals
        self._http = http or httpx.Client(timeout=30.0, follow_redirects=True)

    def __call__(self, url: str) -> str:
        try:
            if self.mock_url is not None:
                params = {"q": _term_from_url(url)}
                if self.signals:
                    params["signals"] = ",".join(sorted(s.value for s in self.signals))
                resp = self._http.get(f"{self.mock_url}/search", params=params)
            else:
                resp = self._http.get(url)
            resp.raise_for_status()
            return resp.text
        except httpx.HTTPError as exc:
            raise FetchError(str(exc)) from exc


def _term_from_url(url: str) -> str:
    params = parse_qs(urlsplit(url).query)
    values = params.get("q")
    if not values:
        raise FetchError(f"no query term in url: {url}")
    return values[0]


class CollectorAgent:
    """Owns one profile directory: config, submission queue, crawl loop."""

    def __init__(
        self,
        config: AgentConfig,
        clock: Clock,
        fetcher: Fetcher,
        api: ServerClient,
        profile_dir: str | Path,
    ):
        self.config = config
        self.clock = clock
        self.fetcher = fetcher
        self.api = api
        self.profile_dir = Path(profile_dir)
        self.profile_dir.mkdir(parents=True, exist_ok=True)
        self.queue = SubmissionQueue(self.profile_dir / "queue")
        self._cycle_guard = threading.Lock()

    # -- persistence -------------------------------------------------------

    @property
    def config_path(self) -> Path:
        return self.profile_dir / "config.json"

    def save_config(self) -> None:
        self.config_path.write_text(self.config.model_dump_json(), "utf-8")

    @classmethod
    def load_config(cls, profile_dir: str | Path) -> AgentConfig:
        return AgentConfig.model_validate_json(
            (Path(profile_dir) / "config.json").read_text("utf-8")
        )

    # -- protocol steps ----------------------------------------------------

    def register(self, survey_raw: dict, consent: bool = True) -> RegistrationResult:
        result = self.api.register(
            survey_raw,
            consent=consent,
            client_kind=self.config.client_kind,
            plugin_version=self.config.plugin_version,
            ui_language=self.config.ui_language,
        )
        self.config = self.config.model_copy(
            update={
                "participant_id": result.participant_id,
                "study_id": result.study_id,
                "terms": QuerySet(study_id=result.study_id, terms=result.terms),
            }
        )
        self.save_config()
        return result

    def check_config_update(self) -> bool:
        try:
            offered = self.api.fetch_config(self.config.rules_version)
        except Exception:
            return False  # unreachable server: keep crawling with current rules
        if offered is None:
            return False
        updated = apply_config_update(self.config, offered)
        changed = updated is not self.config
        if changed:
            self.config = updated
            self.save_config()
        return changed

    def run_cycle_and_submit(self) -> Submission:
        if not self._cycle_guard.acquire(blocking=False):
            raise PreconditionViolation("a cycle is already in flight")
        try:
            submission = run_cycle(self.config, self.clock, self.fetcher)
            self.queue.push(submission)
            self.queue.flush(self.api.submit)
            return submission
        finally:
            self._cycle_guard.release()

    # -- main loop ---------------------------------------------------------

    def run_until(self, until_utc: datetime, process_start: bool = True) -> RunStats:
        """Drive the schedule until ``until_utc``.

        A process start queues one startup cycle shortly after launch; wall
        clock fires happen at the configured hours. Cycles never overlap.
        """
        stats = RunStats()
        start = self.clock.now_utc()
        startup_at = start + timedelta(seconds=self.config.startup_delay_s)
        pending_startup = process_start
        next_sched = _next_fire_utc(self.config, start)

        while True:
            events: list[tuple[datetime, str]] = [(next_sched, "scheduled")]
            if pending_startup:
                events.append((startup_at, "startup"))
            at, kind = min(events)
            if at > until_utc:
                break
            now = self.clock.now_utc()
            if at > now:
                self.clock.sleep((at - now).total_seconds())
            self.check_config_update()
            try:
                submission = self.run_cycle_and_submit()
                stats.submissions.append(submission.submission_id)
            except PreconditionViolation:
                raise
            except Exception:
                stats.cycle_errors += 1
            else:
                if kind == "startup":
                    stats.startup_cycles += 1
                else:
                    stats.scheduled_cycles += 1
            if kind == "startup":
                pending_startup = False
            else:
                next_sched = _next_fire_utc(self.config, self.clock.now_utc())
        stats.delivered = stats.startup_cycles + stats.scheduled_cycles - len(self.queue)
        return stats
