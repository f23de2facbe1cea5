"""Process-level supervision of collector agents.

Crashes restart with exponential backoff; sustained memory pressure forces a
restart at the next cycle boundary; an optional daily restart mimics the
scheduled reboots the baseline fleet needs. Every event lands in an
append-only health log, totally ordered per agent.
"""

from __future__ import annotations

import json
import threading
from datetime import datetime, time, timedelta
from pathlib import Path
from typing import Optional, Protocol

from pydantic import BaseModel, ConfigDict

from ..clock import Clock


class AgentHandle(Protocol):
    """Minimal control surface the supervisor needs over a running agent."""

    def start(self) -> None: ...

    def poll(self) -> Optional[int]:
        """None while running, else the exit code."""
        ...

    def terminate(self) -> None: ...

    def memory_bytes(self) -> int: ...

    def busy(self) -> bool:
        """True while a crawl cycle is in flight."""
        ...


class SupervisorPolicy(BaseModel):
    model_config = ConfigDict(frozen=True)

    backoff_base_s: float = 10.0
    backoff_cap_s: float = 600.0
    max_consecutive_failures: int = 10
    # A restart "took" if the agent stays up at least this long.
    stability_window_s: float = 60.0
    memory_threshold_bytes: Optional[int] = None
    daily_restart_local: Optional[time] = None
    poll_interval_s: float = 5.0


class SupervisionEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    seq: int
    at: datetime
    agent_id: str
    kind: str  # started | crashed | restarted | memory_restart | scheduled_restart | gave_up | stopped
    detail: str = ""


class GiveUp(RuntimeError):
    pass


class HealthLog:
    """Append-only JSON-lines log; writes serialized through one lock."""

    def __init__(self, path: Optional[str | Path] = None):
        self.path = Path(path) if path else None
        self.events: list[SupervisionEvent] = []
        self._lock = threading.Lock()
        self._seq = 0

    def append(self, at: datetime, agent_id: str, kind: str, detail: str = "") -> SupervisionEvent:
        with self._lock:
            self._seq += 1
            event = SupervisionEvent(
                seq=self._seq, at=at, agent_id=agent_id, kind=kind, detail=detail
            )
            self.events.append(event)
            if self.path is not None:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(event.model_dump_json() + "\n")
        return event


def supervise_agent(
    agent_id: str,
    handle: AgentHandle,
    policy: SupervisorPolicy,
    clock: Clock,
    until_utc: datetime,
    log: Optional[HealthLog] = None,
    tz_offset_minutes: int = 0,
) -> list[SupervisionEvent]:
    """Run one agent under the policy until ``until_utc`` or GiveUp.

    Returns this agent's events (also appended to the shared log).
    """
    log = log or HealthLog()
    consecutive_failures = 0
    started_at = clock.now_utc()
    handle.start()
    log.append(started_at, agent_id, "started")
    next_daily = _next_daily_restart(policy, clock.now_utc(), tz_offset_minutes)
    memory_pending = False

    while clock.now_utc() < until_utc:
        exit_code = handle.poll()
        now = clock.now_utc()
        if exit_code is not None:
            if exit_code == 0:
                log.append(now, agent_id, "stopped", "clean exit")
                return [e for e in log.events if e.agent_id == agent_id]
            uptime = (now - started_at).total_seconds()
            consecutive_failures = (
                consecutive_failures + 1 if uptime < policy.stability_window_s else 1
            )
            log.append(now, agent_id, "crashed", f"exit={exit_code} uptime={uptime:.0f}s")
            if consecutive_failures >= policy.max_consecutive_failures:
                log.append(now, agent_id, "gave_up", f"{consecutive_failures} consecutive failures")
                raise GiveUp(agent_id)
            backoff = min(
                policy.backoff_base_s * 2 ** (consecutive_failures - 1),
                policy.backoff_cap_s,
            )
            clock.sleep(backoff)
            started_at = clock.now_utc()
            handle.start()
            log.append(started_at, agent_id, "restarted", f"backoff={backoff:.0f}s")
            continue

        if (
            policy.memory_threshold_bytes is not None
            and handle.memory_bytes() > policy.memory_threshold_bytes
        ):
            memory_pending = True
        if memory_pending and not handle.busy():
            handle.terminate()
            handle.start()
            started_at = clock.now_utc()
            log.append(started_at, agent_id, "memory_restart")
            memory_pending = False
            consecutive_failures = 0

        if next_daily is not None and now >= next_daily:
            if not handle.busy():
                handle.terminate()
                handle.start()
                started_at = clock.now_utc()
                log.append(started_at, agent_id, "scheduled_restart")
                next_daily = _next_daily_restart(policy, started_at, tz_offset_minutes)
            # while busy, retry on the next poll; the restart waits for the boundary

        clock.sleep(policy.poll_interval_s)

    handle.terminate()
    log.append(clock.now_utc(), agent_id, "stopped", "supervision window over")
    return [e for e in log.events if e.agent_id == agent_id]


def _next_daily_restart(
    policy: SupervisorPolicy, now_utc: datetime, tz_offset_minutes: int
) -> Optional[datetime]:
    if policy.daily_restart_local is None:
        return None
    offset = timedelta(minutes=tz_offset_minutes)
    local = now_utc + offset
    candidate = local.replace(
        hour=policy.daily_restart_local.hour,
        minute=policy.daily_restart_local.minute,
        second=0,
        microsecond=0,
    )
    if candidate <= local:
        candidate += timedelta(days=1)
    return candidate - offset
