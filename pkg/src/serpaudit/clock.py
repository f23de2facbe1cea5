"""Clock abstraction so agents and supervisors run under simulated time."""

from __future__ import annotations

import threading
import time as _time
from datetime import datetime, timedelta, timezone
from typing import Protocol


class Clock(Protocol):
    def now_utc(self) -> datetime: ...

    def sleep(self, seconds: float) -> None: ...


class SystemClock:
    def now_utc(self) -> datetime:
        return datetime.now(timezone.utc)

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            _time.sleep(seconds)


class SimClock:
    """Virtual clock: sleeping advances time instantly. Thread-safe."""

    def __init__(self, start_utc: datetime):
        if start_utc.tzinfo is None:
            raise ValueError("SimClock needs an aware UTC start time")
        self._now = start_utc.astimezone(timezone.utc)
        self._lock = threading.Lock()

    def now_utc(self) -> datetime:
        with self._lock:
            return self._now

    def sleep(self, seconds: float) -> None:
        if seconds < 0:
            return
        with self._lock:
            self._now += timedelta(seconds=seconds)

    def advance_to(self, instant: datetime) -> None:
        with self._lock:
            if instant > self._now:
                self._now = instant
