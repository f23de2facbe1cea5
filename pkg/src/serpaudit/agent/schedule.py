"""Crawl schedule: fixed wall-clock fire hours, every four hours from midnight."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone, tzinfo

FIRE_HOURS = (0, 4, 8, 12, 16, 20)


def next_fire_time(now_local: datetime) -> datetime:
    """Smallest local time strictly after ``now_local`` with a fire hour on
    the hour. Works for naive and aware datetimes alike."""
    t = now_local.replace(minute=0, second=0, microsecond=0)
    while True:
        t += timedelta(hours=1)
        if t.hour in FIRE_HOURS:
            return t


def fire_instant_utc(now_utc: datetime, tz: tzinfo) -> datetime:
    """UTC instant of the next fire for a zone-aware local wall clock.

    DST handling: alarms follow the wall clock. A fire whose wall time falls
    into a skipped hour is dropped (the following fire is used); a wall time
    that occurs twice fires only on its first occurrence.
    """
    local_now = now_utc.astimezone(tz)
    target = next_fire_time(local_now.replace(tzinfo=None))
    while True:
        candidate = target.replace(tzinfo=tz, fold=0)
        instant = candidate.astimezone(timezone.utc)
        # Round-trip check: a wall time inside a DST gap does not exist; its
        # conversion lands on a different wall time and the fire is dropped.
        if instant.astimezone(tz).replace(tzinfo=None) == target and instant > now_utc:
            return instant
        target = next_fire_time(target)
