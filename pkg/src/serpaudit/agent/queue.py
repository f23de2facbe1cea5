"""On-disk submission buffer: survives restarts, delivers in order, dedups by id."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Callable

from ..model import Submission


class SubmissionQueue:
    """One JSON file per buffered submission, ordered by a sequence prefix."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _next_seq(self) -> int:
        existing = [int(p.name.split("-", 1)[0]) for p in self._files()]
        return max(existing, default=0) + 1

    def _files(self) -> list[Path]:
        return sorted(p for p in self.directory.glob("*.json") if "-" in p.name)

    def push(self, submission: Submission) -> Path:
        path = self.directory / f"{self._next_seq():08d}-{submission.submission_id}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(submission.model_dump_json(), "utf-8")
        os.replace(tmp, path)
        return path

    def pending(self) -> list[Submission]:
        return [Submission.model_validate_json(p.read_text("utf-8")) for p in self._files()]

    def __len__(self) -> int:
        return len(self._files())

    def flush(
        self,
        send: Callable[[Submission], bool],
        max_retries_per_contact: int = 3,
    ) -> int:
        """Deliver buffered submissions in order.

        ``send`` returns True on acknowledgment. A failed send is retried up
        to ``max_retries_per_contact`` times in total for this contact; if it
        still fails, remaining submissions stay buffered for the next cycle.
        Returns the number delivered.
        """
        delivered = 0
        failures = 0
        for path in self._files():
            submission = Submission.model_validate_json(path.read_text("utf-8"))
            acked = False
            while not acked:
                try:
                    acked = send(submission)
                except Exception:
                    acked = False
                if acked:
                    break
                failures += 1
                if failures >= max_retries_per_contact:
                    return delivered
            path.unlink()
            delivered += 1
        return delivered
