"""Study groups and participant assignment.

Regional groups exist per condition and English-speaking region; unaffected
participants fill capacity-limited control buckets one condition at a time.
Participants from other countries land in a catch-all observation group that
is excluded from regional analysis but keeps their data for future research.
"""

from __future__ import annotations

import json
import threading
from enum import Enum
from pathlib import Path
from typing import Optional, Protocol

from pydantic import BaseModel, ConfigDict

from ..model import CONDITION_PRECEDENCE, Condition, Region, SurveyResponse

CONTROL_CAPACITY = 50

# Buckets fill for the primary study condition first, then the others.
CONTROL_FILL_ORDER = (
    Condition.PARKINSONS,
    Condition.MULTIPLE_SCLEROSIS,
    Condition.DIABETES,
)

_REGION_SLOT = {
    Region.CANADA: 0,
    Region.UNITED_KINGDOM: 1,
    Region.AUSTRALIA: 2,
    Region.UNITED_STATES: 3,
}
_CONDITION_RANK = {
    Condition.DIABETES: 1,
    Condition.MULTIPLE_SCLEROSIS: 2,
    Condition.PARKINSONS: 3,
}

OBSERVATION_GROUP_ID = 16


class GroupKind(str, Enum):
    REGIONAL = "regional"
    CONTROL = "control"
    OBSERVATION = "observation"


class StudyGroup(BaseModel):
    model_config = ConfigDict(frozen=True)

    study_id: int
    kind: GroupKind
    condition: Optional[Condition] = None
    region: Optional[Region] = None  # None means global
    capacity: Optional[int] = None


class NoEligibleGroup(LookupError):
    pass


def default_group_table() -> tuple[StudyGroup, ...]:
    """The shipped group table.

    Ids follow the published numbering for the Parkinson's groups
    (Canada 3, UK 6, Australia 9, US 12, control 15); the other conditions
    fill the remaining slots of the same scheme.
    """
    groups: list[StudyGroup] = []
    for region, slot in _REGION_SLOT.items():
        for condition, rank in _CONDITION_RANK.items():
            groups.append(
                StudyGroup(
                    study_id=slot * 3 + rank,
                    kind=GroupKind.REGIONAL,
                    condition=condition,
                    region=region,
                )
            )
    for condition, rank in _CONDITION_RANK.items():
        groups.append(
            StudyGroup(
                study_id=12 + rank,
                kind=GroupKind.CONTROL,
                condition=condition,
                capacity=CONTROL_CAPACITY,
            )
        )
    groups.append(StudyGroup(study_id=OBSERVATION_GROUP_ID, kind=GroupKind.OBSERVATION))
    return tuple(sorted(groups, key=lambda g: g.study_id))


def load_group_table(path: str | Path) -> tuple[StudyGroup, ...]:
    data = json.loads(Path(path).read_text("utf-8"))
    return tuple(StudyGroup(**g) for g in data["groups"])


class AssignmentState(Protocol):
    """Atomic occupancy bookkeeping for the control buckets."""

    def try_increment(self, study_id: int, capacity: int) -> bool:
        """Reserve one slot iff occupancy < capacity. Atomic."""
        ...


class MemoryAssignmentState:
    def __init__(self) -> None:
        self._occupancy: dict[int, int] = {}
        self._lock = threading.Lock()

    def try_increment(self, study_id: int, capacity: int) -> bool:
        with self._lock:
            current = self._occupancy.get(study_id, 0)
            if current >= capacity:
                return False
            self._occupancy[study_id] = current + 1
            return True

    def occupancy(self, study_id: int) -> int:
        with self._lock:
            return self._occupancy.get(study_id, 0)


class GroupTable:
    def __init__(self, groups: tuple[StudyGroup, ...] | None = None):
        self.groups = groups if groups is not None else default_group_table()
        self._by_id = {g.study_id: g for g in self.groups}
        if len(self._by_id) != len(self.groups):
            raise ValueError("duplicate study ids in group table")
        self._regional = {
            (g.condition, g.region): g
            for g in self.groups
            if g.kind is GroupKind.REGIONAL
        }
        self._control = {
            g.condition: g for g in self.groups if g.kind is GroupKind.CONTROL
        }
        observation = [g for g in self.groups if g.kind is GroupKind.OBSERVATION]
        self._observation = observation[0] if observation else None

    def get(self, study_id: int) -> StudyGroup:
        return self._by_id[study_id]

    def __contains__(self, study_id: int) -> bool:
        return study_id in self._by_id

    def condition_for(self, study_id: int) -> Condition:
        """Condition whose query set a group's members crawl; the observation
        group follows the primary study condition."""
        group = self._by_id[study_id]
        return group.condition or CONDITION_PRECEDENCE[0]

    def _observation_or_raise(self, reason: str) -> int:
        if self._observation is None:
            raise NoEligibleGroup(reason)
        return self._observation.study_id

    def assign(self, survey: SurveyResponse, state: AssignmentState) -> int:
        """Pick the study group for a validated survey.

        Affected participants go to the regional group of their
        highest-precedence condition; unaffected ones fill the control
        buckets in order, spilling into the observation group when every
        bucket is full.
        """
        affected = survey.affected_conditions()
        if affected:
            condition = affected[0]
            group = self._regional.get((condition, survey.residence))
            if group is None:
                return self._observation_or_raise(
                    f"no regional group for {condition.value}/{survey.residence.value}"
                )
            return group.study_id
        for condition in CONTROL_FILL_ORDER:
            group = self._control.get(condition)
            if group is None:
                continue
            capacity = group.capacity if group.capacity is not None else CONTROL_CAPACITY
            if state.try_increment(group.study_id, capacity):
                return group.study_id
        return self._observation_or_raise("all control buckets full")
