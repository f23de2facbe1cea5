"""Shared domain types for the audit platform.

All types are immutable after construction and JSON-serializable through
pydantic, which is also the wire format (one object per request body).
"""

from __future__ import annotations

import uuid
from datetime import datetime, timezone
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

MAX_TZ_OFFSET_MINUTES = 14 * 60


def new_opaque_id() -> str:
    """128-bit random identifier rendered as lowercase hex."""
    return uuid.uuid4().hex


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


class Condition(str, Enum):
    """Medical conditions covered by the study, with stable string codes."""

    PARKINSONS = "pd"
    MULTIPLE_SCLEROSIS = "ms"
    DIABETES = "db"

    @property
    def query_token(self) -> str:
        """Token substituted for the disease placeholder in query templates."""
        return _QUERY_TOKENS[self]


_QUERY_TOKENS = {
    Condition.PARKINSONS: "parkinson's",
    Condition.MULTIPLE_SCLEROSIS: "multiple sclerosis",
    Condition.DIABETES: "diabetes",
}

# Assignment precedence when a participant reports several conditions.
CONDITION_PRECEDENCE = (
    Condition.PARKINSONS,
    Condition.MULTIPLE_SCLEROSIS,
    Condition.DIABETES,
)


class Region(str, Enum):
    AUSTRALIA = "au"
    CANADA = "ca"
    UNITED_KINGDOM = "uk"
    UNITED_STATES = "us"
    OTHER = "other"

    @property
    def tld(self) -> str:
        return _REGION_TLDS[self]


_REGION_TLDS = {
    Region.AUSTRALIA: "com.au",
    Region.CANADA: "ca",
    Region.UNITED_KINGDOM: "co.uk",
    Region.UNITED_STATES: "com",
    Region.OTHER: "com",
}


class ImpactStatus(str, Enum):
    PATIENT = "patient"
    CARER = "carer"
    NO = "no"


class AgeBand(str, Enum):
    A18_29 = "18-29"
    A30_39 = "30-39"
    A40_49 = "40-49"
    A50_59 = "50-59"
    A60_69 = "60-69"
    A69_PLUS = "69+"


class Gender(str, Enum):
    FEMALE = "female"
    MALE = "male"
    OTHER = "other"
    NOT_SAID = "not_said"


class UsageFrequency(str, Enum):
    DAILY_GT2 = "daily_gt2"
    DAILY_LE2 = "daily_le2"
    WEEKLY = "weekly"
    MONTHLY = "monthly"


class ClientKind(str, Enum):
    DONOR = "donor"
    BASELINE = "baseline"


class SurveyResponse(BaseModel):
    """Answers to the onboarding survey. ``city=None`` means "prefer not to say"."""

    model_config = ConfigDict(frozen=True)

    pd_status: ImpactStatus
    ms_status: ImpactStatus
    db_status: ImpactStatus
    researcher: bool
    residence: Region
    age_band: AgeBand
    gender: Gender
    device_use: UsageFrequency
    search_use: UsageFrequency
    paid_or_inquired_sct: bool
    city: Optional[str] = None

    @field_validator("city")
    @classmethod
    def _city_nonempty(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and not v.strip():
            raise ValueError("city must be nonempty unless withheld")
        return v

    def affected_conditions(self) -> tuple[Condition, ...]:
        """Conditions the participant is affected by, in precedence order."""
        status = {
            Condition.PARKINSONS: self.pd_status,
            Condition.MULTIPLE_SCLEROSIS: self.ms_status,
            Condition.DIABETES: self.db_status,
        }
        return tuple(
            c for c in CONDITION_PRECEDENCE if status[c] is not ImpactStatus.NO
        )

    @property
    def is_affected(self) -> bool:
        return bool(self.affected_conditions())


class ParticipantRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    participant_id: str
    study_id: int
    survey: SurveyResponse
    registered_at: datetime
    client_kind: ClientKind
    plugin_version: str
    ui_language: str


class AdRecord(BaseModel):
    """A single ad occurrence as crawled from a result page.

    ``name`` is the displayed host line verbatim; ``resolved_host`` is computed
    separately because creatives may misstate their destination.
    """

    model_config = ConfigDict(frozen=True)

    name: str = ""
    title: str = ""
    url: str = ""
    content: str = ""
    resolved_host: str = "unknown"

    @model_validator(mode="after")
    def _name_or_url(self) -> "AdRecord":
        if not self.name and not self.url:
            raise ValueError("ad requires at least one of name/url")
        return self


class OrganicResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    title: str = ""
    content: str = ""
    url: str = ""
    position: int

    @field_validator("position")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("position must be >= 1")
        return v


class TopStory(BaseModel):
    model_config = ConfigDict(frozen=True)

    title: str = ""
    author: str = ""
    url: str = ""
    position: int

    @field_validator("position")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("position must be >= 1")
        return v


class SerpSnapshot(BaseModel):
    """One query's extracted result page (a "donation" / corpus entry).

    ``error`` carries a fetch/extraction failure annotation; the lists are
    empty in that case but the snapshot still counts as an entry.
    """

    model_config = ConfigDict(frozen=True)

    query: str
    tld: str
    fetched_at: datetime
    ads: tuple[AdRecord, ...] = ()
    results: tuple[OrganicResult, ...] = ()
    top_stories: tuple[TopStory, ...] = ()
    blocked: bool = False
    raw_page: Optional[str] = None
    error: Optional[str] = None

    @model_validator(mode="after")
    def _check_invariants(self) -> "SerpSnapshot":
        if self.blocked and (self.ads or self.results or self.top_stories):
            raise ValueError("blocked snapshot must carry no extracted items")
        for seq in (self.results, self.top_stories):
            positions = [item.position for item in seq]
            if any(b <= a for a, b in zip(positions, positions[1:])):
                raise ValueError("positions must be strictly increasing")
        return self


class Submission(BaseModel):
    """A batch of snapshots sent to the collection server (the wire unit)."""

    model_config = ConfigDict(frozen=True)

    submission_id: str
    participant_id: str
    study_id: int
    plugin_version: str
    sent_at: datetime
    tz_offset_minutes: int
    ui_language: str
    snapshots: tuple[SerpSnapshot, ...]
    # Seed of the crawl-order permutation, kept so the order is reproducible.
    order_seed: Optional[int] = None

    @field_validator("tz_offset_minutes")
    @classmethod
    def _offset_in_range(cls, v: int) -> int:
        if abs(v) > MAX_TZ_OFFSET_MINUTES:
            raise ValueError("tz offset out of range")
        return v

    @field_validator("snapshots")
    @classmethod
    def _nonempty(cls, v: tuple) -> tuple:
        if not v:
            raise ValueError("submission requires at least one snapshot")
        return v
