from .hosts import UNKNOWN_HOST, canonicalize_host
from .survey import FieldError, SurveyValidationError, validate_survey
from .taxonomy import CATEGORY_TIER, Category, HostLabelEntry, Tier
from .types import (
    CONDITION_PRECEDENCE,
    MAX_TZ_OFFSET_MINUTES,
    AdRecord,
    AgeBand,
    ClientKind,
    Condition,
    Gender,
    ImpactStatus,
    OrganicResult,
    ParticipantRecord,
    Region,
    SerpSnapshot,
    Submission,
    SurveyResponse,
    TopStory,
    UsageFrequency,
    new_opaque_id,
    utc_now,
)

__all__ = [
    "AdRecord",
    "AgeBand",
    "CATEGORY_TIER",
    "CONDITION_PRECEDENCE",
    "Category",
    "ClientKind",
    "Condition",
    "FieldError",
    "Gender",
    "HostLabelEntry",
    "ImpactStatus",
    "MAX_TZ_OFFSET_MINUTES",
    "OrganicResult",
    "ParticipantRecord",
    "Region",
    "SerpSnapshot",
    "Submission",
    "SurveyResponse",
    "SurveyValidationError",
    "Tier",
    "TopStory",
    "UNKNOWN_HOST",
    "UsageFrequency",
    "canonicalize_host",
    "new_opaque_id",
    "utc_now",
    "validate_survey",
]
