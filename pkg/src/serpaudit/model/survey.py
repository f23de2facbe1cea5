"""Validation of raw survey answers into a typed SurveyResponse."""

from __future__ import annotations

from typing import Any, Mapping

from pydantic import BaseModel, ConfigDict

from .types import (
    AgeBand,
    Gender,
    ImpactStatus,
    Region,
    SurveyResponse,
    UsageFrequency,
)

NOT_SAID_ANSWERS = {"prefer not to say", "not_said", "not said"}

_IMPACT_ALIASES = {
    "i'm a patient.": "patient",
    "i'm a patient": "patient",
    "i'm a carer.": "carer",
    "i'm a carer": "carer",
}
_REGION_ALIASES = {
    "australia": "au",
    "canada": "ca",
    "united kingdom": "uk",
    "united states of america": "us",
    "united states": "us",
}
_GENDER_ALIASES = {"prefer not to say": "not_said"}
_FREQUENCY_ALIASES = {
    "daily (more than 2 times a day)": "daily_gt2",
    "daily (less than 2 times a day)": "daily_le2",
}
_BOOL_VALUES = {
    "yes": True,
    "true": True,
    "1": True,
    "no": False,
    "false": False,
    "0": False,
}


class FieldError(BaseModel):
    model_config = ConfigDict(frozen=True)

    field: str
    reason: str  # "missing" or "invalid_choice"
    value: str | None = None


class SurveyValidationError(ValueError):
    def __init__(self, errors: list[FieldError]):
        self.errors = errors
        detail = "; ".join(
            f"{e.field}: {e.reason}" + (f" ({e.value})" if e.value else "")
            for e in errors
        )
        super().__init__(f"invalid survey: {detail}")


def _norm(value: Any) -> str:
    return str(value).strip().lower()


def _parse_choice(raw: Any, enum_cls, aliases: Mapping[str, str]):
    text = _norm(raw)
    text = aliases.get(text, text)
    return enum_cls(text)


def _parse_bool(raw: Any) -> bool:
    if isinstance(raw, bool):
        return raw
    value = _BOOL_VALUES.get(_norm(raw))
    if value is None:
        raise ValueError(raw)
    return value


_PARSERS = {
    "pd_status": lambda v: _parse_choice(v, ImpactStatus, _IMPACT_ALIASES),
    "ms_status": lambda v: _parse_choice(v, ImpactStatus, _IMPACT_ALIASES),
    "db_status": lambda v: _parse_choice(v, ImpactStatus, _IMPACT_ALIASES),
    "researcher": _parse_bool,
    "residence": lambda v: _parse_choice(v, Region, _REGION_ALIASES),
    "age_band": lambda v: _parse_choice(v, AgeBand, {}),
    "gender": lambda v: _parse_choice(v, Gender, _GENDER_ALIASES),
    "device_use": lambda v: _parse_choice(v, UsageFrequency, _FREQUENCY_ALIASES),
    "search_use": lambda v: _parse_choice(v, UsageFrequency, _FREQUENCY_ALIASES),
    "paid_or_inquired_sct": _parse_bool,
}


def validate_survey(raw: Mapping[str, Any]) -> SurveyResponse:
    """Validate a raw key/value survey form.

    Raises SurveyValidationError collecting every missing field and invalid
    choice rather than stopping at the first problem.
    """
    errors: list[FieldError] = []
    values: dict[str, Any] = {}

    for field, parser in _PARSERS.items():
        if field not in raw or raw[field] is None or str(raw[field]).strip() == "":
            errors.append(FieldError(field=field, reason="missing"))
            continue
        try:
            values[field] = parser(raw[field])
        except ValueError:
            errors.append(
                FieldError(field=field, reason="invalid_choice", value=str(raw[field]))
            )

    city_raw = raw.get("city")
    city_text = "" if city_raw is None else str(city_raw).strip()
    if city_text and _norm(city_text) not in NOT_SAID_ANSWERS:
        values["city"] = city_text
    elif _norm(city_text) in NOT_SAID_ANSWERS or _parse_opt_flag(raw.get("city_not_said")):
        values["city"] = None
    else:
        errors.append(FieldError(field="city", reason="missing"))

    if errors:
        raise SurveyValidationError(errors)
    return SurveyResponse(**values)


def _parse_opt_flag(raw: Any) -> bool:
    if raw is None:
        return False
    try:
        return _parse_bool(raw)
    except ValueError:
        return False
