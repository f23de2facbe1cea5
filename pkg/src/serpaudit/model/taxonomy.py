"""Host label taxonomy: categories, problematicity tiers, and the critical flag."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, model_validator


class Tier(str, Enum):
    MOST_PROBLEMATIC = "most problematic"
    QUITE_PROBLEMATIC = "quite problematic"
    POTENTIALLY_PROBLEMATIC = "potentially problematic"
    NEUTRAL = "neutral"
    NOT_TO_DETERMINE = "not to determine"
    POSSIBLY_DRUGS = "possibly drugs"


class Category(str, Enum):
    COMMERCIAL_CLINIC = "commercial clinic"
    CLINICAL_TRIALS_PRIVATE = "clinical trials - private"
    CLINICAL_TRIALS_COMMERCIAL = "clinical trials - commercial"
    COMPLEMENTARY_TREATMENT_COMMERCIAL = "complementary treatment - commercial"
    BLOOD_BANKING_COMMERCIAL = "blood banking - commercial"
    HEALTH_NEWS_COMMERCIAL = "health news - commercial"
    POLITICAL_LOBBY_ORGANIZATION = "political lobby organization"
    PHARMACEUTICAL_COMPANY = "pharmaceutical company"
    COMMERCIAL_NON_HEALTH_SPECIFIC = "commercial non-health specific"
    CONFERENCE_COMMERCIAL = "conference - commercial"
    BIOPHARMA_SUPPLIES = "biopharma supplies"
    HEALTH_NEWS_PUBLIC = "health news - public"
    RESEARCH_INSTITUTE = "research institute"
    BLOOD_BANKING_PUBLIC = "blood banking - public"
    CLINICAL_TRIALS_PUBLIC = "clinical trials - public"
    CONFERENCE_PUBLIC = "conference - public"
    GOVERNMENTAL = "governmental"
    HEALTHCARE_PROVIDER_INSTITUTION = "healthcare provider - institution"
    NON_PROFIT_HEALTH_ORGANIZATION = "non-profit health organization"
    PATIENT_GROUPS = "patient groups"
    SOCIAL = "social"
    CROWDFUNDING = "crowdfunding"
    OTHER = "other"
    NEWS = "news"
    UNKNOWN = "unknown"
    NEEDS_REVIEW = "needs review"


CATEGORY_TIER: dict[Category, Tier] = {
    Category.COMMERCIAL_CLINIC: Tier.MOST_PROBLEMATIC,
    Category.CLINICAL_TRIALS_PRIVATE: Tier.QUITE_PROBLEMATIC,
    Category.CLINICAL_TRIALS_COMMERCIAL: Tier.QUITE_PROBLEMATIC,
    Category.COMPLEMENTARY_TREATMENT_COMMERCIAL: Tier.QUITE_PROBLEMATIC,
    Category.BLOOD_BANKING_COMMERCIAL: Tier.QUITE_PROBLEMATIC,
    Category.HEALTH_NEWS_COMMERCIAL: Tier.QUITE_PROBLEMATIC,
    Category.POLITICAL_LOBBY_ORGANIZATION: Tier.POTENTIALLY_PROBLEMATIC,
    Category.PHARMACEUTICAL_COMPANY: Tier.POTENTIALLY_PROBLEMATIC,
    Category.COMMERCIAL_NON_HEALTH_SPECIFIC: Tier.POTENTIALLY_PROBLEMATIC,
    Category.CONFERENCE_COMMERCIAL: Tier.POTENTIALLY_PROBLEMATIC,
    Category.BIOPHARMA_SUPPLIES: Tier.POTENTIALLY_PROBLEMATIC,
    Category.HEALTH_NEWS_PUBLIC: Tier.NEUTRAL,
    Category.RESEARCH_INSTITUTE: Tier.NEUTRAL,
    Category.BLOOD_BANKING_PUBLIC: Tier.NEUTRAL,
    Category.CLINICAL_TRIALS_PUBLIC: Tier.NEUTRAL,
    Category.CONFERENCE_PUBLIC: Tier.NEUTRAL,
    Category.GOVERNMENTAL: Tier.NEUTRAL,
    Category.HEALTHCARE_PROVIDER_INSTITUTION: Tier.NEUTRAL,
    Category.NON_PROFIT_HEALTH_ORGANIZATION: Tier.NEUTRAL,
    Category.PATIENT_GROUPS: Tier.NEUTRAL,
    Category.SOCIAL: Tier.NEUTRAL,
    Category.CROWDFUNDING: Tier.NEUTRAL,
    Category.OTHER: Tier.NEUTRAL,
    Category.NEWS: Tier.NEUTRAL,
    Category.UNKNOWN: Tier.NOT_TO_DETERMINE,
    Category.NEEDS_REVIEW: Tier.POSSIBLY_DRUGS,
}


class HostLabelEntry(BaseModel):
    """One row of the host taxonomy: canonical host, category, critical flag.

    The tier is fully determined by the category; it may be omitted on input
    and is rejected if inconsistent.
    """

    model_config = ConfigDict(frozen=True)

    host: str
    category: Category
    tier: Tier = None  # type: ignore[assignment]  # filled by validator
    critical: bool = False

    @model_validator(mode="before")
    @classmethod
    def _fill_tier(cls, data):
        if isinstance(data, dict) and data.get("tier") is None:
            category = data.get("category")
            if category is not None:
                data = dict(data)
                data["tier"] = CATEGORY_TIER[Category(category)]
        return data

    @model_validator(mode="after")
    def _tier_matches_category(self) -> "HostLabelEntry":
        expected = CATEGORY_TIER[self.category]
        if self.tier is not expected:
            raise ValueError(
                f"tier {self.tier!r} inconsistent with category {self.category.value!r}"
            )
        return self
