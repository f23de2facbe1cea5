"""Per-study query sets: template instantiation, crawl-order shuffling, URLs."""

from __future__ import annotations

import random
from importlib import resources
from urllib.parse import urlencode

from pydantic import BaseModel, ConfigDict, field_validator

from .model import Condition

DISEASE_PLACEHOLDER = "[disease]"
QUERY_SET_SIZE = 14


class EmptyTerm(ValueError):
    pass


class QueryTemplate(BaseModel):
    model_config = ConfigDict(frozen=True)

    pattern: str

    @field_validator("pattern")
    @classmethod
    def _one_placeholder_at_most(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("empty template")
        if v.count(DISEASE_PLACEHOLDER) > 1:
            raise ValueError("placeholder may appear at most once")
        return v

    @property
    def is_generic(self) -> bool:
        return DISEASE_PLACEHOLDER not in self.pattern

    def instantiate(self, condition: Condition) -> str:
        return self.pattern.replace(DISEASE_PLACEHOLDER, condition.query_token)


class QuerySet(BaseModel):
    model_config = ConfigDict(frozen=True)

    study_id: int = 0
    terms: tuple[str, ...]

    @field_validator("terms")
    @classmethod
    def _well_formed(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        if len(v) != QUERY_SET_SIZE:
            raise ValueError(f"expected {QUERY_SET_SIZE} terms, got {len(v)}")
        if len(set(v)) != len(v):
            raise ValueError("duplicate terms")
        return v


class TemplateFile(BaseModel):
    model_config = ConfigDict(frozen=True)

    version: int
    templates: tuple[QueryTemplate, ...]


def parse_template_file(text: str) -> TemplateFile:
    """Parse the versioned template file: a version line then one pattern per line."""
    version = 1
    templates: list[QueryTemplate] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("version "):
            version = int(line.split(None, 1)[1])
            continue
        templates.append(QueryTemplate(pattern=line))
    return TemplateFile(version=version, templates=tuple(templates))


def load_default_templates() -> TemplateFile:
    text = (
        resources.files("serpaudit.data").joinpath("query_templates.txt").read_text("utf-8")
    )
    return parse_template_file(text)


_DEFAULT_TEMPLATES: TemplateFile | None = None


def default_templates() -> TemplateFile:
    global _DEFAULT_TEMPLATES
    if _DEFAULT_TEMPLATES is None:
        _DEFAULT_TEMPLATES = load_default_templates()
    return _DEFAULT_TEMPLATES


def compose_query_set(
    condition: Condition,
    study_id: int = 0,
    templates: tuple[QueryTemplate, ...] | None = None,
) -> QuerySet:
    """Instantiate the template list for one condition (pure: same input, same set)."""
    if templates is None:
        templates = default_templates().templates
    terms = tuple(t.instantiate(condition) for t in templates)
    return QuerySet(study_id=study_id, terms=terms)


def randomize_order(query_set: QuerySet, seed: int) -> list[str]:
    """Deterministic permutation of the query set for one crawl cycle."""
    terms = list(query_set.terms)
    random.Random(seed).shuffle(terms)
    return terms


def build_search_url(tld: str, term: str) -> str:
    """Search request URL for a term on the configured regional domain.

    Spaces are encoded as '+' in the query component.
    """
    if not term or not term.strip():
        raise EmptyTerm("search term must be nonempty")
    if not tld:
        raise ValueError("tld must be nonempty")
    return f"https://www.google.{tld}/search?{urlencode({'q': term})}"
