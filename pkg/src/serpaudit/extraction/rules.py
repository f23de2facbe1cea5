"""Versioned extraction rule sets and their text file format.

A rule file maps snapshot fields to selector expressions and carries the
block-page signatures plus the redirect-parameter allowlist, so a single
remotely distributed document controls the whole crawl contract.
"""

from __future__ import annotations

from importlib import resources

from pydantic import BaseModel, ConfigDict, field_validator

from .html_dom import Selector, parse_selector

# Field keys a complete rule set must define. "<list>" keys select the
# repeated containers; dotted keys select within one container. A value may
# end in "@attr" to read an attribute instead of the node text.
REQUIRED_RULE_KEYS = (
    "ads",
    "ads.name",
    "ads.title",
    "ads.url",
    "ads.content",
    "results",
    "results.title",
    "results.content",
    "results.url",
    "stories",
    "stories.title",
    "stories.author",
    "stories.url",
)

DEFAULT_MISMATCH_THRESHOLD = 10_000


def split_rule_value(value: str) -> tuple[str, str | None]:
    """Split "selector [@attr]" into (selector, attr or None)."""
    if " @" in value:
        sel, attr = value.rsplit(" @", 1)
        return sel.strip(), attr.strip()
    return value.strip(), None


class ExtractionRuleSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    version: int
    rules: dict[str, str]
    redirect_param_allowlist: tuple[str, ...] = ()
    block_selectors: tuple[str, ...] = ()
    block_texts: tuple[str, ...] = ()
    mismatch_length_threshold: int = DEFAULT_MISMATCH_THRESHOLD

    @field_validator("version")
    @classmethod
    def _version_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("version must be >= 1")
        return v

    @field_validator("rules")
    @classmethod
    def _selectors_parse(cls, rules: dict[str, str]) -> dict[str, str]:
        for key, value in rules.items():
            sel, _ = split_rule_value(value)
            parse_selector(sel)  # raises SelectorSyntaxError on bad input
        missing = [k for k in REQUIRED_RULE_KEYS if k not in rules]
        if missing:
            raise ValueError(f"rule set misses keys: {missing}")
        return rules

    @field_validator("block_selectors")
    @classmethod
    def _block_selectors_parse(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        for sel in v:
            parse_selector(sel)
        return v

    def selector(self, key: str) -> Selector:
        sel, _ = split_rule_value(self.rules[key])
        return parse_selector(sel)

    def attr_of(self, key: str) -> str | None:
        _, attr = split_rule_value(self.rules[key])
        return attr


def parse_rules_text(text: str) -> ExtractionRuleSet:
    """Parse the rule file format.

    Directives, one per line: ``version N``, ``rule <key> <selector> [@attr]``,
    ``allowparam <name>``, ``block <selector>``, ``blocktext <literal>``,
    ``threshold N``. ``#`` starts a comment.
    """
    version = 1
    rules: dict[str, str] = {}
    allow: list[str] = []
    block_selectors: list[str] = []
    block_texts: list[str] = []
    threshold = DEFAULT_MISMATCH_THRESHOLD
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        directive, _, rest = line.partition(" ")
        rest = rest.strip()
        if directive == "version":
            version = int(rest)
        elif directive == "rule":
            key, _, value = rest.partition(" ")
            if not value.strip():
                raise ValueError(f"line {lineno}: rule without selector")
            rules[key] = value.strip()
        elif directive == "allowparam":
            allow.append(rest)
        elif directive == "block":
            block_selectors.append(rest)
        elif directive == "blocktext":
            block_texts.append(rest)
        elif directive == "threshold":
            threshold = int(rest)
        else:
            raise ValueError(f"line {lineno}: unknown directive {directive!r}")
    return ExtractionRuleSet(
        version=version,
        rules=rules,
        redirect_param_allowlist=tuple(allow),
        block_selectors=tuple(block_selectors),
        block_texts=tuple(block_texts),
        mismatch_length_threshold=threshold,
    )


def render_rules_text(rule_set: ExtractionRuleSet) -> str:
    lines = [f"version {rule_set.version}"]
    lines += [f"rule {key} {value}" for key, value in rule_set.rules.items()]
    lines += [f"allowparam {name}" for name in rule_set.redirect_param_allowlist]
    lines += [f"block {sel}" for sel in rule_set.block_selectors]
    lines += [f"blocktext {text}" for text in rule_set.block_texts]
    lines.append(f"threshold {rule_set.mismatch_length_threshold}")
    return "\n".join(lines) + "\n"


_DEFAULT_RULES: ExtractionRuleSet | None = None


def default_rules() -> ExtractionRuleSet:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        text = (
            resources.files("serpaudit.data").joinpath("default.rules").read_text("utf-8")
        )
        _DEFAULT_RULES = parse_rules_text(text)
    return _DEFAULT_RULES
