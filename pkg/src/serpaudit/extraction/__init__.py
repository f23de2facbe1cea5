from .extractor import (
    RELAY_HOSTS,
    RuleSetMismatch,
    detect_block_page,
    extract_snapshot,
    resolve_ad_destination,
)
from .html_dom import Node, SelectorSyntaxError, parse_html, parse_selector, select
from .rules import (
    DEFAULT_MISMATCH_THRESHOLD,
    ExtractionRuleSet,
    default_rules,
    parse_rules_text,
    render_rules_text,
)

__all__ = [
    "DEFAULT_MISMATCH_THRESHOLD",
    "ExtractionRuleSet",
    "Node",
    "RELAY_HOSTS",
    "RuleSetMismatch",
    "SelectorSyntaxError",
    "default_rules",
    "detect_block_page",
    "extract_snapshot",
    "parse_html",
    "parse_rules_text",
    "parse_selector",
    "render_rules_text",
    "resolve_ad_destination",
    "select",
]
