"""SERP extraction: page string -> SerpSnapshot, plus ad destination resolution."""

from __future__ import annotations

from datetime import datetime
from typing import Sequence
from urllib.parse import parse_qs, urlsplit

from ..model import AdRecord, OrganicResult, SerpSnapshot, TopStory, canonicalize_host
from ..model.hosts import UNKNOWN_HOST
from .html_dom import Node, parse_html, parse_selector, select, select_first
from .rules import ExtractionRuleSet

# Hosts acting as click-tracking relays whose hrefs hide the real destination.
RELAY_HOSTS = frozenset(
    {
        "googleadservices.com",
        "doubleclick.net",
        "googlesyndication.com",
        "adclick.g.doubleclick.net",
        "clickserve.dartsearch.net",
    }
)


class RuleSetMismatch(Exception):
    """Selector drift signal: a substantial page yielded zero containers.

    Carries the degraded (empty) snapshot so callers can keep the entry with
    an error annotation instead of losing the crawl.
    """

    def __init__(self, snapshot: SerpSnapshot):
        super().__init__(
            "no extraction container matched a non-trivial page; "
            "rule set likely out of date"
        )
        self.snapshot = snapshot


def _is_relay_host(host: str) -> bool:
    return any(host == relay or host.endswith("." + relay) for relay in RELAY_HOSTS)


def resolve_ad_destination(href: str, allowlist: Sequence[str]) -> str:
    """Best-effort canonical landing host for an ad link.

    Relay links are unwrapped through allowlisted query parameters carrying an
    embedded URL; undecodable relays resolve to "unknown". Total function.
    """
    if not href:
        return UNKNOWN_HOST
    host = canonicalize_host(href)
    if host == UNKNOWN_HOST:
        return UNKNOWN_HOST
    if not _is_relay_host(host):
        return host
    try:
        params = parse_qs(urlsplit(href).query, keep_blank_values=False)
    except ValueError:
        return UNKNOWN_HOST
    for name in allowlist:
        for value in params.get(name, ()):
            embedded = canonicalize_host(value)
            if embedded != UNKNOWN_HOST and not _is_relay_host(embedded):
                return embedded
    return UNKNOWN_HOST


def detect_block_page(page: str, rules: ExtractionRuleSet) -> bool:
    """True iff the page matches a configured block signature."""
    if not page:
        return False
    for text in rules.block_texts:
        if text in page:
            return True
    if rules.block_selectors:
        root = parse_html(page)
        for sel in rules.block_selectors:
            if select_first(root, parse_selector(sel)):
                return True
    return False


def _field_text(container: Node, rules: ExtractionRuleSet, key: str) -> str:
    node = select_first(container, rules.selector(key))
    if node is None:
        return ""
    attr = rules.attr_of(key)
    if attr is not None:
        return node.attrs.get(attr, "")
    return node.text()


def _extract_ads(root: Node, rules: ExtractionRuleSet) -> tuple[list[AdRecord], int]:
    containers = select(root, rules.selector("ads"))
    ads: list[AdRecord] = []
    for container in containers:
        name = _field_text(container, rules, "ads.name")
        url = _field_text(container, rules, "ads.url")
        if not name and not url:
            continue  # degraded block: nothing identifies the advertiser
        ads.append(
            AdRecord(
                name=name,
                title=_field_text(container, rules, "ads.title"),
                url=url,
                content=_field_text(container, rules, "ads.content"),
                resolved_host=resolve_ad_destination(url, rules.redirect_param_allowlist),
            )
        )
    return ads, len(containers)


def _extract_results(root: Node, rules: ExtractionRuleSet) -> tuple[list[OrganicResult], int]:
    containers = select(root, rules.selector("results"))
    results = [
        OrganicResult(
            title=_field_text(c, rules, "results.title"),
            content=_field_text(c, rules, "results.content"),
            url=_field_text(c, rules, "results.url"),
            position=i,
        )
        for i, c in enumerate(containers, 1)
    ]
    return results, len(containers)


def _extract_stories(root: Node, rules: ExtractionRuleSet) -> tuple[list[TopStory], int]:
    containers = select(root, rules.selector("stories"))
    stories = [
        TopStory(
            title=_field_text(c, rules, "stories.title"),
            author=_field_text(c, rules, "stories.author"),
            url=_field_text(c, rules, "stories.url"),
            position=i,
        )
        for i, c in enumerate(containers, 1)
    ]
    return stories, len(containers)


def extract_snapshot(
    page: str,
    rules: ExtractionRuleSet,
    query: str,
    tld: str,
    now: datetime,
    retain_raw: bool = False,
) -> SerpSnapshot:
    """Parse a result-page document into a snapshot.

    Never raises on malformed markup; the only error channel is
    RuleSetMismatch, raised when a substantial page matches no container and
    no block signature (selector drift).
    """
    raw = page if retain_raw else None
    if detect_block_page(page, rules):
        return SerpSnapshot(
            query=query, tld=tld, fetched_at=now, blocked=True, raw_page=raw
        )
    root = parse_html(page)
    ads, n_ads = _extract_ads(root, rules)
    results, n_results = _extract_results(root, rules)
    stories, n_stories = _extract_stories(root, rules)
    snapshot = SerpSnapshot(
        query=query,
        tld=tld,
        fetched_at=now,
        ads=tuple(ads),
        results=tuple(results),
        top_stories=tuple(stories),
        blocked=False,
        raw_page=raw,
    )
    if (
        n_ads == 0
        and n_results == 0
        and n_stories == 0
        and len(page) > rules.mismatch_length_threshold
    ):
        raise RuleSetMismatch(snapshot)
    return snapshot
