"""Deterministic result-page rendering for the mock integrated search engine.

Every rendered page records the content that was placed on it, so extraction
can be checked field-by-field against ground truth.
"""

from __future__ import annotations

import random
from html import escape
from urllib.parse import quote

from pydantic import BaseModel, ConfigDict

from ..model import AdRecord, OrganicResult, TopStory
from ..model.hosts import UNKNOWN_HOST, canonicalize_host
from .auction import AdCandidate, SlotRequest, run_auction
from .pagerank import WebGraph, compute_pagerank


class RenderOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    top_k_results: int = 10
    max_stories: int = 3
    # Probabilities of emitting an ad href as a decodable relay link or as an
    # opaque relay link (remainder: direct link to the advertiser).
    relay_fraction: float = 0.35
    opaque_relay_fraction: float = 0.1


class PlacedContent(BaseModel):
    model_config = ConfigDict(frozen=True)

    ads: tuple[AdRecord, ...]
    results: tuple[OrganicResult, ...]
    stories: tuple[TopStory, ...]


class RenderedSerp(BaseModel):
    model_config = ConfigDict(frozen=True)

    page: str
    placed: PlacedContent


def _ad_href(candidate: AdCandidate, rng: random.Random, options: RenderOptions) -> tuple[str, str]:
    """Pick a link style for an ad; returns (href, expected resolved host)."""
    destination = f"https://{candidate.host}/landing?c={rng.randrange(1 << 30)}"
    style = rng.random()
    if style < options.opaque_relay_fraction:
        href = (
            "https://adclick.g.doubleclick.net/ddm/clk/"
            f"{rng.randrange(1 << 48):012x}"
        )
        return href, UNKNOWN_HOST
    if style < options.opaque_relay_fraction + options.relay_fraction:
        href = (
            "https://www.googleadservices.com/pagead/aclk"
            f"?sa=L&ai={rng.randrange(1 << 48):012x}&adurl={quote(destination, safe='')}"
        )
        return href, canonicalize_host(candidate.host)
    return destination, canonicalize_host(candidate.host)


def _match_count(term: str, page_text: str) -> int:
    haystack = page_text.lower()
    return sum(1 for token in term.lower().split() if token in haystack)


def rank_organic(term: str, graph: WebGraph, scores: dict[str, float], top_k: int) -> list[OrganicResult]:
    ordered = sorted(
        graph.pages,
        key=lambda p: (
            -scores[p.url],
            -_match_count(term, p.title + " " + p.content),
            p.url,
        ),
    )
    return [
        OrganicResult(title=p.title, content=p.content, url=p.url, position=i)
        for i, p in enumerate(ordered[:top_k], 1)
    ]


def render_serp(
    term: str,
    request: SlotRequest,
    candidates: list[AdCandidate] | tuple[AdCandidate, ...],
    graph: WebGraph,
    seed: int,
    stories_pool: tuple[TopStory, ...] = (),
    options: RenderOptions = RenderOptions(),
    scores: dict[str, float] | None = None,
) -> RenderedSerp:
    """Render the page for one request; same inputs and seed give identical bytes."""
    rng = random.Random(seed)
    wins = run_auction(request, candidates)
    if scores is None:
        scores = compute_pagerank(graph) if graph.pages else {}
    organic = rank_organic(term, graph, scores, options.top_k_results)

    placed_ads: list[AdRecord] = []
    ad_markup: list[str] = []
    for win in wins:
        href, resolved = _ad_href(win.winner, rng, options)
        ad = AdRecord(
            name=win.winner.display_url,
            title=win.winner.title,
            url=href,
            content=win.winner.content,
            resolved_host=resolved,
        )
        placed_ads.append(ad)
        ad_markup.append(
            '<div class="ad-unit"><span class="ad-badge">Ad</span>'
            f'<a class="ad-headline" href="{escape(href, quote=True)}">{escape(ad.title)}</a>'
            f'<span class="ad-host">{escape(ad.name)}</span>'
            f'<div class="ad-text">{escape(ad.content)}</div></div>'
        )

    result_markup = [
        '<div class="organic-result">'
        f'<a class="result-link" href="{escape(r.url, quote=True)}">'
        f'<h3 class="result-title">{escape(r.title)}</h3></a>'
        f'<div class="result-snippet">{escape(r.content)}</div></div>'
        for r in organic
    ]

    n_stories = min(rng.randint(0, options.max_stories), len(stories_pool))
    chosen = rng.sample(range(len(stories_pool)), n_stories) if n_stories else []
    placed_stories = [
        TopStory(
            title=stories_pool[idx].title,
            author=stories_pool[idx].author,
            url=stories_pool[idx].url,
            position=i,
        )
        for i, idx in enumerate(chosen, 1)
    ]
    story_markup = [
        '<div class="story-card">'
        f'<a class="story-link" href="{escape(s.url, quote=True)}">'
        f'<div class="story-title">{escape(s.title)}</div></a>'
        f'<span class="story-author">{escape(s.author)}</span></div>'
        for s in placed_stories
    ]

    page = (
        "<!DOCTYPE html>\n"
        f"<html><head><title>{escape(term)} - search</title></head>\n"
        '<body><div id="page">\n'
        f'<form id="search-form"><input name="q" value="{escape(term, quote=True)}"></form>\n'
        f'<div id="ads">{"".join(ad_markup)}</div>\n'
        f'<div id="results">{"".join(result_markup)}</div>\n'
        f'<div id="stories">{"".join(story_markup)}</div>\n'
        "</div></body></html>\n"
    )
    placed = PlacedContent(
        ads=tuple(placed_ads),
        results=tuple(organic),
        stories=tuple(placed_stories),
    )
    return RenderedSerp(page=page, placed=placed)


def render_block_page(kind: str = "captcha") -> str:
    """An interstitial of the sort served to suspicious traffic."""
    if kind == "captcha":
        return (
            "<!DOCTYPE html>\n<html><body>"
            "<p>Our systems have detected unusual traffic from your computer network. "
            "To continue, please complete the captcha below.</p>"
            '<form id="captcha-form"><input name="answer"></form>'
            "</body></html>\n"
        )
    return (
        "<!DOCTYPE html>\n<html><body>"
        "<p>Our systems have detected unusual traffic from your computer network.</p>"
        "</body></html>\n"
    )
