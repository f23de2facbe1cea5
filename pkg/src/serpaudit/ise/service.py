"""The mock integrated search engine as a service.

Stateless request handling over an immutable inventory/graph snapshot: each
request derives its own RNG stream from the master seed and a request index,
so a fresh service instance replays identically. Per-request candidate
participation jitter makes ad delivery a random variable, which the targeting
drill needs.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import threading
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from ..model import Condition, TopStory
from .auction import AdCandidate, SlotRequest, targeted_candidate_filter
from .pagerank import WebGraph, WebPage, compute_pagerank
from .render import RenderedSerp, RenderOptions, render_serp


class IseOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    slot_count: int = 4
    reserve_price: float = 0.1
    adrank_threshold: float = 0.0
    participation_rate: float = 1.0
    targeting_enabled: bool = True
    render: RenderOptions = RenderOptions()


def derive_request_seed(master_seed: int, index: int) -> int:
    digest = hashlib.blake2b(
        f"{master_seed}:{index}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


class SerpService:
    def __init__(
        self,
        inventory: tuple[AdCandidate, ...],
        graph: WebGraph,
        stories_pool: tuple[TopStory, ...] = (),
        options: IseOptions = IseOptions(),
        seed: int = 0,
    ):
        self.inventory = tuple(inventory)
        self.graph = graph
        self.stories_pool = tuple(stories_pool)
        self.options = options
        self.seed = seed
        self._scores = compute_pagerank(graph) if graph.pages else {}
        self._counter = itertools.count()
        self._lock = threading.Lock()

    def _next_index(self) -> int:
        with self._lock:
            return next(self._counter)

    def serve(
        self,
        term: str,
        signals: frozenset[Condition] | set[Condition] = frozenset(),
        request_seed: int | None = None,
    ) -> RenderedSerp:
        if request_seed is None:
            request_seed = derive_request_seed(self.seed, self._next_index())
        rng = random.Random(request_seed)
        rate = self.options.participation_rate
        candidates = [
            c for c in self.inventory if rate >= 1.0 or rng.random() < rate
        ]
        if self.options.targeting_enabled:
            candidates = targeted_candidate_filter(candidates, signals)
        request = SlotRequest(
            term=term,
            reserve_price=self.options.reserve_price,
            adrank_threshold=self.options.adrank_threshold,
            slot_count=self.options.slot_count,
            user_signals=frozenset(signals),
        )
        return render_serp(
            term,
            request,
            candidates,
            self.graph,
            seed=request_seed,
            stories_pool=self.stories_pool,
            options=self.options.render,
            scores=self._scores,
        )


def load_inventory(path: str | Path) -> tuple[tuple[AdCandidate, ...], tuple[TopStory, ...]]:
    """Read the versioned inventory config: ad candidates plus the story pool."""
    data = json.loads(Path(path).read_text("utf-8"))
    candidates = tuple(AdCandidate(**c) for c in data["candidates"])
    stories = tuple(
        TopStory(position=i, **s) for i, s in enumerate(data.get("stories", []), 1)
    )
    return candidates, stories


def load_webgraph(path: str | Path) -> WebGraph:
    data = json.loads(Path(path).read_text("utf-8"))
    return WebGraph(
        pages=tuple(WebPage(**p) for p in data["nodes"]),
        links=tuple((src, dst) for src, dst in data.get("links", [])),
        damping=data.get("damping", 0.85),
        tolerance=data.get("tolerance", 1e-10),
        max_iterations=data.get("max_iterations", 500),
    )


def create_app(service: SerpService):
    """HTTP face of the mock engine: GET /search?q=...&signals=pd,ms&seed=N."""
    from fastapi import FastAPI, HTTPException, Query
    from fastapi.responses import HTMLResponse

    app = FastAPI(title="mock integrated search engine")
    app.state.service = service

    @app.get("/search", response_class=HTMLResponse)
    def search(
        q: str = Query(..., min_length=1),
        signals: str = "",
        seed: int | None = None,
    ) -> str:
        try:
            parsed = frozenset(
                Condition(s) for s in signals.split(",") if s.strip()
            )
        except ValueError:
            raise HTTPException(status_code=422, detail="unknown signal")
        return service.serve(q, parsed, request_seed=seed).page

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "inventory": len(service.inventory),
            "pages": len(service.graph.pages),
        }

    return app
