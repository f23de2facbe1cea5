"""Link-based page scoring over the synthetic web graph.

Implements the classic non-normalized recurrence
``score(A) = (1 - d) + d * sum(score(T) / out_degree(T))`` over A's
in-neighbors, iterated to a fixed point. Pages without outgoing links
contribute nothing to others, exactly as the recurrence reads.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class WebPage(BaseModel):
    model_config = ConfigDict(frozen=True)

    url: str
    title: str = ""
    content: str = ""


class WebGraph(BaseModel):
    model_config = ConfigDict(frozen=True)

    pages: tuple[WebPage, ...]
    links: tuple[tuple[str, str], ...] = ()
    damping: float = 0.85
    tolerance: float = 1e-10
    max_iterations: int = 500

    @field_validator("damping")
    @classmethod
    def _damping_open_unit(cls, v: float) -> float:
        if not (0 < v < 1):
            raise ValueError("damping must be in (0, 1)")
        return v

    @field_validator("tolerance")
    @classmethod
    def _tolerance_positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("tolerance must be positive")
        return v

    @model_validator(mode="after")
    def _links_reference_pages(self) -> "WebGraph":
        urls = {p.url for p in self.pages}
        if len(urls) != len(self.pages):
            raise ValueError("duplicate page urls")
        for src, dst in self.links:
            if src not in urls or dst not in urls:
                raise ValueError(f"link endpoint not in graph: {src} -> {dst}")
        return self


class NonConvergence(RuntimeError):
    pass


def compute_pagerank(graph: WebGraph) -> dict[str, float]:
    """Fixed-point iterate until the largest per-node change drops below
    tolerance; raises NonConvergence when the iteration budget runs out."""
    d = graph.damping
    out_degree: dict[str, int] = {p.url: 0 for p in graph.pages}
    incoming: dict[str, list[str]] = {p.url: [] for p in graph.pages}
    for src, dst in graph.links:
        out_degree[src] += 1
        incoming[dst].append(src)

    scores = {p.url: 1.0 for p in graph.pages}
    for _ in range(graph.max_iterations):
        new_scores = {
            url: (1.0 - d)
            + d * sum(scores[src] / out_degree[src] for src in incoming[url])
            for url in scores
        }
        delta = max(
            (abs(new_scores[url] - scores[url]) for url in scores), default=0.0
        )
        scores = new_scores
        if delta < graph.tolerance:
            return scores
    raise NonConvergence(
        f"no fixed point within {graph.max_iterations} iterations"
    )
