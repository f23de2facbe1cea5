from .auction import AdCandidate, AuctionWin, SlotRequest, run_auction, targeted_candidate_filter
from .pagerank import NonConvergence, WebGraph, WebPage, compute_pagerank
from .render import (
    PlacedContent,
    RenderedSerp,
    RenderOptions,
    rank_organic,
    render_block_page,
    render_serp,
)
from .service import (
    IseOptions,
    SerpService,
    create_app,
    derive_request_seed,
    load_inventory,
    load_webgraph,
)

__all__ = [
    "AdCandidate",
    "AuctionWin",
    "IseOptions",
    "NonConvergence",
    "PlacedContent",
    "RenderOptions",
    "RenderedSerp",
    "SerpService",
    "SlotRequest",
    "WebGraph",
    "WebPage",
    "compute_pagerank",
    "create_app",
    "derive_request_seed",
    "load_inventory",
    "load_webgraph",
    "rank_organic",
    "render_block_page",
    "render_serp",
    "run_auction",
    "targeted_candidate_filter",
]
