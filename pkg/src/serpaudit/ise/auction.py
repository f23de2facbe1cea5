"""Generalized second-price ad auction with quality-weighted ranking.

Each candidate's rank score is bid x quality. Candidates below the rank
threshold or not beating the reserve are rejected; winners pay the minimum
amount that holds their position (the next candidate's rank score divided by
their own quality), floored at the reserve.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, field_validator

from ..model import Condition


class AdCandidate(BaseModel):
    model_config = ConfigDict(frozen=True)

    host: str
    title: str
    content: str
    display_url: str
    bid: float
    quality: float
    targeting: frozenset[Condition] = frozenset()

    @field_validator("bid")
    @classmethod
    def _bid_positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("bid must be positive")
        return v

    @field_validator("quality")
    @classmethod
    def _quality_in_unit(cls, v: float) -> float:
        if not (0 < v <= 1):
            raise ValueError("quality must be in (0, 1]")
        return v

    @property
    def rank_score(self) -> float:
        return self.bid * self.quality


class SlotRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    term: str
    reserve_price: float = 0.0
    adrank_threshold: float = 0.0
    slot_count: int = 1
    user_signals: frozenset[Condition] = frozenset()

    @field_validator("reserve_price", "adrank_threshold")
    @classmethod
    def _nonnegative(cls, v: float) -> float:
        if v < 0:
            raise ValueError("price floors must be nonnegative")
        return v

    @field_validator("slot_count")
    @classmethod
    def _at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("slot_count must be >= 1")
        return v


class AuctionWin(BaseModel):
    model_config = ConfigDict(frozen=True)

    winner: AdCandidate
    position: int
    price: float


def targeted_candidate_filter(
    candidates: list[AdCandidate] | tuple[AdCandidate, ...],
    user_signals: frozenset[Condition] | set[Condition],
) -> list[AdCandidate]:
    """Drop targeted candidates whose audience does not include the request."""
    signals = frozenset(user_signals)
    return [c for c in candidates if not c.targeting or c.targeting & signals]


def run_auction(
    request: SlotRequest,
    candidates: list[AdCandidate] | tuple[AdCandidate, ...],
) -> list[AuctionWin]:
    """Sell up to ``slot_count`` slots; losing everyone is a valid outcome."""
    eligible = [
        c
        for c in candidates
        if c.rank_score >= request.adrank_threshold and c.bid > request.reserve_price
    ]
    eligible.sort(key=lambda c: (-c.rank_score, c.host))
    winners = eligible[: request.slot_count]
    wins: list[AuctionWin] = []
    for i, candidate in enumerate(winners):
        if i + 1 < len(eligible):
            price = max(
                request.reserve_price, eligible[i + 1].rank_score / candidate.quality
            )
        else:
            price = request.reserve_price
        wins.append(AuctionWin(winner=candidate, position=i + 1, price=price))
    return wins
