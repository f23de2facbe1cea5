"""Fleet planning: region allocation, clean profiles, schedule staggering."""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, field_validator

from ..model import Region

STAGGER_WINDOW_S = 15 * 60
# Two agents in the same region must never fire within a minute of each other.
MIN_SAME_REGION_SPACING_S = 61
_REGION_BASE_OFFSET_S = 7


class FleetSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    counts: dict[Region, int]
    extras: tuple[Region, ...] = ()

    @field_validator("counts")
    @classmethod
    def _nonnegative(cls, v: dict[Region, int]) -> dict[Region, int]:
        if any(n < 0 for n in v.values()):
            raise ValueError("agent counts must be >= 0")
        return v


class PlannedAgent(BaseModel):
    model_config = ConfigDict(frozen=True)

    agent_id: str
    region: Region
    stagger_offset_s: int
    profile_dir: str


class PlanTooDense(ValueError):
    pass


def load_fleet_spec(path: str | Path) -> FleetSpec:
    data = json.loads(Path(path).read_text("utf-8"))
    counts = {Region(k): v for k, v in data.get("counts", {}).items()}
    extras = tuple(Region(r) for r in data.get("extras", []))
    return FleetSpec(counts=counts, extras=extras)


def plan_fleet(spec: FleetSpec) -> list[PlannedAgent]:
    """One config per agent: region tld, a fresh profile directory name, and a
    stagger offset in [0, 15) minutes, pairwise distinct, with same-region
    offsets at least a minute apart."""
    per_region: dict[Region, int] = dict(spec.counts)
    for region in spec.extras:
        per_region[region] = per_region.get(region, 0) + 1

    agents: list[PlannedAgent] = []
    region_order = [r for r in Region if per_region.get(r, 0) > 0]
    for region_index, region in enumerate(region_order):
        base = region_index * _REGION_BASE_OFFSET_S
        for i in range(per_region[region]):
            offset = base + i * MIN_SAME_REGION_SPACING_S
            if offset >= STAGGER_WINDOW_S:
                raise PlanTooDense(
                    f"{per_region[region]} agents in {region.value} exceed the stagger window"
                )
            index = len(agents)
            agents.append(
                PlannedAgent(
                    agent_id=f"{region.value}-{i:02d}",
                    region=region,
                    stagger_offset_s=offset,
                    profile_dir=f"profiles/{region.value}-{i:02d}",
                )
            )
    return agents
