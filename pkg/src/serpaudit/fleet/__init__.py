from .planner import (
    MIN_SAME_REGION_SPACING_S,
    STAGGER_WINDOW_S,
    FleetSpec,
    PlannedAgent,
    PlanTooDense,
    load_fleet_spec,
    plan_fleet,
)
from .supervisor import (
    AgentHandle,
    GiveUp,
    HealthLog,
    SupervisionEvent,
    SupervisorPolicy,
    supervise_agent,
)

__all__ = [
    "AgentHandle",
    "FleetSpec",
    "GiveUp",
    "HealthLog",
    "MIN_SAME_REGION_SPACING_S",
    "PlanTooDense",
    "PlannedAgent",
    "STAGGER_WINDOW_S",
    "SupervisionEvent",
    "SupervisorPolicy",
    "load_fleet_spec",
    "plan_fleet",
    "supervise_agent",
]
