from .client import ConfigUpdate, RegistrationResult, ServerClient, ServerError
from .queue import SubmissionQueue
from .runner import (
    AgentConfig,
    CollectorAgent,
    EmptySnapshots,
    FetchError,
    Fetcher,
    HttpFetcher,
    MockServiceFetcher,
    PreconditionViolation,
    RunStats,
    TargetMode,
    apply_config_update,
    package_submission,
    run_cycle,
)
from .schedule import FIRE_HOURS, fire_instant_utc, next_fire_time

__all__ = [
    "AgentConfig",
    "CollectorAgent",
    "ConfigUpdate",
    "EmptySnapshots",
    "FIRE_HOURS",
    "FetchError",
    "Fetcher",
    "HttpFetcher",
    "MockServiceFetcher",
    "PreconditionViolation",
    "RegistrationResult",
    "RunStats",
    "ServerClient",
    "ServerError",
    "SubmissionQueue",
    "TargetMode",
    "apply_config_update",
    "fire_instant_utc",
    "next_fire_time",
    "package_submission",
    "run_cycle",
]
