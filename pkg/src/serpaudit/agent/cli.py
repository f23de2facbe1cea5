"""Agent CLI: register a participant profile and run the crawl loop.

The CLI is a thin client: all policy lives in the server and the runner.
"""

from __future__ import annotations

import json
import sys
from datetime import timedelta
from pathlib import Path
import click

from ..clock import SystemClock
from ..model import ClientKind, Region
from .client import ServerClient
from .runner import AgentConfig, CollectorAgent, HttpFetcher, TargetMode

_REGION_FLAGS = {"au": Region.AUSTRALIA, "ca": Region.CANADA,
                 "uk": Region.UNITED_KINGDOM, "us": Region.UNITED_STATES}


def _load_or_new_config(profile: Path, **overrides) -> AgentConfig:
    config_path = profile / "config.json"
    if config_path.exists():
        config = AgentConfig.model_validate_json(config_path.read_text("utf-8"))
        return config.model_copy(update=overrides) if overrides else config
    return AgentConfig(**overrides)


@click.group(name="agent")
def agent() -> None:
    """Headless collector agent."""


@agent.command()
@click.option("--server", "server_url", required=True)
@click.option("--survey", "survey_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--profile", "profile_dir", required=True, type=click.Path(path_type=Path))
@click.option("--kind", type=click.Choice(["donor", "baseline"]), default="baseline", show_default=True)
@click.option("--language", default="en", show_default=True)
@click.option("--region", type=click.Choice(sorted(_REGION_FLAGS)), default="us", show_default=True)
@click.option("--consent/--no-consent", default=True)
def register(server_url, survey_path, profile_dir, kind, language, region, consent) -> None:
    """Register against the collection server and persist the profile."""
    survey_raw = json.loads(Path(survey_path).read_text("utf-8"))
    profile = Path(profile_dir)
    config = _load_or_new_config(
        profile,
        server_url=server_url,
        region=_REGION_FLAGS[region],
        client_kind=ClientKind(kind),
        ui_language=language,
    )
    api = ServerClient(server_url)
    collector = CollectorAgent(config, SystemClock(), lambda url: "", api, profile)
    result = collector.register(survey_raw, consent=consent)
    click.echo(
        f"registered participant {result.participant_id} in study {result.study_id}"
        f" ({len(result.terms)} terms)"
    )


@agent.command()
@click.option("--server", "server_url", required=True)
@click.option("--region", type=click.Choice(sorted(_REGION_FLAGS)), default=None)
@click.option("--mode", type=click.Choice(["mock", "live"]), default="mock", show_default=True)
@click.option("--profile", "profile_dir", required=True, type=click.Path(path_type=Path))
@click.option("--retain-raw", is_flag=True, default=False)
@click.option("--mock-url", default=None, help="Base URL of the mock engine (mock mode).")
@click.option("--survey", "survey_path", type=click.Path(exists=True, path_type=Path), default=None,
              help="Auto-register with this survey if the profile is new.")
@click.option("--stagger-s", type=float, default=0.0,
              help="Offset applied to every scheduled fire (fleet staggering).")
@click.option("--duration-s", type=float, default=86400.0, show_default=True)
@click.option("--tz-offset-minutes", type=int, default=0)
@click.option("--startup-delay-s", type=float, default=30.0, show_default=True,
              help="Delay before the startup cycle.")
@click.option("--query-delay-min-s", type=float, default=2.0, show_default=True)
@click.option("--query-delay-max-s", type=float, default=5.0, show_default=True)
def run(server_url, region, mode, profile_dir, retain_raw, mock_url, survey_path,
        stagger_s, duration_s, tz_offset_minutes, startup_delay_s,
        query_delay_min_s, query_delay_max_s) -> None:
    """Run the crawl schedule until the duration elapses."""
    profile = Path(profile_dir)
    overrides: dict = {
        "server_url": server_url,
        "target_mode": TargetMode(mode),
        "retention": retain_raw,
        "tz_offset_minutes": tz_offset_minutes,
        "startup_delay_s": startup_delay_s,
        "min_query_delay_s": query_delay_min_s,
        "max_query_delay_s": query_delay_max_s,
        "stagger_offset_s": stagger_s,
    }
    if region:
        overrides["region"] = _REGION_FLAGS[region]
    if mock_url:
        overrides["mock_url"] = mock_url
    config = _load_or_new_config(profile, **overrides)
    if config.target_mode is TargetMode.MOCK and not config.mock_url:
        raise click.UsageError("--mock-url is required in mock mode")

    clock = SystemClock()
    fetcher = HttpFetcher(
        mock_url=config.mock_url if config.target_mode is TargetMode.MOCK else None,
        signals=config.mock_signals,
    )
    api = ServerClient(server_url)
    collector = CollectorAgent(config, clock, fetcher, api, profile)
    if not config.registered:
        if survey_path is None:
            raise click.UsageError("profile is not registered; pass --survey")
        survey_raw = json.loads(Path(survey_path).read_text("utf-8"))
        result = collector.register(survey_raw)
        click.echo(f"registered as {result.participant_id} (study {result.study_id})")
    until = clock.now_utc() + timedelta(seconds=duration_s)
    stats = collector.run_until(until)
    click.echo(
        f"cycles: {stats.startup_cycles} startup / {stats.scheduled_cycles} scheduled,"
        f" delivered {stats.delivered}, errors {stats.cycle_errors}"
    )


def main() -> None:  # console entry
    agent(sys.argv[1:])


if __name__ == "__main__":
    main()
