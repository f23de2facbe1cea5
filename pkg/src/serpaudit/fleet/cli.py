"""Fleet CLI: plan baseline fleets and run them as supervised subprocesses."""

from __future__ import annotations

import json
import subprocess
import sys
import threading
from datetime import timedelta
from pathlib import Path
from typing import Optional

import click
import psutil

from ..clock import SystemClock
from .planner import PlannedAgent, load_fleet_spec, plan_fleet
from .supervisor import GiveUp, HealthLog, SupervisorPolicy, supervise_agent


class SubprocessAgentHandle:
    """Runs `agent run ...` as a child process."""

    def __init__(self, argv: list[str], workdir: Path):
        self.argv = argv
        self.workdir = workdir
        self._proc: Optional[subprocess.Popen] = None

    def start(self) -> None:
        self.workdir.mkdir(parents=True, exist_ok=True)
        self._proc = subprocess.Popen(self.argv, cwd=self.workdir)

    def poll(self) -> Optional[int]:
        return self._proc.poll() if self._proc else -1

    def terminate(self) -> None:
        if self._proc and self._proc.poll() is None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def memory_bytes(self) -> int:
        if not self._proc or self._proc.poll() is not None:
            return 0
        try:
            return psutil.Process(self._proc.pid).memory_info().rss
        except psutil.Error:
            return 0

    def busy(self) -> bool:
        return False  # cycle boundaries are not observable across processes


@click.group(name="fleet")
def fleet() -> None:
    """Plan and supervise a fleet of baseline collector agents."""


@fleet.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", default=None, type=click.Path(path_type=Path))
def plan(spec_path: Path, out_path: Optional[Path]) -> None:
    """Turn a region->count spec file into a fleet plan."""
    agents = plan_fleet(load_fleet_spec(spec_path))
    payload = json.dumps(
        {"agents": [json.loads(a.model_dump_json()) for a in agents]}, indent=2
    )
    if out_path:
        out_path.write_text(payload + "\n", "utf-8")
        click.echo(f"{len(agents)} agents planned -> {out_path}")
    else:
        click.echo(payload)


@fleet.command()
@click.option("--plan", "plan_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--server", "server_url", required=True)
@click.option("--mode", type=click.Choice(["mock", "live"]), default="mock", show_default=True)
@click.option("--mock-url", default=None)
@click.option("--workdir", type=click.Path(path_type=Path), default=Path("fleet-state"))
@click.option("--duration-s", type=float, default=3600.0, show_default=True)
@click.option("--survey", "survey_path", type=click.Path(exists=True, path_type=Path), default=None)
def run(plan_path, server_url, mode, mock_url, workdir, duration_s, survey_path) -> None:
    """Launch every planned agent and supervise the processes."""
    data = json.loads(Path(plan_path).read_text("utf-8"))
    agents = [PlannedAgent(**a) for a in data["agents"]]
    clock = SystemClock()
    until = clock.now_utc() + timedelta(seconds=duration_s)
    log = HealthLog(workdir / "health.log")
    policy = SupervisorPolicy()
    threads = []
    for agent in agents:
        argv = [
            sys.executable, "-m", "serpaudit.agent.cli", "run",
            "--server", server_url,
            "--region", agent.region.value,
            "--mode", mode,
            "--profile", str(workdir / agent.profile_dir),
            "--stagger-s", str(agent.stagger_offset_s),
            "--duration-s", str(duration_s),
        ]
        if mock_url:
            argv += ["--mock-url", mock_url]
        if survey_path:
            argv += ["--survey", str(survey_path)]
        handle = SubprocessAgentHandle(argv, workdir)

        def supervise(agent_id=agent.agent_id, handle=handle):
            try:
                supervise_agent(agent_id, handle, policy, clock, until, log)
            except GiveUp:
                pass  # already logged; agent stays down

        thread = threading.Thread(target=supervise, name=f"supervise-{agent.agent_id}")
        thread.start()
        threads.append(thread)
    for thread in threads:
        thread.join()
    click.echo(f"fleet run finished; health log at {log.path}")


def main() -> None:  # console entry
    fleet(sys.argv[1:])


if __name__ == "__main__":
    main()
