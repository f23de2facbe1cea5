"""Umbrella CLI: serve the collection server and the mock engine, plus the
agent / fleet / analyze groups under one entry point."""

from __future__ import annotations

import sys
from pathlib import Path

import click
import uvicorn

from .agent.cli import agent
from .analysis.cli import analyze
from .fleet.cli import fleet


@click.group()
def cli() -> None:
    """Crowdsourced result-page advertising audit platform."""


@cli.command()
@click.option("--db", "db_path", default="collection.db", show_default=True,
              type=click.Path(path_type=Path))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--admin-token", default=None, help="Bearer token for /export.")
def server(db_path: Path, host: str, port: int, admin_token) -> None:
    """Run the collection server."""
    from .server import ServerConfigState, Store, create_app

    app = create_app(Store(db_path), ServerConfigState(), admin_token=admin_token)
    click.echo(f"collection server on http://{host}:{port} (db: {db_path})")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@cli.command(name="mock-ise")
@click.option("--inventory", "inventory_path", default=None,
              type=click.Path(exists=True, path_type=Path))
@click.option("--webgraph", "webgraph_path", default=None,
              type=click.Path(exists=True, path_type=Path))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--participation-rate", default=1.0, show_default=True, type=float)
@click.option("--targeting/--no-targeting", default=True, show_default=True)
def mock_ise(inventory_path, webgraph_path, seed, host, port, participation_rate, targeting) -> None:
    """Run the mock integrated search engine."""
    from importlib import resources

    from .ise import IseOptions, SerpService, create_app, load_inventory, load_webgraph

    data = resources.files("serpaudit.data")
    if inventory_path is None:
        with resources.as_file(data.joinpath("inventory.json")) as p:
            candidates, stories = load_inventory(p)
    else:
        candidates, stories = load_inventory(inventory_path)
    if webgraph_path is None:
        with resources.as_file(data.joinpath("webgraph.json")) as p:
            graph = load_webgraph(p)
    else:
        graph = load_webgraph(webgraph_path)
    options = IseOptions(
        participation_rate=participation_rate, targeting_enabled=targeting
    )
    service = SerpService(candidates, graph, stories, options=options, seed=seed)
    click.echo(f"mock engine on http://{host}:{port} (seed {seed})")
    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")


cli.add_command(agent)
cli.add_command(fleet)
cli.add_command(analyze)


def main() -> None:
    cli(sys.argv[1:])


if __name__ == "__main__":
    main()
