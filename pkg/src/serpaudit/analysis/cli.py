"""Command-line front of the offline analysis."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from ..server.export import import_corpus
from .pipeline import (
    apply_host_labels,
    donor_contribution_stats,
    explode_ads,
    group_metrics,
    host_frequency_stats,
    keyword_breakdown,
    load_taxonomy,
    per_donor_samples,
    temporal_histogram,
)
from .report import emit_report
from .stats import kruskal_wallis


@click.command(name="analyze")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--taxonomy", "taxonomy_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--groups", "groups_filter", default=None, help="Comma-separated study ids to keep.")
@click.option(
    "--kw-on",
    type=click.Choice(["critical_fraction", "ads_per_entry"]),
    default="ads_per_entry",
    show_default=True,
    help="Per-donor metric compared across groups with the Kruskal-Wallis test.",
)
def analyze(corpus_path: Path, taxonomy_path: Path, out_dir: Path, groups_filter, kw_on):
    """Analyze an exported corpus and write the report bundle."""
    with corpus_path.open("r", encoding="utf-8", newline="") as fh:
        entries = import_corpus(fh)
    if groups_filter:
        keep = {int(g) for g in groups_filter.split(",") if g.strip()}
        entries = [e for e in entries if e.study_id in keep]
    taxonomy = load_taxonomy(taxonomy_path)

    exploded = explode_ads(entries)
    labeled = apply_host_labels(exploded, taxonomy)
    groups = group_metrics(entries, labeled)
    hosts = host_frequency_stats(exploded)
    keywords = keyword_breakdown(labeled, entries)
    hourly = temporal_histogram(entries, "hour_of_day")
    donors = donor_contribution_stats(entries)

    kw_result = None
    samples = [s for s in per_donor_samples(entries, labeled, on=kw_on).values() if s]
    if len(samples) >= 2 and sum(len(s) for s in samples) >= len(samples):
        kw_result = kruskal_wallis(samples)

    emit_report(out_dir, groups, hosts, keywords, hourly, donors, kw_result, kw_on)
    click.echo(f"entries={len(entries)} ads={len(exploded)} groups={len(groups)}")
    if kw_result is not None:
        click.echo(
            f"kruskal-wallis[{kw_on}]: H={kw_result.H:.6g} df={kw_result.df} "
            f"p={kw_result.p_value:.6g}"
        )
    click.echo(f"report written to {out_dir}")


def main() -> None:  # console entry
    analyze(sys.argv[1:])


if __name__ == "__main__":
    main()
