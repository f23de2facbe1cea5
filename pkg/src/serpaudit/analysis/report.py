"""Deterministic report bundle: delimited tables plus a JSON summary."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional, Sequence

from .pipeline import DonorStats, GroupMetrics, HostStats, KeywordRow
from .stats import KWResult


class WriteFailure(OSError):
    pass


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, delimiter=";", lineterminator="\r\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise WriteFailure(str(exc)) from exc


def _fraction(value: Optional[float]) -> str:
    return "" if value is None else repr(value)


def emit_report(
    out_dir: str | Path,
    groups: Sequence[GroupMetrics],
    hosts: HostStats,
    keywords: Sequence[KeywordRow],
    hourly: dict[int, int],
    donors: DonorStats,
    kw_result: Optional[KWResult] = None,
    kw_metric: Optional[str] = None,
) -> Path:
    """Write the bundle; same inputs produce byte-identical files."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise WriteFailure(str(exc)) from exc

    _write_csv(
        out / "group_metrics.csv",
        ["study_id", "entries", "ads", "ads_per_entry", "entries_with_ads_fraction",
         "critical_ads", "critical_fraction"],
        [
            [g.study_id, g.entries, g.ads, repr(g.ads_per_entry),
             repr(g.entries_with_ads_fraction), g.critical_ads,
             _fraction(g.critical_fraction)]
            for g in sorted(groups, key=lambda g: g.study_id)
        ],
    )
    _write_csv(out / "host_counts.csv", ["host", "count"], list(hosts.table))
    _write_csv(
        out / "keyword_breakdown.csv",
        ["term", "ads", "critical_ads", "critical_fraction"],
        [[k.term, k.ads, k.critical_ads, _fraction(k.critical_fraction)] for k in keywords],
    )
    _write_csv(
        out / "temporal_hours.csv",
        ["hour", "entries"],
        [[hour, hourly.get(hour, 0)] for hour in range(24)],
    )
    _write_csv(out / "donor_counts.csv", ["participant_id", "entries"], list(donors.counts))

    summary = {
        "entries": sum(g.entries for g in groups),
        "ads": sum(g.ads for g in groups),
        "critical_ads": sum(g.critical_ads for g in groups),
        "groups": len(groups),
        "hosts": hosts.host_count,
        "host_count_mean": hosts.mean,
        "host_count_median": hosts.median,
        "host_count_p80": hosts.p80,
        "donor_median": donors.median,
        "donor_p80": donors.p80,
        "baseline_share": donors.baseline_share,
        "top_20_donor_share": donors.top_k_share(20),
    }
    if kw_result is not None:
        summary["kruskal_wallis"] = {
            "metric": kw_metric,
            **json.loads(kw_result.model_dump_json()),
        }
    try:
        (out / "summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            "utf-8",
        )
    except OSError as exc:
        raise WriteFailure(str(exc)) from exc
    return out
