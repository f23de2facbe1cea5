"""Offline corpus analysis: ad explosion, host stats, labeling, group metrics,
temporal and donor distributions, per-keyword breakdown.

Everything here is a pure function of the corpus and taxonomy; outputs carry
a canonical ordering so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import timedelta, timezone
from pathlib import Path
from statistics import mean, median
from typing import Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..model import AdRecord, Category, ClientKind, HostLabelEntry, Tier, canonicalize_host
from ..server.export import CorpusEntry


class DuplicateTaxonomyHost(ValueError):
    pass


@dataclass(frozen=True)
class ExplodedAd:
    entry_index: int
    entry: CorpusEntry
    ad: AdRecord


@dataclass(frozen=True)
class LabeledAd:
    entry_index: int
    entry: CorpusEntry
    ad: AdRecord
    category: Category
    tier: Tier
    critical: bool


class GroupMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    study_id: int
    entries: int
    ads: int
    ads_per_entry: float
    entries_with_ads_fraction: float
    critical_ads: int
    critical_fraction: Optional[float]  # None when the group received no ads


class HostStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    table: tuple[tuple[str, int], ...]  # (host, count), count desc then host asc
    host_count: int
    mean: float
    median: float
    p80: float


class DonorStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    counts: tuple[tuple[str, int], ...]  # (participant, entries), count desc
    median: float
    p80: float
    baseline_share: float

    def top_k_share(self, k: int) -> float:
        total = sum(c for _, c in self.counts)
        if total == 0:
            return 0.0
        top = sum(c for _, c in self.counts[:k])
        return top / total


class KeywordRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    term: str
    ads: int
    critical_ads: int
    critical_fraction: Optional[float]


def explode_ads(entries: Sequence[CorpusEntry]) -> list[ExplodedAd]:
    """One output row per single advertisement, stable by (entry, ad index)."""
    return [
        ExplodedAd(entry_index=i, entry=entry, ad=ad)
        for i, entry in enumerate(entries)
        for ad in entry.ads
    ]


def host_frequency_stats(ads: Sequence[ExplodedAd]) -> HostStats:
    counts = Counter(exploded.ad.resolved_host for exploded in ads)
    table = tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
    values = [c for _, c in table]
    if not values:
        return HostStats(table=(), host_count=0, mean=0.0, median=0.0, p80=0.0)
    return HostStats(
        table=table,
        host_count=len(values),
        mean=mean(values),
        median=float(median(values)),
        p80=float(np.percentile(values, 80)),
    )


def apply_host_labels(
    ads: Sequence[ExplodedAd], taxonomy: Sequence[HostLabelEntry]
) -> list[LabeledAd]:
    """Join each exploded ad to its taxonomy row via the canonical host.

    Unmatched hosts become "unknown" / not-to-determine / noncritical.
    """
    by_host: dict[str, HostLabelEntry] = {}
    for entry in taxonomy:
        if entry.host in by_host:
            raise DuplicateTaxonomyHost(entry.host)
        by_host[entry.host] = entry
    out = []
    for exploded in ads:
        label = by_host.get(exploded.ad.resolved_host)
        if label is None:
            out.append(
                LabeledAd(
                    entry_index=exploded.entry_index,
                    entry=exploded.entry,
                    ad=exploded.ad,
                    category=Category.UNKNOWN,
                    tier=Tier.NOT_TO_DETERMINE,
                    critical=False,
                )
            )
        else:
            out.append(
                LabeledAd(
                    entry_index=exploded.entry_index,
                    entry=exploded.entry,
                    ad=exploded.ad,
                    category=label.category,
                    tier=label.tier,
                    critical=label.critical,
                )
            )
    return out


def group_metrics(
    entries: Sequence[CorpusEntry], labeled_ads: Sequence[LabeledAd]
) -> list[GroupMetrics]:
    entries_per_group: Counter = Counter(e.study_id for e in entries)
    entries_with_ads: Counter = Counter(
        e.study_id for e in entries if len(e.ads) > 0
    )
    ads_per_group: Counter = Counter(ad.entry.study_id for ad in labeled_ads)
    critical_per_group: Counter = Counter(
        ad.entry.study_id for ad in labeled_ads if ad.critical
    )
    out = []
    for study_id in sorted(entries_per_group):
        n_entries = entries_per_group[study_id]
        n_ads = ads_per_group.get(study_id, 0)
        n_critical = critical_per_group.get(study_id, 0)
        out.append(
            GroupMetrics(
                study_id=study_id,
                entries=n_entries,
                ads=n_ads,
                ads_per_entry=n_ads / n_entries,
                entries_with_ads_fraction=entries_with_ads.get(study_id, 0) / n_entries,
                critical_ads=n_critical,
                critical_fraction=(n_critical / n_ads) if n_ads else None,
            )
        )
    return out


def per_donor_samples(
    entries: Sequence[CorpusEntry],
    labeled_ads: Sequence[LabeledAd],
    on: str = "ads_per_entry",
) -> dict[int, list[float]]:
    """Per-group lists of per-donor values for the chosen metric.

    ``on`` is "ads_per_entry" or "critical_fraction". Donors without a
    defined value (no ads, for the critical fraction) are skipped rather
    than entered as fabricated zeros.
    """
    if on not in ("ads_per_entry", "critical_fraction"):
        raise ValueError(f"unsupported metric: {on}")
    entries_per_donor: Counter = Counter(e.participant_id for e in entries)
    group_of_donor: dict[str, int] = {e.participant_id: e.study_id for e in entries}
    ads_per_donor: Counter = Counter(ad.entry.participant_id for ad in labeled_ads)
    critical_per_donor: Counter = Counter(
        ad.entry.participant_id for ad in labeled_ads if ad.critical
    )
    samples: dict[int, list[float]] = defaultdict(list)
    for donor, n_entries in sorted(entries_per_donor.items()):
        study_id = group_of_donor[donor]
        n_ads = ads_per_donor.get(donor, 0)
        if on == "ads_per_entry":
            samples[study_id].append(n_ads / n_entries)
        else:
            if n_ads == 0:
                continue
            samples[study_id].append(critical_per_donor.get(donor, 0) / n_ads)
    return dict(samples)


def temporal_histogram(
    entries: Sequence[CorpusEntry], bucket: str = "hour_of_day"
) -> dict:
    """Entry counts per local hour of day (24 bins) or per UTC date."""
    if bucket == "hour_of_day":
        bins = [0] * 24
        for e in entries:
            local = e.sent_at.astimezone(timezone.utc) + timedelta(
                minutes=e.tz_offset_minutes
            )
            bins[local.hour] += 1
        return {hour: count for hour, count in enumerate(bins)}
    if bucket == "day":
        counts: Counter = Counter(
            e.sent_at.astimezone(timezone.utc).date().isoformat() for e in entries
        )
        return dict(sorted(counts.items()))
    raise ValueError(f"unknown bucket: {bucket}")


def donor_contribution_stats(entries: Sequence[CorpusEntry]) -> DonorStats:
    counts = Counter(e.participant_id for e in entries)
    table = tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
    values = [c for _, c in table]
    baseline = sum(1 for e in entries if e.client_kind is ClientKind.BASELINE)
    total = len(entries)
    if not values:
        return DonorStats(counts=(), median=0.0, p80=0.0, baseline_share=0.0)
    return DonorStats(
        counts=table,
        median=float(median(values)),
        p80=float(np.percentile(values, 80)),
        baseline_share=baseline / total,
    )


def keyword_breakdown(
    labeled_ads: Sequence[LabeledAd], entries: Sequence[CorpusEntry]
) -> list[KeywordRow]:
    """One row per distinct query term observed in the corpus."""
    ads_per_term: Counter = Counter(ad.entry.query for ad in labeled_ads)
    critical_per_term: Counter = Counter(
        ad.entry.query for ad in labeled_ads if ad.critical
    )
    terms = sorted({e.query for e in entries})
    out = []
    for term in terms:
        n_ads = ads_per_term.get(term, 0)
        n_crit = critical_per_term.get(term, 0)
        out.append(
            KeywordRow(
                term=term,
                ads=n_ads,
                critical_ads=n_crit,
                critical_fraction=(n_crit / n_ads) if n_ads else None,
            )
        )
    return out


def load_taxonomy(source: str | Path | Iterable[str]) -> list[HostLabelEntry]:
    """Parse a host;category;critical taxonomy file.

    Hosts are canonicalized; a duplicate canonical host is an error. A header
    row is recognized and skipped.
    """
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text("utf-8")
    else:
        text = source if isinstance(source, str) else "\n".join(source)
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=";")
    entries: list[HostLabelEntry] = []
    seen: set[str] = set()
    for row in reader:
        if not row or not any(cell.strip() for cell in row):
            continue
        if [c.strip().lower() for c in row[:3]] == ["host", "category", "critical"]:
            continue
        if len(row) < 3:
            raise ValueError(f"taxonomy row needs host;category;critical: {row!r}")
        host = canonicalize_host(row[0].strip())
        critical = row[2].strip().lower() in ("1", "true", "yes")
        if host in seen:
            raise DuplicateTaxonomyHost(host)
        seen.add(host)
        entries.append(
            HostLabelEntry(host=host, category=Category(row[1].strip()), critical=critical)
        )
    return entries
