from .pipeline import (
    DonorStats,
    DuplicateTaxonomyHost,
    ExplodedAd,
    GroupMetrics,
    HostStats,
    KeywordRow,
    LabeledAd,
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
from .report import WriteFailure, emit_report
from .stats import DegenerateInput, KWResult, kruskal_wallis

__all__ = [
    "DegenerateInput",
    "DonorStats",
    "DuplicateTaxonomyHost",
    "ExplodedAd",
    "GroupMetrics",
    "HostStats",
    "KWResult",
    "KeywordRow",
    "LabeledAd",
    "WriteFailure",
    "apply_host_labels",
    "donor_contribution_stats",
    "emit_report",
    "explode_ads",
    "group_metrics",
    "host_frequency_stats",
    "keyword_breakdown",
    "kruskal_wallis",
    "load_taxonomy",
    "per_donor_samples",
    "temporal_histogram",
]
