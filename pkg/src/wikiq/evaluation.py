"""Ranking evaluation against editorial class labels: NDCG, class-filtered
NDCG, precision-recall curves, and percentile distribution tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

DEFAULT_GAINS: dict[str, int] = {
    "FA": 6, "A": 5, "GA": 4, "B": 3, "C": 2, "Start": 1, "Stub": 0,
}

DEFAULT_RELEVANT = frozenset({"FA", "A", "GA"})


@dataclass(frozen=True)
class RankedPage:
    page_id: int
    score: float
    cls: str


def build_ranking(scores: Mapping[int, float],
                  labels: Mapping[int, str]) -> list[RankedPage]:
    """Total ranking over the labeled corpus: descending score, ties by
    page id.  Labeled pages without a score rank with score 0."""
    pages = [
        RankedPage(pid, scores.get(pid, 0.0), cls)
        for pid, cls in labels.items()
    ]
    pages.sort(key=lambda p: (-p.score, p.page_id))
    return pages


def _dcg(gains: Sequence[int], k: int) -> float:
    return sum(
        (2 ** g - 1) / math.log2(r + 1)
        for r, g in enumerate(gains[:k], start=1)
    )


def ndcg(ranking: Sequence[RankedPage], k: Optional[int] = None,
         gains: Mapping[str, int] = DEFAULT_GAINS) -> float:
    """Normalized discounted cumulative gain at k (default: full corpus)."""
    if k is None:
        k = len(ranking)
    if k > len(ranking):
        raise ValueError(f"k={k} exceeds corpus size {len(ranking)}")
    ranked_gains = [gains[p.cls] for p in ranking]
    ideal = sorted(ranked_gains, reverse=True)
    z = _dcg(ideal, k)
    if z == 0.0:
        raise ValueError("all-zero-gain corpus: NDCG undefined")
    return _dcg(ranked_gains, k) / z


def filtered_eval(scores: Mapping[int, float], labels: Mapping[int, str],
                  keep: Iterable[str], k: Optional[int] = None,
                  gains: Mapping[str, int] = DEFAULT_GAINS) -> float:
    """NDCG after restricting the corpus to the kept classes and re-ranking."""
    keep = set(keep)
    sub = {pid: cls for pid, cls in labels.items() if cls in keep}
    if not sub:
        raise ValueError("empty corpus after class filtering")
    return ndcg(build_ranking(scores, sub), k=k, gains=gains)


def precision_recall(scores: Mapping[int, float], labels: Mapping[int, str],
                     relevant: Iterable[str] = DEFAULT_RELEVANT
                     ) -> list[tuple[float, float]]:
    """Sweep the rank cutoff 1..N and emit (recall, precision) points."""
    relevant = set(relevant)
    ranking = build_ranking(scores, labels)
    total_rel = sum(1 for p in ranking if p.cls in relevant)
    if total_rel == 0 or total_rel == len(ranking):
        raise ValueError("need at least one relevant and one irrelevant page")
    curve = []
    hits = 0
    for cutoff, page in enumerate(ranking, start=1):
        if page.cls in relevant:
            hits += 1
        curve.append((hits / total_rel, hits / cutoff))
    return curve


def percentile_table(scores: Mapping[int, float], labels: Mapping[int, str],
                     buckets: int = 10) -> dict[str, list[float]]:
    """Per class, the proportion of its pages in each equal-count score
    percentile bucket (bucket 0 = top scores).  Rows sum to 1."""
    if buckets < 2:
        raise ValueError("need at least 2 buckets")
    ranking = build_ranking(scores, labels)
    n = len(ranking)
    base, extra = divmod(n, buckets)
    counts: dict[str, list[int]] = {}
    idx = 0
    for b in range(buckets):
        size = base + (1 if b < extra else 0)
        for page in ranking[idx:idx + size]:
            counts.setdefault(page.cls, [0] * buckets)[b] += 1
        idx += size
    return {
        cls: [c / sum(row) for c in row]
        for cls, row in ((cls, counts[cls]) for cls in sorted(counts))
    }


# Table-3 style class filter configurations, coarsest to cleanest separation.
FILTER_CONFIGS: list[tuple[str, tuple[str, ...]]] = [
    ("FA-C-Start-Stub", ("FA", "C", "Start", "Stub")),
    ("FA-C", ("FA", "C")),
    ("FA-Start-Stub", ("FA", "Start", "Stub")),
    ("FA-Start", ("FA", "Start")),
    ("FA-Stub", ("FA", "Stub")),
]
