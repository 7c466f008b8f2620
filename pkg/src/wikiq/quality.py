"""Article quality scores: longevity-based, centrality-based, and the
combined model over globally min-max normalized contribution and centrality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import IO, Iterable

from .centrality import CentralityTable
from .longevity import AuthorSelection, ContributionTable

log = logging.getLogger(__name__)


@dataclass
class QualityScoreTable:
    model: str  # longevity | cen_<metric> | com_<metric>
    scores: dict[int, float]
    provenance: dict = field(default_factory=dict)


def longevity_qscore(selections: dict[int, AuthorSelection],
                     contributions: ContributionTable) -> QualityScoreTable:
    """Sum of selected authors' contributions per page."""
    scores = {
        page_id: sum(
            contributions.pages.get(page_id, {}).get(a, 0.0)
            for a in sel.authors
        )
        for page_id, sel in selections.items()
    }
    return QualityScoreTable("longevity", scores)


def centrality_qscore(selections: dict[int, AuthorSelection],
                      cent: CentralityTable) -> QualityScoreTable:
    """Sum of selected authors' centralities per page; authors absent from
    the network contribute zero."""
    scores: dict[int, float] = {}
    missing = 0
    for page_id, sel in selections.items():
        total = 0.0
        for a in sel.authors:
            if a in cent.scores:
                total += cent.scores[a]
            else:
                missing += 1
        scores[page_id] = total
    if missing:
        log.debug("%d selected author slots missing from the %s network",
                  missing, cent.graph_kind)
    return QualityScoreTable(
        f"cen_{cent.metric}", scores, {"graph": cent.graph_kind}
    )


def _minmax_bounds(values: Iterable[float]) -> tuple[float, float]:
    values = list(values)
    return (min(values), max(values)) if values else (0.0, 0.0)


def _normalize(v: float, lo: float, hi: float) -> float:
    if hi == lo:
        return 0.5
    return (v - lo) / (hi - lo)


def combined_qscore(selections: dict[int, AuthorSelection],
                    contributions: ContributionTable,
                    cent: CentralityTable) -> QualityScoreTable:
    """Per-author product of normalized contribution and centrality, summed
    per page.  Normalization bounds come from the whole corpus being scored
    and are recorded in provenance."""
    contrib_values = [
        contributions.pages.get(page_id, {}).get(a, 0.0)
        for page_id, sel in selections.items()
        for a in sel.authors
    ]
    c_lo, c_hi = _minmax_bounds(contrib_values)
    x_lo, x_hi = _minmax_bounds(cent.scores.values())
    if c_hi == c_lo:
        log.warning("degenerate contribution range, normalizing to 0.5")
    if x_hi == x_lo:
        log.warning("degenerate centrality range, normalizing to 0.5")
    scores: dict[int, float] = {}
    for page_id, sel in selections.items():
        total = 0.0
        for a in sel.authors:
            contrib = contributions.pages.get(page_id, {}).get(a, 0.0)
            centrality = cent.scores.get(a, 0.0)
            total += (
                _normalize(contrib, c_lo, c_hi)
                * _normalize(centrality, x_lo, x_hi)
            )
        scores[page_id] = total
    return QualityScoreTable(
        f"com_{cent.metric}",
        scores,
        {
            "graph": cent.graph_kind,
            "contrib_bounds": [c_lo, c_hi],
            "centrality_bounds": [x_lo, x_hi],
        },
    )


def write_scores(tables: Iterable[QualityScoreTable], fp: IO[str]) -> None:
    fp.write("page_id\tmodel\tscore\n")
    for table in tables:
        for page_id in sorted(table.scores):
            fp.write(f"{page_id}\t{table.model}\t{table.scores[page_id]!r}\n")


def read_scores(lines: Iterable[str]) -> dict[str, dict[int, float]]:
    """Score TSV -> model name -> page -> score."""
    by_model: dict[str, dict[int, float]] = {}
    it = iter(lines)
    next(it)  # header
    for line in it:
        line = line.rstrip("\n")
        if not line:
            continue
        page_id_s, model, score_s = line.split("\t")
        by_model.setdefault(model, {})[int(page_id_s)] = float(score_s)
    return by_model
