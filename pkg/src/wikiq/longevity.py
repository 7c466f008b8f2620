"""Edit longevity: per-revision edit quality, per-author page contribution,
and main-author selection.

A revision's quality is judged against up to the first ten later revisions
by other authors; each judgment compares how much of the edit survived,
clamped to [-1, 1], and the average scales the edit size into a longevity.
Only positive longevities accumulate into an author's page contribution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from .ingest import AuthorKind, PageHistory
from .worddiff import edit_distance, triangle_guard

log = logging.getLogger(__name__)

MAX_JUDGES = 10


@dataclass(frozen=True)
class RevisionJudgment:
    rev_ordinal: int
    d_r: float
    alpha_bar: float
    longevity: float
    judge_count: int


@dataclass
class ContributionTable:
    """Per (page, author) accumulated positive edit longevity.

    Pages with no positive contribution keep an (empty) entry.  max_share
    records the largest single-revision share of a page's total, so
    revert-war style distortions stay discoverable.
    """

    pages: dict[int, dict[str, float]] = field(default_factory=dict)
    max_share: dict[int, float] = field(default_factory=dict)

    def total(self, page_id: int) -> float:
        return sum(self.pages.get(page_id, {}).values())


@dataclass(frozen=True)
class SelectionParams:
    min_contrib: float = 10.0
    min_authors: int = 20
    theta: float = 0.9


@dataclass
class AuthorSelection:
    page_id: int
    authors: list[str]  # descending contribution, username tie-break
    params: SelectionParams


class _PageDistances:
    """Pairwise version distances of one page, computed lazily and cached.

    Version index i means v_i, with v_0 the implicit empty version.
    """

    def __init__(self, history: PageHistory):
        self._versions: list[Sequence[str]] = [[]]
        self._versions += [rev.tokens for rev in history.revisions]
        self._cache: dict[tuple[int, int], float] = {}

    def d(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        key = (i, j)
        if key not in self._cache:
            self._cache[key] = edit_distance(
                self._versions[i], self._versions[j]
            ).distance
        return self._cache[key]


def judge_revision(history: PageHistory, i: int,
                   _dists: _PageDistances | None = None) -> RevisionJudgment:
    """Judge revision i (1-based ordinal) of a page history."""
    n = len(history.revisions)
    if not 1 <= i <= n:
        raise IndexError(f"revision ordinal {i} out of range 1..{n}")
    dists = _dists if _dists is not None else _PageDistances(history)
    d_r = dists.d(i - 1, i)
    author = history.revisions[i - 1].author.name
    judges = [
        j
        for j in range(i + 1, n + 1)
        if history.revisions[j - 1].author.name != author
    ][:MAX_JUDGES]
    if d_r == 0.0 or not judges:
        return RevisionJudgment(i, d_r, 0.0, 0.0, len(judges))
    alphas = []
    for j in judges:
        d_prev_j = dists.d(i - 1, j)
        d_i_j = dists.d(i, j)
        # force the triple through the triangle inequality before use
        d_prev_j_g = triangle_guard(d_r, d_i_j, d_prev_j)
        d_i_j_g = triangle_guard(d_r, d_prev_j, d_i_j)
        alpha = (d_prev_j_g - d_i_j_g) / d_r
        alphas.append(max(-1.0, min(1.0, alpha)))
    alpha_bar = sum(alphas) / len(alphas)
    return RevisionJudgment(i, d_r, alpha_bar, alpha_bar * d_r, len(judges))


def judge_page(history: PageHistory) -> list[RevisionJudgment]:
    """Judge every revision of a page with a shared distance cache."""
    dists = _PageDistances(history)
    return [
        judge_revision(history, i, dists)
        for i in range(1, len(history.revisions) + 1)
    ]


def build_contributions(histories: Iterable[PageHistory],
                        drop_bots: bool = True) -> ContributionTable:
    """Accumulate positive longevity per (page, registered author)."""
    table = ContributionTable()
    for history in histories:
        contribs: dict[str, float] = {}
        best_single = 0.0
        judgments = judge_page(history)
        for rev, judgment in zip(history.revisions, judgments):
            kind = rev.author.kind
            if kind is AuthorKind.ANONYMOUS:
                continue
            if drop_bots and kind is AuthorKind.BOT:
                continue
            if judgment.longevity > 0:
                contribs[rev.author.name] = (
                    contribs.get(rev.author.name, 0.0) + judgment.longevity
                )
                best_single = max(best_single, judgment.longevity)
        table.pages[history.page_id] = contribs
        total = sum(contribs.values())
        table.max_share[history.page_id] = best_single / total if total else 0.0
    return table


def select_authors(table: ContributionTable, page_id: int,
                   params: SelectionParams = SelectionParams()) -> AuthorSelection:
    """Pick a page's main contributors.

    Eligible authors (contribution above the minimum) are taken in descending
    order until they cover a theta fraction of the page total; a floor of
    min(min_authors, positive-contribution population) is applied regardless,
    so pages dominated by a few contributors still yield enough authors.
    """
    if page_id not in table.pages:
        raise KeyError(f"page {page_id} not in contribution table")
    contribs = table.pages[page_id]
    ordered = sorted(contribs, key=lambda a: (-contribs[a], a))
    total = sum(contribs.values())
    if total == 0:
        return AuthorSelection(page_id, [], params)
    selected: list[str] = []
    cum = 0.0
    for author in ordered:
        if contribs[author] <= params.min_contrib:
            continue
        selected.append(author)
        cum += contribs[author]
        if cum / total > params.theta:
            break
    floor = min(params.min_authors, len(ordered))
    if len(selected) < floor:
        chosen = set(selected)
        for author in ordered:
            if len(selected) >= floor:
                break
            if author not in chosen:
                selected.append(author)
                chosen.add(author)
    selected.sort(key=lambda a: (-contribs[a], a))
    return AuthorSelection(page_id, selected, params)


def select_all(table: ContributionTable,
               params: SelectionParams = SelectionParams()
               ) -> dict[int, AuthorSelection]:
    return {
        page_id: select_authors(table, page_id, params)
        for page_id in sorted(table.pages)
    }


def write_contributions(table: ContributionTable, fp: IO[str]) -> None:
    fp.write("page_id\tauthor\tcontrib\n")
    for page_id in sorted(table.pages):
        contribs = table.pages[page_id]
        for author in sorted(contribs, key=lambda a: (-contribs[a], a)):
            fp.write(f"{page_id}\t{author}\t{contribs[author]!r}\n")


def read_contributions(lines: Iterable[str]) -> ContributionTable:
    table = ContributionTable()
    it = iter(lines)
    next(it)  # header
    for line in it:
        line = line.rstrip("\n")
        if not line:
            continue
        page_id_s, author, contrib_s = line.split("\t")
        table.pages.setdefault(int(page_id_s), {})[author] = float(contrib_s)
    return table


def write_selections(selections: dict[int, AuthorSelection], fp: IO[str]) -> None:
    fp.write("page_id\tauthor\trank\n")
    for page_id in sorted(selections):
        for rank, author in enumerate(selections[page_id].authors, start=1):
            fp.write(f"{page_id}\t{author}\t{rank}\n")


def read_selections(lines: Iterable[str],
                    params: SelectionParams = SelectionParams()
                    ) -> dict[int, AuthorSelection]:
    selections: dict[int, AuthorSelection] = {}
    it = iter(lines)
    next(it)  # header
    for line in it:
        line = line.rstrip("\n")
        if not line:
            continue
        page_id_s, author, _rank = line.split("\t")
        page_id = int(page_id_s)
        if page_id not in selections:
            selections[page_id] = AuthorSelection(page_id, [], params)
        selections[page_id].authors.append(author)
    return selections
