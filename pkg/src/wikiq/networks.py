"""Author network construction: co-author net from main contributors and
the two user-talk nets (signature-parsed current version vs. full history).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Sequence

from .ingest import AuthorKind, BotConfig, PageHistory, Namespace, canonical_name, classify_author
from .longevity import AuthorSelection

log = logging.getLogger(__name__)

SIGNATURE_WINDOW = 40  # tokens between user link and timestamp marker


@dataclass
class AuthorGraph:
    kind: str  # coauthor | talk_signature | talk_history
    directed: bool
    nodes: set[str] = field(default_factory=set)
    edges: dict[tuple[str, str], int] = field(default_factory=dict)

    def add_edge(self, src: str, dst: str, weight: int = 1) -> None:
        if src == dst:
            return
        if not self.directed and src > dst:
            src, dst = dst, src
        self.nodes.add(src)
        self.nodes.add(dst)
        self.edges[(src, dst)] = self.edges.get((src, dst), 0) + weight

    def weight(self, a: str, b: str) -> int:
        if not self.directed and a > b:
            a, b = b, a
        return self.edges.get((a, b), 0)


def build_coauthor(selections: Iterable[AuthorSelection]) -> AuthorGraph:
    """Undirected net linking main contributors who share a page; weight =
    number of co-authored pages."""
    g = AuthorGraph(kind="coauthor", directed=False)
    for sel in selections:
        authors = sorted(set(sel.authors))
        g.nodes.update(authors)
        for i, a in enumerate(authors):
            for b in authors[i + 1:]:
                g.add_edge(a, b)
    return g


def utp_owner(title: str) -> Optional[str]:
    if not title.startswith("User talk:"):
        return None
    owner = title[len("User talk:"):].split("/", 1)[0]
    return canonical_name(owner) or None


_TIMESTAMP_TOKENS = ("(", "UTC", ")")


def iter_signatures(tokens: Sequence[str],
                    window: int = SIGNATURE_WINDOW) -> Iterable[str]:
    """Yield signer names: a [[User:...]] / [[User talk:...]] link followed
    by a (UTC) timestamp marker within the token window."""
    n = len(tokens)
    i = 0
    while i < n:
        if tokens[i] != "[[" or i + 2 >= n or tokens[i + 1].lower() != "user":
            i += 1
            continue
        k = i + 2
        if k < n and tokens[k].lower() == "talk":
            k += 1
        if k >= n or tokens[k] != ":":
            i += 1
            continue
        k += 1
        name_toks: list[str] = []
        while k < n and tokens[k] not in ("|", "]]") and len(name_toks) < 8:
            name_toks.append(tokens[k])
            k += 1
        # skip the rest of the link
        while k < n and tokens[k] != "]]":
            k += 1
        if not name_toks:
            i += 1
            continue
        end = min(n - 2, k + window)
        for t in range(k, end):
            if (tokens[t], tokens[t + 1], tokens[t + 2]) == _TIMESTAMP_TOKENS:
                yield canonical_name(" ".join(name_toks))
                break
        i = k + 1


def build_talk_signature(utp_pages: Iterable[PageHistory]) -> AuthorGraph:
    """Directed talk net parsed from signatures on the current UTP version."""
    g = AuthorGraph(kind="talk_signature", directed=True)
    for page in utp_pages:
        owner = utp_owner(page.title)
        if owner is None:
            log.warning("not a user-talk title, skipped: %r", page.title)
            continue
        g.nodes.add(owner)
        if not page.revisions:
            continue
        current = page.revisions[-1].tokens
        for signer in iter_signatures(current):
            if signer != owner:
                g.add_edge(signer, owner)
    return g


def build_talk_history(utp_histories: Iterable[PageHistory]) -> AuthorGraph:
    """Directed talk net counting every registered non-owner revision of a
    user talk page as one message to the owner."""
    g = AuthorGraph(kind="talk_history", directed=True)
    for page in utp_histories:
        owner = utp_owner(page.title)
        if owner is None:
            log.warning("not a user-talk title, skipped: %r", page.title)
            continue
        g.nodes.add(owner)
        for rev in page.revisions:
            if rev.author.kind is AuthorKind.ANONYMOUS:
                continue
            if rev.author.name != owner:
                g.add_edge(rev.author.name, owner)
    return g


def restrict_and_filter(g: AuthorGraph, project_authors: set[str],
                        drop_bots: bool = False,
                        bot_config: Optional[BotConfig] = None) -> AuthorGraph:
    """Induced subgraph on the project's authors, optionally dropping bots.
    Isolated project authors already in the graph are retained."""
    keep = set(project_authors)
    if drop_bots:
        cfg = bot_config or BotConfig()
        keep = {a for a in keep if classify_author(a, cfg) is not AuthorKind.BOT}
    out = AuthorGraph(kind=g.kind, directed=g.directed)
    out.nodes = {n for n in g.nodes if n in keep}
    out.edges = {
        (s, d): w for (s, d), w in g.edges.items() if s in keep and d in keep
    }
    return out


def write_edge_list(g: AuthorGraph, fp: IO[str]) -> None:
    fp.write(f"# kind={g.kind} directed={str(g.directed).lower()}\n")
    fp.write("src\tdst\tweight\n")
    for (src, dst) in sorted(g.edges):
        fp.write(f"{src}\t{dst}\t{g.edges[(src, dst)]}\n")
    # isolated nodes survive the round-trip as self-descriptive comments
    linked = {n for edge in g.edges for n in edge}
    for node in sorted(g.nodes - linked):
        fp.write(f"# node={node}\n")


def read_edge_list(lines: Iterable[str]) -> AuthorGraph:
    it = iter(lines)
    header = next(it).rstrip("\n")
    m = re.match(r"# kind=(\S+) directed=(true|false)$", header)
    if not m:
        raise ValueError(f"bad edge-list header: {header!r}")
    g = AuthorGraph(kind=m.group(1), directed=m.group(2) == "true")
    next(it)  # column header
    for line in it:
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("# node="):
            g.nodes.add(line[len("# node="):])
            continue
        src, dst, weight = line.split("\t")
        g.nodes.add(src)
        g.nodes.add(dst)
        g.edges[(src, dst)] = int(weight)
    return g
