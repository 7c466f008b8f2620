"""Staged pipeline over persisted TSV/JSONL intermediates.

Each stage reads the artifacts of upstream stages from the workdir, writes
its own atomically (temp file + rename), and records input/output hashes in
a manifest so stale or missing intermediates are detected instead of
silently corrupting a run.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import centrality as centrality_mod
from . import networks, quality
from .evaluation import (DEFAULT_GAINS, DEFAULT_RELEVANT, FILTER_CONFIGS,
                         build_ranking, ndcg, filtered_eval, percentile_table,
                         precision_recall)
from .ingest import (AuthorId, AuthorKind, BotConfig, Namespace, PageHistory,
                     RevisionRecord, load_ratings, parse_dump,
                     write_revision_store)
from .longevity import (SelectionParams, build_contributions,
                        read_contributions, read_selections, select_all,
                        write_contributions, write_selections)

log = logging.getLogger(__name__)

STAGES = ("ingest", "contrib", "select", "net", "centrality", "score", "eval")


class PipelineError(Exception):
    """Data or sequencing error; maps to exit code 2 in the CLI."""


@dataclass
class RunConfig:
    dump: str = "dump.xml"
    ratings: str = "ratings.tsv"
    workdir: str = "work"
    selection: SelectionParams = field(default_factory=SelectionParams)
    exclude_bots: bool = True
    bot_list: list[str] = field(default_factory=list)
    bot_suffix_heuristic: bool = True
    network: str = "talk-hist"  # coauthor | talk-sig | talk-hist
    metric: str = "pagerank"
    damping: float = 0.85
    models: list[str] = field(default_factory=lambda: ["longevity", "centrality", "combined"])
    eval_k: list[int] = field(default_factory=list)  # empty -> full corpus
    buckets: int = 10
    relevant_classes: list[str] = field(default_factory=lambda: sorted(DEFAULT_RELEVANT))

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        if "selection" in data:
            data["selection"] = SelectionParams(**data["selection"])
        return cls(**data)

    def bot_config(self) -> BotConfig:
        return BotConfig(
            names=frozenset(self.bot_list),
            suffix_heuristic=self.bot_suffix_heuristic,
        )


def atomic_write(path: Path, write: Callable) -> None:
    """Write via temp file + rename so readers never see partial output."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fp:
            write(fp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fp:
        for chunk in iter(lambda: fp.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Workdir:
    """Stage artifact paths plus the hash manifest."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.root = Path(config.workdir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.root / "manifest.json"

    def path(self, name: str) -> Path:
        return self.root / name

    def _load_manifest(self) -> dict:
        if self.manifest_path.exists():
            return json.loads(self.manifest_path.read_text())
        return {}

    def require(self, stage: str, *names: str) -> list[Path]:
        paths = []
        manifest = self._load_manifest()
        for name in names:
            p = self.path(name)
            if not p.exists():
                producer = _producer_of(name)
                raise PipelineError(
                    f"stage {stage!r}: missing artifact {name} "
                    f"(run {producer!r} first)"
                )
            recorded = None
            for entry in manifest.values():
                recorded = entry.get("outputs", {}).get(name, recorded)
            if recorded is not None and recorded != _sha256(p):
                raise PipelineError(
                    f"stage {stage!r}: artifact {name} does not match the "
                    f"manifest (stale; re-run {_producer_of(name)!r})"
                )
            paths.append(p)
        return paths

    def record(self, stage: str, inputs: list[Path], outputs: list[Path]) -> None:
        manifest = self._load_manifest()
        manifest[stage] = {
            "inputs": {p.name: _sha256(p) for p in inputs if p.exists()},
            "outputs": {p.name: _sha256(p) for p in outputs},
        }
        atomic_write(
            self.manifest_path,
            lambda fp: fp.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n"),
        )


ARTIFACTS = {
    "ingest": ("articles.jsonl", "utp.jsonl", "revisions.tsv"),
    "contrib": ("contributions.tsv", "diagnostics.tsv"),
    "select": ("selection.tsv",),
    "net": ("edges.tsv",),
    "centrality": ("centrality.tsv",),
    "score": ("scores.tsv", "provenance.json"),
    "eval": ("report.tsv", "percentiles.tsv", "pr_curve.tsv"),
}


def _producer_of(name: str) -> str:
    for stage, names in ARTIFACTS.items():
        if name in names:
            return stage
    return "?"


def _history_to_json(page: PageHistory) -> str:
    return json.dumps({
        "page_id": page.page_id,
        "title": page.title,
        "namespace": page.namespace.value,
        "revisions": [
            [r.rev_ordinal, r.author.name, r.author.kind.value, r.timestamp, r.tokens]
            for r in page.revisions
        ],
    }, sort_keys=True)


def _history_from_json(line: str) -> PageHistory:
    d = json.loads(line)
    return PageHistory(
        page_id=d["page_id"],
        title=d["title"],
        namespace=Namespace(d["namespace"]),
        revisions=[
            RevisionRecord(d["page_id"], ordinal, AuthorId(name, AuthorKind(kind)),
                           ts, tokens)
            for ordinal, name, kind, ts, tokens in d["revisions"]
        ],
    )


def _read_histories(path: Path) -> list[PageHistory]:
    with open(path, encoding="utf-8") as fp:
        return [_history_from_json(line) for line in fp if line.strip()]


def stage_ingest(wd: Workdir) -> None:
    cfg = wd.config
    dump_path = Path(cfg.dump)
    if not dump_path.exists():
        raise PipelineError(f"dump not found: {dump_path}")
    articles: list[PageHistory] = []
    utps: list[PageHistory] = []
    with open(dump_path, "rb") as fp:
        for page in parse_dump(fp, cfg.bot_config()):
            if page.namespace is Namespace.ARTICLE:
                articles.append(page)
            elif page.namespace is Namespace.USER_TALK:
                utps.append(page)
    articles.sort(key=lambda p: p.page_id)
    utps.sort(key=lambda p: p.page_id)

    def write_jsonl(pages):
        def writer(fp):
            for page in pages:
                fp.write(_history_to_json(page) + "\n")
        return writer

    atomic_write(wd.path("articles.jsonl"), write_jsonl(articles))
    atomic_write(wd.path("utp.jsonl"), write_jsonl(utps))
    atomic_write(
        wd.path("revisions.tsv"),
        lambda fp: write_revision_store(articles + utps, fp),
    )
    wd.record("ingest", [dump_path],
              [wd.path(n) for n in ARTIFACTS["ingest"]])


def stage_contrib(wd: Workdir) -> None:
    (articles_path,) = wd.require("contrib", "articles.jsonl")
    histories = _read_histories(articles_path)
    table = build_contributions(histories, drop_bots=wd.config.exclude_bots)
    atomic_write(wd.path("contributions.tsv"),
                 lambda fp: write_contributions(table, fp))

    def write_diag(fp):
        fp.write("page_id\tmax_single_revision_share\n")
        for page_id in sorted(table.max_share):
            fp.write(f"{page_id}\t{table.max_share[page_id]!r}\n")

    atomic_write(wd.path("diagnostics.tsv"), write_diag)
    wd.record("contrib", [articles_path],
              [wd.path(n) for n in ARTIFACTS["contrib"]])


def stage_select(wd: Workdir) -> None:
    (contrib_path,) = wd.require("select", "contributions.tsv")
    with open(contrib_path, encoding="utf-8") as fp:
        table = read_contributions(fp)
    selections = select_all(table, wd.config.selection)
    atomic_write(wd.path("selection.tsv"),
                 lambda fp: write_selections(selections, fp))
    wd.record("select", [contrib_path], [wd.path("selection.tsv")])


def stage_net(wd: Workdir) -> None:
    cfg = wd.config
    if cfg.network == "coauthor":
        (sel_path,) = wd.require("net", "selection.tsv")
        with open(sel_path, encoding="utf-8") as fp:
            selections = read_selections(fp, cfg.selection)
        graph = networks.build_coauthor(selections.values())
        inputs = [sel_path]
    elif cfg.network in ("talk-sig", "talk-hist"):
        utp_path, sel_path = wd.require("net", "utp.jsonl", "selection.tsv")
        utps = _read_histories(utp_path)
        if cfg.network == "talk-sig":
            graph = networks.build_talk_signature(utps)
        else:
            graph = networks.build_talk_history(utps)
        with open(sel_path, encoding="utf-8") as fp:
            selections = read_selections(fp, cfg.selection)
        project_authors = {a for sel in selections.values() for a in sel.authors}
        graph = networks.restrict_and_filter(
            graph, project_authors, drop_bots=cfg.exclude_bots,
            bot_config=cfg.bot_config(),
        )
        inputs = [utp_path, sel_path]
    else:
        raise PipelineError(f"unknown network kind {cfg.network!r}")
    atomic_write(wd.path("edges.tsv"),
                 lambda fp: networks.write_edge_list(graph, fp))
    wd.record("net", inputs, [wd.path("edges.tsv")])


def stage_centrality(wd: Workdir) -> None:
    cfg = wd.config
    (edges_path,) = wd.require("centrality", "edges.tsv")
    with open(edges_path, encoding="utf-8") as fp:
        graph = networks.read_edge_list(fp)
    kwargs = {"damping": cfg.damping} if cfg.metric == "pagerank" else {}
    table = centrality_mod.compute(cfg.metric, graph, **kwargs)
    atomic_write(wd.path("centrality.tsv"),
                 lambda fp: centrality_mod.write_centrality(table, fp))
    wd.record("centrality", [edges_path], [wd.path("centrality.tsv")])


def stage_score(wd: Workdir) -> None:
    cfg = wd.config
    sel_path, contrib_path, cent_path = wd.require(
        "score", "selection.tsv", "contributions.tsv", "centrality.tsv"
    )
    with open(sel_path, encoding="utf-8") as fp:
        selections = read_selections(fp, cfg.selection)
    with open(contrib_path, encoding="utf-8") as fp:
        contributions = read_contributions(fp)
    with open(cent_path, encoding="utf-8") as fp:
        cent = centrality_mod.read_centrality(fp)
    tables = []
    if "longevity" in cfg.models:
        tables.append(quality.longevity_qscore(selections, contributions))
    if "centrality" in cfg.models:
        tables.append(quality.centrality_qscore(selections, cent))
    if "combined" in cfg.models:
        tables.append(quality.combined_qscore(selections, contributions, cent))
    if not tables:
        raise PipelineError("no models configured")
    atomic_write(wd.path("scores.tsv"),
                 lambda fp: quality.write_scores(tables, fp))
    provenance = {
        "config": json.loads(wd.config.to_json()),
        "models": {t.model: t.provenance for t in tables},
    }
    atomic_write(
        wd.path("provenance.json"),
        lambda fp: fp.write(json.dumps(provenance, indent=2, sort_keys=True) + "\n"),
    )
    wd.record("score", [sel_path, contrib_path, cent_path],
              [wd.path(n) for n in ARTIFACTS["score"]])


def stage_eval(wd: Workdir) -> None:
    cfg = wd.config
    (scores_path,) = wd.require("eval", "scores.tsv")
    ratings_path = Path(cfg.ratings)
    if not ratings_path.exists():
        raise PipelineError(f"ratings not found: {ratings_path}")
    with open(scores_path, encoding="utf-8") as fp:
        by_model = quality.read_scores(fp)
    with open(ratings_path, encoding="utf-8") as fp:
        labels = load_ratings(fp)
    ks = cfg.eval_k or [len(labels)]

    def write_report(fp):
        fp.write("model\tconfiguration\tndcg\n")
        for model in sorted(by_model):
            scores = by_model[model]
            for k in ks:
                value = ndcg(build_ranking(scores, labels), k=min(k, len(labels)))
                fp.write(f"{model}\tall@k={k}\t{value!r}\n")
            for name, keep in FILTER_CONFIGS:
                present = {cls for cls in labels.values()}
                if not (present & set(keep)):
                    continue
                value = filtered_eval(scores, labels, keep)
                fp.write(f"{model}\t{name}\t{value!r}\n")

    def write_percentiles(fp):
        fp.write("model\tclass\tbucket\tproportion\n")
        for model in sorted(by_model):
            table = percentile_table(by_model[model], labels, cfg.buckets)
            for cls in sorted(table):
                for b, prop in enumerate(table[cls], start=1):
                    fp.write(f"{model}\t{cls}\t{b}\t{prop!r}\n")

    def write_pr(fp):
        fp.write("model\tcutoff\trecall\tprecision\n")
        for model in sorted(by_model):
            curve = precision_recall(
                by_model[model], labels, cfg.relevant_classes
            )
            for cutoff, (recall, precision) in enumerate(curve, start=1):
                fp.write(f"{model}\t{cutoff}\t{recall!r}\t{precision!r}\n")

    atomic_write(wd.path("report.tsv"), write_report)
    atomic_write(wd.path("percentiles.tsv"), write_percentiles)
    atomic_write(wd.path("pr_curve.tsv"), write_pr)
    wd.record("eval", [scores_path, ratings_path],
              [wd.path(n) for n in ARTIFACTS["eval"]])


_STAGE_FUNCS = {
    "ingest": stage_ingest,
    "contrib": stage_contrib,
    "select": stage_select,
    "net": stage_net,
    "centrality": stage_centrality,
    "score": stage_score,
    "eval": stage_eval,
}


def run_stage(stage: str, config: RunConfig) -> None:
    """Run one pipeline stage; writes resolved config beside the outputs."""
    if stage not in _STAGE_FUNCS:
        raise PipelineError(f"unknown stage {stage!r}")
    wd = Workdir(config)
    atomic_write(wd.path("config_resolved.json"),
                 lambda fp: fp.write(config.to_json()))
    log.info("running stage %s in %s", stage, wd.root)
    _STAGE_FUNCS[stage](wd)


def run_all(config: RunConfig) -> None:
    for stage in STAGES:
        run_stage(stage, config)
