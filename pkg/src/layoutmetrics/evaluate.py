"""Corpus evaluation: score every manifest page, then reduce in page_id order."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .config import Settings
from .errors import InvalidGroundTruth, MalformedHtml
from .report import BenchmarkReport, PageScores, aggregate, emit_report, score_page, total_miss
from .schema import ManifestEntry, PageDocument, page_path, parse_page

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class _Task:
    entry: ManifestEntry
    pred_path: str
    gt_path: str
    settings: Settings


@dataclass(frozen=True)
class _Outcome:
    scores: PageScores
    warning: str | None = None


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_ground_truth(path: str | Path, entry: ManifestEntry) -> PageDocument:
    try:
        gt = parse_page(_read(str(path)), page_id=entry.page_id)
    except MalformedHtml as exc:
        raise InvalidGroundTruth(f"{path}: {exc}") from exc
    return replace(gt, page_id=entry.page_id, language=entry.language, doc_category=entry.doc_category)


def _score(task: _Task) -> _Outcome:
    gt = load_ground_truth(task.gt_path, task.entry)
    try:
        text = _read(task.pred_path)
    except FileNotFoundError:
        return _Outcome(total_miss(gt), f"{gt.page_id}: prediction missing, scored as total miss")
    try:
        pred = parse_page(text, page_id=gt.page_id)
    except MalformedHtml as exc:
        return _Outcome(total_miss(gt), f"{gt.page_id}: prediction does not parse ({exc}), scored as total miss")
    s = task.settings
    return _Outcome(score_page(pred, gt, s.match, s.normalize))


def evaluate_corpus(
    pred_dir: str | Path,
    gt_dir: str | Path,
    entries: list[ManifestEntry],
    settings: Settings = Settings(),
    method: str = "model",
) -> tuple[list[PageScores], BenchmarkReport]:
    """Score all pages; output is independent of ``settings.workers``.

    Raises InvalidGroundTruth for unparseable ground truth and OSError when a
    ground-truth file cannot be read.
    """
    tasks = [
        _Task(e, str(page_path(pred_dir, e.page_id)), str(page_path(gt_dir, e.page_id)), settings)
        for e in entries
    ]
    if settings.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=settings.workers) as pool:
            chunk = max(1, len(tasks) // (settings.workers * 4))
            outcomes = list(pool.map(_score, tasks, chunksize=chunk))
    else:
        outcomes = [_score(t) for t in tasks]
    warnings = [o.warning for o in outcomes if o.warning]
    for w in warnings:
        log.warning(w)
    pages = sorted((o.scores for o in outcomes), key=lambda s: s.page_id)
    return pages, aggregate(pages, method=method, warnings=warnings)


def write_outputs(out_dir: str | Path, pages: list[PageScores], report: BenchmarkReport) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "per_page": out / "per_page_scores.jsonl",
        "json": out / "report.json",
        "csv": out / "report.csv",
        "markdown": out / "report.md",
    }
    paths["per_page"].write_text("".join(p.to_json() + "\n" for p in pages), encoding="utf-8")
    for fmt in ("json", "csv", "markdown"):
        paths[fmt].write_text(emit_report(report, fmt), encoding="utf-8")
    return paths
