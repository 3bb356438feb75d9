"""Per-page scoring and corpus aggregation into the benchmark table layout."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InvalidGroundTruth, MalformedTable
from .matching import MatchConfig, match_blocks
from .normalize import DEFAULT_CONFIG, NormalizationConfig
from .ordermetrics import read_order_edit
from .schema import BlockCategory, Language, PageDocument
from .tablemetrics import parse_table_tree, table_edit, teds
from .textmetrics import category_edit, global_text_edit

METRICS = (
    "text_edit",
    "formula_edit",
    "table_teds",
    "table_edit",
    "read_order_edit",
    "chemistry_edit",
    "hw_edit",
)
OVERALL_COMPONENTS = ("text_edit", "formula_edit", "table_edit", "read_order_edit")
LANGUAGES = (Language.EN.value, Language.ZH.value)


@dataclass(frozen=True)
class PageScores:
    page_id: str
    language: str
    doc_category: str
    text_edit: float | None = None
    formula_edit: float | None = None
    table_teds: float | None = None
    table_edit: float | None = None
    read_order_edit: float | None = None
    chemistry_edit: float | None = None
    hw_edit: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping) -> "PageScores":
        return cls(**{k: d.get(k) for k in cls.__dataclass_fields__})


def _table_scores(pred: PageDocument, gt: PageDocument, pairs, norm) -> tuple[float, float]:
    gt_tables = gt.indices(BlockCategory.TABLE)
    pred_tables = set(pred.indices(BlockCategory.TABLE))
    gt_set = set(gt_tables)
    teds_scores, edit_scores = [], []
    matched_pred, matched_gt = set(), set()
    for p, g, _ in pairs:
        if p in pred_tables and g in gt_set:
            teds_scores.append(teds(pred.blocks[p].content, gt.blocks[g].content, norm))
            edit_scores.append(table_edit(pred.blocks[p].content, gt.blocks[g].content, norm))
            matched_pred.add(p)
            matched_gt.add(g)
    misses = len(pred_tables - matched_pred) + len(gt_set - matched_gt)
    teds_scores.extend([0.0] * misses)
    edit_scores.extend([1.0] * misses)
    return sum(teds_scores) / len(teds_scores), sum(edit_scores) / len(edit_scores)


def present_metrics(gt: PageDocument) -> set[str]:
    cats = {b.category for b in gt.blocks}
    out = set()
    if any(c.text_like and not c.excluded_from_global_text for c in cats):
        out.add("text_edit")
    if BlockCategory.FORMULA in cats:
        out.add("formula_edit")
    if BlockCategory.TABLE in cats:
        out.update(("table_teds", "table_edit"))
    if any(not c.excluded_from_reading_order for c in cats):
        out.add("read_order_edit")
    if BlockCategory.CHEMISTRY in cats:
        out.add("chemistry_edit")
    if BlockCategory.HANDWRITING in cats:
        out.add("hw_edit")
    return out


def score_page(
    pred: PageDocument,
    gt: PageDocument,
    match_cfg: MatchConfig = MatchConfig(),
    norm: NormalizationConfig = DEFAULT_CONFIG,
) -> PageScores:
    """Every metric the ground-truth page supports; the rest stay None."""
    for i in gt.indices(BlockCategory.TABLE):
        try:
            parse_table_tree(gt.blocks[i].content, norm)
        except MalformedTable as exc:
            raise InvalidGroundTruth(f"{gt.page_id}: table block {i}: {exc}") from exc

    match = match_blocks(pred, gt, match_cfg, norm)
    present = present_metrics(gt)
    scores: dict = {}
    if "text_edit" in present:
        scores["text_edit"] = global_text_edit(pred, gt, norm)
    if "formula_edit" in present:
        scores["formula_edit"] = category_edit(pred, gt, BlockCategory.FORMULA, match, norm)
    if "table_teds" in present:
        scores["table_teds"], scores["table_edit"] = _table_scores(pred, gt, match.pairs, norm)
    if "read_order_edit" in present:
        scores["read_order_edit"] = read_order_edit(match, pred, gt)
    if "chemistry_edit" in present:
        scores["chemistry_edit"] = category_edit(pred, gt, BlockCategory.CHEMISTRY, match, norm)
    if "hw_edit" in present:
        scores["hw_edit"] = category_edit(pred, gt, BlockCategory.HANDWRITING, match, norm)
    return PageScores(gt.page_id, gt.language.value, gt.doc_category, **scores)


def total_miss(gt: PageDocument) -> PageScores:
    """Worst score on every metric the page supports (prediction missing)."""
    worst = {m: (0.0 if m == "table_teds" else 1.0) for m in present_metrics(gt)}
    return PageScores(gt.page_id, gt.language.value, gt.doc_category, **worst)


# --- aggregation ------------------------------------------------------------


@dataclass
class Aggregate:
    """Exact running sum so merging partitions in any order gives the same mean."""

    total: Fraction = Fraction(0)
    count: int = 0

    def add(self, value: float) -> None:
        self.total += Fraction(value)
        self.count += 1

    def merge(self, other: "Aggregate") -> None:
        self.total += other.total
        self.count += other.count

    @property
    def mean(self) -> float | None:
        return float(self.total / self.count) if self.count else None


def _new_scope() -> dict[str, Aggregate]:
    return {m: Aggregate() for m in METRICS}


@dataclass
class BenchmarkReport:
    method: str = "model"
    by_language: dict[str, dict[str, Aggregate]] = field(default_factory=dict)
    by_category: dict[str, dict[str, Aggregate]] = field(default_factory=dict)
    pooled: dict[str, Aggregate] = field(default_factory=_new_scope)
    pages: dict[str, int] = field(default_factory=dict)  # "ALL", "EN", "ZH", "category:<name>"
    warnings: list[str] = field(default_factory=list)

    def add(self, s: PageScores) -> None:
        scopes = [
            self.pooled,
            self.by_language.setdefault(s.language, _new_scope()),
            self.by_category.setdefault(s.doc_category, _new_scope()),
        ]
        for m in METRICS:
            v = getattr(s, m)
            if v is not None:
                for scope in scopes:
                    scope[m].add(v)
        for key in ("ALL", s.language, f"category:{s.doc_category}"):
            self.pages[key] = self.pages.get(key, 0) + 1

    def merge(self, other: "BenchmarkReport") -> None:
        for m, agg in other.pooled.items():
            self.pooled[m].merge(agg)
        for mine, theirs in ((self.by_language, other.by_language), (self.by_category, other.by_category)):
            for key, scope in theirs.items():
                target = mine.setdefault(key, _new_scope())
                for m, agg in scope.items():
                    target[m].merge(agg)
        for key, n in other.pages.items():
            self.pages[key] = self.pages.get(key, 0) + n
        self.warnings.extend(other.warnings)

    def means(self, scope: Mapping[str, Aggregate]) -> dict[str, float | None]:
        return {m: scope[m].mean for m in METRICS}


def aggregate(pages: Iterable[PageScores], method: str = "model", warnings: Iterable[str] = ()) -> BenchmarkReport:
    report = BenchmarkReport(method=method, warnings=sorted(warnings))
    for s in sorted(pages, key=lambda s: s.page_id):
        report.add(s)
    return report


def overall_edit(means: Mapping[str, float | None]) -> float | None:
    """Unweighted mean of the text, formula, table and reading-order edits present."""
    present = [means[m] for m in OVERALL_COMPONENTS if means.get(m) is not None]
    return sum(present) / len(present) if present else None


# --- presentation -----------------------------------------------------------


@dataclass(frozen=True)
class LeaderboardRow:
    method: str
    overall: dict[str, float | None]
    text: dict[str, float | None]
    formula: dict[str, float | None]
    teds: dict[str, float | None]  # ratio in [0, 1]; shown x100
    table: dict[str, float | None]
    read_order: dict[str, float | None]
    chemistry: float | None
    hw: float | None


_LB_GROUPS = (
    ("overall", "Overall Edit ↓"),
    ("text", "Text Edit ↓"),
    ("formula", "Formula Edit ↓"),
    ("teds", "Table TEDS ↑"),
    ("table", "Table Edit ↓"),
    ("read_order", "ReadOrder Edit ↓"),
)
_LB_METRIC = {
    "text": "text_edit",
    "formula": "formula_edit",
    "teds": "table_teds",
    "table": "table_edit",
    "read_order": "read_order_edit",
}


def leaderboard_row(report: BenchmarkReport) -> LeaderboardRow:
    per_lang = {
        lang: report.means(report.by_language.get(lang, _new_scope())) for lang in LANGUAGES
    }
    cols = {name: {lang: per_lang[lang][metric] for lang in LANGUAGES} for name, metric in _LB_METRIC.items()}
    overall = {lang: overall_edit(per_lang[lang]) for lang in LANGUAGES}
    return LeaderboardRow(
        method=report.method,
        overall=overall,
        chemistry=report.pooled["chemistry_edit"].mean,
        hw=report.pooled["hw_edit"].mean,
        **cols,
    )


def fmt_edit(v: float | None) -> str:
    return "-" if v is None else f"{v:.3f}"


def fmt_teds(v: float | None) -> str:
    return "-" if v is None else f"{v * 100:.1f}"


def render_leaderboard(rows: Iterable[LeaderboardRow]) -> str:
    header = ["Method"]
    for _, title in _LB_GROUPS:
        header += [f"{title} {lang}" for lang in LANGUAGES]
    header += ["Chemistry Edit ↓ ALL", "HW Edit ↓ ALL"]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join([":---"] + ["---:"] * (len(header) - 1)) + "|",
    ]
    for row in rows:
        cells = [row.method]
        for key, _ in _LB_GROUPS:
            fmt = fmt_teds if key == "teds" else fmt_edit
            cells += [fmt(getattr(row, key)[lang]) for lang in LANGUAGES]
        cells += [fmt_edit(row.chemistry), fmt_edit(row.hw)]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _render_categories(report: BenchmarkReport) -> str:
    header = ["Category", "Pages", "Overall Edit ↓", "Text Edit ↓", "Formula Edit ↓", "Table TEDS ↑",
              "Table Edit ↓", "ReadOrder Edit ↓", "Chemistry Edit ↓", "HW Edit ↓"]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join([":---"] + ["---:"] * (len(header) - 1)) + "|",
    ]
    for cat in sorted(report.by_category):
        m = report.means(report.by_category[cat])
        cells = [cat or "(none)", str(report.pages.get(f"category:{cat}", 0)), fmt_edit(overall_edit(m))]
        for metric in METRICS:
            cells.append(fmt_teds(m[metric]) if metric == "table_teds" else fmt_edit(m[metric]))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def to_markdown(report: BenchmarkReport) -> str:
    rows = [leaderboard_row(report)] if report.pages.get("ALL") else []
    pages = ", ".join(f"{lang} {report.pages.get(lang, 0)}" for lang in LANGUAGES)
    parts = [
        f"# Benchmark report: {report.method}\n",
        f"Pages: {report.pages.get('ALL', 0)} ({pages})\n",
        render_leaderboard(rows),
        "## By document category\n",
        _render_categories(report),
    ]
    if report.warnings:
        parts.append("## Warnings\n")
        parts.append("".join(f"- {w}\n" for w in report.warnings))
    return "\n".join(parts)


def _scope_json(scope: Mapping[str, Aggregate], pages: int) -> dict:
    metrics = {
        m: {"mean": agg.mean, "count": agg.count, "sum": f"{agg.total.numerator}/{agg.total.denominator}"}
        for m, agg in scope.items()
    }
    return {"pages": pages, "overall_edit": overall_edit({m: a.mean for m, a in scope.items()}), "metrics": metrics}


def to_json(report: BenchmarkReport) -> str:
    doc = {
        "method": report.method,
        "all": _scope_json(report.pooled, report.pages.get("ALL", 0)),
        "by_language": {
            k: _scope_json(v, report.pages.get(k, 0)) for k, v in sorted(report.by_language.items())
        },
        "by_category": {
            k: _scope_json(v, report.pages.get(f"category:{k}", 0)) for k, v in sorted(report.by_category.items())
        },
        "warnings": report.warnings,
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _scope_from_json(d: Mapping) -> dict[str, Aggregate]:
    scope = _new_scope()
    for m, v in d["metrics"].items():
        scope[m] = Aggregate(Fraction(v["sum"]), int(v["count"]))
    return scope


def from_json(text: str) -> BenchmarkReport:
    doc = json.loads(text)
    report = BenchmarkReport(method=doc["method"], warnings=list(doc.get("warnings", [])))
    report.pooled = _scope_from_json(doc["all"])
    report.pages["ALL"] = doc["all"]["pages"]
    for k, v in doc["by_language"].items():
        report.by_language[k] = _scope_from_json(v)
        report.pages[k] = v["pages"]
    for k, v in doc["by_category"].items():
        report.by_category[k] = _scope_from_json(v)
        report.pages[f"category:{k}"] = v["pages"]
    return report


_CSV_FIELDS = ["scope", "key", "metric", "mean", "count", "sum"]


def to_csv(report: BenchmarkReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_FIELDS)
    w.writerow(["method", report.method, "", "", "", ""])

    def scope_rows(kind: str, key: str, scope: Mapping[str, Aggregate], pages: int):
        w.writerow([kind, key, "pages", "", pages, ""])
        w.writerow([kind, key, "overall_edit", _num(overall_edit({m: a.mean for m, a in scope.items()})), "", ""])
        for m in METRICS:
            agg = scope[m]
            w.writerow([kind, key, m, _num(agg.mean), agg.count, f"{agg.total.numerator}/{agg.total.denominator}"])

    scope_rows("all", "ALL", report.pooled, report.pages.get("ALL", 0))
    for k in sorted(report.by_language):
        scope_rows("language", k, report.by_language[k], report.pages.get(k, 0))
    for k in sorted(report.by_category):
        scope_rows("category", k, report.by_category[k], report.pages.get(f"category:{k}", 0))
    for warning in report.warnings:
        w.writerow(["warning", warning, "", "", "", ""])
    return buf.getvalue()


def _num(v: float | None) -> str:
    return "" if v is None else repr(v)


def from_csv(text: str) -> BenchmarkReport:
    report = BenchmarkReport()
    for row in csv.DictReader(io.StringIO(text)):
        kind, key, metric = row["scope"], row["key"], row["metric"]
        if kind == "method":
            report.method = key
            continue
        if kind == "warning":
            report.warnings.append(key)
            continue
        if kind == "all":
            scope, page_key = report.pooled, "ALL"
        elif kind == "language":
            scope, page_key = report.by_language.setdefault(key, _new_scope()), key
        elif kind == "category":
            scope, page_key = report.by_category.setdefault(key, _new_scope()), f"category:{key}"
        else:
            raise ValueError(f"unknown CSV scope {kind!r}")
        if metric == "pages":
            report.pages[page_key] = int(row["count"])
        elif metric in METRICS:
            scope[metric] = Aggregate(Fraction(row["sum"]), int(row["count"]))
    return report


def emit_report(report: BenchmarkReport, fmt: str = "markdown") -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "markdown":
        return to_markdown(report)
    raise ValueError(f"unknown report format {fmt!r}")
