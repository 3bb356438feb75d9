"""Command-line front end.

Exit codes: 0 success, 1 I/O or system failure, 2 invalid input data.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import Settings, load_settings
from .errors import InvalidGroundTruth, MalformedHtml, MalformedTable
from .evaluate import evaluate_corpus, write_outputs
from .matching import MatchConfig
from .normalize import normalize_latex, normalize_table_html, normalize_text
from .report import PageScores, aggregate, emit_report, from_json
from .reward import MiningConfig, RewardWeights, compute_reward, mining_audit
from .schema import Block, parse_page, read_manifest, serialize_page
from .textmetrics import normalize_block

log = logging.getLogger("layoutmetrics")

EXIT_OK, EXIT_IO, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


def _settings(args) -> Settings:
    try:
        s = load_settings(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"invalid config: {exc}") from exc
    try:
        if args.match_threshold is not None:
            s = replace(s, match=MatchConfig(args.match_threshold, s.match.category_must_agree))
        if args.weights is not None:
            s = replace(s, weights=RewardWeights.parse(args.weights))
        if args.mine_range is not None:
            s = replace(s, mining=MiningConfig.parse(args.mine_range))
        if args.workers is not None:
            s = replace(s, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.no_normalize:
        s = replace(s, normalize=s.normalize.disabled())
    return s


def cmd_evaluate(args) -> int:
    settings = _settings(args)
    manifest = args.manifest or str(Path(args.gt_dir) / "manifest.jsonl")
    try:
        entries = read_manifest(manifest)
    except OSError as exc:
        log.error("cannot read manifest: %s", exc)
        return EXIT_DATA
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    try:
        pages, report = evaluate_corpus(args.pred_dir, args.gt_dir, entries, settings, method=args.method)
    except InvalidGroundTruth as exc:
        log.error("invalid ground truth: %s", exc)
        return EXIT_DATA
    except (OSError, UnicodeDecodeError) as exc:
        log.error("cannot read ground truth: %s", exc)
        return EXIT_DATA
    try:
        write_outputs(args.out_dir, pages, report)
    except OSError as exc:
        log.error("cannot write outputs: %s", exc)
        return EXIT_IO
    sys.stdout.write(emit_report(report, args.format))
    return EXIT_OK


def cmd_reward(args) -> int:
    settings = _settings(args)
    try:
        pred_html = Path(args.pred_file).read_text(encoding="utf-8")
        gt_html = Path(args.gt_file).read_text(encoding="utf-8")
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    try:
        breakdown = compute_reward(pred_html, gt_html, settings.weights, settings.match, settings.normalize)
    except InvalidGroundTruth as exc:
        log.error("ground truth does not parse: %s", exc)
        return EXIT_DATA
    print(json.dumps(breakdown.to_dict()))
    return EXIT_OK


def _mining_records(path: Path):
    base = path.parent
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                sid, pred_path, gt_path = str(rec["sample_id"]), rec["pred_path"], rec["gt_path"]
                pred_html = (base / pred_path).read_text(encoding="utf-8")
                gt_html = (base / gt_path).read_text(encoding="utf-8")
            except (json.JSONDecodeError, KeyError, TypeError, OSError, UnicodeDecodeError) as exc:
                log.warning("%s:%d: skipping record (%s)", path, lineno, exc)
                continue
            yield sid, pred_html, gt_html


def cmd_mine(args) -> int:
    settings = _settings(args)
    records = Path(args.records_file)
    out = Path(args.out) if args.out else Path(args.out_dir) / "selection.jsonl"
    selected = total = 0
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as fh:
            for res in mining_audit(_mining_records(records), settings.mining, settings.normalize):
                total += 1
                selected += res.selected
                fh.write(json.dumps({"sample_id": res.sample_id, "ned": res.ned, "selected": res.selected},
                                    ensure_ascii=False) + "\n")
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    print(f"selected {selected}/{total}")
    return EXIT_OK


def cmd_normalize(args) -> int:
    settings = _settings(args)
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    cfg = settings.normalize
    try:
        if args.kind == "text":
            out = normalize_text(text, cfg) + "\n"
        elif args.kind == "latex":
            out = normalize_latex(text, cfg) + "\n"
        elif args.kind == "table":
            out = normalize_table_html(text, cfg) + "\n"
        else:
            doc = parse_page(text)
            blocks = tuple(Block(b.category, normalize_block(b, cfg), b.bbox) for b in doc.blocks)
            out = serialize_page(replace(doc, blocks=blocks))
    except (MalformedHtml, MalformedTable) as exc:
        log.error("%s", exc)
        return EXIT_DATA
    sys.stdout.write(out)
    return EXIT_OK


def cmd_report(args) -> int:
    path = Path(args.input)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    try:
        if path.suffix == ".jsonl":
            pages = [PageScores.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
            report = aggregate(pages, method=args.method)
        else:
            report = from_json(text)
            if args.method != "model":
                report.method = args.method
    except (ValueError, KeyError, TypeError) as exc:
        log.error("cannot read %s: %s", path, exc)
        return EXIT_DATA
    sys.stdout.write(emit_report(report, args.format))
    return EXIT_OK


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file (default: $LAYOUTMETRICS_CONFIG)")
    common.add_argument("--match-threshold", type=float, help="minimum block similarity for a match")
    common.add_argument("--weights", help="reward weights w_text,w_bbox,w_order")
    common.add_argument("--mine-range", help="inclusive NED range lo,hi for hard-sample mining")
    common.add_argument("--workers", type=_positive_int, help="worker processes")
    common.add_argument("--format", choices=("json", "csv", "markdown"), default="markdown")
    common.add_argument("--no-normalize", action="store_true", help="compare raw contents")
    common.add_argument("--out-dir", default=".", help="directory for output files")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="layoutmetrics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", parents=[common], help="score a prediction directory against ground truth")
    p.add_argument("pred_dir")
    p.add_argument("gt_dir")
    p.add_argument("--manifest", help="JSON-lines manifest (default: GT_DIR/manifest.jsonl)")
    p.add_argument("--method", default="model", help="row label in the report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("reward", parents=[common], help="reward breakdown for one prediction")
    p.add_argument("pred_file")
    p.add_argument("gt_file")
    p.set_defaults(func=cmd_reward)

    p = sub.add_parser("mine", parents=[common], help="select hard samples by global text NED")
    p.add_argument("records_file", help="JSON lines {sample_id, pred_path, gt_path}")
    p.add_argument("--out", help="selection JSONL (default: OUT_DIR/selection.jsonl)")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("normalize", parents=[common], help="print normalized content")
    p.add_argument("file")
    p.add_argument("--kind", choices=("page", "text", "latex", "table"), default="page")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("report", parents=[common], help="re-render report.json or per_page_scores.jsonl")
    p.add_argument("input")
    p.add_argument("--method", default="model")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
