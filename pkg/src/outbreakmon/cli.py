"""Command-line front end: filter, train, classify, report, pipeline.

Data goes to files or standard output; diagnostics go to standard error.
Exit codes are stable: 0 success, 2 I/O or bad arguments, 3 parse failure,
4 unusable training data, 5 model-file failure, 6 timeline failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from . import __version__
from .corpus import class_counts, load_corpus, load_labeled_set
from .errors import ModelFileError, ParseError, TimelineError, TrainingDataError
from .keywords import DEFAULT_PHRASES, default_keywords, filter_corpus, load_keywords
from .svm import (
    TrainingConfig,
    load_model,
    predict,
    save_model,
    train_from_labeled,
    training_accuracy,
)
from .timeline import (
    builtin_cdc_timeline,
    bucket_counts,
    daily_frequency,
    format_daily_counts,
    format_period_report,
    format_timeline,
    parse_timeline_file,
    validate_timeline,
)
from .vectorizer import vectorize

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_TRAINING_DATA = 4
EXIT_MODEL = 5
EXIT_TIMELINE = 6

FILTERED_NAME = "filtered.jsonl"
RELEVANT_NAME = "relevant.jsonl"
PERIOD_CSV_NAME = "period_counts.csv"
DAILY_CSV_NAME = "daily_counts.csv"
MANIFEST_NAME = "manifest.json"

MANIFEST_FORMAT = "outbreakmon-manifest"
MANIFEST_VERSION = 1


@dataclass
class PipelineConfig:
    """Resolved settings for one invocation (defaults < config file < flags)."""

    input_path: Path | None = None
    keywords_path: Path | None = None
    labeled_path: Path | None = None
    model_path: Path | None = None
    timeline_path: Path | None = None
    output_dir: Path = Path(".")
    strictness: str = "lenient"
    C: float = 1.0
    tolerance: float = 1e-4
    max_epochs: int = 1000
    seed: int = 42
    daily_start: date | None = None
    daily_end: date | None = None
    final_cutoff: date | None = None


# config-file key -> (PipelineConfig field, converter from string)
CONFIG_KEYS = {
    "input": ("input_path", Path),
    "keywords": ("keywords_path", Path),
    "labeled": ("labeled_path", Path),
    "model": ("model_path", Path),
    "timeline": ("timeline_path", Path),
    "output": ("output_dir", Path),
    "strictness": ("strictness", str),
    "c": ("C", float),
    "tolerance": ("tolerance", float),
    "max_epochs": ("max_epochs", int),
    "seed": ("seed", int),
    "daily_start": ("daily_start", date.fromisoformat),
    "daily_end": ("daily_end", date.fromisoformat),
    "final_cutoff": ("final_cutoff", date.fromisoformat),
}


def parse_config_file(path: Path) -> dict[str, object]:
    """Read a flat ``key = value`` config file into converted values."""
    values: dict[str, object] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{line_no}: unknown config key {key!r}")
            field, convert = CONFIG_KEYS[key]
            try:
                values[field] = convert(value)
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: bad value for {key}: {exc}") from None
    return values


def build_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig()
    if getattr(args, "config", None):
        for field, value in parse_config_file(Path(args.config)).items():
            setattr(cfg, field, value)
    overrides = {
        "input": "input_path",
        "keywords": "keywords_path",
        "labeled": "labeled_path",
        "model": "model_path",
        "timeline": "timeline_path",
        "output": "output_dir",
        "seed": "seed",
        "c_param": "C",
        "tolerance": "tolerance",
        "max_epochs": "max_epochs",
        "daily_start": "daily_start",
        "daily_end": "daily_end",
        "final_cutoff": "final_cutoff",
    }
    for arg_name, field in overrides.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            if field.endswith(("_path", "_dir")):
                value = Path(value)
            setattr(cfg, field, value)
    if getattr(args, "strict", None):
        cfg.strictness = "strict"
    if cfg.strictness not in ("strict", "lenient"):
        raise ValueError(f"strictness must be strict or lenient, got {cfg.strictness!r}")
    return cfg


def _write_text_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _load_corpus_file(path: Path | None, strictness: str, role: str):
    if path is None:
        raise FileNotFoundError(f"no {role} file configured")
    with open(path, "r", encoding="utf-8") as fh:
        return load_corpus(fh, strictness)


def _load_keyword_set(path: Path | None):
    if path is None:
        return default_keywords()
    with open(path, "r", encoding="utf-8") as fh:
        return load_keywords(fh)


def _load_timeline(path: Path | None):
    if path is None:
        return builtin_cdc_timeline()
    with open(path, "r", encoding="utf-8") as fh:
        return parse_timeline_file(fh)


def config_hash(cfg: PipelineConfig) -> str:
    """Hash of the pipeline-semantic settings (output location excluded, so
    reruns into different directories produce identical manifests)."""
    semantic = {
        "input": str(cfg.input_path) if cfg.input_path else None,
        "keywords": str(cfg.keywords_path) if cfg.keywords_path else None,
        "model": str(cfg.model_path) if cfg.model_path else None,
        "timeline": str(cfg.timeline_path) if cfg.timeline_path else None,
        "strictness": cfg.strictness,
        "daily_start": cfg.daily_start.isoformat() if cfg.daily_start else None,
        "daily_end": cfg.daily_end.isoformat() if cfg.daily_end else None,
        "final_cutoff": cfg.final_cutoff.isoformat() if cfg.final_cutoff else None,
    }
    canonical = json.dumps(semantic, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def run_filter(cfg: PipelineConfig) -> dict:
    corpus = _load_corpus_file(cfg.input_path, cfg.strictness, "input")
    keywords = _load_keyword_set(cfg.keywords_path)
    filtered = filter_corpus(corpus, keywords)
    out_path = cfg.output_dir / FILTERED_NAME
    _write_text_atomic(out_path, "".join(r.to_line() + "\n" for r in filtered))
    kept, dropped = len(filtered), len(corpus) - len(filtered)
    log.info("filter: %d read (%d rejected lines), %d kept, %d dropped -> %s",
             len(corpus), corpus.rejected_count, kept, dropped, out_path)
    return {
        "input_records": len(corpus),
        "rejected_lines": corpus.rejected_count,
        "kept": kept,
        "dropped": dropped,
        "output": FILTERED_NAME,
    }


def run_train(cfg: PipelineConfig) -> dict:
    if cfg.labeled_path is None:
        raise FileNotFoundError("no labeled training file configured")
    if cfg.model_path is None:
        raise FileNotFoundError("no model output path configured")
    with open(cfg.labeled_path, "r", encoding="utf-8") as fh:
        examples = load_labeled_set(fh)
    negative, positive = class_counts(examples)
    train_config = TrainingConfig(
        C=cfg.C, tolerance=cfg.tolerance, max_epochs=cfg.max_epochs, seed=cfg.seed
    )
    model = train_from_labeled(examples, train_config)
    save_model(model, cfg.model_path)
    accuracy = training_accuracy(model, examples)
    log.info(
        "train: %d negative / %d positive examples, %d epochs, "
        "final objective %.6g, training accuracy %.4f -> %s",
        negative, positive, model.training_meta.epochs_run,
        model.training_meta.final_objective, accuracy, cfg.model_path,
    )
    return {
        "examples": len(examples),
        "negative": negative,
        "positive": positive,
        "epochs_run": model.training_meta.epochs_run,
        "training_accuracy": accuracy,
    }


def run_classify(cfg: PipelineConfig, input_path: Path | None = None) -> dict:
    if cfg.model_path is None:
        raise FileNotFoundError("no model file configured")
    model = load_model(cfg.model_path)
    corpus = _load_corpus_file(input_path or cfg.input_path, cfg.strictness, "input")
    relevant = tuple(
        record
        for record in corpus
        if predict(model, vectorize(model.vectorizer, record.text)) == 1
    )
    out_path = cfg.output_dir / RELEVANT_NAME
    _write_text_atomic(out_path, "".join(r.to_line() + "\n" for r in relevant))
    log.info("classify: %d read, %d relevant, %d irrelevant -> %s",
             len(corpus), len(relevant), len(corpus) - len(relevant), out_path)
    return {
        "input_records": len(corpus),
        "rejected_lines": corpus.rejected_count,
        "relevant": len(relevant),
        "irrelevant": len(corpus) - len(relevant),
        "output": RELEVANT_NAME,
    }


def run_report(cfg: PipelineConfig, input_path: Path | None = None) -> dict:
    if (
        cfg.daily_start is not None
        and cfg.daily_end is not None
        and cfg.daily_end < cfg.daily_start
    ):
        raise ValueError(f"inverted daily interval: {cfg.daily_start}..{cfg.daily_end}")
    corpus = _load_corpus_file(input_path or cfg.input_path, cfg.strictness, "input")
    timeline = _load_timeline(cfg.timeline_path)
    violations = validate_timeline(timeline)
    if violations:
        raise TimelineError("invalid timeline:\n  " + "\n  ".join(violations))

    tweets = corpus.records
    excluded = 0
    if cfg.final_cutoff is not None:
        bounded = tuple(t for t in tweets if t.timestamp.date() <= cfg.final_cutoff)
        excluded = len(tweets) - len(bounded)
        tweets = bounded

    report = bucket_counts(timeline, tweets)
    _write_text_atomic(cfg.output_dir / PERIOD_CSV_NAME, format_period_report(report))

    tweet_days = [t.timestamp.date() for t in tweets]
    start = cfg.daily_start or (min(tweet_days) if tweet_days else None)
    end = cfg.daily_end or (max(tweet_days) if tweet_days else None)
    if start is None or end is None or end < start:
        # no data and no explicit range, or one bound beyond the data: header only
        series = []
    else:
        series = daily_frequency(tweets, start, end)
    _write_text_atomic(cfg.output_dir / DAILY_CSV_NAME, format_daily_counts(series))

    sys.stdout.write(format_period_report(report))
    log.info("report: %d records bucketed into %d periods (%d excluded past cutoff), "
             "%d daily rows", len(tweets), len(report.rows), excluded, len(series))
    return {
        "input_records": len(corpus),
        "rejected_lines": corpus.rejected_count,
        "excluded_after_cutoff": excluded,
        "periods": len(report.rows),
        "period_total": report.total,
        "daily_days": len(series),
        "daily_total": sum(count for _, count in series),
        "outputs": [PERIOD_CSV_NAME, DAILY_CSV_NAME],
    }


def run_pipeline(cfg: PipelineConfig) -> dict:
    # Validate the full configuration before any stage writes anything.
    for role, path in (("input", cfg.input_path), ("model", cfg.model_path)):
        if path is None:
            raise FileNotFoundError(f"no {role} file configured")
        if not Path(path).exists():
            raise FileNotFoundError(f"{role} file does not exist: {path}")
    for role, path in (("keywords", cfg.keywords_path), ("timeline", cfg.timeline_path)):
        if path is not None and not Path(path).exists():
            raise FileNotFoundError(f"{role} file does not exist: {path}")

    stages = {
        "filter": run_filter(cfg),
        "classify": run_classify(cfg, input_path=cfg.output_dir / FILTERED_NAME),
        "report": run_report(cfg, input_path=cfg.output_dir / RELEVANT_NAME),
    }
    manifest = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "tool_version": __version__,
        "config_hash": config_hash(cfg),
        "stages": stages,
    }
    _write_text_atomic(
        cfg.output_dir / MANIFEST_NAME,
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    )
    log.info("pipeline complete; manifest -> %s", cfg.output_dir / MANIFEST_NAME)
    return manifest


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="outbreakmon",
        description="Filter a tweet stream by keyword phrases, classify relevance "
                    "with a tf-idf linear SVM, and report counts per announcement period.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--output", help="output directory (default: current directory)")
    common.add_argument("--quiet", action="store_true", default=None,
                        help="suppress informational messages")

    p = sub.add_parser("filter", parents=[common],
                       help="keep only records matching a keyword phrase")
    p.add_argument("--input", help="raw record file (one JSON object per line)")
    p.add_argument("--keywords", help="phrase file, one per line (default: builtin set)")
    p.add_argument("--strict", action="store_true", default=None,
                   help="abort on the first malformed line")

    p = sub.add_parser("train", parents=[common],
                       help="fit the tf-idf vocabulary and train the relevance SVM")
    p.add_argument("--labeled", help="labeled training file (label -1 or 1 per record)")
    p.add_argument("--model", help="where to write the model file")
    p.add_argument("--seed", type=int, help="shuffling seed (default 42)")
    p.add_argument("--c-param", type=float, dest="c_param",
                   help="soft-margin penalty C (default 1.0)")
    p.add_argument("--tolerance", type=float, help="stopping tolerance (default 1e-4)")
    p.add_argument("--max-epochs", type=int, dest="max_epochs",
                   help="epoch cap (default 1000)")

    p = sub.add_parser("classify", parents=[common],
                       help="keep only records the model predicts relevant")
    p.add_argument("--input", help="record file to classify")
    p.add_argument("--model", help="trained model file")
    p.add_argument("--strict", action="store_true", default=None)

    p = sub.add_parser("report", parents=[common],
                       help="bucket classified records into announcement periods")
    p.add_argument("--input", help="classified record file")
    p.add_argument("--timeline", help="timeline CSV (default: builtin CDC timeline)")
    p.add_argument("--daily-start", type=date.fromisoformat, dest="daily_start",
                   help="first day of the daily-frequency table (YYYY-MM-DD)")
    p.add_argument("--daily-end", type=date.fromisoformat, dest="daily_end",
                   help="last day of the daily-frequency table (YYYY-MM-DD)")
    p.add_argument("--final-cutoff", type=date.fromisoformat, dest="final_cutoff",
                   help="last day counted in the final open-ended period")
    p.add_argument("--strict", action="store_true", default=None)

    p = sub.add_parser("pipeline", parents=[common],
                       help="filter, classify with an existing model, then report")
    p.add_argument("--input", help="raw record file")
    p.add_argument("--keywords", help="phrase file (default: builtin set)")
    p.add_argument("--model", help="trained model file (train separately first)")
    p.add_argument("--timeline", help="timeline CSV (default: builtin CDC timeline)")
    p.add_argument("--daily-start", type=date.fromisoformat, dest="daily_start")
    p.add_argument("--daily-end", type=date.fromisoformat, dest="daily_end")
    p.add_argument("--final-cutoff", type=date.fromisoformat, dest="final_cutoff")
    p.add_argument("--strict", action="store_true", default=None)

    p = sub.add_parser("timeline", help="inspect the builtin timeline")
    p.add_argument("--print-builtin", action="store_true", dest="print_builtin",
                   help="write the builtin timeline CSV to standard output")

    p = sub.add_parser("keywords", help="inspect the builtin keyword set")
    p.add_argument("--print-builtin", action="store_true", dest="print_builtin",
                   help="write the builtin phrases to standard output")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    quiet = bool(getattr(args, "quiet", False))
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING if quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        force=True,
    )

    if args.command == "timeline":
        if not args.print_builtin:
            parser.error("timeline: nothing to do (use --print-builtin)")
        sys.stdout.write(format_timeline(builtin_cdc_timeline()))
        return EXIT_OK
    if args.command == "keywords":
        if not args.print_builtin:
            parser.error("keywords: nothing to do (use --print-builtin)")
        sys.stdout.write("\n".join(DEFAULT_PHRASES) + "\n")
        return EXIT_OK

    try:
        cfg = build_config(args)
        if args.command == "filter":
            run_filter(cfg)
        elif args.command == "train":
            run_train(cfg)
        elif args.command == "classify":
            run_classify(cfg)
        elif args.command == "report":
            run_report(cfg)
        elif args.command == "pipeline":
            run_pipeline(cfg)
        else:  # unreachable: argparse rejects unknown commands
            parser.error(f"unknown command {args.command!r}")
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except ParseError as exc:
        log.error("parse failure: %s", exc)
        return EXIT_PARSE
    except TrainingDataError as exc:
        log.error("training data unusable: %s", exc)
        return EXIT_TRAINING_DATA
    except ModelFileError as exc:
        log.error("model failure: %s", exc)
        return EXIT_MODEL
    except TimelineError as exc:
        log.error("timeline failure: %s", exc)
        return EXIT_TIMELINE
    except ValueError as exc:
        log.error("bad arguments: %s", exc)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
