"""Command-line front end.

Subcommands:

* ``extract``  transcripts dir -> feature CSV
* ``train-lm`` transcripts dir -> six saved n-gram model files
* ``analyze``  config file -> full report bundle
* ``report``   report JSON/bundle -> human-readable tables

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ngram, pipeline
from .errors import DataError, NumericError, PipelineError, UsageError


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="langprofile",
                     description="Language-sample feature extraction and "
                                 "cluster profiling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract the feature CSV from a "
                                       "directory of .cha transcripts")
    p.add_argument("transcripts", help="directory containing .cha files")
    p.add_argument("-o", "--output", required=True, help="feature CSV to write")
    p.add_argument("--smoothing-k", type=float, default=1.0)
    p.add_argument("--unk-threshold", type=int, default=1)
    p.add_argument("--loo", action="store_true",
                   help="score each transcript with a leave-one-out model "
                        "of its own group")
    p.add_argument("--count-fusions", action="store_true",
                   help="count fused affixes as morphemes")
    p.add_argument("--dss-table", default="", help="custom DSS scoring table (JSON)")
    p.add_argument("--ipsyn-table", default="", help="custom IPSyn checklist (JSON)")

    p = sub.add_parser("train-lm", help="train and save the six group "
                                        "language models")
    p.add_argument("transcripts", help="directory containing .cha files")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--smoothing-k", type=float, default=1.0)
    p.add_argument("--unk-threshold", type=int, default=1)

    p = sub.add_parser("analyze", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True, help="pipeline config file")

    p = sub.add_parser("report", help="render report JSON as readable tables")
    p.add_argument("path", help="a report .json file or a bundle directory")
    return parser


def _cmd_extract(args) -> int:
    transcripts = pipeline.load_transcripts(args.transcripts)
    config = pipeline.PipelineConfig(
        input_mode="transcripts", input_path=args.transcripts, output_dir=".",
        seed=0, count_fusions=args.count_fusions, dss_table=args.dss_table,
        ipsyn_table=args.ipsyn_table, smoothing_k=args.smoothing_k,
        unk_threshold=args.unk_threshold, loo=args.loo)
    cohort = pipeline.extract_cohort(transcripts, config)
    Path(args.output).write_text(pipeline.render_feature_csv(cohort),
                                 encoding="utf-8")
    for t in transcripts:
        for w in t.warnings:
            print(f"warning: {t.id}: {w}", file=sys.stderr)
    print(f"wrote {len(cohort.matrix.row_ids)} rows to {args.output}")
    return 0


def _cmd_train_lm(args) -> int:
    transcripts = pipeline.load_transcripts(args.transcripts)
    models = ngram.train_group_models(transcripts, args.smoothing_k,
                                      args.unk_threshold)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for label, prefix in (("SLI", "sli"), ("TD", "td")):
        for order, model in models[label].items():
            path = out / f"{prefix}_{order}g.lm"
            ngram.save_model(model, path)
            print(f"wrote {path}")
    return 0


def _cmd_analyze(args) -> int:
    config = pipeline.load_config(args.config)
    bundle = pipeline.run_pipeline(config)
    for name in pipeline.REPORT_FILES:
        print(f"wrote {bundle.output_dir / name}")
    return 0


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _render_table(rows: list[dict], title: str) -> str:
    if not rows:
        return f"{title}\n  (empty)\n"
    cols = list(rows[0].keys())
    table = [[_fmt(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in table)) for i, c in enumerate(cols)]
    lines = [title,
             "  " + "  ".join(c.ljust(w) for c, w in zip(cols, widths)),
             "  " + "  ".join("-" * w for w in widths)]
    for row in table:
        lines.append("  " + "  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def _render_report(path: Path) -> str:
    data = json.loads(path.read_text(encoding="utf-8"))
    out = [f"== {path.name} =="]
    scalars = []
    for key, value in data.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            out.append(_render_table(value, key))
        elif isinstance(value, dict):
            out.append(_render_table([value], key))
        elif isinstance(value, list):
            scalars.append({"key": key, "value": " ".join(map(str, value))})
        else:
            scalars.append({"key": key, "value": _fmt(value)})
    out.insert(1, _render_table(scalars, "summary"))
    return "\n".join(out)


def _cmd_report(args) -> int:
    target = Path(args.path)
    if target.is_dir():
        paths = sorted(target.glob("*_report.json"))
        if not paths:
            raise DataError(f"no *_report.json files in {target}")
    else:
        if not target.exists():
            raise DataError(f"no such report: {target}")
        paths = [target]
    for p in paths:
        print(_render_report(p))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "extract":
            return _cmd_extract(args)
        if args.command == "train-lm":
            return _cmd_train_lm(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "report":
            return _cmd_report(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if isinstance(exc.cause, NumericError) else 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
