"""Command-line front end for the whole pipeline.

Subcommands: preprocess, train, predict, evaluate, verify, codegen, serve.
Exit codes: 0 success, 1 domain error (error name on stderr), 2 usage.
Raw vs processed CSV input is detected from the header; anything else is
rejected rather than guessed.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import service
from .codegen import EmitDialect, emit
from .config import AppConfig, load_config
from .dataset import Dataset, parse_csv, write_csv
from .errors import DomainViolation, GradeGaugeError, SchemaMismatch
from .evaluation import evaluate_bulk, predict_single, verify
from .induction import TrainedModel, train_c45, train_id3
from .persistence import Store
from .preprocess import (
    ProcessedStudentRecord,
    preprocess,
    raw_student_schema,
    sniff_student_schema,
)

_DIALECTS = {"pseudo": EmitDialect.PSEUDO_CODE, "c": EmitDialect.C_STYLE,
             "python": EmitDialect.PYTHON_STYLE}


def _read_student_csv(path: str) -> Dataset:
    text = Path(path).read_text(encoding="utf-8")
    return parse_csv(text, sniff_student_schema(text))


def _ensure_processed(d: Dataset, config: AppConfig) -> Dataset:
    if set(d.schema.names) == set(raw_student_schema().names):
        d, _ = preprocess(d, config.thresholds)
    return d


def _cmd_preprocess(args: argparse.Namespace, config: AppConfig) -> int:
    d = _read_student_csv(args.infile)
    if set(d.schema.names) != set(raw_student_schema().names):
        raise SchemaMismatch("input is already in processed form")
    processed, dropped = preprocess(d, config.thresholds)
    Path(args.outfile).write_text(write_csv(processed), encoding="utf-8")
    print(f"wrote {args.outfile}: {len(processed)} rows kept, "
          f"{len(dropped)} dropped")
    return 0


def _cmd_train(args: argparse.Namespace, config: AppConfig) -> int:
    d = _ensure_processed(_read_student_csv(args.infile), config)
    trainer = train_id3 if args.algo == "id3" else train_c45
    model = trainer(d, list(d.schema.feature_names), config.train)
    store = Store(config.store_path)
    try:
        model_id = store.save_model(model, args.model_out)
    finally:
        store.close()
    print(f"model {model_id}: {model.algorithm}, "
          f"rows={model.stats.training_rows}, "
          f"nodes={model.stats.node_count}, leaves={model.stats.leaf_count}")
    return 0


def _load_model(config: AppConfig, model_id: str) -> TrainedModel:
    store = Store(config.store_path)
    try:
        return store.load_model(model_id)
    finally:
        store.close()


def _cmd_predict(args: argparse.Namespace, config: AppConfig) -> int:
    model = _load_model(config, args.model)
    try:
        record = ProcessedStudentRecord(merit=args.merit, gender=args.gender,
                                        percent=args.percent, type=args.type)
    except ValueError as exc:
        raise DomainViolation(str(exc)) from exc
    print(predict_single(model, record, model_ref=args.model).predicted)
    return 0


def _cmd_evaluate(args: argparse.Namespace, config: AppConfig) -> int:
    model = _load_model(config, args.model)
    d = _read_student_csv(args.infile)
    predictions, wall_ms = evaluate_bulk(model, d, args.model,
                                         config.thresholds)
    class_col = d.schema.index_of(d.schema.class_attribute.name)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(d.schema.names)
    for row, p in zip(d.rows, predictions):
        cells = ["" if c is None else (repr(c) if isinstance(c, float) else c)
                 for c in row]
        cells[class_col] = p.predicted
        writer.writerow(cells)
    Path(args.outfile).write_text(out.getvalue(), encoding="utf-8")
    print(f"wrote {args.outfile}: {len(predictions)} predictions "
          f"in {wall_ms:.3f} ms")
    return 0


def _cmd_verify(args: argparse.Namespace, config: AppConfig) -> int:
    model = _load_model(config, args.model)
    d = _read_student_csv(args.infile)
    report = verify(model, d, args.model, config.thresholds)
    features = list(model.schema.feature_names)
    print(f"total: {report.total}")
    print(f"correct: {report.correct}")
    print(f"accuracy: {report.accuracy_percent:.3f}")
    print(f"wall_ms: {report.wall_time_ms:.3f}")
    print(f"mismatches ({len(report.mismatches)}):")
    print("\t".join(["ref", *features, "actual", "predicted"]))
    for m in report.mismatches:
        values = ["" if m.inputs.get(f) is None else str(m.inputs[f])
                  for f in features]
        print("\t".join([str(m.record_ref), *values, m.actual, m.predicted]))
    return 0


def _cmd_codegen(args: argparse.Namespace, config: AppConfig) -> int:
    model = _load_model(config, args.model)
    source = emit(model, _DIALECTS[args.dialect], args.name,
                  include_untested=args.include_untested)
    if args.outfile:
        Path(args.outfile).write_text(source, encoding="utf-8")
        print(f"wrote {args.outfile}")
    else:
        print(source, end="")
    return 0


def _cmd_serve(args: argparse.Namespace, config: AppConfig) -> int:
    service.serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradegauge",
        description="Train, inspect, and serve student pass/fail decision "
                    "trees.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None,
                        help="key=value configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", parents=[common],
                       help="discretize a raw admission export")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(handler=_cmd_preprocess)

    p = sub.add_parser("train", parents=[common],
                       help="train a model and store it")
    p.add_argument("--algo", choices=("id3", "c45"), required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--model-out", dest="model_out", default=None,
                   help="model id to store under (generated when omitted)")
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("predict", parents=[common],
                       help="classify one already-discretized record")
    p.add_argument("--model", required=True)
    p.add_argument("--merit", required=True)
    p.add_argument("--gender", required=True)
    p.add_argument("--percent", required=True)
    p.add_argument("--type", required=True)
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("evaluate", parents=[common],
                       help="predict every row of a CSV file")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(handler=_cmd_evaluate)

    p = sub.add_parser("verify", parents=[common],
                       help="score predictions against known labels")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("codegen", parents=[common],
                       help="emit a model as an if-else ladder")
    p.add_argument("--model", required=True)
    p.add_argument("--dialect", choices=sorted(_DIALECTS), default="pseudo")
    p.add_argument("--name", default="predict_outcome")
    p.add_argument("--out", dest="outfile", default=None)
    p.add_argument("--include-untested", action="store_true",
                   help="keep never-tested features in the parameter list")
    p.set_defaults(handler=_cmd_codegen)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP API")
    p.set_defaults(handler=_cmd_serve)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        config = load_config(args.config)
        return args.handler(args, config)
    except GradeGaugeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IoFailure: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
