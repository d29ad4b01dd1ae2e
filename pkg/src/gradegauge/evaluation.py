"""Singular prediction, bulk evaluation, and verification with accuracy
and mismatch reporting.

Bulk evaluation accepts either the processed four-feature table or a raw
admission export; raw rows are discretized on the fly, one prediction per
row. A row missing some feature values is still evaluated: the tree walk
stops at the first untestable node and returns that node's fallback label,
so nothing is dropped silently. Accuracy is reported as a percentage
rounded half-up to 3 decimals; full precision is never kept from callers
since counts are returned too.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .dataset import CellValue, Dataset
from .errors import (
    EmptyCode,
    EmptyInput,
    LengthMismatch,
    MissingFeature,
    OutOfRange,
    SchemaMismatch,
    UnlabeledRows,
)
from .induction import PathStep, TrainedModel, classify
from .preprocess import (
    DEFAULT_THRESHOLDS,
    ProcessedStudentRecord,
    Thresholds,
    discretize_merit,
    discretize_percent,
    normalize_admission_type,
    raw_student_schema,
)

RecordRef = str | int


@dataclass(frozen=True)
class Prediction:
    record_ref: RecordRef
    predicted: str
    path: tuple[PathStep, ...]
    model_ref: str | None
    algorithm: str
    inputs: dict[str, CellValue] = field(default_factory=dict)


@dataclass(frozen=True)
class Mismatch:
    record_ref: RecordRef
    inputs: dict[str, CellValue]
    actual: str
    predicted: str


@dataclass(frozen=True)
class EvaluationReport:
    total: int
    correct: int
    accuracy_percent: float
    wall_time_ms: float
    mismatches: tuple[Mismatch, ...]

    def __post_init__(self):
        if not 0 <= self.correct <= self.total:
            raise ValueError("correct must lie in [0, total]")
        if len(self.mismatches) != self.total - self.correct:
            raise ValueError("mismatch list must account for every error")


def round_half_up(value: float, places: int = 3) -> float:
    exponent = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(exponent, rounding=ROUND_HALF_UP))


def predict_single(model: TrainedModel,
                   record: ProcessedStudentRecord | dict[str, CellValue],
                   record_ref: RecordRef = 0,
                   model_ref: str | None = None) -> Prediction:
    """Classify one record, requiring a value slot (possibly missing) for
    every feature the model was trained with."""
    values = record.features() if isinstance(record, ProcessedStudentRecord) \
        else dict(record)
    for name in model.schema.feature_names:
        if name not in values:
            raise MissingFeature(name)
    result = classify(model.root, values)
    inputs = {name: values[name] for name in model.schema.feature_names}
    return Prediction(record_ref, result.label, result.path, model_ref,
                      model.algorithm, inputs)


def _is_raw_student(d: Dataset) -> bool:
    return set(d.schema.names) == set(raw_student_schema().names)


def _raw_features(d: Dataset, i: int,
                  thresholds: Thresholds) -> dict[str, CellValue]:
    row = d.row_dict(i)
    try:
        merit = None if row["merit_marks"] is None \
            else discretize_merit(row["merit_marks"], thresholds)
        percent = None if row["percent"] is None \
            else discretize_percent(row["percent"], thresholds)
        adm_type = None if row["type"] is None \
            else normalize_admission_type(row["type"])
    except (OutOfRange, EmptyCode) as exc:
        raise type(exc)(f"row {i}: {exc}") from exc
    return {"merit": merit, "gender": row["gender"],
            "percent": percent, "type": adm_type}


def _evaluable(model: TrainedModel, d: Dataset,
               thresholds: Thresholds) -> list[tuple[RecordRef, dict[str, CellValue]]]:
    """Map each dataset row to (reference, feature values) for the model."""
    feature_names = model.schema.feature_names
    if _is_raw_student(d) and set(feature_names) <= {"merit", "gender",
                                                     "percent", "type"}:
        records = []
        for i in range(len(d.rows)):
            app_id = d.cell(i, "app_id")
            ref: RecordRef = app_id if app_id is not None else i
            records.append((ref, _raw_features(d, i, thresholds)))
        return records
    missing = [name for name in feature_names if name not in d.schema.names]
    if missing:
        raise SchemaMismatch(
            f"dataset lacks the model's feature columns: {missing}")
    return [(i, {name: d.cell(i, name) for name in feature_names})
            for i in range(len(d.rows))]


def evaluate_bulk(model: TrainedModel, d: Dataset,
                  model_ref: str | None = None,
                  thresholds: Thresholds = DEFAULT_THRESHOLDS,
                  ) -> tuple[list[Prediction], float]:
    """One prediction per row, in row order, plus wall time in ms measured
    around the classification loop only."""
    records = _evaluable(model, d, thresholds)
    started = time.perf_counter()
    results = [classify(model.root, values) for _, values in records]
    wall_ms = (time.perf_counter() - started) * 1000.0
    predictions = [
        Prediction(ref, res.label, res.path, model_ref, model.algorithm, values)
        for (ref, values), res in zip(records, results)]
    return predictions, wall_ms


def accuracy(predictions: list[Prediction], actuals: list[str],
             wall_time_ms: float = 0.0) -> EvaluationReport:
    """Compare predictions against known labels, case-insensitively."""
    if len(predictions) != len(actuals):
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(actuals)} labels")
    mismatches = []
    for p, actual in zip(predictions, actuals):
        if p.predicted.lower() != actual.lower():
            mismatches.append(Mismatch(p.record_ref, p.inputs, actual,
                                       p.predicted))
    total = len(predictions)
    correct = total - len(mismatches)
    percent = round_half_up(100.0 * correct / total) if total else 0.0
    return EvaluationReport(total, correct, percent, wall_time_ms,
                            tuple(mismatches))


def verify(model: TrainedModel, labeled: Dataset,
           model_ref: str | None = None,
           thresholds: Thresholds = DEFAULT_THRESHOLDS) -> EvaluationReport:
    """Evaluate a labeled dataset and score the predictions against its
    class column."""
    class_name = labeled.schema.class_attribute.name
    column = labeled.column(class_name)
    unlabeled = [i for i, v in enumerate(column) if v is None]
    if unlabeled:
        raise UnlabeledRows(unlabeled)
    predictions, wall_ms = evaluate_bulk(model, labeled, model_ref, thresholds)
    return accuracy(predictions, [str(v) for v in column], wall_ms)


def combined_accuracy(reports: list[EvaluationReport]) -> float:
    """Pooled accuracy of several runs: all corrects over all totals."""
    if not reports:
        raise EmptyInput("no reports to combine")
    total = sum(r.total for r in reports)
    correct = sum(r.correct for r in reports)
    return round_half_up(100.0 * correct / total) if total else 0.0
