"""Tabular data model: schemas, attribute kinds, rows, and CSV ingestion.

A :class:`Dataset` is an immutable (schema, rows) pair. Cells are plain
Python values: ``str`` for categorical text, ``float`` for continuous
numbers, and ``None`` for a missing value. Categorical attributes may
declare a closed value domain, which is enforced at ingestion.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

from .errors import (
    DomainViolation,
    MalformedCsv,
    NoSuchAttribute,
    NotCategorical,
    NumericParse,
    UnknownColumn,
)

# A cell is Text (str), Number (float), or Missing (None).
CellValue = str | float | None


class Role(Enum):
    FEATURE = "feature"
    CLASS_LABEL = "class_label"
    IDENTIFIER = "identifier"
    IGNORED = "ignored"


@dataclass(frozen=True)
class Categorical:
    """Closed set of string values; ``domain=None`` leaves the set open
    (used for free-form raw columns such as admission-type codes)."""

    domain: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.domain is not None:
            if not self.domain:
                raise ValueError("categorical domain must be non-empty")
            if len(set(self.domain)) != len(self.domain):
                raise ValueError("categorical domain contains duplicates")


@dataclass(frozen=True)
class Continuous:
    unit: str = ""


AttributeKind = Categorical | Continuous


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    kind: AttributeKind
    role: Role = Role.FEATURE


@dataclass(frozen=True)
class Schema:
    attributes: tuple[AttributeSchema, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique")
        labels = [a for a in self.attributes if a.role is Role.CLASS_LABEL]
        if len(labels) != 1:
            raise ValueError("schema requires exactly one class-label attribute")
        if not any(a.role is Role.FEATURE for a in self.attributes):
            raise ValueError("schema requires at least one feature attribute")

    def index_of(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise NoSuchAttribute(name)

    def attribute(self, name: str) -> AttributeSchema:
        return self.attributes[self.index_of(name)]

    @property
    def class_attribute(self) -> AttributeSchema:
        for a in self.attributes:
            if a.role is Role.CLASS_LABEL:
                return a
        raise AssertionError("unreachable: schema invariant")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes if a.role is Role.FEATURE)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    rows: tuple[tuple[CellValue, ...], ...]

    def __post_init__(self):
        for r, row in enumerate(self.rows):
            if len(row) != len(self.schema.attributes):
                raise ValueError(f"row {r} has {len(row)} cells, schema has "
                                 f"{len(self.schema.attributes)} attributes")
            for attr, cell in zip(self.schema.attributes, row):
                if cell is None:
                    continue
                if isinstance(attr.kind, Continuous):
                    if not isinstance(cell, float) or not math.isfinite(cell):
                        raise ValueError(
                            f"row {r}, column {attr.name!r}: continuous cell "
                            f"must be a finite number, got {cell!r}")
                elif attr.kind.domain is not None and cell not in attr.kind.domain:
                    raise DomainViolation(
                        f"row {r}, column {attr.name!r}: value {cell!r} not in "
                        f"domain {list(attr.kind.domain)}")

    def __len__(self) -> int:
        return len(self.rows)

    def cell(self, row: int, name: str) -> CellValue:
        return self.rows[row][self.schema.index_of(name)]

    def column(self, name: str) -> tuple[CellValue, ...]:
        i = self.schema.index_of(name)
        return tuple(row[i] for row in self.rows)

    def row_dict(self, row: int) -> dict[str, CellValue]:
        """Named view of one row, for reports and mismatch tables."""
        return dict(zip(self.schema.names, self.rows[row]))

    def subset(self, indices: list[int]) -> "Dataset":
        return Dataset(self.schema, tuple(self.rows[i] for i in indices))


@dataclass(frozen=True)
class ClassDistribution:
    """Per-class counts; real-valued so fractionally weighted rows work."""

    counts: dict[str, float]

    def total(self) -> float:
        return sum(self.counts.values())

    def majority(self) -> str:
        """Label with the greatest count; ties go to the smallest label."""
        if not self.counts:
            raise ValueError("majority of an empty distribution")
        best = max(self.counts.values())
        return min(label for label, c in self.counts.items() if c == best)

    def nonzero(self) -> dict[str, float]:
        return {k: v for k, v in self.counts.items() if v > 0}


@dataclass(frozen=True)
class CsvOptions:
    """``missing_sentinel`` marks missing cells in addition to the empty
    string, which is always treated as missing."""

    missing_sentinel: str = ""


def parse_csv(data: bytes | str, schema: Schema,
              options: CsvOptions = CsvOptions()) -> Dataset:
    """Read an RFC-4180-style CSV with a header row into a Dataset.

    Header names must all belong to ``schema`` but may come in any order;
    schema columns absent from the header yield all-missing cells. Numeric
    parsing applies only to continuous attributes.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        records = list(reader)
    except csv.Error as exc:
        raise MalformedCsv(str(exc)) from exc
    if not records:
        raise MalformedCsv("missing header row")

    header = [h.strip() for h in records[0]]
    if len(set(header)) != len(header):
        raise MalformedCsv("duplicate column names in header")
    known = set(schema.names)
    for h in header:
        if h not in known:
            raise UnknownColumn(h)
    position = {name: header.index(name) for name in schema.names if name in header}

    rows = []
    for lineno, record in enumerate(records[1:], start=1):
        if not record:
            continue  # blank line
        if len(record) != len(header):
            raise MalformedCsv(
                f"row {lineno}: expected {len(header)} fields, got {len(record)}")
        cells: list[CellValue] = []
        for attr in schema.attributes:
            pos = position.get(attr.name)
            raw = record[pos].strip() if pos is not None else ""
            if raw == "" or raw == options.missing_sentinel:
                cells.append(None)
            elif isinstance(attr.kind, Continuous):
                try:
                    value = float(raw)
                except ValueError as exc:
                    raise NumericParse(
                        f"row {lineno}, column {attr.name!r}: {raw!r}") from exc
                if not math.isfinite(value):
                    raise NumericParse(
                        f"row {lineno}, column {attr.name!r}: {raw!r} is not finite")
                cells.append(value)
            else:
                if attr.kind.domain is not None and raw not in attr.kind.domain:
                    raise DomainViolation(
                        f"row {lineno}, column {attr.name!r}: value {raw!r} not "
                        f"in domain {list(attr.kind.domain)}")
                cells.append(raw)
        rows.append(tuple(cells))
    return Dataset(schema, tuple(rows))


def write_csv(d: Dataset) -> str:
    """Canonical CSV form: schema-ordered header, LF line endings, missing
    cells as empty fields, numbers in shortest round-trip notation."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(d.schema.names)
    for row in d.rows:
        writer.writerow(["" if c is None else (repr(c) if isinstance(c, float) else c)
                         for c in row])
    return out.getvalue()


def partition(d: Dataset, attribute: str) -> dict[str, Dataset]:
    """Split rows by their value of a categorical attribute.

    Rows missing that value appear in no part; parts are keyed by observed
    value only, so they are disjoint and cover exactly the non-missing rows.
    """
    attr = d.schema.attribute(attribute)
    if not isinstance(attr.kind, Categorical):
        raise NotCategorical(attribute)
    col = d.schema.index_of(attribute)
    groups: dict[str, list[int]] = {}
    for i, row in enumerate(d.rows):
        value = row[col]
        if value is not None:
            groups.setdefault(value, []).append(i)
    return {value: d.subset(indices) for value, indices in groups.items()}


def class_counts(d: Dataset) -> ClassDistribution:
    """Count class labels over rows whose label is present."""
    col = d.schema.index_of(d.schema.class_attribute.name)
    counts: dict[str, float] = {}
    for row in d.rows:
        label = row[col]
        if label is not None:
            counts[label] = counts.get(label, 0.0) + 1.0
    return ClassDistribution(counts)
