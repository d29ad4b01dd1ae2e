"""Raw admission records to the four-feature discretized dataset.

Raw rows carry the entrance-exam merit score (out of 200), the class-XII
PCM percentage, the admission-type seat code, and gender. Preprocessing
drops rows with missing values, then discretizes merit and percentage and
collapses the seat code to AI vs OTHER. Cutoffs are configurable; the
defaults are the ones the source study used.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .dataset import (
    AttributeSchema,
    Categorical,
    CellValue,
    Continuous,
    Dataset,
    Role,
    Schema,
)
from .errors import EmptyCode, MalformedCsv, OutOfRange, SchemaMismatch

MERIT_VALUES = ("good", "bad")
PERCENT_VALUES = ("distinction", "first_class", "second_class")
TYPE_VALUES = ("AI", "OTHER")
GENDER_VALUES = ("Male", "Female")
CLASS_VALUES = ("pass", "fail")

RAW_HEADER = ("sr_no", "merit_no", "merit_marks", "app_id", "name", "gender",
              "cast", "location", "percent", "type", "class")
PROCESSED_HEADER = ("merit", "gender", "percent", "type", "class")


@dataclass(frozen=True)
class Thresholds:
    """Discretization cutoffs; closed below (a score equal to a cutoff lands
    in the higher band)."""

    merit_cutoff: float = 120.0
    distinction_cutoff: float = 70.0
    first_class_cutoff: float = 60.0

    def __post_init__(self):
        if not 0.0 <= self.merit_cutoff <= 200.0:
            raise ValueError("merit cutoff must lie in [0, 200]")
        if not 0.0 <= self.first_class_cutoff < self.distinction_cutoff <= 100.0:
            raise ValueError("need 0 <= first_class < distinction <= 100")


DEFAULT_THRESHOLDS = Thresholds()


def raw_student_schema() -> Schema:
    """Schema for admission exports: ``sr_no,merit_no,merit_marks,app_id,
    name,gender,cast,location,percent,type[,class]``."""
    return Schema((
        AttributeSchema("sr_no", Categorical(), Role.IDENTIFIER),
        AttributeSchema("merit_no", Categorical(), Role.IGNORED),
        AttributeSchema("merit_marks", Continuous("marks/200"), Role.FEATURE),
        AttributeSchema("app_id", Categorical(), Role.IDENTIFIER),
        AttributeSchema("name", Categorical(), Role.IGNORED),
        AttributeSchema("gender", Categorical(GENDER_VALUES), Role.FEATURE),
        AttributeSchema("cast", Categorical(), Role.IGNORED),
        AttributeSchema("location", Categorical(), Role.IGNORED),
        AttributeSchema("percent", Continuous("%"), Role.FEATURE),
        AttributeSchema("type", Categorical(), Role.FEATURE),
        # open domain: labels arrive in assorted cases ("pass"/"PASS")
        AttributeSchema("class", Categorical(), Role.CLASS_LABEL),
    ))


def processed_student_schema() -> Schema:
    """Schema for the discretized table: ``merit,gender,percent,type[,class]``."""
    return Schema((
        AttributeSchema("merit", Categorical(MERIT_VALUES), Role.FEATURE),
        AttributeSchema("gender", Categorical(GENDER_VALUES), Role.FEATURE),
        AttributeSchema("percent", Categorical(PERCENT_VALUES), Role.FEATURE),
        AttributeSchema("type", Categorical(TYPE_VALUES), Role.FEATURE),
        AttributeSchema("class", Categorical(CLASS_VALUES), Role.CLASS_LABEL),
    ))


@dataclass(frozen=True)
class ProcessedStudentRecord:
    merit: str
    gender: str
    percent: str
    type: str
    class_label: str | None = None

    def __post_init__(self):
        for field_name, value, allowed in (
            ("merit", self.merit, MERIT_VALUES),
            ("gender", self.gender, GENDER_VALUES),
            ("percent", self.percent, PERCENT_VALUES),
            ("type", self.type, TYPE_VALUES),
        ):
            if value not in allowed:
                raise ValueError(f"{field_name}={value!r} not in {allowed}")
        if self.class_label is not None and self.class_label not in CLASS_VALUES:
            raise ValueError(f"class={self.class_label!r} not in {CLASS_VALUES}")

    def features(self) -> dict[str, str]:
        return {"merit": self.merit, "gender": self.gender,
                "percent": self.percent, "type": self.type}


def discretize_merit(marks: float,
                     thresholds: Thresholds = DEFAULT_THRESHOLDS) -> str:
    """good iff the entrance score reaches the cutoff (default 120 of 200)."""
    if not 0.0 <= marks <= 200.0:
        raise OutOfRange(f"merit marks {marks!r} outside [0, 200]")
    return "good" if marks >= thresholds.merit_cutoff else "bad"


def discretize_percent(pcm: float,
                       thresholds: Thresholds = DEFAULT_THRESHOLDS) -> str:
    """distinction at >= 70, first_class at >= 60, else second_class
    (default cutoffs)."""
    if not 0.0 <= pcm <= 100.0:
        raise OutOfRange(f"PCM percentage {pcm!r} outside [0, 100]")
    if pcm >= thresholds.distinction_cutoff:
        return "distinction"
    if pcm >= thresholds.first_class_cutoff:
        return "first_class"
    return "second_class"


def normalize_admission_type(code: str) -> str:
    """AI for an All-India seat code, OTHER for every other code."""
    trimmed = code.strip()
    if not trimmed:
        raise EmptyCode("admission type code is empty")
    return "AI" if trimmed.upper() == "AI" else "OTHER"


def sniff_student_schema(text: str) -> Schema:
    """Pick the raw or processed student schema by CSV header, never by
    guessing: any other header is a SchemaMismatch. The class column may be
    absent in either form."""
    try:
        header = next(csv.reader(io.StringIO(text, newline="")), None)
    except csv.Error as exc:
        raise MalformedCsv(str(exc)) from exc
    if not header:
        raise MalformedCsv("missing header row")
    names = {h.strip() for h in header}
    if names in (set(RAW_HEADER), set(RAW_HEADER) - {"class"}):
        return raw_student_schema()
    if names in (set(PROCESSED_HEADER), set(PROCESSED_HEADER) - {"class"}):
        return processed_student_schema()
    raise SchemaMismatch(f"unrecognized student CSV header: {sorted(names)}")


def clean(d: Dataset, require_class: bool = True) -> tuple[Dataset, list[int]]:
    """Drop every row missing a feature value (and, unless ``require_class``
    is off, the class label). Returns the kept rows plus the 0-based indices
    of dropped rows."""
    checked = [a.name for a in d.schema.attributes if a.role is Role.FEATURE]
    if require_class:
        checked.append(d.schema.class_attribute.name)
    positions = [d.schema.index_of(name) for name in checked]
    kept, dropped = [], []
    for i, row in enumerate(d.rows):
        if any(row[p] is None for p in positions):
            dropped.append(i)
        else:
            kept.append(i)
    return d.subset(kept), dropped


def preprocess(raw: Dataset, thresholds: Thresholds = DEFAULT_THRESHOLDS,
               require_class: bool = True) -> tuple[Dataset, list[int]]:
    """Clean a raw dataset and map it onto the processed schema.

    Surviving rows keep their order; class labels are lowercased. Raises
    OutOfRange/EmptyCode with the offending row's original index.
    """
    cleaned, dropped = clean(raw, require_class=require_class)
    schema = processed_student_schema()
    col = {name: raw.schema.index_of(name)
           for name in ("merit_marks", "gender", "percent", "type", "class")}
    original_index = [i for i in range(len(raw.rows)) if i not in set(dropped)]

    rows: list[tuple[CellValue, ...]] = []
    for j, row in enumerate(cleaned.rows):
        try:
            merit = discretize_merit(row[col["merit_marks"]], thresholds)
            percent = discretize_percent(row[col["percent"]], thresholds)
            adm_type = normalize_admission_type(row[col["type"]])
        except (OutOfRange, EmptyCode) as exc:
            raise type(exc)(f"row {original_index[j]}: {exc}") from exc
        label = row[col["class"]]
        if label is not None:
            label = label.strip().lower()
            if label not in CLASS_VALUES:
                raise OutOfRange(
                    f"row {original_index[j]}: class label {label!r} is not "
                    f"pass/fail")
        rows.append((merit, row[col["gender"]], percent, adm_type, label))
    return Dataset(schema, tuple(rows)), dropped
