"""Shared fixtures: the reference rule ladder, dataset builders, and
random model generators used across the suite."""

from __future__ import annotations

import itertools
import random

import pytest

from gradegauge.dataset import (
    AttributeSchema,
    Categorical,
    ClassDistribution,
    Continuous,
    Dataset,
    Role,
    Schema,
    parse_csv,
)
from gradegauge.induction import (
    CategoricalSplit,
    ContinuousSplit,
    Internal,
    Leaf,
    ModelStats,
    TrainConfig,
    TrainedModel,
    count_leaves,
    count_nodes,
    train_c45,
)
from gradegauge.preprocess import (
    MERIT_VALUES,
    PERCENT_VALUES,
    TYPE_VALUES,
    processed_student_schema,
)

GENDERS = ("Male", "Female")


def ladder_label(merit: str, gender: str, percent: str, adm_type: str) -> str:
    """Independent oracle for the reference rule ladder: distinction passes;
    first_class passes on good merit or an AI seat; second_class fails."""
    if percent == "distinction":
        return "pass"
    if percent == "first_class":
        if merit == "bad":
            return "pass" if adm_type == "AI" else "fail"
        return "pass"
    return "fail"


ALL_COMBOS = tuple(itertools.product(MERIT_VALUES, GENDERS, PERCENT_VALUES,
                                     TYPE_VALUES))
assert len(ALL_COMBOS) == 24


def make_processed_dataset(rows: list[tuple[str, str, str, str, str | None]]
                           ) -> Dataset:
    return Dataset(processed_student_schema(), tuple(rows))


def processed_csv(rows) -> str:
    lines = ["merit,gender,percent,type,class"]
    lines += [",".join("" if c is None else str(c) for c in row)
              for row in rows]
    return "\n".join(lines) + "\n"


def ladder_rows(n: int = 200, seed: int = 11) -> list[tuple]:
    """Noise-free sample of the ladder covering every feature combination."""
    rng = random.Random(seed)
    rows = [(m, g, p, t, ladder_label(m, g, p, t))
            for m, g, p, t in ALL_COMBOS]
    while len(rows) < n:
        m, g, p, t = rng.choice(ALL_COMBOS)
        rows.append((m, g, p, t, ladder_label(m, g, p, t)))
    rng.shuffle(rows)
    return rows[:n]


@pytest.fixture(scope="session")
def ladder_dataset() -> Dataset:
    return make_processed_dataset(ladder_rows())


@pytest.fixture(scope="session")
def ladder_model(ladder_dataset) -> TrainedModel:
    return train_c45(ladder_dataset, list(ladder_dataset.schema.feature_names))


# ------------------------------------------------ random synthetic corpora

def random_binary_dataset(rng: random.Random,
                          max_features: int = 4,
                          max_rows: int = 12) -> Dataset:
    """Small all-binary dataset; rejection-sampled to have a mixed class."""
    while True:
        n_features = rng.randint(1, max_features)
        n_rows = rng.randint(2, max_rows)
        attrs = [AttributeSchema(f"f{i}", Categorical(("a", "b")))
                 for i in range(n_features)]
        attrs.append(AttributeSchema("label", Categorical(("no", "yes")),
                                     Role.CLASS_LABEL))
        rows = tuple(
            tuple(rng.choice(("a", "b")) for _ in range(n_features))
            + (rng.choice(("no", "yes")),)
            for _ in range(n_rows))
        labels = {r[-1] for r in rows}
        if len(labels) == 2:
            return Dataset(Schema(tuple(attrs)), rows)


def random_contradiction_free_dataset(rng: random.Random,
                                      max_rows: int = 50) -> Dataset:
    """Categorical dataset where equal feature tuples share one label."""
    n_features = rng.randint(2, 4)
    domains = [tuple("pqr"[:rng.randint(2, 3)]) for _ in range(n_features)]
    attrs = [AttributeSchema(f"f{i}", Categorical(domains[i]))
             for i in range(n_features)]
    attrs.append(AttributeSchema("label", Categorical(("no", "yes")),
                                 Role.CLASS_LABEL))
    seen: dict[tuple, str] = {}
    rows = []
    for _ in range(rng.randint(1, max_rows)):
        features = tuple(rng.choice(domains[i]) for i in range(n_features))
        label = seen.setdefault(features, rng.choice(("no", "yes")))
        rows.append(features + (label,))
    return Dataset(Schema(tuple(attrs)), tuple(rows))


LABELS = ("fail", "maybe", "pass")


def random_tree_model(rng: random.Random) -> TrainedModel:
    """Hand-built random model over mixed categorical/continuous features,
    for codegen and persistence round-trips."""
    n_features = rng.randint(2, 4)
    attrs = []
    for i in range(n_features):
        if rng.random() < 0.5:
            size = rng.randint(2, 4)
            attrs.append(AttributeSchema(
                f"f{i}", Categorical(tuple(f"v{j}" for j in range(size)))))
        else:
            attrs.append(AttributeSchema(f"f{i}", Continuous()))
    attrs.append(AttributeSchema("label", Categorical(LABELS),
                                 Role.CLASS_LABEL))
    schema = Schema(tuple(attrs))

    def leaf(weightless: bool = False) -> Leaf:
        if weightless:
            return Leaf(rng.choice(LABELS), ClassDistribution({}))
        counts = {lab: float(rng.randint(0, 9)) for lab in LABELS}
        if sum(counts.values()) == 0:
            counts[rng.choice(LABELS)] = 1.0
        dist = ClassDistribution(counts)
        return Leaf(dist.majority(), dist)

    def grow(depth: int, available: list[str]):
        if depth >= 3 or not available or rng.random() < 0.35:
            return leaf(weightless=rng.random() < 0.1)
        name = rng.choice(available)
        kind = schema.attribute(name).kind
        if isinstance(kind, Categorical):
            remaining = [f for f in available if f != name]
            branches = {v: grow(depth + 1, remaining) for v in kind.domain}
            test = CategoricalSplit(name)
        else:
            threshold = round(rng.uniform(0.0, 100.0), 2)
            branches = {"<=": grow(depth + 1, available),
                        ">": grow(depth + 1, available)}
            test = ContinuousSplit(name, threshold)
        merged: dict[str, float] = {}
        for sub in branches.values():
            for lab, c in sub.distribution.counts.items():
                merged[lab] = merged.get(lab, 0.0) + c
        if not merged:
            merged[rng.choice(LABELS)] = 1.0
        dist = ClassDistribution(merged)
        return Internal(test, branches, dist.majority(), dist)

    root = grow(0, [a.name for a in attrs[:-1]])
    algorithm = rng.choice(("ID3", "C45"))
    config = TrainConfig().resolved(algorithm)
    stats = ModelStats(int(root.distribution.total()), count_nodes(root),
                       count_leaves(root))
    return TrainedModel(algorithm, root, schema, config, stats)


def random_record(rng: random.Random, schema: Schema) -> dict:
    record = {}
    for name in schema.feature_names:
        kind = schema.attribute(name).kind
        if isinstance(kind, Categorical):
            record[name] = rng.choice(kind.domain)
        else:
            record[name] = round(rng.uniform(-10.0, 110.0), 3)
    return record


# ----------------------------------------------------- planted label files

def planted_rows(model: TrainedModel, total: int, agreeing: int,
                 seed: int) -> list[tuple]:
    """Processed rows whose labels agree with the model on exactly
    ``agreeing`` of ``total`` rows."""
    from gradegauge.induction import classify

    rng = random.Random(seed)
    combos = [rng.choice(ALL_COMBOS) for _ in range(total)]
    flipped = set(rng.sample(range(total), total - agreeing))
    rows = []
    for i, (m, g, p, t) in enumerate(combos):
        predicted = classify(model.root,
                             {"merit": m, "gender": g, "percent": p,
                              "type": t}).label
        actual = predicted if i not in flipped \
            else ("fail" if predicted == "pass" else "pass")
        rows.append((m, g, p, t, actual))
    return rows
