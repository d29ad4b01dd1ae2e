"""Decision-tree induction: entropy, information gain, gain ratio, ID3 and
C4.5 construction, pessimistic pruning, and classification.

All entropies are base-2 (bits). Selection is deterministic everywhere:
attribute ties resolve to the earliest feature in the caller's list, class
ties to the lexicographically smallest label, and threshold ties to the
smallest threshold, so identical inputs always produce identical trees.

ID3 splits on raw information gain and expects complete categorical data.
C4.5 splits on gain ratio, handles continuous attributes through binary
threshold tests (reusable deeper in the tree), tolerates missing values by
ignoring them for gain purposes (scaling the gain by the known fraction)
and descending missing-value rows into every branch with proportional
fractional weights, and prunes the finished tree bottom-up using a binomial
confidence bound on each node's training distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.stats import beta as _beta

from .dataset import Categorical, ClassDistribution, Continuous, Dataset, Schema
from .errors import (
    EmptyDataset,
    EmptyDistribution,
    MissingFeature,
    MissingValuesPresent,
    NoSuchAttribute,
    NotCategorical,
    TooFewDistinctValues,
)
from .preprocess import ProcessedStudentRecord

LEFT, RIGHT = "<=", ">"  # branch keys of a continuous test


@dataclass(frozen=True)
class CategoricalSplit:
    attribute: str


@dataclass(frozen=True)
class ContinuousSplit:
    attribute: str
    threshold: float

    def __post_init__(self):
        if not math.isfinite(self.threshold):
            raise ValueError("threshold must be finite")


SplitTest = CategoricalSplit | ContinuousSplit


@dataclass(frozen=True)
class Leaf:
    label: str
    distribution: ClassDistribution


@dataclass(frozen=True)
class Internal:
    test: SplitTest
    branches: dict[str, "TreeNode"]
    fallback_label: str
    distribution: ClassDistribution


TreeNode = Leaf | Internal


@dataclass(frozen=True)
class TrainConfig:
    """Training knobs. ``min_leaf_size`` and ``prune`` left unset resolve to
    per-algorithm defaults: 1/off for ID3, 2/on for C4.5."""

    min_leaf_size: int | None = None
    prune: bool | None = None
    confidence_factor: float = 0.25

    def __post_init__(self):
        if self.min_leaf_size is not None and self.min_leaf_size < 1:
            raise ValueError("min_leaf_size must be >= 1")
        if not 0.0 < self.confidence_factor < 1.0:
            raise ValueError("confidence_factor must lie in (0, 1)")

    def resolved(self, algorithm: str) -> "TrainConfig":
        min_leaf = self.min_leaf_size
        if min_leaf is None:
            min_leaf = 1 if algorithm == "ID3" else 2
        do_prune = self.prune
        if do_prune is None:
            do_prune = algorithm == "C45"
        return TrainConfig(min_leaf, do_prune, self.confidence_factor)


@dataclass(frozen=True)
class ModelStats:
    training_rows: int
    node_count: int
    leaf_count: int


@dataclass(frozen=True)
class TrainedModel:
    algorithm: str  # "ID3" or "C45"
    root: TreeNode
    schema: Schema
    config: TrainConfig
    stats: ModelStats


@dataclass(frozen=True)
class PathStep:
    test: SplitTest
    outcome: str  # branch key taken, or "fallback"


@dataclass(frozen=True)
class Classification:
    label: str
    path: tuple[PathStep, ...]


def count_nodes(root: TreeNode) -> int:
    if isinstance(root, Leaf):
        return 1
    return 1 + sum(count_nodes(b) for b in root.branches.values())


def count_leaves(root: TreeNode) -> int:
    if isinstance(root, Leaf):
        return 1
    return sum(count_leaves(b) for b in root.branches.values())


def entropy(dist: ClassDistribution) -> float:
    """H = sum of -p*log2(p) over classes with positive probability."""
    total = dist.total()
    if total <= 0:
        raise EmptyDistribution("entropy of an empty distribution")
    return _entropy_counts(dist.counts, total)


def _entropy_counts(counts: dict[str, float], total: float) -> float:
    h = 0.0
    for c in counts.values():
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


@dataclass(frozen=True)
class _SplitStats:
    gain: float
    split_info: float
    known_fraction: float


def _labeled_rows(d: Dataset) -> list[int]:
    col = d.schema.index_of(d.schema.class_attribute.name)
    return [i for i, row in enumerate(d.rows) if row[col] is not None]


def _split_stats(d: Dataset, idx: list[int], weights: list[float],
                 test: SplitTest) -> _SplitStats | None:
    """Gain and split info of ``test`` over the weighted rows ``idx``,
    computed on the subset with a known test value. None when no row has a
    known value."""
    col = d.schema.index_of(test.attribute)
    attr = d.schema.attributes[col]
    class_col = d.schema.index_of(d.schema.class_attribute.name)
    if isinstance(test, CategoricalSplit) and not isinstance(attr.kind, Categorical):
        raise NotCategorical(test.attribute)
    if isinstance(test, ContinuousSplit) and not isinstance(attr.kind, Continuous):
        raise NoSuchAttribute(f"{test.attribute} is not continuous")

    total_w = sum(weights)
    known_w = 0.0
    overall: dict[str, float] = {}
    parts: dict[str, dict[str, float]] = {}
    part_w: dict[str, float] = {}
    for i, w in zip(idx, weights):
        value = d.rows[i][col]
        if value is None:
            continue
        if isinstance(test, CategoricalSplit):
            key = value
        else:
            key = LEFT if value <= test.threshold else RIGHT
        label = d.rows[i][class_col]
        known_w += w
        overall[label] = overall.get(label, 0.0) + w
        bucket = parts.setdefault(key, {})
        bucket[label] = bucket.get(label, 0.0) + w
        part_w[key] = part_w.get(key, 0.0) + w

    if known_w <= 0:
        return None
    h_all = _entropy_counts(overall, known_w)
    h_weighted = 0.0
    split_info = 0.0
    for key, bucket in parts.items():
        p = part_w[key] / known_w
        h_weighted += p * _entropy_counts(bucket, part_w[key])
        split_info -= p * math.log2(p)
    fraction = known_w / total_w if total_w > 0 else 0.0
    return _SplitStats(h_all - h_weighted, split_info, fraction)


def _public_stats(d: Dataset, test: SplitTest) -> _SplitStats:
    idx = _labeled_rows(d)
    if not idx:
        raise EmptyDistribution("dataset has no rows with a known class")
    stats = _split_stats(d, idx, [1.0] * len(idx), test)
    if stats is None:
        raise EmptyDistribution(
            f"no rows with a known value for {test.attribute!r}")
    return stats


def information_gain(d: Dataset, test: SplitTest) -> float:
    """Entropy reduction from partitioning by ``test``, over the rows with a
    known value for the tested attribute."""
    return _public_stats(d, test).gain


def split_info(d: Dataset, test: SplitTest) -> float:
    """Entropy of the partition sizes themselves (the gain-ratio normalizer)."""
    return _public_stats(d, test).split_info


def gain_ratio(d: Dataset, test: SplitTest) -> float:
    """information_gain / split_info, defined as 0 when split_info is 0."""
    stats = _public_stats(d, test)
    return stats.gain / stats.split_info if stats.split_info > 0 else 0.0


def best_continuous_split(d: Dataset, attribute: str) -> tuple[float, float]:
    """Best threshold for a continuous attribute by gain ratio.

    Candidates are the midpoints between consecutive distinct sorted values;
    ties resolve to the smallest threshold.
    """
    idx = _labeled_rows(d)
    if not idx:
        raise EmptyDistribution("dataset has no rows with a known class")
    return _best_continuous_split(d, idx, [1.0] * len(idx), attribute)


def _best_continuous_split(d: Dataset, idx: list[int], weights: list[float],
                           attribute: str) -> tuple[float, float]:
    col = d.schema.index_of(attribute)
    if not isinstance(d.schema.attributes[col].kind, Continuous):
        raise NoSuchAttribute(f"{attribute} is not continuous")
    class_col = d.schema.index_of(d.schema.class_attribute.name)

    known = sorted(
        ((d.rows[i][col], w, d.rows[i][class_col])
         for i, w in zip(idx, weights) if d.rows[i][col] is not None),
        key=lambda t: t[0])
    distinct = sorted({v for v, _, _ in known})
    if len(distinct) < 2:
        raise TooFewDistinctValues(attribute)

    total_w = sum(w for _, w, _ in known)
    overall: dict[str, float] = {}
    for _, w, label in known:
        overall[label] = overall.get(label, 0.0) + w
    h_all = _entropy_counts(overall, total_w)

    # single left-to-right sweep over the sorted rows, pausing at midpoints
    left: dict[str, float] = {}
    left_w = 0.0
    pos = 0
    best_threshold, best_ratio = 0.0, -math.inf
    for lo, hi in zip(distinct, distinct[1:]):
        while pos < len(known) and known[pos][0] <= lo:
            _, w, label = known[pos]
            left[label] = left.get(label, 0.0) + w
            left_w += w
            pos += 1
        threshold = (lo + hi) / 2.0
        right = {k: overall[k] - left.get(k, 0.0) for k in overall}
        right_w = total_w - left_w
        p_left = left_w / total_w
        gain = (h_all
                - p_left * _entropy_counts(left, left_w)
                - (1 - p_left) * _entropy_counts(right, right_w))
        info = -(p_left * math.log2(p_left) + (1 - p_left) * math.log2(1 - p_left))
        ratio = gain / info if info > 0 else 0.0
        if ratio > best_ratio:
            best_threshold, best_ratio = threshold, ratio
    return best_threshold, best_ratio


def _weighted_counts(d: Dataset, idx: list[int], weights: list[float]) -> ClassDistribution:
    class_col = d.schema.index_of(d.schema.class_attribute.name)
    counts: dict[str, float] = {}
    for i, w in zip(idx, weights):
        label = d.rows[i][class_col]
        counts[label] = counts.get(label, 0.0) + w
    return ClassDistribution(counts)


def train_id3(d: Dataset, features: list[str],
              config: TrainConfig = TrainConfig()) -> TrainedModel:
    """Recursive ID3: split on maximum information gain until a node is
    pure, features run out, or the node falls below ``min_leaf_size``."""
    config = config.resolved("ID3")
    if not d.rows:
        raise EmptyDataset("cannot train on an empty dataset")
    class_name = d.schema.class_attribute.name
    for name in features:
        if not isinstance(d.schema.attribute(name).kind, Categorical):
            raise NotCategorical(f"ID3 requires categorical features: {name}")
    for col_name in [*features, class_name]:
        if any(v is None for v in d.column(col_name)):
            raise MissingValuesPresent(
                f"column {col_name!r} has missing values; clean the data first")

    idx = list(range(len(d.rows)))
    root = _grow(d, idx, [1.0] * len(idx), list(features), config, use_ratio=False,
                 reuse_continuous=False)
    if config.prune:
        root = prune(root, config)
    return TrainedModel("ID3", root, d.schema, config,
                        ModelStats(len(d.rows), count_nodes(root), count_leaves(root)))


def train_c45(d: Dataset, features: list[str],
              config: TrainConfig = TrainConfig()) -> TrainedModel:
    """C4.5: gain-ratio selection, binary continuous splits, fractional
    descent of missing-value rows, and post-construction pruning."""
    config = config.resolved("C45")
    if not d.rows:
        raise EmptyDataset("cannot train on an empty dataset")
    idx = _labeled_rows(d)
    if not idx:
        raise EmptyDataset("no rows with a known class label")
    root = _grow(d, idx, [1.0] * len(idx), list(features), config, use_ratio=True,
                 reuse_continuous=True)
    if config.prune:
        root = prune(root, config)
    return TrainedModel("C45", root, d.schema, config,
                        ModelStats(len(idx), count_nodes(root), count_leaves(root)))


def _grow(d: Dataset, idx: list[int], weights: list[float], features: list[str],
          config: TrainConfig, use_ratio: bool, reuse_continuous: bool) -> TreeNode:
    dist = _weighted_counts(d, idx, weights)
    label = dist.majority()
    if (len(dist.nonzero()) == 1 or not features
            or dist.total() < config.min_leaf_size):
        return Leaf(label, dist)

    best: tuple[float, int, SplitTest] | None = None
    for pos, name in enumerate(features):
        kind = d.schema.attribute(name).kind
        if isinstance(kind, Categorical):
            stats = _split_stats(d, idx, weights, CategoricalSplit(name))
            if stats is None:
                continue
            if use_ratio:
                score = (stats.gain * stats.known_fraction / stats.split_info
                         if stats.split_info > 0 else 0.0)
            else:
                score = stats.gain
            test: SplitTest = CategoricalSplit(name)
        else:
            try:
                threshold, ratio = _best_continuous_split(d, idx, weights, name)
            except TooFewDistinctValues:
                continue
            stats = _split_stats(d, idx, weights, ContinuousSplit(name, threshold))
            if use_ratio:
                score = ratio * stats.known_fraction
            else:
                score = stats.gain
            test = ContinuousSplit(name, threshold)
        if best is None or score > best[0]:
            best = (score, pos, test)

    if best is None:
        return Leaf(label, dist)
    _, _, test = best

    col = d.schema.index_of(test.attribute)
    groups: dict[str, tuple[list[int], list[float]]] = {}
    missing: list[tuple[int, float]] = []
    for i, w in zip(idx, weights):
        value = d.rows[i][col]
        if value is None:
            missing.append((i, w))
            continue
        if isinstance(test, CategoricalSplit):
            key = value
        else:
            key = LEFT if value <= test.threshold else RIGHT
        sub = groups.setdefault(key, ([], []))
        sub[0].append(i)
        sub[1].append(w)

    # missing-value rows descend every populated branch with weight scaled
    # by that branch's share of the known weight
    known_w = sum(sum(ws) for _, ws in groups.values())
    if missing and known_w > 0:
        for key, (sub_idx, sub_w) in groups.items():
            share = sum(sub_w) / known_w
            for i, w in missing:
                sub_idx.append(i)
                sub_w.append(w * share)

    if isinstance(test, CategoricalSplit):
        remaining = [f for f in features if f != test.attribute]
        domain = d.schema.attribute(test.attribute).kind.domain
        keys = list(domain) if domain is not None else sorted(groups)
    else:
        remaining = features if reuse_continuous else [
            f for f in features if f != test.attribute]
        keys = [LEFT, RIGHT]

    branches: dict[str, TreeNode] = {}
    for key in keys:
        if key in groups:
            sub_idx, sub_w = groups[key]
            branches[key] = _grow(d, sub_idx, sub_w, remaining, config,
                                  use_ratio, reuse_continuous)
        else:
            # unseen domain value: majority leaf with no training weight
            branches[key] = Leaf(label, ClassDistribution({}))
    return Internal(test, branches, label, dist)


def _pessimistic_rate(errors: float, n: float, confidence_factor: float) -> float:
    """Upper confidence bound on the true error rate of a leaf that saw
    ``errors`` mistakes in ``n`` training rows (Clopper-Pearson upper limit
    of the binomial at the given confidence factor)."""
    if n <= 0:
        return 0.0
    if n - errors <= 0:
        return 1.0
    return float(_beta.ppf(1.0 - confidence_factor, errors + 1.0, n - errors))


def _estimated_errors(node: TreeNode, confidence_factor: float) -> float:
    if isinstance(node, Internal):
        return sum(_estimated_errors(b, confidence_factor)
                   for b in node.branches.values())
    n = node.distribution.total()
    if n <= 0:
        return 0.0
    errors = n - max(node.distribution.counts.values())
    return n * _pessimistic_rate(errors, n, confidence_factor)


def prune(root: TreeNode, config: TrainConfig) -> TreeNode:
    """Bottom-up pessimistic pruning: collapse a subtree into its majority
    leaf when the leaf's estimated errors do not exceed the subtree's."""
    if isinstance(root, Leaf):
        return root
    branches = {key: prune(b, config) for key, b in root.branches.items()}
    node = Internal(root.test, branches, root.fallback_label, root.distribution)
    n = node.distribution.total()
    if n <= 0:
        return node
    errors = n - max(node.distribution.counts.values())
    as_leaf = n * _pessimistic_rate(errors, n, config.confidence_factor)
    if as_leaf <= _estimated_errors(node, config.confidence_factor):
        return Leaf(node.distribution.majority(), node.distribution)
    return node


def classify(root: TreeNode,
             record: ProcessedStudentRecord | dict) -> Classification:
    """Walk the tree for one record; a value with no matching branch (or a
    missing tested value) stops at that node's fallback label."""
    values = record.features() if isinstance(record, ProcessedStudentRecord) else record
    path: list[PathStep] = []
    node = root
    while isinstance(node, Internal):
        name = node.test.attribute
        if name not in values:
            raise MissingFeature(name)
        value = values[name]
        if isinstance(node.test, CategoricalSplit):
            key = value if value is not None and value in node.branches else None
        else:
            key = None if value is None else (
                LEFT if value <= node.test.threshold else RIGHT)
        if key is None:
            path.append(PathStep(node.test, "fallback"))
            return Classification(node.fallback_label, tuple(path))
        path.append(PathStep(node.test, key))
        node = node.branches[key]
    return Classification(node.label, tuple(path))
