"""Labeled binary feature matrices, feature dictionaries, splits, and a synthetic generator.

Everything downstream (classifiers, baselines, the selection agent) consumes the
:class:`SampleMatrix` defined here. Labels are fixed as 0 = benign, 1 = malware.
The on-disk format is a plain CSV: a header row of feature names followed by a
trailing ``label`` column, body cells all 0/1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

CATEGORIES = ("permission", "intent", "ngram", "synthetic")

# CSV column prefixes marking the feature category; stripped on load, added on save.
CATEGORY_PREFIXES = {"perm:": "permission", "intent:": "intent", "ngram:": "ngram"}
_PREFIX_FOR = {cat: prefix for prefix, cat in CATEGORY_PREFIXES.items()}


class CsvFormatError(ValueError):
    """Malformed cell or unreadable structure in a matrix CSV."""


class SchemaError(ValueError):
    """CSV header violates the dictionary rules (e.g. duplicate feature name)."""


class SplitError(ValueError):
    """Requested split cannot be built from the given matrix."""


@dataclass(frozen=True)
class FeatureDictionary:
    """Ordered feature names with categories; position in the tuple is the 0-based index."""

    names: tuple[str, ...]
    categories: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) != len(self.categories):
            raise ValueError("names and categories must have equal length")
        for cat in self.categories:
            if cat not in CATEGORIES:
                raise ValueError(f"unknown feature category {cat!r}")
        seen = set()
        for name, cat in zip(self.names, self.categories):
            key = (cat, name)
            if key in seen:
                raise SchemaError(f"duplicate feature name {name!r} in category {cat!r}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.names)

    @property
    def entries(self) -> list[tuple[int, str, str]]:
        return [(i, n, c) for i, (n, c) in enumerate(zip(self.names, self.categories))]

    def category_indices(self, category: str) -> list[int]:
        """Indices of this category's entries, in dictionary order."""
        if category not in CATEGORIES:
            raise ValueError(f"unknown feature category {category!r}")
        return [i for i, c in enumerate(self.categories) if c == category]

    @classmethod
    def from_names(cls, names, category: str = "synthetic") -> "FeatureDictionary":
        names = tuple(names)
        return cls(names, (category,) * len(names))


def _split_column_name(column: str) -> tuple[str, str]:
    """(name, category) for a CSV column, stripping any category prefix."""
    for prefix, cat in CATEGORY_PREFIXES.items():
        if column.startswith(prefix):
            return column[len(prefix):], cat
    return column, "synthetic"


def _column_name(name: str, category: str) -> str:
    return _PREFIX_FOR.get(category, "") + name


@dataclass(frozen=True)
class SampleMatrix:
    """Binary feature matrix with labels.

    ``X`` is (n_samples, n_features) with values in {0, 1}; ``y`` holds the
    labels (0 = benign, 1 = malware). Arrays are frozen after construction.
    """

    dictionary: FeatureDictionary
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.uint8)
        y = np.ascontiguousarray(self.y, dtype=np.uint8)
        if X.ndim != 2 or y.ndim != 1:
            raise ValueError("X must be 2-D and y 1-D")
        if X.shape[0] != y.shape[0]:
            raise ValueError("row count mismatch between X and y")
        if X.shape[1] != len(self.dictionary):
            raise ValueError(
                f"matrix has {X.shape[1]} columns but dictionary has {len(self.dictionary)} entries"
            )
        if X.size and X.max() > 1:
            raise ValueError("feature values must be 0/1")
        if y.size and y.max() > 1:
            raise ValueError("labels must be 0/1")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def rows(self, indices) -> "SampleMatrix":
        """Row-subset view as a new matrix (same dictionary)."""
        idx = np.asarray(indices, dtype=np.intp)
        return SampleMatrix(self.dictionary, self.X[idx], self.y[idx])

    def class_counts(self) -> tuple[int, int]:
        return int(np.count_nonzero(self.y == 0)), int(np.count_nonzero(self.y == 1))


def load_csv(path) -> SampleMatrix:
    """Load a SampleMatrix from CSV (feature-name header plus trailing ``label``)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file, expected a header row") from None
        if not header or header[-1] != "label":
            raise SchemaError(f"{path}: last header column must be 'label'")
        parsed = [_split_column_name(col) for col in header[:-1]]
        names = tuple(n for n, _ in parsed)
        categories = tuple(c for _, c in parsed)
        dictionary = FeatureDictionary(names, categories)

        rows, labels = [], []
        for lineno, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise CsvFormatError(
                    f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}"
                )
            for col, cell in enumerate(row):
                if cell not in ("0", "1"):
                    colname = header[col]
                    raise CsvFormatError(
                        f"{path}: bad cell {cell!r} at (row {lineno}, col {colname})"
                    )
            rows.append([int(c) for c in row[:-1]])
            labels.append(int(row[-1]))

    X = np.array(rows, dtype=np.uint8).reshape(len(rows), len(names))
    y = np.array(labels, dtype=np.uint8)
    return SampleMatrix(dictionary, X, y)


def save_csv(matrix: SampleMatrix, path) -> None:
    """Write the matrix in the CSV format understood by :func:`load_csv`."""
    columns = [
        _column_name(n, c)
        for n, c in zip(matrix.dictionary.names, matrix.dictionary.categories)
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns + ["label"])
        for bits, label in zip(matrix.X, matrix.y):
            writer.writerow([int(b) for b in bits] + [int(label)])


@dataclass(frozen=True)
class SyntheticSpec:
    """Planted-signal generator spec.

    Each informative feature copies the label with probability ``q`` (flipped
    otherwise); every other bit is a fair coin. ``q`` must exceed 0.5 or the
    planted features carry no signal.
    """

    n_samples: int
    n_features: int
    informative: tuple[int, ...]
    q: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "informative", tuple(sorted(self.informative)))
        if self.n_samples < 0 or self.n_features < 1:
            raise ValueError("need n_samples >= 0 and n_features >= 1")
        if not (0.5 < self.q <= 1.0):
            raise ValueError(f"q must be in (0.5, 1], got {self.q}")
        for j in self.informative:
            if not 0 <= j < self.n_features:
                raise ValueError(f"informative index {j} out of range")
        if len(set(self.informative)) != len(self.informative):
            raise ValueError("informative indices must be unique")


def generate_synthetic(spec: SyntheticSpec) -> SampleMatrix:
    """Generate a labeled matrix per the spec; deterministic in the seed."""
    rng = np.random.default_rng(spec.seed)
    n, m = spec.n_samples, spec.n_features
    y = rng.integers(0, 2, size=n, dtype=np.uint8)
    X = rng.integers(0, 2, size=(n, m), dtype=np.uint8)
    for j in spec.informative:
        agree = rng.random(n) < spec.q
        X[:, j] = np.where(agree, y, 1 - y)
    width = max(3, len(str(m - 1)))
    names = tuple(f"f{i:0{width}d}" for i in range(m))
    return SampleMatrix(FeatureDictionary.from_names(names), X, y)


@dataclass(frozen=True)
class SplitKind:
    method: str  # "kfold" | "holdout"
    k: int = 0
    fraction: float = 0.0

    @classmethod
    def kfold(cls, k: int) -> "SplitKind":
        if k < 2:
            raise ValueError("kfold needs k >= 2")
        return cls("kfold", k=k)

    @classmethod
    def holdout(cls, fraction: float) -> "SplitKind":
        if not 0.0 < fraction < 1.0:
            raise ValueError("holdout fraction must be in (0, 1)")
        return cls("holdout", fraction=fraction)


@dataclass(frozen=True)
class SplitPlan:
    """Per-row fold/partition assignment. Holdout uses partition 0 = fit, 1 = held out."""

    kind: SplitKind
    assignments: np.ndarray
    seed: int

    def __post_init__(self):
        a = np.ascontiguousarray(self.assignments, dtype=np.intp)
        a.flags.writeable = False
        object.__setattr__(self, "assignments", a)

    @property
    def n_folds(self) -> int:
        return self.kind.k if self.kind.method == "kfold" else 2

    def fold_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def folds(self):
        """Yield (fit_indices, eval_indices) per fold (kfold only)."""
        if self.kind.method != "kfold":
            raise ValueError("folds() requires a kfold plan")
        for f in range(self.kind.k):
            mask = self.assignments == f
            yield np.flatnonzero(~mask), np.flatnonzero(mask)

    def train_test(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind.method != "holdout":
            raise ValueError("train_test() requires a holdout plan")
        return self.fold_indices(0), self.fold_indices(1)


def stratified_split(matrix: SampleMatrix, kind: SplitKind, seed: int) -> SplitPlan:
    """Stratified, deterministic fold assignment over the matrix rows."""
    rng = np.random.default_rng(seed)
    assignments = np.zeros(matrix.n_samples, dtype=np.intp)
    if kind.method == "kfold":
        for cls in (0, 1):
            idx = np.flatnonzero(matrix.y == cls)
            if idx.size < kind.k:
                raise SplitError(
                    f"class {cls} has {idx.size} samples, fewer than k={kind.k}"
                )
            rng.shuffle(idx)
            assignments[idx] = np.arange(idx.size) % kind.k
    elif kind.method == "holdout":
        for cls in (0, 1):
            idx = np.flatnonzero(matrix.y == cls)
            rng.shuffle(idx)
            n_test = int(round(idx.size * kind.fraction))
            assignments[idx[:n_test]] = 1
    else:
        raise ValueError(f"unknown split method {kind.method!r}")
    return SplitPlan(kind, assignments, seed)


def project(matrix: SampleMatrix, subset) -> SampleMatrix:
    """Restrict the matrix to the given strictly-increasing 0-based column subset."""
    sub = list(subset)
    if any(not isinstance(i, (int, np.integer)) for i in sub):
        raise ValueError("subset indices must be integers")
    if any(b <= a for a, b in zip(sub, sub[1:])):
        raise ValueError(f"subset must be strictly increasing, got {sub}")
    for i in sub:
        if not 0 <= i < matrix.n_features:
            raise ValueError(f"subset index {i} out of range 0..{matrix.n_features - 1}")
    names = tuple(matrix.dictionary.names[i] for i in sub)
    cats = tuple(matrix.dictionary.categories[i] for i in sub)
    new_dict = FeatureDictionary(names, cats)
    return SampleMatrix(new_dict, matrix.X[:, sub], matrix.y)
