"""Filter-method and random baselines: information gain, chi-square, random subsets.

These rank each feature from data statistics alone (no classifier in the
loop), which is exactly what the learned selector is compared against.
Entropy is measured in bits with the 0*log(0) = 0 convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import SampleMatrix


@dataclass(frozen=True)
class RankedFeatures:
    """Per-feature scores plus the induced descending-score order (ties to lower index)."""

    scores: np.ndarray
    order: np.ndarray

    def __post_init__(self):
        scores = np.ascontiguousarray(self.scores, dtype=np.float64)
        order = np.ascontiguousarray(self.order, dtype=np.intp)
        scores.flags.writeable = False
        order.flags.writeable = False
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "order", order)


def _rank(scores: np.ndarray) -> RankedFeatures:
    order = np.lexsort((np.arange(scores.size), -scores))
    return RankedFeatures(scores, order)


def _entropy(counts: np.ndarray) -> float:
    """Shannon entropy in bits of a count vector."""
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _feature_label_table(matrix: SampleMatrix) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Per-feature 2x2 counts: rows with bit 1 per class, and class totals."""
    y1 = matrix.y == 1
    n1 = int(np.count_nonzero(y1))
    n0 = matrix.n_samples - n1
    ones_pos = matrix.X[y1].sum(axis=0).astype(np.float64)  # bit=1 & malware
    ones_neg = matrix.X[~y1].sum(axis=0).astype(np.float64)  # bit=1 & benign
    return ones_neg, ones_pos, n0, n1


def _check_two_classes(matrix: SampleMatrix) -> None:
    if matrix.n_samples == 0:
        raise ValueError("empty matrix")
    c0, c1 = matrix.class_counts()
    if c0 == 0 or c1 == 0:
        raise ValueError("both classes must be present")


def information_gain(matrix: SampleMatrix) -> RankedFeatures:
    """Mutual information of each feature with the label: H(Y) - H(Y|X), in bits."""
    _check_two_classes(matrix)
    ones_neg, ones_pos, n0, n1 = _feature_label_table(matrix)
    n = n0 + n1
    h_y = _entropy(np.array([n0, n1], dtype=np.float64))

    scores = np.empty(matrix.n_features)
    for j in range(matrix.n_features):
        a, b = ones_neg[j], ones_pos[j]  # bit=1 counts per class
        c, d = n0 - a, n1 - b  # bit=0 counts per class
        h_cond = ((a + b) * _entropy(np.array([a, b])) + (c + d) * _entropy(np.array([c, d]))) / n
        scores[j] = h_y - h_cond
    # Clamp the tiny negative residue float arithmetic can leave at independence.
    scores[np.abs(scores) < 1e-15] = 0.0
    return _rank(scores)


def chi_square(matrix: SampleMatrix) -> RankedFeatures:
    """Pearson chi-square of each feature/label 2x2 table; zero expected cells contribute 0."""
    _check_two_classes(matrix)
    ones_neg, ones_pos, n0, n1 = _feature_label_table(matrix)
    n = n0 + n1

    scores = np.empty(matrix.n_features)
    for j in range(matrix.n_features):
        observed = np.array([
            [n0 - ones_neg[j], ones_neg[j]],
            [n1 - ones_pos[j], ones_pos[j]],
        ])
        row = observed.sum(axis=1, keepdims=True)
        col = observed.sum(axis=0, keepdims=True)
        expected = row @ col / n
        nz = expected > 0
        scores[j] = float((((observed - expected) ** 2)[nz] / expected[nz]).sum())
    return _rank(scores)


def random_subset(n_features: int, size: int, seed: int) -> list[int]:
    """Uniform sorted sample of ``size`` feature indices without replacement."""
    if size > n_features:
        raise ValueError(f"size {size} exceeds feature count {n_features}")
    if size < 0:
        raise ValueError("size must be >= 0")
    rng = np.random.default_rng(seed)
    return sorted(int(i) for i in rng.choice(n_features, size=size, replace=False))


def top_k(ranked: RankedFeatures, k: int) -> list[int]:
    """The k best-ranked feature indices, re-sorted ascending."""
    if k > ranked.order.size:
        raise ValueError(f"k {k} exceeds feature count {ranked.order.size}")
    if k < 0:
        raise ValueError("k must be >= 0")
    return sorted(int(i) for i in ranked.order[:k])
