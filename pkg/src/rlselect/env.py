"""Episode mechanics and the wrapper reward oracle.

An episode starts from the empty selection and inserts one feature per step
until ``subset_size`` features are held; the state stays sorted at all times,
so any pick order of the same features lands in the same state. Rewards are
classifier accuracies: the oracle fits on one stratified partition of its
matrix, scores on the other, and memoizes by subset so identical subsets are
never refit within a run.
"""

from __future__ import annotations

import numpy as np

from . import classifiers
from .agent import State
from .classifiers import ClassifierKind
from .dataset import SampleMatrix, SplitKind, project, stratified_split


def reset() -> State:
    """The empty selection."""
    return ()


def insert_sorted(state: State, action: int) -> State:
    if action in state:
        raise ValueError(f"feature {action} already selected")
    return tuple(sorted(state + (action,)))


class RewardOracle:
    """Subset -> holdout accuracy of the configured classifier, memoized.

    ``fit_fraction`` of the rows (stratified) trains the classifier; the rest
    are scored. Subsets are 1-based feature indices as the agent sees them.
    """

    def __init__(
        self,
        kind: ClassifierKind,
        matrix: SampleMatrix,
        seed: int,
        fit_fraction: float = 0.8,
        memoize: bool = True,
    ):
        plan = stratified_split(matrix, SplitKind.holdout(1.0 - fit_fraction), seed)
        fit_idx, score_idx = plan.train_test()
        self.kind = kind
        self.fit_part = matrix.rows(fit_idx)
        self.score_part = matrix.rows(score_idx)
        self.seed = seed
        self.memoize = memoize
        self.n_features = matrix.n_features
        self._cache: dict[State, float] = {}
        self.fit_count = 0
        self.hit_count = 0

    def __call__(self, subset: State) -> float:
        if len(subset) == 0:
            raise ValueError("cannot score an empty subset")
        key = tuple(subset)
        if any(b <= a for a, b in zip(key, key[1:])):
            raise ValueError(f"subset must be sorted strictly ascending, got {key}")
        if self.memoize and key in self._cache:
            self.hit_count += 1
            return self._cache[key]
        columns = [i - 1 for i in key]
        clf = classifiers.fit(self.kind, project(self.fit_part, columns), self.seed)
        self.fit_count += 1
        reward = classifiers.accuracy(clf, project(self.score_part, columns))
        if self.memoize:
            self._cache[key] = reward
        return reward


class FeatureEnv:
    """Selection episode driver: sorted state, oracle reward, termination at subset_size."""

    def __init__(self, n_features: int, subset_size: int, oracle):
        if not 1 <= subset_size <= n_features:
            raise ValueError(
                f"subset_size must be in 1..{n_features}, got {subset_size}"
            )
        self.n_features = n_features
        self.subset_size = subset_size
        self.oracle = oracle

    def reset(self) -> State:
        return reset()

    def step(self, state: State, action: int) -> tuple[State, float, bool]:
        """(new_state, reward, done); errors on duplicate actions or full states."""
        if len(state) >= self.subset_size:
            raise ValueError("episode already complete")
        if not 1 <= action <= self.n_features:
            raise ValueError(f"action {action} outside 1..{self.n_features}")
        new_state = insert_sorted(state, action)
        reward = float(self.oracle(new_state))
        return new_state, reward, len(new_state) == self.subset_size
