"""Double-DQN machinery: exploration schedule, masked action selection, replay, targets.

States are sorted tuples of 1-based feature indices. Already-selected features
are masked out both when acting and inside the target's argmax, and the greedy
policy therefore realizes the fall-back-to-next-highest rule: scanning scores
in descending order past selected features is exactly a masked argmax.

Two target conventions are supported. ``paper`` picks the argmax action with
the target network and evaluates it with the online network; ``standard`` is
the mirror image (argmax online, evaluate with the target network).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import net

State = tuple[int, ...]

CONVENTIONS = ("paper", "standard")


@dataclass(frozen=True)
class EpsilonSchedule:
    """Linear exploration decay: eps(episode) = 1 - (episode / total) * p."""

    total_episodes: int
    p: float

    def __post_init__(self):
        if self.total_episodes < 1:
            raise ValueError("total_episodes must be >= 1")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must be in (0, 1], got {self.p}")

    def epsilon(self, episode: int) -> float:
        if not 0 <= episode <= self.total_episodes:
            raise ValueError(
                f"episode {episode} outside 0..{self.total_episodes}"
            )
        return 1.0 - (episode / self.total_episodes) * self.p


@dataclass(frozen=True)
class Transition:
    prev_state: State
    action: int
    reward: float
    next_state: State
    terminal: bool

    def __post_init__(self):
        expected = tuple(sorted(self.prev_state + (self.action,)))
        if self.next_state != expected:
            raise ValueError(
                f"next_state {self.next_state} != prev_state + action {expected}"
            )
        if not 0.0 <= self.reward <= 1.0:
            raise ValueError(f"reward {self.reward} outside [0, 1]")


class ReplayMemory:
    """Bounded FIFO transition store with uniform with-replacement sampling."""

    def __init__(self, capacity: int = 200_000):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._buffer: deque[Transition] = deque(maxlen=capacity)
        self.inserted = 0

    def __len__(self) -> int:
        return len(self._buffer)

    def push(self, transition: Transition) -> None:
        self._buffer.append(transition)
        self.inserted += 1

    def contents(self) -> list[Transition]:
        return list(self._buffer)

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        if batch_size > len(self._buffer):
            raise ValueError(
                f"cannot sample {batch_size} from memory of size {len(self._buffer)}"
            )
        idx = rng.integers(0, len(self._buffer), size=batch_size)
        return [self._buffer[i] for i in idx]


def masked_argmax(scores: np.ndarray, state: State) -> int:
    """Best unselected feature (1-based); ties go to the lower index."""
    masked = scores.astype(np.float64, copy=True)
    for i in state:
        masked[i - 1] = -np.inf
    return int(np.argmax(masked)) + 1


def select_action(
    state: State, eps: float, params: net.NetworkParams, rng: np.random.Generator
) -> int:
    """Epsilon-greedy pick over unselected features; greedy uses masked argmax under params."""
    n = params.config.n_features
    if len(state) >= n:
        raise ValueError("state already contains every feature")
    if eps > 0.0 and rng.random() < eps:
        selected = set(state)
        choices = [i for i in range(1, n + 1) if i not in selected]
        return int(choices[rng.integers(0, len(choices))])
    return masked_argmax(net.forward(params, state), state)


def ddqn_target(
    transition: Transition,
    q_online,
    q_target,
    gamma: float,
    convention: str = "paper",
) -> float:
    """Bootstrapped regression target for one transition.

    ``q_online`` and ``q_target`` score a state under the learning network
    (theta-1) and the periodically synced network (theta-2) respectively.
    Terminal transitions return the raw reward; otherwise the next state's
    argmax is taken over unselected features only.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    if transition.terminal:
        return transition.reward
    if gamma == 0.0:
        return transition.reward
    nxt = transition.next_state
    if convention == "paper":
        best = masked_argmax(q_target(nxt), nxt)
        value = float(q_online(nxt)[best - 1])
    else:
        best = masked_argmax(q_online(nxt), nxt)
        value = float(q_target(nxt)[best - 1])
    return transition.reward + gamma * value


@dataclass(frozen=True)
class AgentConfig:
    """Training-cadence knobs (counts are in episodes unless named otherwise)."""

    subset_size: int  # features selected per episode
    total_episodes: int
    p: float = 0.9
    warmup_steps: int = 50_000
    batch_size: int = 32
    gamma: float = 0.99
    learn_frequency: int = 5
    sync_frequency: int = 100
    ddqn_convention: str = "paper"

    def __post_init__(self):
        if self.subset_size < 1:
            raise ValueError("subset_size must be >= 1")
        if min(self.total_episodes, self.warmup_steps, self.batch_size,
               self.learn_frequency, self.sync_frequency) < 1:
            raise ValueError("all counts must be >= 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.ddqn_convention not in CONVENTIONS:
            raise ValueError(f"ddqn_convention must be one of {CONVENTIONS}")
        EpsilonSchedule(self.total_episodes, self.p)  # validates p

    def schedule(self) -> EpsilonSchedule:
        return EpsilonSchedule(self.total_episodes, self.p)


def train_step(
    memory: ReplayMemory,
    theta1: net.NetworkParams,
    theta2: net.NetworkParams,
    opt: net.OptimizerState,
    cfg: AgentConfig,
    rng: np.random.Generator,
) -> net.NetworkParams:
    """One DDQN update: sample a batch, regress Q(prev)[action] onto the targets.

    Gradients are accumulated per transition and applied as a single
    mean-gradient optimizer step on the online network.
    """
    batch = memory.sample(cfg.batch_size, rng)
    q_online = lambda s: net.forward(theta1, s)
    q_target = lambda s: net.forward(theta2, s)

    total = theta1.zeros_like()
    for tr in batch:
        target = ddqn_target(tr, q_online, q_target, cfg.gamma, cfg.ddqn_convention)
        grads = net.backward(theta1, tr.prev_state, tr.action, target)
        for name, g in grads.items():
            total[name] += g
    for g in total.values():
        g /= len(batch)
    return net.step(theta1, total, opt)
