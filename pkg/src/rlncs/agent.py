"""Q-learning machinery: exploration schedule, replay memory, targets.

The replay buffer is a strict FIFO ring. A sampled mini-batch serves both
heads: the transitions themselves for the action-value update, and for each
sampled transition a window of consecutive past states (ending at it, never
crossing an eviction boundary) for the sequence predictor, whose target is
that transition's next state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .neural import QNetParams, tree_copy
from .rng import Rng
from .roi_policy import ActionId


@dataclass
class Experience:
    s_t: np.ndarray
    a_t: ActionId
    s_next: np.ndarray
    reward: float
    step_index: int


@dataclass
class Batch:
    states: np.ndarray        # (Z, N)
    actions: np.ndarray       # (Z,) int
    next_states: np.ndarray   # (Z, N)
    rewards: np.ndarray       # (Z,)
    windows: list[np.ndarray]  # per item: (L_i, N) consecutive states ending at s_t
    targets: np.ndarray       # (Z, N) = next state of each sampled transition


class NotReady(Exception):
    """Replay memory cannot serve a batch yet; the caller skips this update."""


class ReplayMemory:
    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._items: list[Experience] = []
        self._head = 0  # next insertion slot once full

    def __len__(self) -> int:
        return len(self._items)

    def push(self, exp: Experience) -> None:
        if len(self._items) < self.capacity:
            self._items.append(exp)
        else:
            self._items[self._head] = exp
            self._head = (self._head + 1) % self.capacity

    def ordered(self) -> list[Experience]:
        """Contents oldest-first."""
        return self._items[self._head:] + self._items[:self._head]

    def ready(self, z: int, seq_len: int) -> bool:
        return len(self._items) >= max(z, seq_len + 1)


def sample_batch(memory: ReplayMemory, z: int, seq_len: int, rng: Rng) -> Batch:
    """Draw Z transitions without replacement plus their state windows.

    Window i holds up to seq_len consecutive states ending at transition i's
    own state; windows are truncated at the oldest retained experience, so
    they never span an eviction gap.
    """
    if not memory.ready(z, seq_len):
        raise NotReady(f"need max(Z={z}, L+1={seq_len + 1}) experiences, "
                       f"have {len(memory)}")
    items = memory.ordered()
    picks = rng.gen.choice(len(items), size=z, replace=False)
    windows = []
    for p in picks:
        lo = max(0, p - seq_len + 1)
        windows.append(np.stack([items[j].s_t for j in range(lo, p + 1)]))
    chosen = [items[p] for p in picks]
    return Batch(
        states=np.stack([e.s_t for e in chosen]),
        actions=np.array([int(e.a_t) for e in chosen]),
        next_states=np.stack([e.s_next for e in chosen]),
        rewards=np.array([e.reward for e in chosen]),
        windows=windows,
        targets=np.stack([e.s_next for e in chosen]),
    )


def epsilon_at(t: int, eps_decay: float, exponential: bool = False) -> float:
    """Exploration rate at step t: 1 at t=0, decaying to 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if exponential:
        return float(np.exp(-eps_decay * t))
    return max(0.0, 1.0 - t * eps_decay)


def select_action(q_values: np.ndarray, epsilon: float, rng: Rng) -> ActionId:
    """Epsilon-greedy; ties between action values resolve to DIRECT."""
    if epsilon > 0 and rng.gen.random() < epsilon:
        return ActionId(int(rng.gen.integers(0, 2)))
    return ActionId.LEARNED if q_values[1] > q_values[0] else ActionId.DIRECT


def q_target(reward: float, gamma: float, q_next_target: np.ndarray) -> float:
    return float(reward + gamma * np.max(q_next_target))


def sync_target(online: QNetParams) -> QNetParams:
    return tree_copy(online)
