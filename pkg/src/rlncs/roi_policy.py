"""The two ROI-prediction actions and the set/state encoding between them.

Action DIRECT carries the current estimated ROI forward unchanged. Action
LEARNED thresholds the sequence predictor's per-coefficient confidence:
current members survive if their confidence stays above the low bound,
non-members join only above the high bound.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class ActionId(IntEnum):
    DIRECT = 0
    LEARNED = 1


def action_direct(r_t: set[int]) -> set[int]:
    return set(r_t)


def action_learned(r_t: set[int], i_t: set[int], o_t: np.ndarray,
                   th_up: float, th_low: float) -> set[int]:
    if not th_up > th_low:
        raise ValueError(f"th_up ({th_up}) must exceed th_low ({th_low})")
    keep = {j for j in r_t if o_t[j] >= th_low}
    join = {j for j in i_t if o_t[j] >= th_up}
    return keep | join


def complement(r_t: set[int], n: int) -> set[int]:
    return set(range(n)) - r_t


def state_from_roi(r: set[int], n: int) -> np.ndarray:
    s = np.zeros(n)
    idx = np.fromiter(r, dtype=int, count=len(r))
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"ROI index out of range for n={n}")
    s[idx] = 1.0
    return s


def roi_from_state(s: np.ndarray) -> set[int]:
    return set(np.flatnonzero(s).tolist())
