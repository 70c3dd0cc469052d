"""Shared test utilities: gradient flattening, finite differences, and the
brute-force l1 enumeration oracle."""

from itertools import combinations

import numpy as np
import pytest

from rlncs.neural import named_arrays, tree_map


def flatten_params(params) -> np.ndarray:
    return np.concatenate([a.ravel() for _, a in named_arrays(params)])


def unflatten_like(params, vec: np.ndarray):
    i = 0

    def take(a):
        nonlocal i
        chunk = vec[i:i + a.size].reshape(a.shape)
        i += a.size
        return chunk.copy()

    return tree_map(take, params)


def fd_gradient(f, params, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function over all parameters."""
    base = flatten_params(params)
    g = np.zeros_like(base)
    for j in range(base.size):
        up = base.copy()
        up[j] += h
        dn = base.copy()
        dn[j] -= h
        g[j] = (f(unflatten_like(params, up)) - f(unflatten_like(params, dn))) / (2 * h)
    return g


def rel_error(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(1e-12, np.linalg.norm(b)))


def brute_force_l1(a: np.ndarray, y: np.ndarray, kmax: int = 2, tol: float = 1e-9):
    """Sparsest exactly-feasible support (least squares per support), breaking
    ties by l1 norm. Returns (support tuple, l1 value) or None if nothing
    with <= kmax entries fits."""
    _, n = a.shape
    y_scale = max(1.0, float(np.linalg.norm(y)))
    for k in range(kmax + 1):
        found = []
        for sup in combinations(range(n), k):
            if k == 0:
                resid = float(np.linalg.norm(y))
                c = np.zeros(0)
            else:
                asub = a[:, sup]
                c, *_ = np.linalg.lstsq(asub, y, rcond=None)
                resid = float(np.linalg.norm(asub @ c - y))
            if resid <= tol * y_scale:
                found.append((float(np.abs(c).sum()), sup))
        if found:
            l1, sup = min(found)
            return sup, l1
    return None


@pytest.fixture
def np_rng():
    return np.random.default_rng(1234)
