"""Central differences with Richardson (Romberg) extrapolation in the step."""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np


class FDResult(NamedTuple):
    value: np.ndarray | float
    error: float
    table: np.ndarray
    converged: bool


def richardson_derivative(f: Callable[[float], np.ndarray], h0: float | None = None, levels: int = 4,
                          x0: float = 0.0, rtol: float = 1e-6, steps=None) -> FDResult:
    """d f / dx at x0 from central differences h0, h0/2, ... extrapolated in h^2.

    ``steps`` overrides the halving sequence with explicit, strictly
    decreasing step sizes (Neville extrapolation to h = 0).  ``f`` may return
    arrays; the extrapolation acts elementwise.  The error estimate is the
    difference between the two most refined diagonal entries.
    """
    if steps is None:
        steps = [h0 / 2**i for i in range(levels)]
    steps = [float(h) for h in steps]
    if any(h <= 0 for h in steps) or any(b >= a for a, b in zip(steps, steps[1:])):
        raise ValueError("steps must be positive and strictly decreasing")
    levels = len(steps)
    T = [[None] * levels for _ in range(levels)]
    for i, h in enumerate(steps):
        T[i][0] = (np.asarray(f(x0 + h)) - np.asarray(f(x0 - h))) / (2 * h)
        for j in range(1, i + 1):
            r = (steps[i - j] / h) ** 2
            T[i][j] = T[i][j - 1] + (T[i][j - 1] - T[i - 1][j - 1]) / (r - 1)
    best = T[-1][-1]
    err = float(np.max(np.abs(best - T[-2][-2]))) if levels > 1 else float("nan")
    table = np.array([[np.nan if t is None else np.max(np.atleast_1d(t)) for t in row] for row in T])
    scale = max(1.0, float(np.max(np.abs(best))))
    return FDResult(best, err, table, err <= rtol * scale)
