"""Brute-force residual minimization over all seven unknowns.

Independent of the closed form: a coarse grid locates basins, then bounded
least squares refines the best grid points.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import least_squares

_BETA_VOTE = np.array([[(k >> (2 - i)) & 1 for i in range(3)] for k in range(8)])  # (8, 3)


def forward_batch(theta: np.ndarray) -> np.ndarray:
    """Vectorized independent forward model; ``theta`` rows are (p, a1..a3, b1..b3)."""
    theta = np.atleast_2d(theta)
    p, a, b = theta[:, :1], theta[:, 1:4], theta[:, 4:7]
    bv = _BETA_VOTE[None]  # (1, 8, 3)
    side_a = np.where(bv, 1 - a[:, None, :], a[:, None, :]).prod(axis=2)
    side_b = np.where(bv, b[:, None, :], 1 - b[:, None, :]).prod(axis=2)
    return p * side_a + (1 - p) * side_b


def brute_force_solve(f, levels: int = 5, starts: int = 12) -> list[tuple[np.ndarray, float]]:
    """Return refined ``(theta, max-residual)`` candidates sorted by residual."""
    f = np.asarray([float(x) for x in f])
    axis = np.linspace(0.05, 0.95, levels)
    grid = np.array(list(itertools.product(axis, repeat=7)))
    resid = np.abs(forward_batch(grid) - f).max(axis=1)
    order = np.argsort(resid)
    picked = []
    step = axis[1] - axis[0]
    for idx in order:
        cand = grid[idx]
        if all(np.abs(cand - q).max() > step for q in picked):
            picked.append(cand)
        if len(picked) == starts:
            break
    out = []
    for x0 in picked:
        fit = least_squares(lambda th: forward_batch(th)[0] - f, x0, bounds=(0.0, 1.0),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        out.append((fit.x, float(np.abs(fit.fun).max())))
    out.sort(key=lambda c: c[1])
    return out
