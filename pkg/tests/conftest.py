"""Shared independent oracles for the test suite.

These deliberately avoid the library's own solver paths: grid scans over the
dual box and Monte Carlo averages act as ground truth for the closed-form
implementations.
"""

from __future__ import annotations

import numpy as np

from olpce.fluid import fluid_objective, omega_box


def grid_min_m1(dist, d, resolution=2000):
    """Brute-force minimum of the fluid dual over the box (m = 1)."""
    grid = np.linspace(0.0, omega_box(dist), resolution + 1)
    best_val, best_lam = np.inf, 0.0
    for g in grid:
        v = fluid_objective(dist, d, [g])
        if v < best_val:
            best_val, best_lam = v, g
    return best_lam, best_val


def empirical_grid_min_m2(A, R, b, upper, resolution=1500):
    """Minimum of the empirical dual over the (resolution x resolution) grid
    on [0, upper]^2, computed exactly without enumerating every grid point.

    For fixed lam0 the objective is convex piecewise-linear in lam1, so its
    minimum over the lam1 grid column is attained at a grid point adjacent to
    a breakpoint (r_j - a_j0 lam0) / a_j1 (or at an endpoint).  Evaluating
    only those candidates reproduces the full-grid minimum.
    """
    A = np.asarray(A, dtype=float)
    R = np.asarray(R, dtype=float)
    b = np.asarray(b, dtype=float)
    axis = np.linspace(0.0, upper, resolution)
    step = axis[1] - axis[0]
    a1 = A[:, 1]
    t = R[None, :] - np.outer(axis, A[:, 0])  # (resolution, n)
    pos = np.clip(t / a1[None, :], 0.0, upper) / step
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, resolution - 1)
    ends = np.broadcast_to([0, resolution - 1], (resolution, 2))
    lam1 = axis[np.concatenate([lo, hi, ends], axis=1)]  # (resolution, 2n+2)
    hinges = np.clip(t[:, None, :] - lam1[:, :, None] * a1[None, None, :],
                     0.0, None).sum(axis=2)
    totals = b[0] * axis[:, None] + b[1] * lam1 + hinges
    return float(totals.min())


def mc_hinge(dist, lam, n, rng):
    """Monte Carlo estimate of E[(r - a.lam)^+]; returns (mean, stderr)."""
    A, R = dist.sample_batch(n, rng)
    vals = np.clip(R - A @ np.atleast_1d(lam), 0.0, None)
    return float(vals.mean()), float(vals.std() / np.sqrt(n))
