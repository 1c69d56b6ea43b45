"""Pure-Python episode engine for single-resource request families.

Mirrors the compiled kernel in ``_episode_kernel.pyx`` operation for
operation: identical branch structure and floating-point arithmetic so both
paths produce bit-identical traces from the same request draws.

Kind codes: 0 = MultisecretaryBeta, 1 = GapMultisecretary,
2 = TwoPointConsumption, 3 = UnitSquareShifted.
"""

from __future__ import annotations

import numpy as np

IS_COMPILED = False


def _beta_price(d: float, beta: float) -> float:
    if d >= 1.0:
        return 0.0
    if d <= 0.0:
        return 1.0
    u = 1.0 - d
    p = 1.0 / (1.0 + beta)
    if u < 0.5:
        return 0.5 * (1.0 - (1.0 - 2.0 * u) ** p)
    return 0.5 * (1.0 + (2.0 * u - 1.0) ** p)


def _gap_price(d: float) -> float:
    if d >= 1.0:
        return 0.0
    if d >= 0.5:
        return 2.0 * (1.0 - d)
    if d > 0.0:
        return 3.0 - 2.0 * d
    return 3.0


def _two_point_price(d: float) -> float:
    if d >= 2.5:
        return 0.0
    if d >= 0.5:
        return (4.5 - d) / 8.0
    if d > 0.0:
        return 2.0 - 2.0 * d
    return 2.0


def _unit_square_consumption(z: float) -> float:
    if z <= 0.0:
        return 1.5
    c1 = 1.0 / z
    if c1 < 1.0:
        c1 = 1.0
    elif c1 > 2.0:
        c1 = 2.0
    c2 = 2.0 / z
    if c2 < 1.0:
        c2 = 1.0
    elif c2 > 2.0:
        c2 = 2.0
    total = (c1 * c1 - 1.0) / 2.0
    if c2 > c1:
        total += (c2 * c2 - c1 * c1) - z * (c2 * c2 * c2 - c1 * c1 * c1) / 3.0
    return total


def _unit_square_price(d: float) -> float:
    if d >= 1.5:
        return 0.0
    if d <= 0.0:
        return 2.0
    lo = 0.0
    hi = 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _unit_square_consumption(mid) <= d:
            hi = mid
        else:
            lo = mid
    return hi


def price(kind: int, d: float, beta: float) -> float:
    if kind == 0:
        return _beta_price(d, beta)
    if kind == 1:
        return _gap_price(d)
    if kind == 2:
        return _two_point_price(d)
    return _unit_square_price(d)


def run_ce_m1(kind, beta, b0, T, a, r, thresholds, accepted, b_after):
    """Run the re-solving policy over one realized request sequence.

    Fills thresholds/accepted/b_after in place and returns total reward.
    """
    b = float(b0)
    total = 0.0
    for t in range(1, T + 1):
        if t < T:
            lam = price(kind, b / (T - t), beta)
        else:
            lam = 0.0
        at = a[t - 1]
        rt = r[t - 1]
        thr = at * lam
        thresholds[t - 1] = thr
        if rt >= thr and at <= b:
            accepted[t - 1] = 1
            b -= at
            total += rt
        else:
            accepted[t - 1] = 0
        b_after[t - 1] = b
    return total


def run_threshold_m1(lam, b0, T, a, r, thresholds, accepted, b_after):
    """Fixed-threshold policy (static fluid price, or 0 = accept-if-feasible)."""
    b = float(b0)
    total = 0.0
    for t in range(T):
        at = a[t]
        rt = r[t]
        thr = at * lam
        thresholds[t] = thr
        if rt >= thr and at <= b:
            accepted[t] = 1
            b -= at
            total += rt
        else:
            accepted[t] = 0
        b_after[t] = b
    return total
