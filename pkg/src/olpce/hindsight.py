"""Hindsight (offline) multi-knapsack LP: simplified dual, exact scalar
solvers, primal recovery via complementary slackness, and brute-force
oracles used as test anchors.

For a realized sample {(a_j, r_j)} and capacity b the offline value is

    V^off = max { sum r_j x_j : sum a_j x_j <= b, 0 <= x <= 1 }
          = min_{lam >= 0}  b . lam + sum_j (r_j - a_j . lam)^+.

m = 1 is solved exactly by scanning the breakpoints r_j / a_j; m >= 2 goes
through scipy's LP solver on the primal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, RecoveryFailed, SolverBudgetExceeded, WrongDimension
from .fluid import DualSolution, SolverConfig


@dataclass(frozen=True)
class RequestSample:
    """Realized request sequence: A has shape (n, m), R has shape (n,)."""

    A: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", np.atleast_2d(np.asarray(self.A, dtype=float)))
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float))
        if self.A.shape[0] != self.R.shape[0]:
            raise DimensionMismatch("A and R must have the same number of rows")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class Allocation:
    x: np.ndarray
    value: float
    fractional_count: int


def _check(sample: RequestSample, b, lam=None):
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if b.shape != (sample.m,):
        raise DimensionMismatch(f"b has shape {b.shape}, expected ({sample.m},)")
    if lam is None:
        return b
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if lam.shape != (sample.m,):
        raise DimensionMismatch(f"lambda has shape {lam.shape}, expected ({sample.m},)")
    return b, lam


def empirical_dual_objective(sample: RequestSample, b, lam) -> float:
    b, lam = _check(sample, b, lam)
    return float(b @ lam + np.clip(sample.R - sample.A @ lam, 0.0, None).sum())


def empirical_dual_subgradient(sample: RequestSample, b, lam) -> np.ndarray:
    b, lam = _check(sample, b, lam)
    active = sample.R > sample.A @ lam
    return b - sample.A[active].sum(axis=0)


def request_dual_term(a, r, c, lam) -> float:
    """Per-request dual contribution h(lam) = c . lam + (r - a . lam)^+."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return float(c @ lam + max(r - float(a @ lam), 0.0))


def request_dual_subgradient(a, r, c, lam) -> np.ndarray:
    """phi(lam) = c - a * 1{r > a . lam}."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return c - a * (r > float(a @ lam))


def line_integration_gap(a, r, lam1, lam2) -> float:
    """Closed form of int_{a.lam1}^{a.lam2} (1{r > v} - 1{r > a.lam2}) dv.

    Together with the subgradient at lam2 this reconstitutes the exact
    difference h(lam1) - h(lam2) of the per-request dual terms.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    z1 = float(a @ np.atleast_1d(np.asarray(lam1, dtype=float)))
    z2 = float(a @ np.atleast_1d(np.asarray(lam2, dtype=float)))
    first = min(r, z2) - min(r, z1)
    second = (z2 - z1) * (1.0 if r > z2 else 0.0)
    return first - second


def solve_empirical_dual(
    sample: RequestSample, b, cfg: SolverConfig | None = None
) -> DualSolution:
    """Minimize the empirical dual over lam >= 0 (smallest optimum for m=1)."""
    b = _check(sample, b)
    if sample.m == 1:
        lam = np.array([_scan_m1(sample.A[:, 0], sample.R, float(b[0]))])
        return DualSolution(
            lam=lam,
            value=empirical_dual_objective(sample, b, lam),
            iterations=0,
            converged=True,
        )
    # m >= 2: solve the primal LP; the constraint multipliers are the dual.
    res = linprog(
        c=-sample.R,
        A_ub=sample.A.T,
        b_ub=b,
        bounds=[(0.0, 1.0)] * sample.n,
        method="highs",
    )
    if not res.success:
        raise SolverBudgetExceeded(f"empirical dual LP failed: {res.message}")
    lam = np.clip(-np.asarray(res.ineqlin.marginals, dtype=float), 0.0, None)
    return DualSolution(
        lam=lam,
        value=empirical_dual_objective(sample, b, lam),
        iterations=int(getattr(res, "nit", 0)),
        converged=True,
    )


def _scan_m1(a: np.ndarray, r: np.ndarray, b: float) -> float:
    """Smallest minimizer of b*lam + sum (r_j - a_j lam)^+ for a_j > 0.

    The derivative on a segment is b - sum a_j 1{r_j/a_j > lam}; the smallest
    optimum is the first breakpoint (or 0) where it turns nonnegative.
    """
    ratios = r / a
    if b - a[ratios > 0.0].sum() >= 0.0:
        return 0.0
    order = np.argsort(ratios, kind="stable")
    sorted_ratios = ratios[order]
    # weight strictly above each candidate level: sum of a_j with ratio > v,
    # evaluating each tied breakpoint value at its last duplicate
    suffix = np.cumsum(a[order][::-1])[::-1]
    above = np.append(suffix[1:], 0.0)
    last_dup = np.append(sorted_ratios[1:] != sorted_ratios[:-1], True)
    ok = (sorted_ratios >= 0.0) & last_dup & (b - above >= 0.0)
    idx = np.flatnonzero(ok)
    if idx.size:
        return float(sorted_ratios[idx[0]])
    return float(max(sorted_ratios[-1], 0.0))


def hindsight_value(sample: RequestSample, b) -> float:
    return solve_empirical_dual(sample, b).value


def greedy_m1(sample: RequestSample, b: float) -> Allocation:
    """Exact fractional-knapsack oracle for a single resource."""
    if sample.m != 1:
        raise WrongDimension("greedy_m1 requires m = 1")
    a = sample.A[:, 0]
    if np.any(a <= 0):
        raise WrongDimension("greedy_m1 requires strictly positive a_j")
    r = sample.R
    order = np.argsort(-(r / a), kind="stable")
    x = np.zeros(sample.n)
    cap = float(b)
    frac = 0
    for j in order:
        if r[j] <= 0.0:
            break
        if a[j] <= cap:
            x[j] = 1.0
            cap -= a[j]
        elif cap > 0.0:
            x[j] = cap / a[j]
            cap = 0.0
            frac += 1
        else:
            break
    return Allocation(x=x, value=float(r @ x), fractional_count=frac)


def recover_primal(sample: RequestSample, b, lam_star, r_max=None) -> Allocation:
    """Primal allocation from an optimal dual point by complementary slackness.

    Items with r_j > a_j . lam* are accepted, r_j < a_j . lam* rejected;
    items on the boundary get fractional mass from a small LP over the
    residual capacity.  Raises RecoveryFailed if the result misses the dual
    value, which signals lam* was not optimal.
    """
    b, lam = _check(sample, b, lam_star)
    if r_max is None:
        r_max = float(sample.R.max(initial=0.0))
    boundary_tol = 1e-7 * (1.0 + r_max)

    prices = sample.A @ lam
    gap = sample.R - prices
    forced_zero = np.zeros(sample.n, dtype=bool)
    zero_cap = b <= 0.0
    if zero_cap.any():
        forced_zero = (sample.A[:, zero_cap] > 0.0).any(axis=1)

    x = np.where((gap > boundary_tol) & ~forced_zero, 1.0, 0.0)
    boundary = (np.abs(gap) <= boundary_tol) & ~forced_zero
    resid = b - sample.A.T @ x

    frac = 0
    if boundary.any():
        idx = np.flatnonzero(boundary)
        sub_a = sample.A[idx]
        # each boundary item is worth exactly its price a_j . lam*, so
        # maximizing priced consumption recovers the missing dual mass
        res = linprog(
            c=-(sub_a @ lam),
            A_ub=sub_a.T,
            b_ub=np.clip(resid, 0.0, None),
            bounds=[(0.0, 1.0)] * len(idx),
            method="highs",
        )
        if not res.success:
            raise RecoveryFailed(f"boundary fill LP failed: {res.message}")
        fill = np.clip(res.x, 0.0, 1.0)
        x[idx] = fill
        frac = int(np.count_nonzero((fill > 1e-9) & (fill < 1.0 - 1e-9)))

    value = float(sample.R @ x)
    dual_value = empirical_dual_objective(sample, b, lam)
    if abs(value - dual_value) > 1e-6 * (1.0 + abs(value)):
        raise RecoveryFailed(
            f"recovered primal value {value} misses dual value {dual_value}; "
            "the supplied dual point is not optimal"
        )
    return Allocation(x=x, value=value, fractional_count=frac)


def value_induction_check(sample: RequestSample, b, t_index: int) -> bool:
    """Check V^off(all items) = max_x [ r_t x + V^off(rest, b - a_t x) ]."""
    b = _check(sample, b)
    full = hindsight_value(sample, b)
    a_t = sample.A[t_index]
    r_t = sample.R[t_index]
    rest = RequestSample(
        A=np.delete(sample.A, t_index, axis=0),
        R=np.delete(sample.R, t_index),
    )
    def objective(xv: float) -> float:
        b_next = b - xv * a_t
        if np.any(b_next < -1e-12):
            return -np.inf
        return r_t * xv + hindsight_value(rest, np.clip(b_next, 0.0, None))

    # coarse 101-point scan, then zoom around the argmax; the objective is
    # concave in x so repeated refinement converges to the true maximum
    lo, hi = 0.0, 1.0
    best = -np.inf
    for _ in range(5):
        grid = np.linspace(lo, hi, 101)
        vals = [objective(xv) for xv in grid]
        k = int(np.argmax(vals))
        best = max(best, vals[k])
        step = grid[1] - grid[0]
        lo = max(0.0, grid[k] - step)
        hi = min(1.0, grid[k] + step)
    return abs(full - best) <= 1e-6 * (1.0 + abs(full))
