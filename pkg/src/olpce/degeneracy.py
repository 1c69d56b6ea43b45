"""Degeneracy diagnostics for the discrete fluid LP (DLP) and its dual.

For a finite-support distribution with atoms (a^j, r^j, p_j) the DLP is

    max sum_j p_j r_j x_j   s.t.  sum_j p_j a^j x_j <= d,  0 <= x <= 1,

whose dual prices coincide with the fluid dual minimizers.  Three
diagnostics are computed: the non-degeneracy count identity
|{j : x_j in {0,1}}| + |{i : binding}| = n, strict complementary
slackness, and dual uniqueness (flat-direction probe).  They are
equivalent for discrete families with a unique primal optimum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .distributions import Discrete, RequestDistribution
from .errors import ConfigError, DimensionMismatch, SolverBudgetExceeded
from .fluid import (
    SolverConfig,
    default_tol,
    flat_direction_probe,
    fluid_objective,
    solve_fluid_dual,
)
from .hindsight import RequestSample, recover_primal

_TOL = 1e-7


@dataclass(frozen=True)
class DlpSolution:
    x: np.ndarray
    lam: np.ndarray
    eta: np.ndarray
    primal_value: float
    dual_value: float


@dataclass(frozen=True)
class DegeneracyVerdict:
    dlp_nondegenerate: bool
    strict_cs: bool
    dual_unique: bool
    nondeg_count: int
    details: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "dlp_nondegenerate": self.dlp_nondegenerate,
                "strict_cs": self.strict_cs,
                "dual_unique": self.dual_unique,
                "nondeg_count": self.nondeg_count,
                "details": self.details,
            }
        )


def solve_dlp(dist: Discrete, d) -> DlpSolution:
    """Solve the discrete fluid LP; the dual reuses the fluid-dual machinery
    (the DLP dual is exactly the fluid dual for a finite-support family)."""
    if not isinstance(dist, Discrete):
        raise ConfigError("solve_dlp requires a Discrete distribution")
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if d.shape != (dist.m,):
        raise DimensionMismatch(f"d has shape {d.shape}, expected ({dist.m},)")
    # the DLP is a weighted-item knapsack: item j consumes p_j a^j, pays p_j r_j
    weighted = RequestSample(A=dist.p[:, None] * dist.A, R=dist.p * dist.R)
    if dist.m == 1:
        # exact breakpoint scan gives the smallest optimal dual price, and
        # complementary slackness recovers a vertex primal
        lam = solve_fluid_dual(dist, d).lam
        alloc = recover_primal(weighted, d, lam, r_max=float(dist.R.max()))
        x = alloc.x
        primal_value = alloc.value
    else:
        res = linprog(
            c=-weighted.R,
            A_ub=weighted.A.T,
            b_ub=d,
            bounds=[(0.0, 1.0)] * dist.n_atoms,
            method="highs",
        )
        if not res.success:
            raise SolverBudgetExceeded(f"DLP solve failed: {res.message}")
        x = np.clip(res.x, 0.0, 1.0)
        lam = np.clip(-np.asarray(res.ineqlin.marginals, dtype=float), 0.0, None)
        primal_value = float(weighted.R @ x)
    eta = dist.p * np.clip(dist.R - dist.A @ lam, 0.0, None)
    dual_value = float(d @ lam + eta.sum())
    return DlpSolution(
        x=x,
        lam=lam,
        eta=eta,
        primal_value=primal_value,
        dual_value=dual_value,
    )


def dlp_nondegeneracy_check(sol: DlpSolution, dist: Discrete, d):
    """Count |{j: x_j in {0,1}}| + |{i: binding}| and compare with n."""
    d = np.atleast_1d(np.asarray(d, dtype=float))
    at_bound = int(np.count_nonzero((sol.x <= _TOL) | (sol.x >= 1.0 - _TOL)))
    load = (dist.p[:, None] * dist.A).T @ sol.x
    binding = int(np.count_nonzero(np.abs(load - d) <= _TOL))
    count = at_bound + binding
    return count == dist.n_atoms, count


def strict_cs_check(dist: RequestDistribution, d, lam_star) -> bool:
    """Strict complementary slackness at an optimal dual point.

    Continuous families: per resource, lam_i = 0 iff the consumption slack
    d_i - E[a_i 1{r > a.lam}] is strictly positive.  Discrete families check
    the full LP condition with the recovered primal: no constraint may have
    both its slack and its multiplier at zero.
    """
    d = np.atleast_1d(np.asarray(d, dtype=float))
    lam = np.atleast_1d(np.asarray(lam_star, dtype=float))
    if isinstance(dist, Discrete):
        return _strict_cs_discrete(dist, d, lam)
    slack = d - np.asarray(dist.consumption(lam), dtype=float)
    for i in range(dist.m):
        if (lam[i] <= _TOL) != (slack[i] > _TOL):
            return False
    return True


def _strict_cs_discrete(dist: Discrete, d, lam) -> bool:
    sol = solve_dlp(dist, d)
    x = sol.x
    eta = dist.p * np.clip(dist.R - dist.A @ lam, 0.0, None)
    reduced = dist.p * (dist.A @ lam) + eta - dist.p * dist.R  # dual slack of x_j
    load = (dist.p[:, None] * dist.A).T @ x
    slack = d - load
    for i in range(dist.m):
        if lam[i] <= _TOL and slack[i] <= _TOL:
            return False
    for j in range(dist.n_atoms):
        if x[j] <= _TOL and reduced[j] <= _TOL:
            return False
        if x[j] >= 1.0 - _TOL and eta[j] <= _TOL:
            return False
    return True


def dual_uniqueness_check(dist: RequestDistribution, d,
                          cfg: SolverConfig | None = None) -> bool:
    """False if a distinct dual point attains the optimum at the probe
    resolution; a True verdict is one-sided (no alternate optimum found)."""
    if cfg is None:
        cfg = SolverConfig(tol=default_tol(dist))
    d = np.atleast_1d(np.asarray(d, dtype=float))
    lam = _canonical_dual(dist, d, cfg)
    value = fluid_objective(dist, d, lam)
    return not flat_direction_probe(dist, d, lam, value, cfg.tol)


def _canonical_dual(dist: RequestDistribution, d, cfg: SolverConfig | None = None):
    """Exact dual point for diagnostics: breakpoint scan for m = 1, LP dual
    for multi-resource discrete families, subgradient descent otherwise."""
    if isinstance(dist, Discrete) and dist.m >= 2:
        return solve_dlp(dist, d).lam
    return solve_fluid_dual(dist, d, cfg).lam


def degeneracy_verdict(dist: RequestDistribution, d,
                       cfg: SolverConfig | None = None) -> DegeneracyVerdict:
    d = np.atleast_1d(np.asarray(d, dtype=float))
    lam = _canonical_dual(dist, d, cfg)
    cs = strict_cs_check(dist, d, lam)
    unique = dual_uniqueness_check(dist, d, cfg)
    if isinstance(dist, Discrete):
        sol = solve_dlp(dist, d)
        nondeg, count = dlp_nondegeneracy_check(sol, dist, d)
        details = f"lam={lam.tolist()}, count={count}, n={dist.n_atoms}"
    else:
        nondeg, count = cs and unique, -1
        details = f"lam={lam.tolist()}; count identity undefined for continuous support"
    return DegeneracyVerdict(
        dlp_nondegenerate=bool(nondeg),
        strict_cs=bool(cs),
        dual_unique=bool(unique),
        nondeg_count=int(count),
        details=details,
    )


def make_degenerate_inventory(dist: RequestDistribution, lam_zero) -> np.ndarray:
    """d = E[a 1{r > a.lam}] for a price vector with a zero coordinate.

    At this inventory the zero-priced resource is exactly binding, so strict
    complementary slackness fails at lam_zero by construction.
    """
    lam = np.atleast_1d(np.asarray(lam_zero, dtype=float))
    if lam.shape != (dist.m,):
        raise DimensionMismatch(f"lam has shape {lam.shape}, expected ({dist.m},)")
    if np.any(lam < 0.0) or not np.any(lam <= _TOL):
        raise ConfigError("lam must be nonnegative with at least one zero coordinate")
    return np.asarray(dist.consumption(lam), dtype=float)
