"""Fluid (deterministic relaxation) dual: objective, solver, and local
geometry probes.

The fluid dual at normalized capacity d is

    f_d(lam) = d . lam + E[(r - a . lam)^+],    lam >= 0,

a convex piecewise-smooth function whose minimizers all lie in the box
Omega = [0, r_max / a_min]^m.  For a scalar resource the smallest minimizer
is available in closed form through the distribution's quantile; for m >= 2
we run projected subgradient descent with iterate averaging over Omega.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import RequestDistribution
from .errors import DegenerateFit, DimensionMismatch, SolverBudgetExceeded


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_iters: int = 200_000
    check_every: int = 500
    grid_resolution: int = 2000
    step_rule: str = "diminishing"


@dataclass(frozen=True)
class DualSolution:
    lam: np.ndarray
    value: float
    iterations: int
    converged: bool
    subgrad_norm: float = 0.0
    flat_directions: tuple = ()  # unit directions along which the optimum is flat
    notes: dict = field(default_factory=dict)


def omega_box(dist: RequestDistribution) -> float:
    """Upper edge of the box that contains every dual minimizer."""
    return dist.bounds.r_max / dist.bounds.a_min


def fluid_objective(dist: RequestDistribution, d, lam) -> float:
    d = np.atleast_1d(np.asarray(d, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if d.shape != (dist.m,) or lam.shape != (dist.m,):
        raise DimensionMismatch(
            f"d and lambda must have shape ({dist.m},), got {d.shape} and {lam.shape}"
        )
    return float(d @ lam) + dist.hinge(lam)


def fluid_subgradient(dist: RequestDistribution, d, lam) -> np.ndarray:
    d = np.atleast_1d(np.asarray(d, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if d.shape != (dist.m,) or lam.shape != (dist.m,):
        raise DimensionMismatch(
            f"d and lambda must have shape ({dist.m},), got {d.shape} and {lam.shape}"
        )
    return d - np.asarray(dist.consumption(lam), dtype=float)


def default_tol(dist: RequestDistribution) -> float:
    """1e-8 for kinds with fully analytic expectations, 1e-6 for quadrature."""
    return 1e-6 if dist.kind in ("HyperCube", "GeneralizedLinear") else 1e-8


def solve_fluid_dual(
    dist: RequestDistribution, d, config: SolverConfig | None = None
) -> DualSolution:
    """Minimize f_d over lam >= 0; returns the smallest minimizer for m = 1."""
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if d.shape != (dist.m,):
        raise DimensionMismatch(f"d must have shape ({dist.m},), got {d.shape}")
    if config is None:
        config = SolverConfig(tol=default_tol(dist))

    if dist.m == 1:
        lam = np.array([dist.dual_price(float(d[0]))])
        sol = DualSolution(
            lam=lam,
            value=fluid_objective(dist, d, lam),
            iterations=0,
            converged=True,
        )
    else:
        sol = _projected_subgradient(dist, d, config)

    flat = flat_direction_probe(dist, d, sol.lam, sol.value, config.tol)
    return DualSolution(
        lam=sol.lam,
        value=sol.value,
        iterations=sol.iterations,
        converged=sol.converged,
        subgrad_norm=float(np.linalg.norm(fluid_subgradient(dist, d, sol.lam))),
        flat_directions=flat,
        notes=sol.notes,
    )


def _projected_subgradient(dist, d, config: SolverConfig) -> DualSolution:
    m = dist.m
    upper = omega_box(dist)
    radius = upper * np.sqrt(m)  # diameter bound of Omega from the origin
    lip = float(np.linalg.norm(d)) + np.sqrt(m) * dist.bounds.a_max
    lam = np.full(m, upper / 2.0)
    avg = lam.copy()
    best_val = fluid_objective(dist, d, lam)
    best_lam = lam.copy()
    last_best = np.inf
    for k in range(1, config.max_iters + 1):
        g = fluid_subgradient(dist, d, lam)
        step = (radius / lip) / np.sqrt(k)
        lam = np.clip(lam - step * g, 0.0, upper)
        avg += (lam - avg) / (k + 1)
        if k % config.check_every == 0:
            for cand in (avg, lam):
                v = fluid_objective(dist, d, cand)
                if v < best_val:
                    best_val, best_lam = v, cand.copy()
            if last_best - best_val < config.tol * 0.1:
                return DualSolution(best_lam, best_val, k, True)
            last_best = best_val
    raise SolverBudgetExceeded(
        f"fluid dual did not converge within {config.max_iters} iterations"
    )


def fluid_value(dist: RequestDistribution, d) -> float:
    """Per-period fluid value min_lam f_d(lam); T times this upper-bounds
    the expected reward of any admissible policy at inventory d*T."""
    return solve_fluid_dual(dist, d).value


_PROBE_DIRECTIONS = 32


def _probe_dirs(m: int) -> np.ndarray:
    if m == 1:
        return np.array([[1.0], [-1.0]])
    rng = np.random.Generator(np.random.Philox(key=0xF1A7))
    v = rng.standard_normal((_PROBE_DIRECTIONS, m))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def flat_direction_probe(dist, d, lam, value, tol) -> tuple:
    """Unit directions along which a macroscopically distinct point attains
    the optimal value (empty tuple when the optimum looks unique).

    Scans probe distances from 2% to 50% of the box edge in each direction;
    a point whose objective matches the optimum to within 1e-13 relative
    signals a flat stretch (non-unique optimal set).  The distance floor
    keeps high-order but strictly convex growth (quadratic, quartic, ...)
    from being mistaken for flatness; the verdict is resolution-limited and
    one-sided by design.
    """
    d = np.atleast_1d(np.asarray(d, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    upper = omega_box(dist)
    thr = 1e-13 * (1.0 + abs(value))
    scales = np.geomspace(0.02 * upper, 0.5 * upper, 10)
    found = []
    for u in _probe_dirs(dist.m):
        for s in scales:
            cand = lam + s * u
            if np.any(cand < 0.0) or np.any(cand > upper):
                break
            if abs(fluid_objective(dist, d, cand) - value) <= thr:
                found.append(u.copy())
                break
    return tuple(found)


def estimate_growth_exponent(
    dist: RequestDistribution,
    d,
    lam_star=None,
    eps_grid=None,
    flat_tol: float = 1e-13,
) -> float:
    """Estimate the local growth order of the dual objective at its optimum.

    Fits p in f_d(lam* + eps u) - f* ~ eps^p over probe directions u and
    returns gamma = p - 2, so a locally quadratic objective reports 0 and a
    window-mass exponent beta shows up as gamma = beta.

    If the optimum sits on a flat segment, gaps are measured from the nearest
    edge of the segment along each probe direction; an optimum that is flat on
    both sides of some line (interior of a flat set) raises DegenerateFit.
    """
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if lam_star is None:
        lam_star = solve_fluid_dual(dist, d).lam
    lam_star = np.atleast_1d(np.asarray(lam_star, dtype=float))
    f_star = fluid_objective(dist, d, lam_star)
    grad = fluid_subgradient(dist, d, lam_star)
    if eps_grid is None:
        eps_grid = 2.0 ** -np.arange(4, 13, dtype=float)
    upper = omega_box(dist)

    def gap(point):
        return (
            fluid_objective(dist, d, point)
            - f_star
            - float(grad @ (point - lam_star))
        )

    def boundary_distance(u):
        s_max = np.inf
        for i in range(dist.m):
            if u[i] > 1e-15:
                s_max = min(s_max, (upper - lam_star[i]) / u[i])
            elif u[i] < -1e-15:
                s_max = min(s_max, -lam_star[i] / u[i])
        return s_max

    dirs = _probe_dirs(dist.m)
    slopes = []
    flat = np.zeros(len(dirs), dtype=bool)
    base_for = {}
    for idx, u in enumerate(dirs):
        s_max = boundary_distance(u)
        probe = float(eps_grid.max())
        if s_max <= probe:
            continue  # pinned against the box; no room to probe
        if gap(lam_star + probe * u) <= flat_tol:
            flat[idx] = True
            # measure from the far edge of the flat stretch, if there is one
            hi = s_max
            if gap(lam_star + hi * u) <= flat_tol:
                continue  # flat all the way to the boundary
            lo = probe
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if gap(lam_star + mid * u) > flat_tol:
                    hi = mid
                else:
                    lo = mid
            base_for[idx] = lam_star + lo * u
        else:
            base_for[idx] = lam_star

    # locally flat in two opposite directions: lam_star sits in the interior
    # of a flat set and no growth exponent is defined there
    for i in range(len(dirs)):
        if not flat[i]:
            continue
        for j in range(len(dirs)):
            if flat[j] and j != i and np.allclose(dirs[j], -dirs[i], atol=1e-9):
                raise DegenerateFit(
                    "optimum lies in the interior of a flat segment of the "
                    "dual objective; no growth exponent exists"
                )

    for idx, u in enumerate(dirs):
        base = base_for.get(idx)
        if base is None:
            continue
        xs, ys = [], []
        for eps in eps_grid:
            cand = base + float(eps) * u
            if np.any(cand < -1e-12) or np.any(cand > upper + 1e-12):
                continue
            g = gap(cand)
            if g > flat_tol:
                xs.append(np.log(float(eps)))
                ys.append(np.log(g))
        if len(xs) >= 4:
            slopes.append(float(np.polyfit(xs, ys, 1)[0]))

    if not slopes:
        raise DegenerateFit("all probed gaps below 1e-13; flat region")
    return float(min(slopes) - 2.0)
