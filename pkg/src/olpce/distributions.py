"""Request-distribution families for the online LP simulator.

Each distribution describes an i.i.d. stream of requests (a, r): a consumption
vector a in [a_min, a_max]^m and a reward r.  A family exposes sampling, the
conditional reward CDF, and the two analytic expectations the fluid dual is
built from:

* ``hinge(lam)``        = E[(r - a.lam)^+]
* ``consumption(lam)``  = E[a * 1{r > a.lam}]

Families with a scalar resource additionally expose ``dual_price(d)``, the
smallest minimizer of the scalar fluid dual at normalized capacity d, which is
the quantity the re-solving policy needs at every step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionMismatch, UnsupportedConsumption

log = logging.getLogger(__name__)

_GL_NODES = 64  # Gauss-Legendre nodes per dimension for quadrature kinds
_MC_FALLBACK_SEED = 0x5EEDED
_MC_FALLBACK_SAMPLES = 200_000


@dataclass(frozen=True)
class Bounds:
    a_min: float
    a_max: float
    r_max: float


@dataclass(frozen=True)
class HolderParams:
    """Declared two-sided Holder envelope of the conditional reward CDF."""

    beta: float
    nu: float
    c_beta: float
    c_nu: float


class RequestDistribution:
    """Base class; immutable after construction, shareable across threads."""

    kind: str
    m: int
    bounds: Bounds
    holder: HolderParams | None = None

    # -- sampling ---------------------------------------------------------

    def sample_batch(self, n: int, rng: np.random.Generator):
        """Draw n i.i.d. requests; returns (A, R) with A of shape (n, m)."""
        raise NotImplementedError

    def sample_request(self, rng: np.random.Generator):
        a, r = self.sample_batch(1, rng)
        return a[0], float(r[0])

    # -- analytic pieces --------------------------------------------------

    def reward_cdf(self, a, z: float) -> float:
        """Conditional CDF F^r_a(z) of the reward given consumption a."""
        raise NotImplementedError

    def reward_support(self, a):
        """Closed support interval of r given a (for kinds without gaps)."""
        raise NotImplementedError

    def hinge(self, lam) -> float:
        raise NotImplementedError

    def consumption(self, lam):
        raise NotImplementedError

    # -- scalar dual price ------------------------------------------------

    def dual_price(self, d: float) -> float:
        """Smallest minimizer of d*lam + hinge(lam) over lam >= 0 (m = 1).

        The derivative is d - consumption(lam) with consumption nonincreasing,
        so the smallest optimum is the leftmost point where consumption drops
        to d or below.  Kind-specific closed forms override this bisection.
        """
        if self.m != 1:
            raise DimensionMismatch("dual_price is defined for m = 1 only")
        if self._consumption_scalar(0.0) <= d:
            return 0.0
        lo, hi = 0.0, self.bounds.r_max / self.bounds.a_min
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if self._consumption_scalar(mid) <= d:
                hi = mid
            else:
                lo = mid
        return hi

    def _consumption_scalar(self, lam: float) -> float:
        return float(np.asarray(self.consumption(np.array([lam])))[0])

    # -- helpers ----------------------------------------------------------

    def _check_lam(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if lam.shape != (self.m,):
            raise DimensionMismatch(
                f"lambda has shape {lam.shape}, expected ({self.m},)"
            )
        return lam


# ---------------------------------------------------------------------------
# Multisecretary with |1 - 2x|^beta reward density


class MultisecretaryBeta(RequestDistribution):
    """a = 1; reward density (1 + beta) |1 - 2x|^beta on [0, 1]."""

    kind = "MultisecretaryBeta"

    def __init__(self, beta: float = 0.0):
        if beta < 0:
            raise ConfigError("beta must be >= 0")
        self.beta = float(beta)
        self.m = 1
        self.bounds = Bounds(1.0, 1.0, 1.0)
        # Sliding-window mass is minimized at the density trough x = 1/2,
        # giving c_beta = 1; the density is capped by 1 + beta, giving nu = 1.
        self.holder = HolderParams(beta=self.beta, nu=1.0, c_beta=1.0, c_nu=1.0 + self.beta)

    def sample_batch(self, n, rng):
        u = rng.random(n)
        return np.ones((n, 1)), self._quantile(u)

    def _quantile(self, u):
        u = np.asarray(u, dtype=float)
        p = 1.0 / (1.0 + self.beta)
        lower = 0.5 * (1.0 - np.clip(1.0 - 2.0 * u, 0.0, 1.0) ** p)
        upper = 0.5 * (1.0 + np.clip(2.0 * u - 1.0, 0.0, 1.0) ** p)
        return np.where(u < 0.5, lower, upper)

    def _cdf(self, z):
        z = np.asarray(z, dtype=float)
        zc = np.clip(z, 0.0, 1.0)
        e = 1.0 + self.beta
        low = 0.5 * (1.0 - (1.0 - 2.0 * np.minimum(zc, 0.5)) ** e)
        high = 0.5 * (1.0 + (2.0 * np.maximum(zc, 0.5) - 1.0) ** e)
        return np.where(zc < 0.5, low, high)

    def reward_cdf(self, a, z):
        return float(self._cdf(z))

    def reward_support(self, a):
        return 0.0, 1.0

    def _cdf_integral(self, z: float) -> float:
        """G(z) = integral_0^z F(x) dx on [0, 1]."""
        e = 1.0 + self.beta
        c = 2.0 * (2.0 + self.beta)
        if z <= 0.5:
            return z / 2.0 - (1.0 - (1.0 - 2.0 * z) ** (e + 1.0)) / (2.0 * c)
        g_half = 0.25 - 1.0 / (2.0 * c)
        return g_half + (z - 0.5) / 2.0 + (2.0 * z - 1.0) ** (e + 1.0) / (2.0 * c)

    def hinge(self, lam):
        lam = self._check_lam(lam)
        z = float(lam[0])
        if z >= 1.0:
            return 0.0
        z = max(z, 0.0)
        # E[(r - z)^+] = int_z^1 (1 - F) = 1/2 - z + G(z)
        return 0.5 - z + self._cdf_integral(z)

    def consumption(self, lam):
        lam = self._check_lam(lam)
        return np.array([1.0 - float(self._cdf(lam[0]))])

    def dual_price(self, d):
        if d >= 1.0:
            return 0.0
        if d <= 0.0:
            return 1.0
        return float(self._quantile(np.array([1.0 - d]))[0])


# ---------------------------------------------------------------------------
# Multisecretary with a gap in the reward support


class GapMultisecretary(RequestDistribution):
    """a = 1; reward uniform on [0, 1] union [2, 3], density 1/2 on each."""

    kind = "GapMultisecretary"

    def __init__(self):
        self.m = 1
        self.bounds = Bounds(1.0, 1.0, 3.0)

    def sample_batch(self, n, rng):
        u = rng.random(n)
        r = np.where(u < 0.5, 2.0 * u, 2.0 + (2.0 * u - 1.0))
        return np.ones((n, 1)), r

    def _cdf(self, z: float) -> float:
        if z <= 0.0:
            return 0.0
        if z <= 1.0:
            return z / 2.0
        if z <= 2.0:
            return 0.5
        if z <= 3.0:
            return 0.5 + (z - 2.0) / 2.0
        return 1.0

    def reward_cdf(self, a, z):
        return self._cdf(z)

    def hinge(self, lam):
        lam = self._check_lam(lam)
        z = float(lam[0])
        if z <= 0.0:
            return 1.5 - z  # below the support: E r - z
        if z <= 1.0:
            return 1.5 - z + z * z / 4.0
        if z <= 2.0:
            return (2.0 - z) / 2.0 + 0.25
        if z <= 3.0:
            return (3.0 - z) ** 2 / 4.0
        return 0.0

    def consumption(self, lam):
        lam = self._check_lam(lam)
        return np.array([1.0 - self._cdf(float(lam[0]))])

    def dual_price(self, d):
        if d >= 1.0:
            return 0.0
        if d >= 0.5:
            return 2.0 * (1.0 - d)
        if d > 0.0:
            return 3.0 - 2.0 * d
        return 3.0


# ---------------------------------------------------------------------------
# Two consumption levels, rewards bounded away from zero


class TwoPointConsumption(RequestDistribution):
    """a in {1, 4} with equal probability; r | a uniform on [1, 2]."""

    kind = "TwoPointConsumption"

    def __init__(self):
        self.m = 1
        self.bounds = Bounds(1.0, 4.0, 2.0)

    def sample_batch(self, n, rng):
        u = rng.random((n, 2))
        a = np.where(u[:, 0] < 0.5, 1.0, 4.0)
        r = 1.0 + u[:, 1]
        return a.reshape(-1, 1), r

    def reward_cdf(self, a, z):
        a0 = float(np.atleast_1d(a)[0])
        if a0 not in (1.0, 4.0):
            raise UnsupportedConsumption(f"a = {a0} not in {{1, 4}}")
        return float(np.clip(z - 1.0, 0.0, 1.0))

    def reward_support(self, a):
        return 1.0, 2.0

    @staticmethod
    def _uniform12_hinge(z: float) -> float:
        """E[(U[1,2] - z)^+]."""
        if z <= 1.0:
            return 1.5 - z
        if z <= 2.0:
            return (2.0 - z) ** 2 / 2.0
        return 0.0

    def hinge(self, lam):
        lam = self._check_lam(lam)
        z = float(lam[0])
        return 0.5 * self._uniform12_hinge(z) + 0.5 * self._uniform12_hinge(4.0 * z)

    def consumption(self, lam):
        lam = self._check_lam(lam)
        z = float(lam[0])
        p1 = np.clip(2.0 - z, 0.0, 1.0)
        p4 = np.clip(2.0 - 4.0 * z, 0.0, 1.0)
        return np.array([0.5 * p1 + 2.0 * p4])


# ---------------------------------------------------------------------------
# Joint uniform on the shifted unit square


class UnitSquareShifted(RequestDistribution):
    """(a, r) uniform on [1, 2]^2; the reward support does not start at zero."""

    kind = "UnitSquareShifted"

    def __init__(self):
        self.m = 1
        self.bounds = Bounds(1.0, 2.0, 2.0)

    def sample_batch(self, n, rng):
        u = rng.random((n, 2))
        return (1.0 + u[:, 0]).reshape(-1, 1), 1.0 + u[:, 1]

    def reward_cdf(self, a, z):
        a0 = float(np.atleast_1d(a)[0])
        if not (1.0 <= a0 <= 2.0):
            raise UnsupportedConsumption(f"a = {a0} outside [1, 2]")
        return float(np.clip(z - 1.0, 0.0, 1.0))

    def reward_support(self, a):
        return 1.0, 2.0

    def hinge(self, lam):
        lam = self._check_lam(lam)
        z = float(lam[0])
        if z <= 0.0:
            return 1.5 - 1.5 * z
        # Integrate w(a z) over a in [1, 2], where w is the U[1,2] hinge.
        c1 = np.clip(1.0 / z, 1.0, 2.0)  # a z = 1
        c2 = np.clip(2.0 / z, 1.0, 2.0)  # a z = 2
        total = 1.5 * (c1 - 1.0) - z * (c1 * c1 - 1.0) / 2.0
        if c2 > c1:
            total += ((2.0 - c1 * z) ** 3 - (2.0 - c2 * z) ** 3) / (6.0 * z)
        return float(total)

    def consumption(self, lam):
        lam = self._check_lam(lam)
        z = float(lam[0])
        if z <= 0.0:
            return np.array([1.5])
        c1 = np.clip(1.0 / z, 1.0, 2.0)
        c2 = np.clip(2.0 / z, 1.0, 2.0)
        total = (c1 * c1 - 1.0) / 2.0
        if c2 > c1:
            total += (c2 * c2 - c1 * c1) - z * (c2 ** 3 - c1 ** 3) / 3.0
        return np.array([float(total)])


# ---------------------------------------------------------------------------
# Hyper-cube model


class HyperCube(RequestDistribution):
    """(a, r) uniform on [1, 2]^m x [0, 1], independent coordinates."""

    kind = "HyperCube"

    def __init__(self, m: int):
        if m < 1:
            raise ConfigError("m must be >= 1")
        self.m = int(m)
        self.bounds = Bounds(1.0, 2.0, 1.0)
        self.holder = HolderParams(beta=0.0, nu=1.0, c_beta=1.0, c_nu=1.0)
        self._quad = _box_quadrature(self.m, 1.0, 2.0)

    def sample_batch(self, n, rng):
        a = 1.0 + rng.random((n, self.m))
        r = rng.random(n)
        return a, r

    def reward_cdf(self, a, z):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        if np.any(a < 1.0) or np.any(a > 2.0):
            raise UnsupportedConsumption("a outside [1, 2]^m")
        return float(np.clip(z, 0.0, 1.0))

    def reward_support(self, a):
        return 0.0, 1.0

    def hinge(self, lam):
        lam = self._check_lam(lam)
        nodes, weights = self._quad
        z = nodes @ lam
        # inner expectation over r ~ U[0,1]: E[(r - z)^+] = ((1-z)^+)^2 / 2
        vals = 0.5 * np.clip(1.0 - z, 0.0, None) ** 2
        return float(weights @ vals)

    def consumption(self, lam):
        lam = self._check_lam(lam)
        nodes, weights = self._quad
        z = nodes @ lam
        surv = np.clip(1.0 - z, 0.0, 1.0)  # P(r > a.lam)
        return (weights * surv) @ nodes


# ---------------------------------------------------------------------------
# Generalized linear rewards


class GeneralizedLinear(RequestDistribution):
    """r = g(a.w) + eps with eps ~ U[-L, L]; a uniform on a box.

    g is a piecewise-linear table.  Sampled rewards may be negative; they are
    passed through unmodified (thresholds lam >= 0 never accept them) and the
    occurrence is logged.
    """

    kind = "GeneralizedLinear"

    def __init__(self, m, weights, link_x, link_y, noise_half_width, a_low=1.0, a_high=2.0):
        self.m = int(m)
        self.w = np.asarray(weights, dtype=float)
        if self.w.shape != (self.m,) or np.any(self.w < 0):
            raise ConfigError("weights must be a nonnegative vector of length m")
        self.link_x = np.asarray(link_x, dtype=float)
        self.link_y = np.asarray(link_y, dtype=float)
        if self.link_x.ndim != 1 or self.link_x.shape != self.link_y.shape:
            raise ConfigError("link table must be two equal-length vectors")
        if np.any(self.link_y < 0):
            raise ConfigError("link values must be nonnegative")
        self.L = float(noise_half_width)
        if self.L <= 0:
            raise ConfigError("noise_half_width must be > 0")
        self.a_low = float(a_low)
        self.a_high = float(a_high)
        r_max = float(self.link_y.max()) + self.L
        self.bounds = Bounds(self.a_low, self.a_high, r_max)
        self.holder = HolderParams(
            beta=0.0, nu=1.0, c_beta=1.0 / (2.0 * self.L), c_nu=1.0 / (2.0 * self.L)
        )
        self._quad = _box_quadrature(self.m, self.a_low, self.a_high)

    def _link(self, s):
        return np.interp(s, self.link_x, self.link_y)

    def sample_batch(self, n, rng):
        a = self.a_low + (self.a_high - self.a_low) * rng.random((n, self.m))
        eps = self.L * (2.0 * rng.random(n) - 1.0)
        r = self._link(a @ self.w) + eps
        neg = int(np.count_nonzero(r < 0))
        if neg:
            log.debug("generalized-linear batch contains %d negative rewards", neg)
        return a, r

    def reward_cdf(self, a, z):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        if np.any(a < self.a_low) or np.any(a > self.a_high):
            raise UnsupportedConsumption("a outside the declared box")
        g = float(self._link(a @ self.w))
        return float(np.clip((z - g + self.L) / (2.0 * self.L), 0.0, 1.0))

    def reward_support(self, a):
        g = float(self._link(np.atleast_1d(np.asarray(a, dtype=float)) @ self.w))
        return g - self.L, g + self.L

    def _noise_hinge(self, c):
        """E[(c + eps)^+] for eps ~ U[-L, L]."""
        c = np.asarray(c, dtype=float)
        mid = (c + self.L) ** 2 / (4.0 * self.L)
        return np.where(c >= self.L, c, np.where(c <= -self.L, 0.0, mid))

    def hinge(self, lam):
        lam = self._check_lam(lam)
        nodes, weights = self._quad
        c = self._link(nodes @ self.w) - nodes @ lam
        return float(weights @ self._noise_hinge(c))

    def consumption(self, lam):
        lam = self._check_lam(lam)
        nodes, weights = self._quad
        c = self._link(nodes @ self.w) - nodes @ lam
        surv = 1.0 - np.clip((-c + self.L) / (2.0 * self.L), 0.0, 1.0)
        return (weights * surv) @ nodes


# ---------------------------------------------------------------------------
# Finite-support distributions (DLP setting)


class Discrete(RequestDistribution):
    """Finite atom list ((a^j, r^j), p_j)."""

    kind = "Discrete"

    def __init__(self, atoms_a, atoms_r, probs):
        self.A = np.atleast_2d(np.asarray(atoms_a, dtype=float))
        self.R = np.asarray(atoms_r, dtype=float)
        self.p = np.asarray(probs, dtype=float)
        n = self.A.shape[0]
        if self.R.shape != (n,) or self.p.shape != (n,):
            raise ConfigError("atom arrays must have matching lengths")
        if np.any(self.p <= 0) or abs(self.p.sum() - 1.0) > 1e-12:
            raise ConfigError("probabilities must be positive and sum to 1")
        self.m = self.A.shape[1]
        self.n_atoms = n
        self.bounds = Bounds(float(self.A.min()), float(self.A.max()), float(self.R.max()))
        self._cum = np.cumsum(self.p)

    def sample_batch(self, n, rng):
        idx = np.searchsorted(self._cum, rng.random(n), side="right")
        idx = np.minimum(idx, self.n_atoms - 1)
        return self.A[idx], self.R[idx]

    def reward_cdf(self, a, z):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        match = np.all(np.abs(self.A - a) < 1e-12, axis=1)
        if not match.any():
            raise UnsupportedConsumption(f"a = {a} is not an atom")
        p = self.p[match]
        return float(p[self.R[match] <= z].sum() / p.sum())

    def hinge(self, lam):
        lam = self._check_lam(lam)
        return float(self.p @ np.clip(self.R - self.A @ lam, 0.0, None))

    def consumption(self, lam):
        lam = self._check_lam(lam)
        active = self.R > self.A @ lam
        return (self.p * active) @ self.A

    def dual_price(self, d):
        if self.m != 1:
            return super().dual_price(d)
        # exact breakpoint scan: consumption drops by p_j a_j at r_j / a_j
        a = self.A[:, 0]
        w = self.p * a
        ratios = self.R / a
        if d - w[ratios > 0.0].sum() >= 0.0:
            return 0.0
        order = np.argsort(ratios, kind="stable")
        sorted_ratios = ratios[order]
        suffix = np.cumsum(w[order][::-1])[::-1]
        for k in range(len(order)):
            v = sorted_ratios[k]
            if v < 0.0:
                continue
            if k + 1 < len(order) and sorted_ratios[k + 1] == v:
                continue
            above = suffix[k + 1] if k + 1 < len(order) else 0.0
            if d - above >= 0.0:
                return float(v)
        return float(max(sorted_ratios[-1], 0.0))


# ---------------------------------------------------------------------------


def _box_quadrature(m: int, lo: float, hi: float):
    """Tensorized Gauss-Legendre nodes/weights normalized to a probability
    measure on [lo, hi]^m; Monte Carlo with a fixed seed beyond m = 3."""
    if m <= 3:
        x, w = np.polynomial.legendre.leggauss(_GL_NODES)
        x = lo + (hi - lo) * (x + 1.0) / 2.0
        w = w / 2.0
        grids = np.meshgrid(*([x] * m), indexing="ij")
        nodes = np.stack([g.ravel() for g in grids], axis=1)
        weights = np.ones(nodes.shape[0])
        for axis in np.meshgrid(*([np.arange(_GL_NODES)] * m), indexing="ij"):
            weights *= w[axis.ravel()]
        return nodes, weights
    rng = np.random.Generator(np.random.Philox(key=_MC_FALLBACK_SEED))
    nodes = lo + (hi - lo) * rng.random((_MC_FALLBACK_SAMPLES, m))
    weights = np.full(_MC_FALLBACK_SAMPLES, 1.0 / _MC_FALLBACK_SAMPLES)
    return nodes, weights


def a_marginal(dist: RequestDistribution):
    """Nodes/weights representing the marginal law of a (exact for discrete
    consumption, quadrature for continuous boxes); used to take E_a[...] of
    quantities that depend on a through closed-form conditionals."""
    if dist.kind in ("MultisecretaryBeta", "GapMultisecretary"):
        return np.array([[1.0]]), np.array([1.0])
    if dist.kind == "TwoPointConsumption":
        return np.array([[1.0], [4.0]]), np.array([0.5, 0.5])
    if dist.kind == "UnitSquareShifted":
        return _box_quadrature(1, 1.0, 2.0)
    if dist.kind == "Discrete":
        return dist.A, dist.p
    return dist._quad


_KINDS = {
    "MultisecretaryBeta": MultisecretaryBeta,
    "HyperCube": HyperCube,
    "GeneralizedLinear": GeneralizedLinear,
    "GapMultisecretary": GapMultisecretary,
    "TwoPointConsumption": TwoPointConsumption,
    "UnitSquareShifted": UnitSquareShifted,
    "Discrete": Discrete,
}


def from_json(block: dict) -> RequestDistribution:
    """Build a distribution from {"kind": ..., "m": ..., "params": {...}}."""
    if not isinstance(block, dict) or "kind" not in block:
        raise ConfigError("distribution block must be an object with a 'kind' field")
    kind = block["kind"]
    if kind not in _KINDS:
        raise ConfigError(f"unknown distribution kind {kind!r}")
    params = dict(block.get("params", {}))
    try:
        if kind == "MultisecretaryBeta":
            return MultisecretaryBeta(beta=params.get("beta", 0.0))
        if kind == "HyperCube":
            return HyperCube(m=block.get("m", params.get("m", 1)))
        if kind == "GeneralizedLinear":
            return GeneralizedLinear(
                m=block.get("m", params.get("m", 1)),
                weights=params["weights"],
                link_x=params["link_x"],
                link_y=params["link_y"],
                noise_half_width=params["noise_half_width"],
                a_low=params.get("a_low", 1.0),
                a_high=params.get("a_high", 2.0),
            )
        if kind == "Discrete":
            return Discrete(params["atoms_a"], params["atoms_r"], params["probs"])
        return _KINDS[kind]()
    except KeyError as exc:
        raise ConfigError(f"distribution params missing field {exc.args[0]!r}") from exc
