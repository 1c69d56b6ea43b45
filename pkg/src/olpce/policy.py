"""Online policies and their diagnostics.

The re-solving policy (CE) recomputes the fluid dual price at the normalized
remaining inventory every step and accepts a request iff its reward clears
the price of its consumption.  StaticFluid freezes the price computed once at
d = b/T; AcceptIfFeasible takes everything that fits.

Also implements the regret decomposition (over-/under-acceptance terms
against the per-step empirical dual prices, plus a C0 log T remainder) and
the concentration probe comparing the re-solved price to the empirical one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .distributions import RequestDistribution, a_marginal
from .errors import DimensionMismatch
from .fluid import SolverConfig, _projected_subgradient, default_tol, solve_fluid_dual
from .hindsight import RequestSample, hindsight_value, solve_empirical_dual
from .seeding import make_rng


class PolicyKind(enum.Enum):
    CE = "CE"
    StaticFluid = "StaticFluid"
    AcceptIfFeasible = "AcceptIfFeasible"


@dataclass(frozen=True)
class PolicyConfig:
    """tie_break picks the dual optimum when the optimal set is a segment:
    'smallest' (exact scan / closed form) or 'averaged' (averaged-iterate
    subgradient, which lands mid-segment)."""

    solver: SolverConfig | None = None
    tie_break: str = "smallest"

    def __post_init__(self):
        if self.tie_break not in ("smallest", "averaged"):
            raise ValueError(f"unknown tie_break {self.tie_break!r}")


@dataclass(frozen=True)
class EpisodeTrace:
    A: np.ndarray
    R: np.ndarray
    thresholds: np.ndarray
    accepted: np.ndarray
    b_after: np.ndarray  # shape (T, m)
    b0: np.ndarray
    total_reward: float
    seed: int
    policy: PolicyKind


@dataclass(frozen=True)
class DecompositionReport:
    term_over: float
    term_under: float
    c0_log_bound: float
    per_step: list = field(default_factory=list)


def _solver_cfg(dist, cfg: PolicyConfig | None) -> SolverConfig:
    if cfg is not None and cfg.solver is not None:
        return cfg.solver
    return SolverConfig(tol=default_tol(dist))


def _fluid_price_vector(dist, d, cfg: PolicyConfig | None) -> np.ndarray:
    tie = cfg.tie_break if cfg is not None else "smallest"
    if dist.m == 1 and tie == "averaged":
        return _projected_subgradient(dist, np.atleast_1d(d), _solver_cfg(dist, cfg)).lam
    return solve_fluid_dual(dist, d, _solver_cfg(dist, cfg)).lam


def ce_decision(dist, b_prev, t, T, a_t, r_t, cfg: PolicyConfig | None = None):
    """One step of the re-solving policy: (accept, threshold a_t . lam_t)."""
    b_prev = np.atleast_1d(np.asarray(b_prev, dtype=float))
    a_t = np.atleast_1d(np.asarray(a_t, dtype=float))
    if b_prev.shape != (dist.m,) or a_t.shape != (dist.m,):
        raise DimensionMismatch("b_prev and a_t must have shape (m,)")
    if t < T:
        lam = _fluid_price_vector(dist, b_prev / (T - t), cfg)
    else:
        lam = np.zeros(dist.m)  # last period: accept anything that fits
    threshold = float(a_t @ lam)
    feasible = bool(np.all(a_t <= b_prev))
    return (r_t >= threshold) and feasible, threshold


def run_episode(dist: RequestDistribution, b, T: int, policy: PolicyKind,
                seed: int, cfg: PolicyConfig | None = None) -> EpisodeTrace:
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if b.shape != (dist.m,):
        raise DimensionMismatch(f"b has shape {b.shape}, expected ({dist.m},)")
    rng = make_rng(seed)
    A, R = dist.sample_batch(T, rng)

    tie = cfg.tie_break if cfg is not None else "smallest"
    fast = dist.m == 1 and dist.kind in kernel.FAST_KINDS and tie == "smallest"

    thresholds = np.empty(T)
    accepted = np.zeros(T, dtype=np.uint8)
    b_path = np.empty(T)

    if fast:
        code = kernel.FAST_KINDS[dist.kind]
        beta = getattr(dist, "beta", 0.0)
        a1 = np.ascontiguousarray(A[:, 0])
        if policy is PolicyKind.CE:
            total = kernel.run_ce_m1(code, beta, float(b[0]), T, a1, R,
                                     thresholds, accepted, b_path)
        else:
            lam = 0.0
            if policy is PolicyKind.StaticFluid:
                lam = float(_fluid_price_vector(dist, b / T, cfg)[0])
            total = kernel.run_threshold_m1(lam, float(b[0]), T, a1, R,
                                            thresholds, accepted, b_path)
        return EpisodeTrace(A=A, R=R, thresholds=thresholds, accepted=accepted,
                            b_after=b_path.reshape(-1, 1), b0=b,
                            total_reward=float(total), seed=seed, policy=policy)

    b_after = np.empty((T, dist.m))
    b_cur = b.copy()
    total = 0.0
    lam_static = None
    if policy is PolicyKind.StaticFluid:
        lam_static = _fluid_price_vector(dist, b / T, cfg)
    for t in range(1, T + 1):
        a_t, r_t = A[t - 1], float(R[t - 1])
        if policy is PolicyKind.CE:
            acc, thr = ce_decision(dist, b_cur, t, T, a_t, r_t, cfg)
        elif policy is PolicyKind.StaticFluid:
            thr = float(a_t @ lam_static)
            acc = r_t >= thr and bool(np.all(a_t <= b_cur))
        else:
            thr = 0.0
            acc = bool(np.all(a_t <= b_cur))
        thresholds[t - 1] = thr
        if acc:
            accepted[t - 1] = 1
            b_cur = b_cur - a_t
            total += r_t
        b_after[t - 1] = b_cur
    return EpisodeTrace(A=A, R=R, thresholds=thresholds, accepted=accepted,
                        b_after=b_after, b0=b, total_reward=total, seed=seed,
                        policy=policy)


def episode_regret(dist, b, T, policy: PolicyKind, seed: int,
                   cfg: PolicyConfig | None = None) -> float:
    """Hindsight-optimal value minus policy reward on the same realization."""
    trace = run_episode(dist, b, T, policy, seed, cfg)
    b = np.atleast_1d(np.asarray(b, dtype=float))
    offline = hindsight_value(RequestSample(trace.A, trace.R), b)
    return offline - trace.total_reward


def regret_constant(dist: RequestDistribution) -> float:
    """C0 = 2 (1 + m Amax / Amin) m rmax in the log-remainder bound."""
    bd = dist.bounds
    return 2.0 * (1.0 + dist.m * bd.a_max / bd.a_min) * dist.m * bd.r_max


def _tail_dual(A, R, t, b_vec):
    """Empirical dual price of the to-go problem over requests t+1..T."""
    if t >= len(R):
        return np.zeros(A.shape[1])
    tail = RequestSample(A[t:], R[t:])
    return solve_empirical_dual(tail, np.clip(b_vec, 0.0, None)).lam


def compute_decomposition(dist, trace: EpisodeTrace,
                          cfg: PolicyConfig | None = None) -> DecompositionReport:
    """Over-/under-acceptance regret terms against per-step empirical prices.

    At each step the realized threshold a_t . lam_t is compared with the
    empirical dual prices of the to-go problem at capacity b_{t-1} (lam*_t)
    and, when accepting t is feasible, at b_{t-1} - a_t (lam-bar*_t):

    * over:  accepted below the post-acceptance empirical price;
    * under: rejected above the pre-acceptance empirical price.
    """
    A, R = trace.A, trace.R
    T = len(R)
    over = under = 0.0
    per_step = []
    b_prev = trace.b0.astype(float)
    for t in range(1, T + 1):
        a_t, r_t = A[t - 1], float(R[t - 1])
        thr = float(trace.thresholds[t - 1])
        o = u = 0.0
        lam_star = _tail_dual(A, R, t, b_prev)
        price_star = float(a_t @ lam_star)
        if bool(np.all(a_t <= b_prev)):
            lam_bar = _tail_dual(A, R, t, b_prev - a_t)
            price_bar = float(a_t @ lam_bar)
            if thr <= r_t <= price_bar:
                o = price_bar - r_t
        if price_star <= r_t <= thr:
            u = r_t - price_star
        over += o
        under += u
        per_step.append((t, o, u))
        b_prev = trace.b_after[t - 1]
    return DecompositionReport(
        term_over=over,
        term_under=under,
        c0_log_bound=regret_constant(dist) * math.log(T),
        per_step=per_step,
    )


def concentration_probe(dist, b, T, seed, cfg: PolicyConfig | None = None):
    """Per-step deviation of the re-solved price from the empirical one.

    Runs one CE episode and returns arrays (t, measured, envelope) where

        measured_t = E_a[(F(a.lam_t) - F(a.lam*_t)) (a.lam_t - a.lam*_t)]

    (nonnegative since the CDF is nondecreasing) and the envelope is
    (log(T-t)/(T-t))^((2+beta)/(2+2beta)) with the family's declared beta.
    """
    trace = run_episode(dist, b, T, PolicyKind.CE, seed, cfg)
    A, R = trace.A, trace.R
    nodes, weights = a_marginal(dist)
    beta = dist.holder.beta if dist.holder is not None else 0.0
    exponent = (2.0 + beta) / (2.0 + 2.0 * beta)

    ts = np.arange(1, T)
    measured = np.empty(T - 1)
    envelope = np.empty(T - 1)
    b_prev = trace.b0.astype(float)
    for t in range(1, T):
        lam_tilde = _threshold_price(trace, t, dist.m)
        lam_star = _tail_dual(A, R, t, b_prev)
        acc = 0.0
        for a_node, w in zip(nodes, weights):
            z1 = float(a_node @ lam_tilde)
            z2 = float(a_node @ lam_star)
            acc += w * (dist.reward_cdf(a_node, z1) - dist.reward_cdf(a_node, z2)) * (z1 - z2)
        measured[t - 1] = acc
        rem = T - t
        envelope[t - 1] = (math.log(rem) / rem) ** exponent if rem >= 2 else 0.0
        b_prev = trace.b_after[t - 1]
    return ts, measured, envelope


def _threshold_price(trace: EpisodeTrace, t: int, m: int) -> np.ndarray:
    """Recover lam_t from the recorded threshold (scalar resource only)."""
    if m != 1:
        raise DimensionMismatch("the concentration probe supports m = 1 only")
    a = float(trace.A[t - 1, 0])
    return np.array([trace.thresholds[t - 1] / a])
