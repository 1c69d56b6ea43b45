"""Experiment orchestration: Monte Carlo regret sweeps over a T grid,
scaling-law fits, and CSV reporting.

Trials fan out across worker threads (capped by OLP_THREADS) and are reduced
in (policy, T, trial) order, so output is deterministic regardless of
scheduling.  Per-trial seeds are derived by hashing (base seed, T, trial).
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import distributions
from .distributions import RequestDistribution
from .errors import ConfigError, InsufficientData
from .fluid import SolverConfig
from .policy import PolicyConfig, PolicyKind, episode_regret
from .seeding import derive_seed

DEFAULT_T_GRID = (250, 500, 1000, 2000, 4000, 8000, 16000)
DEFAULT_TRIALS = 200

CSV_HEADER = "policy,T,trial,regret,seed"


@dataclass(frozen=True)
class ExperimentConfig:
    distribution: RequestDistribution
    d: np.ndarray | None  # b = floor(d_i * T) per resource, or
    b_per_t: dict | None  # explicit vector per T
    t_grid: tuple
    trials: int
    policies: tuple
    base_seed: str
    policy_cfg: PolicyConfig | None = None
    output_csv: str | None = None
    output_plot: str | None = None

    @staticmethod
    def from_json(blob: dict) -> "ExperimentConfig":
        if not isinstance(blob, dict):
            raise ConfigError("config must be a JSON object")
        for fname in ("distribution",):
            if fname not in blob:
                raise ConfigError(f"config missing required field {fname!r}")
        dist = distributions.from_json(blob["distribution"])

        d = None
        b_per_t = None
        if "d" in blob:
            d = np.atleast_1d(np.asarray(blob["d"], dtype=float))
            if d.shape != (dist.m,):
                raise ConfigError(f"field 'd' must have length m={dist.m}")
        elif "b_per_t" in blob:
            b_per_t = {
                int(k): np.atleast_1d(np.asarray(v, dtype=float))
                for k, v in blob["b_per_t"].items()
            }
        else:
            raise ConfigError("config missing required field 'd' (or 'b_per_t')")

        t_grid = tuple(int(t) for t in blob.get("t_grid", DEFAULT_T_GRID))
        if any(t2 <= t1 for t1, t2 in zip(t_grid, t_grid[1:])) or not t_grid:
            raise ConfigError("field 't_grid' must be strictly increasing and nonempty")
        trials = int(blob.get("trials", DEFAULT_TRIALS))
        if trials < 1:
            raise ConfigError("field 'trials' must be >= 1")
        try:
            policies = tuple(PolicyKind(p) for p in blob.get("policies", ["CE"]))
        except ValueError as exc:
            raise ConfigError(f"field 'policies' contains an unknown policy: {exc}") from exc

        solver = None
        if "solver" in blob:
            s = blob["solver"]
            solver = SolverConfig(
                tol=float(s.get("tol", 1e-8)),
                max_iters=int(s.get("max_iters", 200_000)),
            )
        policy_cfg = PolicyConfig(solver=solver, tie_break=blob.get("tie_break", "smallest"))
        return ExperimentConfig(
            distribution=dist,
            d=d,
            b_per_t=b_per_t,
            t_grid=t_grid,
            trials=trials,
            policies=policies,
            base_seed=str(blob.get("base_seed", "olpce")),
            policy_cfg=policy_cfg,
            output_csv=blob.get("output_csv"),
            output_plot=blob.get("output_plot"),
        )

    def inventory(self, horizon: int) -> np.ndarray:
        if self.d is not None:
            return np.floor(self.d * horizon)
        if horizon not in self.b_per_t:
            raise ConfigError(f"no inventory specified for T={horizon}")
        return self.b_per_t[horizon]


@dataclass(frozen=True)
class RegretReport:
    rows: list  # (policy name, T, trial, regret, seed) in deterministic order
    mean_regret: dict  # (policy, T) -> mean
    std_error: dict  # (policy, T) -> SE from per-trial regrets
    trial_count: int
    t_grid: tuple
    fits: dict = field(default_factory=dict)  # policy -> (slope, intercept, r2)

    def csv_body(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for policy, T, trial, regret, seed in self.rows:
            buf.write(f"{policy},{T},{trial},{regret!r},{seed}\n")
        return buf.getvalue()


def _worker_count() -> int:
    env = os.environ.get("OLP_THREADS", "")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def run_regret_sweep(cfg: ExperimentConfig) -> RegretReport:
    tasks = [
        (policy, T, trial)
        for policy in cfg.policies
        for T in cfg.t_grid
        for trial in range(cfg.trials)
    ]

    def run(task):
        policy, T, trial = task
        seed = derive_seed(cfg.base_seed, T, trial)
        regret = episode_regret(
            cfg.distribution, cfg.inventory(T), T, policy, seed, cfg.policy_cfg
        )
        return policy.value, T, trial, regret, seed

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        rows = list(pool.map(run, tasks))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))

    mean_regret, std_error = {}, {}
    for policy in cfg.policies:
        for T in cfg.t_grid:
            regs = np.array([r[3] for r in rows if r[0] == policy.value and r[1] == T])
            mean_regret[(policy.value, T)] = float(regs.mean())
            std_error[(policy.value, T)] = (
                float(regs.std(ddof=1) / math.sqrt(len(regs))) if len(regs) > 1 else 0.0
            )

    report = RegretReport(
        rows=rows,
        mean_regret=mean_regret,
        std_error=std_error,
        trial_count=cfg.trials,
        t_grid=cfg.t_grid,
    )
    fits = {}
    for policy in cfg.policies:
        try:
            fits[policy.value] = fit_scaling(report, "none", policy.value)
        except InsufficientData:
            pass
    return RegretReport(
        rows=rows,
        mean_regret=mean_regret,
        std_error=std_error,
        trial_count=cfg.trials,
        t_grid=cfg.t_grid,
        fits=fits,
    )


def fit_scaling(report: RegretReport, correction: str = "none",
                policy: str | None = None):
    """OLS of log(mean regret / correction(T)) on log T.

    correction 'none' fits the raw power law; 'log' and 'log2' divide the
    mean regret by log T and (log T)^2 first, for polylog regimes.
    """
    if correction not in ("none", "log", "log2"):
        raise ConfigError(f"unknown correction {correction!r}")
    if policy is None:
        policy = next(iter({p for (p, _) in report.mean_regret}))
    pts = [
        (T, report.mean_regret[(policy, T)])
        for T in report.t_grid
        if (policy, T) in report.mean_regret and report.mean_regret[(policy, T)] > 0
    ]
    if len(pts) < 4:
        raise InsufficientData(
            f"scaling fit needs >= 4 grid points with positive mean regret, got {len(pts)}"
        )
    xs = np.array([math.log(T) for T, _ in pts])
    ys = []
    for T, mean in pts:
        corr = 1.0
        if correction == "log":
            corr = math.log(T)
        elif correction == "log2":
            corr = math.log(T) ** 2
        ys.append(math.log(mean / corr))
    ys = np.array(ys)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
