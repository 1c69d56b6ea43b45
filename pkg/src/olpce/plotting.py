"""Log-log regret plot rendered to SVG."""

from __future__ import annotations

import csv
import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_report_csv(csv_path: str, out_path: str) -> None:
    """Render mean regret vs T per policy on log-log axes with OLS fit lines."""
    per_policy = defaultdict(lambda: defaultdict(list))
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            per_policy[row["policy"]][int(row["T"])].append(float(row["regret"]))

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for policy, by_t in sorted(per_policy.items()):
        ts = sorted(by_t)
        means = [sum(by_t[t]) / len(by_t[t]) for t in ts]
        ax.plot(ts, means, "o", label=f"{policy} (mean)")
        pos = [(t, mu) for t, mu in zip(ts, means) if mu > 0]
        if len(pos) >= 2:
            xs = [math.log(t) for t, _ in pos]
            ys = [math.log(mu) for _, mu in pos]
            n = len(xs)
            xbar, ybar = sum(xs) / n, sum(ys) / n
            den = sum((x - xbar) ** 2 for x in xs)
            slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / den if den else 0.0
            intercept = ybar - slope * xbar
            fit = [math.exp(intercept) * t ** slope for t in ts]
            ax.plot(ts, fit, "--", label=f"{policy} fit: slope {slope:.3f}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("T")
    ax.set_ylabel("mean hindsight regret")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)
